//! Multivariate polynomials over complex `f64` coefficients, polynomial
//! systems, generic linear slices, and the randomization (squaring-up) map.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

use crate::rngutil;

pub type C64 = Complex64;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("empty matrix")]
    EmptyMatrix,
    #[error("slice row count {k} exceeds ambient dimension {n}")]
    SliceRows { k: usize, n: usize },
    #[error("tolerance must be positive")]
    BadTolerance,
}

/// Exponent vector of a single monomial; the vector length is the ambient
/// variable count.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial { exps }
    }

    pub fn one(nvars: usize) -> Self {
        Monomial { exps: vec![0; nvars] }
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        let mut exps = vec![0; nvars];
        exps[idx] = 1;
        Monomial { exps }
    }

    pub fn nvars(&self) -> usize {
        self.exps.len()
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.exps[i]
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn is_constant(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.nvars(), other.nvars());
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `other / self`, if the quotient is a monomial.
    pub fn quotient_into(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        Some(Monomial {
            exps: other
                .exps
                .iter()
                .zip(&self.exps)
                .map(|(b, a)| b - a)
                .collect(),
        })
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| *a.max(b))
                .collect(),
        }
    }

    pub fn coprime_with(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Bitmask of variables with nonzero exponent (ambient dimension <= 64).
    pub fn support_mask(&self) -> u64 {
        let mut m = 0u64;
        for (i, &e) in self.exps.iter().enumerate() {
            if e > 0 {
                m |= 1 << i;
            }
        }
        m
    }

    /// The same monomial viewed in an ambient space with `extra` appended
    /// variables.
    pub fn extended(&self, extra: usize) -> Monomial {
        let mut exps = self.exps.clone();
        exps.extend(std::iter::repeat(0).take(extra));
        Monomial { exps }
    }
}

/// Graded lexicographic order; this is the storage and printing order.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Graded reverse lexicographic comparison, used by the exact layer.
pub fn cmp_grevlex(a: &Monomial, b: &Monomial) -> Ordering {
    let da = a.total_degree();
    let db = b.total_degree();
    if da != db {
        return da.cmp(&db);
    }
    for i in (0..a.exps.len()).rev() {
        match a.exps[i].cmp(&b.exps[i]) {
            Ordering::Equal => {}
            // the monomial with the smaller trailing exponent is larger
            Ordering::Less => return Ordering::Greater,
            Ordering::Greater => return Ordering::Less,
        }
    }
    Ordering::Equal
}

/// A multivariate polynomial with complex coefficients. Zero coefficients
/// are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, C64>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: C64) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn variable(nvars: usize, idx: usize) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(Monomial::var(nvars, idx), C64::new(1.0, 0.0));
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, C64)>) -> Self {
        let mut p = Poly::zero(nvars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; zero for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: C64) {
        debug_assert_eq!(m.nvars(), self.nvars);
        if c == C64::new(0.0, 0.0) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(e) => {
                let s = *e.get() + c;
                if s == C64::new(0.0, 0.0) {
                    e.remove();
                } else {
                    *e.into_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -*c);
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -*c)).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Poly {
        if s == C64::new(0.0, 0.0) {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), *c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), *ca * *cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::constant(self.nvars, C64::new(1.0, 0.0));
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Partial derivative with respect to variable `idx`.
    pub fn diff(&self, idx: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exp(idx);
            if e == 0 {
                continue;
            }
            let mut exps = m.exps().to_vec();
            exps[idx] -= 1;
            out.add_term(Monomial::new(exps), *c * C64::new(e as f64, 0.0));
        }
        out
    }

    pub fn eval(&self, pt: &[C64]) -> C64 {
        debug_assert_eq!(pt.len(), self.nvars);
        let mut acc = C64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = *c;
            for (i, &e) in m.exps().iter().enumerate() {
                if e > 0 {
                    t *= pt[i].powu(e);
                }
            }
            acc += t;
        }
        acc
    }

    /// The same polynomial viewed in an ambient space with `extra` appended
    /// variables.
    pub fn extended(&self, extra: usize) -> Poly {
        Poly {
            nvars: self.nvars + extra,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.extended(extra), *c))
                .collect(),
        }
    }
}

/// An ordered list of polynomials sharing one ambient variable space.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySystem {
    nvars: usize,
    polys: Vec<Poly>,
}

impl PolySystem {
    pub fn new(nvars: usize, polys: Vec<Poly>) -> Self {
        assert!(polys.iter().all(|p| p.nvars() == nvars));
        PolySystem { nvars, polys }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn npolys(&self) -> usize {
        self.polys.len()
    }

    pub fn polys(&self) -> &[Poly] {
        &self.polys
    }

    pub fn is_square(&self) -> bool {
        self.nvars == self.polys.len()
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.polys.iter().map(|p| p.degree()).collect()
    }

    pub fn max_degree(&self) -> u32 {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    pub fn evaluate(&self, pt: &[C64]) -> Result<Vec<C64>, PolyError> {
        if pt.len() != self.nvars {
            return Err(PolyError::DimensionMismatch { expected: self.nvars, got: pt.len() });
        }
        Ok(self.eval_unchecked(pt))
    }

    pub fn eval_unchecked(&self, pt: &[C64]) -> Vec<C64> {
        self.polys.iter().map(|p| p.eval(pt)).collect()
    }

    pub fn eval_into(&self, pt: &[C64], out: &mut [C64]) {
        for (o, p) in out.iter_mut().zip(&self.polys) {
            *o = p.eval(pt);
        }
    }

    /// All first partial derivatives, row k holding the gradient of
    /// polynomial k.
    pub fn jacobian_polys(&self) -> Vec<Vec<Poly>> {
        self.polys
            .iter()
            .map(|p| (0..self.nvars).map(|j| p.diff(j)).collect())
            .collect()
    }

    pub fn jacobian_at(&self, pt: &[C64]) -> Result<DMatrix<C64>, PolyError> {
        if pt.len() != self.nvars {
            return Err(PolyError::DimensionMismatch { expected: self.nvars, got: pt.len() });
        }
        let mut m = DMatrix::zeros(self.polys.len(), self.nvars);
        for (k, p) in self.polys.iter().enumerate() {
            for j in 0..self.nvars {
                m[(k, j)] = p.diff(j).eval(pt);
            }
        }
        Ok(m)
    }

    /// The same system viewed in an ambient space with `extra` appended
    /// variables.
    pub fn extended(&self, extra: usize) -> PolySystem {
        PolySystem {
            nvars: self.nvars + extra,
            polys: self.polys.iter().map(|p| p.extended(extra)).collect(),
        }
    }
}

/// Number of singular values above `tol` times the largest one.
pub fn numeric_rank(m: &DMatrix<C64>, tol: f64) -> Result<usize, PolyError> {
    if tol <= 0.0 {
        return Err(PolyError::BadTolerance);
    }
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(PolyError::EmptyMatrix);
    }
    let sv = m.clone().singular_values();
    let largest = sv.iter().cloned().fold(0.0f64, f64::max);
    if largest == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > tol * largest).count())
}

/// Generic linear forms `l_j(x) = c_j0 + c_j1 x_1 + ... + c_jN x_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSlice {
    nvars: usize,
    coeffs: Vec<Vec<C64>>,
    consts: Vec<C64>,
}

impl LinearSlice {
    pub fn new(nvars: usize, coeffs: Vec<Vec<C64>>, consts: Vec<C64>) -> Self {
        assert_eq!(coeffs.len(), consts.len());
        assert!(coeffs.iter().all(|r| r.len() == nvars));
        LinearSlice { nvars, coeffs, consts }
    }

    pub fn empty(nvars: usize) -> Self {
        LinearSlice { nvars, coeffs: vec![], consts: vec![] }
    }

    pub fn rows(&self) -> usize {
        self.coeffs.len()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn coeff(&self, row: usize, var: usize) -> C64 {
        self.coeffs[row][var]
    }

    pub fn constant(&self, row: usize) -> C64 {
        self.consts[row]
    }

    pub fn eval_row(&self, row: usize, x: &[C64]) -> C64 {
        let mut acc = self.consts[row];
        for (c, v) in self.coeffs[row].iter().zip(x) {
            acc += c * v;
        }
        acc
    }

    /// Row `row` as a degree-one polynomial in an ambient space of
    /// `nvars_total >= nvars` variables.
    pub fn row_poly(&self, row: usize, nvars_total: usize) -> Poly {
        let mut p = Poly::constant(nvars_total, self.consts[row]);
        for (j, c) in self.coeffs[row].iter().enumerate() {
            p.add_term(Monomial::var(nvars_total, j), *c);
        }
        p
    }

    /// The slice made of the first `k` rows.
    pub fn prefix(&self, k: usize) -> LinearSlice {
        LinearSlice {
            nvars: self.nvars,
            coeffs: self.coeffs[..k].to_vec(),
            consts: self.consts[..k].to_vec(),
        }
    }

    /// A copy with row `row`'s constant replaced.
    pub fn with_constant(&self, row: usize, c: C64) -> LinearSlice {
        let mut s = self.clone();
        s.consts[row] = c;
        s
    }

    pub fn coeff_matrix(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows(), self.nvars, |i, j| self.coeffs[i][j])
    }
}

/// Full-rank `k x N` slice with entries drawn from the unit annulus,
/// reproducible from the seed.
pub fn random_slice(k: usize, nvars: usize, seed: u64) -> Result<LinearSlice, PolyError> {
    if k > nvars {
        return Err(PolyError::SliceRows { k, n: nvars });
    }
    let mut rng = rngutil::stream(seed, rngutil::PURPOSE_SLICE);
    if k == 0 {
        return Ok(LinearSlice::empty(nvars));
    }
    loop {
        let coeffs: Vec<Vec<C64>> = (0..k)
            .map(|_| (0..nvars).map(|_| rngutil::annulus(&mut rng)).collect())
            .collect();
        let consts: Vec<C64> = (0..k).map(|_| rngutil::annulus(&mut rng)).collect();
        let s = LinearSlice::new(nvars, coeffs, consts);
        if numeric_rank(&s.coeff_matrix(), 1e-12)? == k {
            return Ok(s);
        }
    }
}

/// The reduction map taking `n` input polynomials to `N` generic linear
/// combinations.
#[derive(Clone, Debug)]
pub struct RandomizationMatrix {
    entries: Vec<Vec<C64>>,
    pub seed: u64,
}

impl RandomizationMatrix {
    pub fn identity(n: usize) -> Self {
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
                    .collect()
            })
            .collect();
        RandomizationMatrix { entries, seed: 0 }
    }

    /// Random `nrows x ncols` matrix with annulus entries, full rank
    /// `min(nrows, ncols)`.
    pub fn random(nrows: usize, ncols: usize, seed: u64) -> Self {
        let mut rng = rngutil::stream(seed, rngutil::PURPOSE_LAMBDA);
        loop {
            let entries: Vec<Vec<C64>> = (0..nrows)
                .map(|_| (0..ncols).map(|_| rngutil::annulus(&mut rng)).collect())
                .collect();
            let m = DMatrix::from_fn(nrows, ncols, |i, j| entries[i][j]);
            if numeric_rank(&m, 1e-12).unwrap_or(0) == nrows.min(ncols) {
                return RandomizationMatrix { entries, seed };
            }
        }
    }

    pub fn nrows(&self) -> usize {
        self.entries.len()
    }

    pub fn ncols(&self) -> usize {
        self.entries.first().map_or(0, |r| r.len())
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.entries[i][j]
    }
}

/// `f = Lambda . F`: every row of the result is a generic linear combination
/// of the input polynomials, so `V(F)` is contained in `V(f)`.
pub fn square_up(f: &PolySystem, lambda: &RandomizationMatrix) -> Result<PolySystem, PolyError> {
    if lambda.ncols() != f.npolys() {
        return Err(PolyError::DimensionMismatch { expected: f.npolys(), got: lambda.ncols() });
    }
    let rows = (0..lambda.nrows())
        .map(|k| {
            let mut acc = Poly::zero(f.nvars());
            for (j, p) in f.polys().iter().enumerate() {
                acc = acc.add(&p.scale(lambda.entry(k, j)));
            }
            acc
        })
        .collect();
    Ok(PolySystem::new(f.nvars(), rows))
}

fn write_f64(out: &mut String, v: f64) {
    if v == v.trunc() && v.abs() < 1e15 {
        let _ = write!(out, "{}", v as i64);
    } else {
        let _ = write!(out, "{}", v);
    }
}

fn write_coeff(out: &mut String, c: C64, lead_unit_ok: bool) -> bool {
    // Returns true when a leading "*" separator is needed before the monomial.
    if c.im == 0.0 {
        if lead_unit_ok && c.re == 1.0 {
            return false;
        }
        write_f64(out, c.re);
        true
    } else if c.re == 0.0 {
        if c.im != 1.0 {
            write_f64(out, c.im);
            out.push('*');
        }
        out.push('i');
        true
    } else {
        out.push('(');
        write_f64(out, c.re);
        if c.im > 0.0 || c.im.is_nan() {
            out.push('+');
        } else {
            out.push('-');
        }
        let im = c.im.abs();
        if im != 1.0 {
            write_f64(out, im);
            out.push('*');
        }
        out.push('i');
        out.push(')');
        true
    }
}

/// Render one polynomial in the input grammar, highest graded-lex term first.
pub fn print_poly(p: &Poly, names: &[String]) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (idx, (m, c)) in p.terms().collect::<Vec<_>>().into_iter().rev().enumerate() {
        let mut c = *c;
        if idx > 0 {
            // fold a real negative coefficient into the separator
            if c.im == 0.0 && c.re < 0.0 {
                out.push_str(" - ");
                c = -c;
            } else {
                out.push_str(" + ");
            }
        }
        let is_const = m.is_constant();
        let starred = write_coeff(&mut out, c, !is_const);
        if is_const {
            if !starred {
                out.push('1');
            }
            continue;
        }
        let mut first = !starred;
        for (j, &e) in m.exps().iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                out.push('*');
            }
            first = false;
            out.push_str(&names[j]);
            if e > 1 {
                let _ = write!(out, "^{}", e);
            }
        }
    }
    out
}

/// Render a whole system in the input grammar, one polynomial per line.
pub fn print_system(sys: &PolySystem, names: &[String]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "vars {};", names.join(","));
    for p in sys.polys() {
        let _ = writeln!(out, "{};", print_poly(p, names));
    }
    out
}

/// Sample a point with annulus coordinates, used as the "generic point" for
/// Jacobian rank evaluation.
pub fn random_point(nvars: usize, seed: u64) -> Vec<C64> {
    let mut rng = rngutil::stream(seed, rngutil::PURPOSE_RANK_POINT);
    (0..nvars).map(|_| rngutil::annulus(&mut rng)).collect()
}

pub fn annulus_vector(nvars: usize, rng: &mut impl Rng) -> Vec<C64> {
    (0..nvars).map(|_| rngutil::annulus(rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn monomial_orders() {
        let a = Monomial::new(vec![2, 0, 0]);
        let b = Monomial::new(vec![0, 1, 0]);
        assert!(a > b); // grlex: degree wins
        let x2y = Monomial::new(vec![2, 1, 0]);
        let xz2 = Monomial::new(vec![1, 0, 2]);
        // same degree; grevlex prefers the one with smaller trailing exponent
        assert_eq!(cmp_grevlex(&x2y, &xz2), Ordering::Greater);
    }

    #[test]
    fn poly_arithmetic_and_eval() {
        // (x + y)^2 = x^2 + 2xy + y^2
        let x = Poly::variable(2, 0);
        let y = Poly::variable(2, 1);
        let p = x.add(&y).pow(2);
        assert_eq!(p.num_terms(), 3);
        let v = p.eval(&[c(2.0, 0.0), c(3.0, 0.0)]);
        assert_eq!(v, c(25.0, 0.0));
    }

    #[test]
    fn zero_coefficients_pruned() {
        let x = Poly::variable(1, 0);
        let p = x.sub(&x);
        assert!(p.is_zero());
    }

    #[test]
    fn diff_matches_monomial_rule() {
        // f = x^2 - y, jacobian at (1,1) is [2, -1]
        let x = Poly::variable(2, 0);
        let y = Poly::variable(2, 1);
        let f = x.pow(2).sub(&y);
        let sys = PolySystem::new(2, vec![f]);
        let j = sys.jacobian_at(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(j[(0, 0)], c(2.0, 0.0));
        assert_eq!(j[(0, 1)], c(-1.0, 0.0));
    }

    #[test]
    fn jacobian_of_product_system() {
        // f = {x + y, x*y} at origin
        let x = Poly::variable(2, 0);
        let y = Poly::variable(2, 1);
        let sys = PolySystem::new(2, vec![x.add(&y), x.mul(&y)]);
        let j = sys.jacobian_at(&[c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(j[(0, 0)], c(1.0, 0.0));
        assert_eq!(j[(0, 1)], c(1.0, 0.0));
        assert_eq!(j[(1, 0)], c(0.0, 0.0));
        assert_eq!(j[(1, 1)], c(0.0, 0.0));
    }

    #[test]
    fn rank_of_simple_matrices() {
        let id = DMatrix::<C64>::identity(3, 3);
        assert_eq!(numeric_rank(&id, 1e-12).unwrap(), 3);
        let ones = DMatrix::from_element(2, 2, c(1.0, 0.0));
        assert_eq!(numeric_rank(&ones, 1e-12).unwrap(), 1);
        assert!(numeric_rank(&DMatrix::<C64>::zeros(0, 0), 1e-12).is_err());
    }

    #[test]
    fn square_up_identity_and_duplication() {
        let x = Poly::variable(2, 0);
        let y = Poly::variable(2, 1);
        let g = x.pow(2).sub(&y);
        let f = PolySystem::new(2, vec![g.clone()]);
        // n = 1, N = 2: two scalar multiples of g
        let lam = RandomizationMatrix::random(2, 1, 7);
        let sq = square_up(&f, &lam).unwrap();
        assert_eq!(sq.npolys(), 2);
        let pt = [c(1.5, 0.25), c(0.0, 0.0)];
        let gv = g.eval(&pt);
        let sv = sq.eval_unchecked(&pt);
        assert!((sv[0] - lam.entry(0, 0) * gv).norm() < 1e-12);

        let sys2 = PolySystem::new(2, vec![x.clone(), y.clone()]);
        let id = RandomizationMatrix::identity(2);
        assert_eq!(square_up(&sys2, &id).unwrap(), sys2);
    }

    #[test]
    fn square_up_keeps_common_zeros() {
        // F = {x-1, y-2, x+y-3} vanishes at (1,2); so must Lambda.F
        let x = Poly::variable(2, 0);
        let y = Poly::variable(2, 1);
        let one = Poly::constant(2, c(1.0, 0.0));
        let f = PolySystem::new(
            2,
            vec![
                x.sub(&one),
                y.sub(&one.scale(c(2.0, 0.0))),
                x.add(&y).sub(&one.scale(c(3.0, 0.0))),
            ],
        );
        let lam = RandomizationMatrix::random(2, 3, 99);
        let sq = square_up(&f, &lam).unwrap();
        let v = sq.eval_unchecked(&[c(1.0, 0.0), c(2.0, 0.0)]);
        assert!(v.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn random_slice_reproducible_and_full_rank() {
        let a = random_slice(1, 3, 42).unwrap();
        let b = random_slice(1, 3, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(numeric_rank(&a.coeff_matrix(), 1e-12).unwrap(), 1);
        assert!(random_slice(4, 3, 1).is_err());
    }

    #[test]
    fn slice_row_poly_matches_eval() {
        let s = random_slice(2, 3, 5).unwrap();
        let pt = random_point(3, 11);
        let p = s.row_poly(1, 3);
        assert!((p.eval(&pt) - s.eval_row(1, &pt)).norm() < 1e-13);
    }
}
