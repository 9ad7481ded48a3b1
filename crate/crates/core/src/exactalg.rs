//! Exact rational (and Gaussian rational) arithmetic, Buchberger's
//! algorithm with the product and chain criteria, combinatorial ideal
//! dimension, and the shifted-ideal local dimension bound.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

use crate::budget::Budget;
use crate::polysys::{cmp_grevlex, Monomial};

pub type Rat = BigRational;

#[derive(Debug, Error)]
pub enum ExactError {
    #[error("generator pair budget exhausted after {pairs} pairs")]
    Budget { pairs: usize },
    #[error("time budget exhausted during basis computation")]
    Deadline,
    #[error("non-finite coordinate cannot be rationalized")]
    NonFinite,
    #[error("system has inexact (decimal) coefficients; exact shift refused")]
    InexactCoefficients,
    #[error("square system required, got {npolys} polynomials in {nvars} variables")]
    NotSquare { npolys: usize, nvars: usize },
    #[error("empty generator list")]
    EmptyGenerators,
}

/// An element of Q(i): a pair of exact rationals.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GaussRat {
    pub re: Rat,
    pub im: Rat,
}

impl GaussRat {
    pub fn zero() -> Self {
        GaussRat { re: Rat::zero(), im: Rat::zero() }
    }

    pub fn one() -> Self {
        GaussRat { re: Rat::one(), im: Rat::zero() }
    }

    pub fn i() -> Self {
        GaussRat { re: Rat::zero(), im: Rat::one() }
    }

    pub fn from_rat(re: Rat) -> Self {
        GaussRat { re, im: Rat::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        GaussRat::from_rat(Rat::from_integer(BigInt::from(n)))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn add(&self, o: &GaussRat) -> GaussRat {
        GaussRat { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &GaussRat) -> GaussRat {
        GaussRat { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn neg(&self) -> GaussRat {
        GaussRat { re: -self.re.clone(), im: -self.im.clone() }
    }

    pub fn mul(&self, o: &GaussRat) -> GaussRat {
        GaussRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    pub fn inv(&self) -> GaussRat {
        let n = &self.re * &self.re + &self.im * &self.im;
        GaussRat { re: &self.re / &n, im: -(&self.im / &n) }
    }

    pub fn div(&self, o: &GaussRat) -> GaussRat {
        self.mul(&o.inv())
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}*i", self.im)
        } else {
            write!(f, "({}+{}*i)", self.re, self.im)
        }
    }
}

fn rat_to_f64(r: &Rat) -> f64 {
    // num's BigRational has no direct f64 conversion for huge values; go
    // through a scaled quotient to keep precision.
    let num = r.numer();
    let den = r.denom();
    let nf = bigint_to_f64(num);
    let df = bigint_to_f64(den);
    if df.is_finite() && nf.is_finite() && df != 0.0 {
        nf / df
    } else {
        // fall back to partial quotients
        let (q, rem) = (num / den, num % den);
        bigint_to_f64(&q) + bigint_to_f64(&rem) / bigint_to_f64(den)
    }
}

fn bigint_to_f64(n: &BigInt) -> f64 {
    use num::ToPrimitive;
    n.to_f64().unwrap_or(f64::INFINITY)
}

/// `(round(re*den) + i round(im*den)) / den`.
pub fn rationalize(x: Complex64, den: &BigInt) -> Result<GaussRat, ExactError> {
    if !x.re.is_finite() || !x.im.is_finite() {
        return Err(ExactError::NonFinite);
    }
    let scale = |v: f64| -> Rat {
        let num = BigInt::from((v * bigint_to_f64(den)).round() as i128);
        Rat::new(num, den.clone())
    };
    Ok(GaussRat { re: scale(x.re), im: scale(x.im) })
}

pub const DEFAULT_RATIONALIZE_DEN: u64 = 1_000_000_000_000;

/// Polynomial with Gaussian rational coefficients; terms sorted leading
/// first in degrevlex, zeros never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactPoly {
    nvars: usize,
    terms: Vec<(Monomial, GaussRat)>,
}

impl ExactPoly {
    pub fn zero(nvars: usize) -> Self {
        ExactPoly { nvars, terms: vec![] }
    }

    pub fn constant(nvars: usize, c: GaussRat) -> Self {
        let mut p = ExactPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.push((Monomial::one(nvars), c));
        }
        p
    }

    pub fn variable(nvars: usize, idx: usize) -> Self {
        ExactPoly { nvars, terms: vec![(Monomial::var(nvars, idx), GaussRat::one())] }
    }

    pub fn from_terms(nvars: usize, terms: Vec<(Monomial, GaussRat)>) -> Self {
        let mut p = ExactPoly::zero(nvars);
        for (m, c) in terms {
            p = p.add(&ExactPoly { nvars, terms: if c.is_zero() { vec![] } else { vec![(m, c)] } });
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(Monomial, GaussRat)] {
        &self.terms
    }

    pub fn leading(&self) -> Option<&(Monomial, GaussRat)> {
        self.terms.first()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.total_degree()).max().unwrap_or(0)
    }

    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.is_real())
    }

    /// Merge-add; both operands sorted descending in degrevlex.
    pub fn add(&self, other: &ExactPoly) -> ExactPoly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            match cmp_grevlex(&self.terms[i].0, &other.terms[j].0) {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(other.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = self.terms[i].1.add(&other.terms[j].1);
                    if !c.is_zero() {
                        out.push((self.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        ExactPoly { nvars: self.nvars, terms: out }
    }

    pub fn sub(&self, other: &ExactPoly) -> ExactPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ExactPoly {
        ExactPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    pub fn scale(&self, s: &GaussRat) -> ExactPoly {
        if s.is_zero() {
            return ExactPoly::zero(self.nvars);
        }
        ExactPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.mul(s))).collect(),
        }
    }

    /// `self - (c * m) * other`, the division step.
    pub fn sub_mul_term(&self, c: &GaussRat, m: &Monomial, other: &ExactPoly) -> ExactPoly {
        let shifted = ExactPoly {
            nvars: self.nvars,
            terms: other
                .terms
                .iter()
                .map(|(mm, cc)| (mm.mul(m), cc.mul(c).neg()))
                .collect(),
        };
        self.add(&shifted)
    }

    pub fn mul(&self, other: &ExactPoly) -> ExactPoly {
        let mut acc = ExactPoly::zero(self.nvars);
        for (m, c) in &self.terms {
            acc = acc.add(&ExactPoly {
                nvars: self.nvars,
                terms: other.terms.iter().map(|(mm, cc)| (mm.mul(m), cc.mul(c))).collect(),
            });
        }
        acc
    }

    pub fn pow(&self, e: u32) -> ExactPoly {
        let mut out = ExactPoly::constant(self.nvars, GaussRat::one());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    pub fn eval(&self, pt: &[GaussRat]) -> GaussRat {
        let mut acc = GaussRat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exps().iter().enumerate() {
                for _ in 0..e {
                    t = t.mul(&pt[i]);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Scale so all coefficients become integers with no common factor and
    /// the leading coefficient is "positive" (re > 0, or re = 0 and im > 0).
    pub fn normalize(&self) -> ExactPoly {
        if self.terms.is_empty() {
            return self.clone();
        }
        let mut den_lcm = BigInt::one();
        for (_, c) in &self.terms {
            den_lcm = num::integer::lcm(den_lcm.clone(), c.re.denom().clone());
            den_lcm = num::integer::lcm(den_lcm, c.im.denom().clone());
        }
        let mut num_gcd = BigInt::zero();
        for (_, c) in &self.terms {
            let sre = (&c.re * Rat::from_integer(den_lcm.clone())).to_integer();
            let sim = (&c.im * Rat::from_integer(den_lcm.clone())).to_integer();
            num_gcd = num::integer::gcd(num_gcd, sre);
            num_gcd = num::integer::gcd(num_gcd, sim);
        }
        if num_gcd.is_zero() {
            num_gcd = BigInt::one();
        }
        let mut factor = Rat::new(den_lcm, num_gcd);
        let lead = &self.terms[0].1;
        let lead_key = if lead.re.is_zero() { &lead.im } else { &lead.re };
        if (lead_key * &factor).is_negative() {
            factor = -factor;
        }
        let g = GaussRat::from_rat(factor);
        self.scale(&g)
    }

    pub fn to_numeric(&self) -> crate::polysys::Poly {
        crate::polysys::Poly::from_terms(
            self.nvars,
            self.terms.iter().map(|(m, c)| (m.clone(), c.to_c64())),
        )
    }
}

/// A list of exact polynomials sharing one variable space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactSystem {
    pub nvars: usize,
    pub polys: Vec<ExactPoly>,
}

impl ExactSystem {
    pub fn new(nvars: usize, polys: Vec<ExactPoly>) -> Self {
        assert!(polys.iter().all(|p| p.nvars() == nvars));
        ExactSystem { nvars, polys }
    }

    pub fn eval(&self, pt: &[GaussRat]) -> Vec<GaussRat> {
        self.polys.iter().map(|p| p.eval(pt)).collect()
    }

    pub fn is_real(&self) -> bool {
        self.polys.iter().all(|p| p.is_real())
    }
}

/// Reduced Gröbner basis in degrevlex, canonically normalized and sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroebnerBasis {
    nvars: usize,
    gens: Vec<ExactPoly>,
}

impl GroebnerBasis {
    pub fn gens(&self) -> &[ExactPoly] {
        &self.gens
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.gens.iter().any(|g| g.leading().is_some_and(|(m, _)| m.is_constant()))
    }
}

/// Fully reduce `p` modulo `basis`.
fn reduce(p: &ExactPoly, basis: &[ExactPoly]) -> ExactPoly {
    let mut rem = ExactPoly::zero(p.nvars());
    let mut cur = p.clone();
    'outer: while let Some((lm, lc)) = cur.leading().cloned() {
        for b in basis {
            if b.is_zero() {
                continue;
            }
            let (bm, bc) = b.leading().unwrap();
            if let Some(q) = bm.quotient_into(&lm) {
                let c = lc.div(bc);
                cur = cur.sub_mul_term(&c, &q, b);
                continue 'outer;
            }
        }
        // leading term irreducible: move it to the remainder
        rem = rem.add(&ExactPoly { nvars: p.nvars(), terms: vec![(lm.clone(), lc)] });
        cur.terms.remove(0);
    }
    rem
}

fn s_polynomial(f: &ExactPoly, g: &ExactPoly) -> ExactPoly {
    let (fm, fc) = f.leading().unwrap();
    let (gm, gc) = g.leading().unwrap();
    let l = fm.lcm(gm);
    let uf = fm.quotient_into(&l).unwrap();
    let ug = gm.quotient_into(&l).unwrap();
    let a = ExactPoly {
        nvars: f.nvars(),
        terms: f.terms.iter().map(|(m, c)| (m.mul(&uf), c.div(fc))).collect(),
    };
    let b = ExactPoly {
        nvars: g.nvars(),
        terms: g.terms.iter().map(|(m, c)| (m.mul(&ug), c.div(gc))).collect(),
    };
    a.sub(&b)
}

#[derive(Clone, PartialEq, Eq)]
struct Pair {
    deg: u32,
    i: usize,
    j: usize,
    lcm: Monomial,
}

impl Ord for Pair {
    fn cmp(&self, other: &Self) -> Ordering {
        // normal selection strategy: smallest lcm degree first
        self.deg
            .cmp(&other.deg)
            .then_with(|| cmp_grevlex(&self.lcm, &other.lcm))
            .then_with(|| (self.i, self.j).cmp(&(other.i, other.j)))
    }
}

impl PartialOrd for Pair {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Pair-count cap; aborts pathological runs with a report of how far they got.
pub const DEFAULT_PAIR_BUDGET: usize = 2_000_000;

/// Buchberger's algorithm with the product and chain criteria, returning a
/// reduced basis that is independent of generator order.
pub fn buchberger(gens: &[ExactPoly], budget: &Budget) -> Result<GroebnerBasis, ExactError> {
    buchberger_with_budget(gens, DEFAULT_PAIR_BUDGET, budget)
}

pub fn buchberger_with_budget(
    gens: &[ExactPoly],
    pair_budget: usize,
    budget: &Budget,
) -> Result<GroebnerBasis, ExactError> {
    if gens.is_empty() {
        return Err(ExactError::EmptyGenerators);
    }
    let nvars = gens[0].nvars();
    let mut basis: Vec<ExactPoly> = Vec::new();
    let mut pairs: BTreeSet<Pair> = BTreeSet::new();

    let mut sorted: Vec<ExactPoly> = gens.iter().filter(|g| !g.is_zero()).cloned().collect();
    // insertion order must not matter; fix it up front
    sorted.sort_by(|a, b| cmp_grevlex(&a.leading().unwrap().0, &b.leading().unwrap().0));
    for g in sorted {
        let r = reduce(&g, &basis);
        add_generator(&mut basis, &mut pairs, r.normalize());
    }

    let mut processed = 0usize;
    while let Some(pair) = pairs.pop_first() {
        processed += 1;
        if processed > pair_budget {
            return Err(ExactError::Budget { pairs: processed });
        }
        if processed % 64 == 0 && budget.expired() {
            return Err(ExactError::Deadline);
        }
        let s = s_polynomial(&basis[pair.i], &basis[pair.j]);
        let r = reduce(&s, &basis);
        if !r.is_zero() {
            add_generator(&mut basis, &mut pairs, r.normalize());
        }
    }

    // minimalize: drop members whose leading term another member divides
    let mut keep: Vec<bool> = vec![true; basis.len()];
    for i in 0..basis.len() {
        if !keep[i] {
            continue;
        }
        for j in 0..basis.len() {
            if i == j || !keep[j] {
                continue;
            }
            let (mi, _) = basis[i].leading().unwrap();
            let (mj, _) = basis[j].leading().unwrap();
            if mj.divides(mi) && (mi != mj || j < i) {
                keep[i] = false;
                break;
            }
        }
    }
    let minimal: Vec<ExactPoly> = basis
        .into_iter()
        .zip(keep)
        .filter_map(|(g, k)| if k { Some(g) } else { None })
        .collect();

    // inter-reduce for the canonical reduced basis
    let mut reduced: Vec<ExactPoly> = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<ExactPoly> = minimal
            .iter()
            .enumerate()
            .filter_map(|(j, g)| if j != i { Some(g.clone()) } else { None })
            .collect();
        let r = reduce(&minimal[i], &others).normalize();
        if !r.is_zero() {
            reduced.push(r);
        }
    }
    reduced.sort_by(|a, b| cmp_grevlex(&b.leading().unwrap().0, &a.leading().unwrap().0));
    Ok(GroebnerBasis { nvars, gens: reduced })
}

fn is_zero_poly(p: &ExactPoly) -> bool {
    p.is_zero()
}

/// Gebauer-Moller style pair update when appending one generator.
fn add_generator(basis: &mut Vec<ExactPoly>, pairs: &mut BTreeSet<Pair>, g: ExactPoly) {
    if is_zero_poly(&g) {
        return;
    }
    let t = basis.len();
    let gm = g.leading().unwrap().0.clone();

    // chain criterion against pending old pairs
    let stale: Vec<Pair> = pairs
        .iter()
        .filter(|p| {
            gm.divides(&p.lcm)
                && basis[p.i].leading().unwrap().0.lcm(&gm) != p.lcm
                && basis[p.j].leading().unwrap().0.lcm(&gm) != p.lcm
        })
        .cloned()
        .collect();
    for p in stale {
        pairs.remove(&p);
    }

    // candidate new pairs, pruned among themselves
    let mut cands: Vec<Pair> = (0..t)
        .map(|i| {
            let l = basis[i].leading().unwrap().0.lcm(&gm);
            Pair { deg: l.total_degree(), i, j: t, lcm: l }
        })
        .collect();
    let mut keep = vec![true; cands.len()];
    for a in 0..cands.len() {
        if !keep[a] {
            continue;
        }
        for b in 0..cands.len() {
            if a == b || !keep[b] {
                continue;
            }
            if cands[b].lcm.divides(&cands[a].lcm)
                && (cands[b].lcm != cands[a].lcm || b < a)
            {
                keep[a] = false;
                break;
            }
        }
    }
    for (idx, c) in cands.drain(..).enumerate() {
        if !keep[idx] {
            continue;
        }
        // product criterion
        if basis[c.i].leading().unwrap().0.coprime_with(&gm) {
            continue;
        }
        pairs.insert(c);
    }
    basis.push(g);
}

/// Krull dimension of the ideal, computed as the largest set of variables
/// none of whose subsets carries a leading term. Returns -1 for the unit
/// ideal.
pub fn ideal_dimension(gb: &GroebnerBasis) -> i64 {
    if gb.is_unit_ideal() {
        return -1;
    }
    if gb.gens.is_empty() {
        return gb.nvars as i64;
    }
    let n = gb.nvars;
    assert!(n <= 64, "dimension search uses 64-bit variable masks");
    let lt_masks: Vec<u64> = gb
        .gens
        .iter()
        .map(|g| g.leading().unwrap().0.support_mask())
        .collect();
    for size in (0..=n).rev() {
        if let Some(_s) = independent_subset(n, size, &lt_masks) {
            return size as i64;
        }
    }
    -1
}

fn independent_subset(n: usize, size: usize, lt_masks: &[u64]) -> Option<u64> {
    // enumerate subsets of the given size; small n keeps this cheap
    fn rec(n: usize, size: usize, start: usize, acc: u64, lt_masks: &[u64]) -> Option<u64> {
        if size == 0 {
            return if lt_masks.iter().all(|&m| m & !acc != 0) { Some(acc) } else { None };
        }
        for v in start..=(n - size) {
            if let Some(s) = rec(n, size - 1, v + 1, acc | (1 << v), lt_masks) {
                return Some(s);
            }
        }
        None
    }
    rec(n, size, 0, 0, lt_masks)
}

/// Dimension of `V(gens)`, convenience wrapper.
pub fn dimension_of_ideal(gens: &[ExactPoly], budget: &Budget) -> Result<i64, ExactError> {
    Ok(ideal_dimension(&buchberger(gens, budget)?))
}

/// Upper bound for the local dimension at `w`: the global dimension of the
/// ideal of the exactly shifted system `f_k - f_k(w_rat)`.
pub fn local_dim_bound(
    f: &ExactSystem,
    w: &[Complex64],
    budget: &Budget,
) -> Result<i64, ExactError> {
    if f.polys.len() != f.nvars {
        return Err(ExactError::NotSquare { npolys: f.polys.len(), nvars: f.nvars });
    }
    let den = BigInt::from(DEFAULT_RATIONALIZE_DEN);
    let w_rat: Vec<GaussRat> =
        w.iter().map(|z| rationalize(*z, &den)).collect::<Result<_, _>>()?;
    let shifted: Vec<ExactPoly> = f
        .polys
        .iter()
        .map(|p| {
            let v = p.eval(&w_rat);
            p.sub(&ExactPoly::constant(f.nvars, v))
        })
        .collect();
    dimension_of_ideal(&shifted, budget)
}
