//! Predictor-corrector path tracking for homotopies between square
//! polynomial systems, total-degree solving, and endpoint hygiene.
//!
//! Paths follow the Davidenko ODE `J dx/dt = -dH/dt` with a fourth-order
//! Runge-Kutta predictor and a full Newton corrector, adaptive step
//! halving/doubling, and a final polish at `t = 0`.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::polysys::{Poly, PolySystem, C64};
use crate::rngutil;

#[derive(Debug, Error)]
pub enum TrackError {
    #[error("polynomial {index} has degree zero; total-degree start system undefined")]
    ZeroDegree { index: usize },
    #[error("start point {index} violates the start system (residual {residual:.3e})")]
    StartResidual { index: usize, residual: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

#[derive(Clone, Debug)]
pub struct TrackerConfig {
    pub step_init: f64,
    pub step_min: f64,
    pub newton_tol: f64,
    pub newton_iters_max: usize,
    pub endpoint_tol: f64,
    pub infinity_threshold: f64,
    pub max_steps: usize,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            step_init: 0.05,
            step_min: 1e-10,
            newton_tol: 1e-10,
            newton_iters_max: 10,
            endpoint_tol: 1e-11,
            infinity_threshold: 1e8,
            max_steps: 5000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PathStatus {
    Success,
    Diverged,
    Singular,
    StepLimit,
}

#[derive(Clone, Debug)]
pub struct PathOutcome {
    pub status: PathStatus,
    pub endpoint: Vec<C64>,
    pub residual: f64,
    pub steps_taken: usize,
}

impl PathOutcome {
    pub fn is_success(&self) -> bool {
        self.status == PathStatus::Success
    }
}

/// A square homotopy family `H(x, t)` tracked from `t = 1` to `t = 0`.
pub trait Homotopy: Sync {
    fn nvars(&self) -> usize;
    fn eval(&self, x: &[C64], t: f64, out: &mut [C64]);
    fn jac(&self, x: &[C64], t: f64, out: &mut DMatrix<C64>);
    fn dt(&self, x: &[C64], t: f64, out: &mut [C64]);
}

/// `H = gamma t S(x) + (1 - t) T(x)`, the system-to-system form.
pub struct ConvexHomotopy {
    start: PolySystem,
    target: PolySystem,
    start_jac: Vec<Vec<Poly>>,
    target_jac: Vec<Vec<Poly>>,
    pub gamma: C64,
}

impl ConvexHomotopy {
    pub fn new(start: PolySystem, target: PolySystem, gamma: C64) -> Self {
        assert_eq!(start.nvars(), target.nvars());
        assert_eq!(start.npolys(), target.npolys());
        assert!(start.is_square());
        let start_jac = start.jacobian_polys();
        let target_jac = target.jacobian_polys();
        ConvexHomotopy { start, target, start_jac, target_jac, gamma }
    }
}

impl Homotopy for ConvexHomotopy {
    fn nvars(&self) -> usize {
        self.start.nvars()
    }

    fn eval(&self, x: &[C64], t: f64, out: &mut [C64]) {
        let a = self.gamma * C64::new(t, 0.0);
        let b = C64::new(1.0 - t, 0.0);
        for (k, o) in out.iter_mut().enumerate() {
            *o = a * self.start.polys()[k].eval(x) + b * self.target.polys()[k].eval(x);
        }
    }

    fn jac(&self, x: &[C64], t: f64, out: &mut DMatrix<C64>) {
        let a = self.gamma * C64::new(t, 0.0);
        let b = C64::new(1.0 - t, 0.0);
        for k in 0..self.start.npolys() {
            for j in 0..self.nvars() {
                out[(k, j)] = a * self.start_jac[k][j].eval(x) + b * self.target_jac[k][j].eval(x);
            }
        }
    }

    fn dt(&self, x: &[C64], t: f64, out: &mut [C64]) {
        let _ = t;
        for (k, o) in out.iter_mut().enumerate() {
            *o = self.gamma * self.start.polys()[k].eval(x) - self.target.polys()[k].eval(x);
        }
    }
}

/// Interpolation weight for moving-slice homotopies.
///
/// The straight segment between two slices can pass exactly through a
/// branch-point configuration (two witness paths colliding at a real
/// parameter value); a small deterministic imaginary detour keeps the
/// interpolated slice family generic while staying reproducible.
pub const SLICE_BULGE: f64 = 0.25;

fn bulge_weight(t: f64) -> C64 {
    C64::new(t, 0.0) * C64::new(1.0, SLICE_BULGE * (1.0 - t))
}

fn bulge_weight_dt(t: f64) -> C64 {
    // d/dt [ t (1 + i b (1 - t)) ] = 1 + i b (1 - 2t)
    C64::new(1.0, SLICE_BULGE * (1.0 - 2.0 * t))
}

/// Rows `fixed` stay put; each moving row interpolates from its start form
/// to its target form with the bulged weight.
pub struct SliceMoveHomotopy {
    fixed: PolySystem,
    fixed_jac: Vec<Vec<Poly>>,
    start_rows: Vec<Poly>,
    start_jac: Vec<Vec<Poly>>,
    target_rows: Vec<Poly>,
    target_jac: Vec<Vec<Poly>>,
}

impl SliceMoveHomotopy {
    pub fn new(fixed: PolySystem, start_rows: Vec<Poly>, target_rows: Vec<Poly>) -> Self {
        let nv = fixed.nvars();
        assert_eq!(start_rows.len(), target_rows.len());
        assert!(start_rows.iter().chain(&target_rows).all(|p| p.nvars() == nv));
        assert_eq!(fixed.npolys() + start_rows.len(), nv);
        let jac_of = |rows: &[Poly]| -> Vec<Vec<Poly>> {
            rows.iter().map(|p| (0..nv).map(|j| p.diff(j)).collect()).collect()
        };
        let fixed_jac = fixed.jacobian_polys();
        let start_jac = jac_of(&start_rows);
        let target_jac = jac_of(&target_rows);
        SliceMoveHomotopy { fixed, fixed_jac, start_rows, start_jac, target_rows, target_jac }
    }
}

impl Homotopy for SliceMoveHomotopy {
    fn nvars(&self) -> usize {
        self.fixed.nvars()
    }

    fn eval(&self, x: &[C64], t: f64, out: &mut [C64]) {
        let w = bulge_weight(t);
        let wc = C64::new(1.0, 0.0) - w;
        let nf = self.fixed.npolys();
        for k in 0..nf {
            out[k] = self.fixed.polys()[k].eval(x);
        }
        for (k, (s, g)) in self.start_rows.iter().zip(&self.target_rows).enumerate() {
            out[nf + k] = w * s.eval(x) + wc * g.eval(x);
        }
    }

    fn jac(&self, x: &[C64], t: f64, out: &mut DMatrix<C64>) {
        let w = bulge_weight(t);
        let wc = C64::new(1.0, 0.0) - w;
        let nf = self.fixed.npolys();
        for k in 0..nf {
            for j in 0..self.nvars() {
                out[(k, j)] = self.fixed_jac[k][j].eval(x);
            }
        }
        for k in 0..self.start_rows.len() {
            for j in 0..self.nvars() {
                out[(nf + k, j)] =
                    w * self.start_jac[k][j].eval(x) + wc * self.target_jac[k][j].eval(x);
            }
        }
    }

    fn dt(&self, x: &[C64], t: f64, out: &mut [C64]) {
        let dw = bulge_weight_dt(t);
        let nf = self.fixed.npolys();
        for o in out.iter_mut().take(nf) {
            *o = C64::new(0.0, 0.0);
        }
        for (k, (s, g)) in self.start_rows.iter().zip(&self.target_rows).enumerate() {
            out[nf + k] = dw * (s.eval(x) - g.eval(x));
        }
    }
}

fn inf_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

struct Workspace {
    h: Vec<C64>,
    ht: Vec<C64>,
    jac: DMatrix<C64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Workspace { h: vec![C64::new(0.0, 0.0); n], ht: vec![C64::new(0.0, 0.0); n], jac: DMatrix::zeros(n, n) }
    }
}

/// `dx/dt` from the Davidenko ODE; `None` when the Jacobian is singular.
fn tangent(hom: &dyn Homotopy, x: &[C64], t: f64, ws: &mut Workspace) -> Option<DVector<C64>> {
    hom.jac(x, t, &mut ws.jac);
    hom.dt(x, t, &mut ws.ht);
    let rhs = DVector::from_iterator(x.len(), ws.ht.iter().map(|z| -*z));
    ws.jac.clone().lu().solve(&rhs)
}

enum CorrectorResult {
    /// Converged; carries the total correction distance in max norm.
    Converged(f64),
    Failed,
}

fn newton_correct(
    hom: &dyn Homotopy,
    x: &mut Vec<C64>,
    t: f64,
    tol: f64,
    max_iters: usize,
    ws: &mut Workspace,
) -> CorrectorResult {
    let mut last_step = f64::INFINITY;
    let mut total = 0.0f64;
    for _ in 0..max_iters {
        hom.eval(x, t, &mut ws.h);
        hom.jac(x, t, &mut ws.jac);
        let rhs = DVector::from_iterator(x.len(), ws.h.iter().map(|z| -*z));
        let delta = match ws.jac.clone().lu().solve(&rhs) {
            Some(d) => d,
            None => return CorrectorResult::Failed,
        };
        let step = delta.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (xi, di) in x.iter_mut().zip(delta.iter()) {
            *xi += di;
        }
        total += step;
        if step <= tol {
            return CorrectorResult::Converged(total);
        }
        // corrector must contract; a growing update means the basin was missed
        if step > last_step && step > 1e-3 {
            return CorrectorResult::Failed;
        }
        last_step = step;
    }
    CorrectorResult::Failed
}

/// Track one path of `hom` from `start_pt` at `t = 1` down to `t = 0`.
pub fn track_path(hom: &dyn Homotopy, start_pt: &[C64], cfg: &TrackerConfig) -> PathOutcome {
    let n = hom.nvars();
    let mut ws = Workspace::new(n);
    let mut x = start_pt.to_vec();
    let mut t = 1.0f64;
    let mut dt = cfg.step_init;
    let mut streak = 0usize;
    let mut steps = 0usize;

    let residual_at = |x: &[C64], t: f64, ws: &mut Workspace| -> f64 {
        hom.eval(x, t, &mut ws.h);
        inf_norm(&ws.h)
    };

    while t > 0.0 {
        if steps >= cfg.max_steps {
            let res = residual_at(&x, 0.0, &mut ws);
            return PathOutcome { status: PathStatus::StepLimit, endpoint: x, residual: res, steps_taken: steps };
        }
        let h = dt.min(t);
        let t_new = (t - h).max(0.0);

        // RK4 predictor
        let pred = (|| {
            let k1 = tangent(hom, &x, t, &mut ws)?;
            let half = t - h / 2.0;
            let x2: Vec<C64> = x.iter().zip(k1.iter()).map(|(xi, ki)| xi - ki * C64::new(h / 2.0, 0.0)).collect();
            let k2 = tangent(hom, &x2, half, &mut ws)?;
            let x3: Vec<C64> = x.iter().zip(k2.iter()).map(|(xi, ki)| xi - ki * C64::new(h / 2.0, 0.0)).collect();
            let k3 = tangent(hom, &x3, half, &mut ws)?;
            let x4: Vec<C64> = x.iter().zip(k3.iter()).map(|(xi, ki)| xi - ki * C64::new(h, 0.0)).collect();
            let k4 = tangent(hom, &x4, t_new, &mut ws)?;
            let out: Vec<C64> = (0..n)
                .map(|i| x[i] - (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * C64::new(h / 6.0, 0.0))
                .collect();
            Some(out)
        })();

        let accepted = match pred {
            None => None,
            Some(mut xp) => {
                let pred_dist =
                    x.iter().zip(&xp).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
                match newton_correct(hom, &mut xp, t_new, cfg.newton_tol, cfg.newton_iters_max, &mut ws) {
                    // trust region: a correction comparable to the predictor
                    // displacement means the corrector left this path's tube
                    CorrectorResult::Converged(corr)
                        if corr <= (0.5 * pred_dist).max(1e-5 * (1.0 + inf_norm(&xp))) =>
                    {
                        Some(xp)
                    }
                    _ => None,
                }
            }
        };

        match accepted {
            Some(xp) => {
                x = xp;
                t = t_new;
                steps += 1;
                streak += 1;
                if inf_norm(&x) > cfg.infinity_threshold {
                    let res = residual_at(&x, t, &mut ws);
                    return PathOutcome { status: PathStatus::Diverged, endpoint: x, residual: res, steps_taken: steps };
                }
                if streak >= 5 {
                    dt = (dt * 2.0).min(0.25);
                    streak = 0;
                }
            }
            None => {
                dt /= 2.0;
                streak = 0;
                if dt < cfg.step_min {
                    let res = residual_at(&x, 0.0, &mut ws);
                    return PathOutcome { status: PathStatus::Singular, endpoint: x, residual: res, steps_taken: steps };
                }
            }
        }
    }

    // endpoint polish on the target system; trust region no longer applies
    let _ = newton_correct(hom, &mut x, 0.0, cfg.endpoint_tol, 3 * cfg.newton_iters_max, &mut ws);
    let res = residual_at(&x, 0.0, &mut ws);
    if inf_norm(&x) > cfg.infinity_threshold {
        return PathOutcome { status: PathStatus::Diverged, endpoint: x, residual: res, steps_taken: steps };
    }
    if res <= 100.0 * cfg.newton_tol {
        PathOutcome { status: PathStatus::Success, endpoint: x, residual: res, steps_taken: steps }
    } else {
        PathOutcome { status: PathStatus::Singular, endpoint: x, residual: res, steps_taken: steps }
    }
}

/// Track a batch of start points; outcome `i` always corresponds to start
/// point `i` regardless of scheduling.
pub fn track_batch<H: Homotopy>(hom: &H, starts: &[Vec<C64>], cfg: &TrackerConfig) -> Vec<PathOutcome> {
    starts.par_iter().map(|s| track_path(hom, s, cfg)).collect()
}

/// Solve a square system by tracking all Bezout paths from the total-degree
/// start system `{x_k^{d_k} - 1}`.
pub fn solve_total_degree(
    f: &PolySystem,
    cfg: &TrackerConfig,
    seed: u64,
) -> Result<Vec<PathOutcome>, TrackError> {
    assert!(f.is_square());
    let n = f.nvars();
    let degrees = f.degrees();
    if let Some(idx) = degrees.iter().position(|&d| d == 0) {
        return Err(TrackError::ZeroDegree { index: idx });
    }

    let mut start_polys = Vec::with_capacity(n);
    for (k, &d) in degrees.iter().enumerate() {
        let p = Poly::variable(n, k).pow(d).sub(&Poly::constant(n, C64::new(1.0, 0.0)));
        start_polys.push(p);
    }
    let start = PolySystem::new(n, start_polys);

    let mut gamma_rng = rngutil::stream(seed, rngutil::PURPOSE_GAMMA);
    let gamma = rngutil::unit(&mut gamma_rng);
    let hom = ConvexHomotopy::new(start, f.clone(), gamma);

    // roots-of-unity grid in odometer order
    let total: usize = degrees.iter().map(|&d| d as usize).product();
    let mut starts = Vec::with_capacity(total);
    let mut idx = vec![0u32; n];
    loop {
        let pt: Vec<C64> = idx
            .iter()
            .zip(&degrees)
            .map(|(&j, &d)| C64::from_polar(1.0, std::f64::consts::TAU * j as f64 / d as f64))
            .collect();
        starts.push(pt);
        let mut k = n;
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < degrees[k] {
                break;
            }
            idx[k] = 0;
        }
        if idx.iter().all(|&v| v == 0) {
            break;
        }
    }
    debug_assert_eq!(starts.len(), total);

    Ok(track_batch(&hom, &starts, cfg))
}

/// Move the trailing slice rows of a square augmented system to a new slice,
/// carrying every start point along; outcome order matches input order.
pub fn track_slice_move(
    fixed: &PolySystem,
    start_rows: &[Poly],
    target_rows: &[Poly],
    start_pts: &[Vec<C64>],
    cfg: &TrackerConfig,
) -> Result<Vec<PathOutcome>, TrackError> {
    let hom = SliceMoveHomotopy::new(fixed.clone(), start_rows.to_vec(), target_rows.to_vec());
    let n = hom.nvars();
    let mut hbuf = vec![C64::new(0.0, 0.0); n];
    for (i, p) in start_pts.iter().enumerate() {
        if p.len() != n {
            return Err(TrackError::DimensionMismatch { expected: n, got: p.len() });
        }
        hom.eval(p, 1.0, &mut hbuf);
        let res = inf_norm(&hbuf);
        if res > 10.0 * cfg.newton_tol {
            return Err(TrackError::StartResidual { index: i, residual: res });
        }
    }
    Ok(track_batch(&hom, start_pts, cfg))
}

/// Greedy max-norm clustering; the first representative of each cluster is
/// kept, in input order.
pub fn dedup(points: &[Vec<C64>], tol: f64) -> Vec<Vec<C64>> {
    let mut reps: Vec<Vec<C64>> = Vec::new();
    for p in points {
        let dup = reps.iter().any(|r| {
            r.len() == p.len()
                && r.iter().zip(p).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) <= tol
        });
        if !dup {
            reps.push(p.clone());
        }
    }
    reps
}

/// Residual acceptance on the original system, scaled by the point size:
/// `||F(pt)||_inf <= tol * max(1, ||pt||_inf^deg_max)`.
pub fn verify_on_system(f: &PolySystem, pt: &[C64], tol: f64) -> Result<bool, TrackError> {
    if pt.len() != f.nvars() {
        return Err(TrackError::DimensionMismatch { expected: f.nvars(), got: pt.len() });
    }
    let vals = f.eval_unchecked(pt);
    let norm = inf_norm(&vals);
    let scale = inf_norm(pt).max(1.0).powi(f.max_degree() as i32);
    Ok(norm <= tol * scale.max(1.0))
}

pub const VERIFY_TOL: f64 = 1e-8;
pub const DEDUP_TOL: f64 = 1e-6;
pub const SLACK_TOL: f64 = 1e-6;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_system;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_homotopy_is_stationary() {
        let s = parse_system("vars x; x^2 - 1;").unwrap().system;
        let hom = ConvexHomotopy::new(s.clone(), s, c(1.0, 0.0));
        let out = track_path(&hom, &[c(1.0, 0.0)], &TrackerConfig::default());
        assert_eq!(out.status, PathStatus::Success);
        assert!((out.endpoint[0] - c(1.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn quadratic_roots_total_degree() {
        let s = parse_system("vars x,y; x^2 - 1; y^2 - 4;").unwrap().system;
        let outs = solve_total_degree(&s, &TrackerConfig::default(), 3).unwrap();
        assert_eq!(outs.len(), 4);
        let finite: Vec<_> = outs.iter().filter(|o| o.is_success()).collect();
        assert_eq!(finite.len(), 4);
        for o in finite {
            assert!((o.endpoint[0].norm() - 1.0).abs() < 1e-8);
            assert!((o.endpoint[1].norm() - 2.0).abs() < 1e-8);
            assert!(o.endpoint[0].im.abs() < 1e-8);
        }
    }

    #[test]
    fn circle_line_intersection_matches_substitution_oracle() {
        // oracle: substitute x = 2y + 3 into x^2 + y^2 - 5: 5y^2 + 12y + 4 = 0,
        // roots y = -2 and y = -2/5
        let s = parse_system("vars x,y; x^2 + y^2 - 5; x - 2*y - 3;").unwrap().system;
        let outs = solve_total_degree(&s, &TrackerConfig::default(), 17).unwrap();
        let mut finite: Vec<Vec<C64>> =
            outs.iter().filter(|o| o.is_success()).map(|o| o.endpoint.clone()).collect();
        finite.sort_by(|a, b| a[1].re.partial_cmp(&b[1].re).unwrap());
        assert_eq!(finite.len(), 2);
        assert!((finite[0][0] - c(-1.0, 0.0)).norm() < 1e-8);
        assert!((finite[0][1] - c(-2.0, 0.0)).norm() < 1e-8);
        assert!((finite[1][0] - c(2.2, 0.0)).norm() < 1e-8);
        assert!((finite[1][1] - c(-0.4, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn cube_roots_of_unity() {
        let s = parse_system("vars x; x^3 - 1;").unwrap().system;
        let outs = solve_total_degree(&s, &TrackerConfig::default(), 5).unwrap();
        assert_eq!(outs.iter().filter(|o| o.is_success()).count(), 3);
        for o in outs.iter().filter(|o| o.is_success()) {
            assert!((o.endpoint[0].powu(3) - c(1.0, 0.0)).norm() < 1e-8);
        }
    }

    #[test]
    fn gamma_independence_of_endpoint_set() {
        let s = parse_system("vars x,y; x^2 + y^2 - 5; x - 2*y - 3;").unwrap().system;
        let collect = |seed: u64| -> Vec<Vec<C64>> {
            let outs = solve_total_degree(&s, &TrackerConfig::default(), seed).unwrap();
            let pts: Vec<Vec<C64>> =
                outs.iter().filter(|o| o.is_success()).map(|o| o.endpoint.clone()).collect();
            let mut d = dedup(&pts, 1e-8);
            d.sort_by(|a, b| a[1].re.partial_cmp(&b[1].re).unwrap());
            d
        };
        let a = collect(11);
        let b = collect(1234);
        assert_eq!(a.len(), b.len());
        for (p, q) in a.iter().zip(&b) {
            for (u, v) in p.iter().zip(q) {
                assert!((u - v).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn bezout_bound_respected() {
        let s = parse_system("vars x,y; x^2 - 1; y^3 - y;").unwrap().system;
        let outs = solve_total_degree(&s, &TrackerConfig::default(), 9).unwrap();
        assert_eq!(outs.len(), 6);
        let pts: Vec<Vec<C64>> =
            outs.iter().filter(|o| o.is_success()).map(|o| o.endpoint.clone()).collect();
        assert!(dedup(&pts, 1e-6).len() <= 6);
    }

    #[test]
    fn outcome_count_matches_start_count() {
        let s = parse_system("vars x; x^5 - x - 1;").unwrap().system;
        let outs = solve_total_degree(&s, &TrackerConfig::default(), 2).unwrap();
        assert_eq!(outs.len(), 5);
    }

    #[test]
    fn dedup_basics() {
        assert!(dedup(&[], 1e-6).is_empty());
        let a = vec![c(1.0, 0.0), c(1.0, 0.0)];
        let b = vec![c(1.0 + 1e-9, 0.0), c(1.0, 0.0)];
        assert_eq!(dedup(&[a.clone(), b], 1e-6).len(), 1);
    }

    #[test]
    fn verify_on_witness_and_off() {
        let s = parse_system("vars x,y; (y-x)*(y-2*x)*(y-3*x);").unwrap().system;
        assert!(verify_on_system(&s, &[c(1.0, 0.0), c(1.0, 0.0)], 1e-8).unwrap());
        let s2 = parse_system("vars x; x - 1;").unwrap().system;
        assert!(!verify_on_system(&s2, &[c(2.0, 0.0)], 1e-8).unwrap());
    }

    // Slice-move checks against the worked two-surface configuration:
    // f = (x^3+z)(x^2-y), slice rows 4x+7y+2z+6 and 5x+7y+3z+a with the
    // trailing constant moving from 6.
    fn two_surface_fixed() -> (PolySystem, Vec<Poly>) {
        let parsed = parse_system(
            "vars x,y,z; (x^3+z)*(x^2-y); 4*x+7*y+2*z+6; 5*x+7*y+3*z+6;",
        )
        .unwrap();
        let polys = parsed.system.polys();
        let fixed = PolySystem::new(3, vec![polys[0].clone(), polys[1].clone()]);
        (fixed, vec![polys[2].clone()])
    }

    fn with_const(base: &Poly, delta: f64) -> Poly {
        base.add(&Poly::constant(3, c(delta, 0.0)))
    }

    #[test]
    fn slice_move_reaches_published_endpoint() {
        let (fixed, start_rows) = two_surface_fixed();
        let target_rows = vec![with_const(&start_rows[0], 3.0)]; // constant 6 -> 9
        let w11 = vec![c(1.0, 0.0), c(-8.0 / 7.0, 0.0), c(-1.0, 0.0)];
        let outs = track_slice_move(&fixed, &start_rows, &target_rows, &[w11], &TrackerConfig::default())
            .unwrap();
        assert!(outs[0].is_success());
        let expect = [
            c(1.671699881657157, 0.0),
            c(-0.4776285376163331, 0.0),
            c(-4.671699881657164, 0.0),
        ];
        for (a, b) in outs[0].endpoint.iter().zip(&expect) {
            assert!((a - b).norm() < 1e-6, "endpoint {:?}", outs[0].endpoint);
        }
    }

    #[test]
    fn slice_move_far_constant() {
        let (fixed, start_rows) = two_surface_fixed();
        let target_rows = vec![with_const(&start_rows[0], 57.0)]; // constant 6 -> 63
        let w11 = vec![c(1.0, 0.0), c(-8.0 / 7.0, 0.0), c(-1.0, 0.0)];
        let outs = track_slice_move(&fixed, &start_rows, &target_rows, &[w11], &TrackerConfig::default())
            .unwrap();
        assert!(outs[0].is_success());
        let expect = [
            c(3.935100643260828, 0.0),
            c(14.30425695906836, 0.0),
            c(-60.93510064326094, 0.0),
        ];
        for (a, b) in outs[0].endpoint.iter().zip(&expect) {
            assert!((a - b).norm() < 1e-6, "endpoint {:?}", outs[0].endpoint);
        }
    }

    #[test]
    fn slice_move_through_branch_point_picks_stable_sheet() {
        // the path from (0, -6/7, 0) to constant 9 passes a collision on the
        // real segment; the bulged interpolation resolves it reproducibly
        let (fixed, start_rows) = two_surface_fixed();
        let target_rows = vec![with_const(&start_rows[0], 3.0)];
        let w2 = vec![c(0.0, 0.0), c(-6.0 / 7.0, 0.0), c(0.0, 0.0)];
        let outs = track_slice_move(&fixed, &start_rows, &target_rows, &[w2], &TrackerConfig::default())
            .unwrap();
        assert!(outs[0].is_success());
        let expect = [
            c(-0.8358499408285809, 1.046869318849985),
            c(0.2388142688081706, -0.2991055196714253),
            c(-2.164150059171436, -1.046869318849981),
        ];
        for (a, b) in outs[0].endpoint.iter().zip(&expect) {
            assert!((a - b).norm() < 1e-6, "endpoint {:?}", outs[0].endpoint);
        }
    }

    #[test]
    fn identity_slice_move_fixes_points() {
        let (fixed, start_rows) = two_surface_fixed();
        let w11 = vec![c(1.0, 0.0), c(-8.0 / 7.0, 0.0), c(-1.0, 0.0)];
        let outs = track_slice_move(&fixed, &start_rows, &start_rows.clone(), &[w11.clone()], &TrackerConfig::default())
            .unwrap();
        assert!(outs[0].is_success());
        for (a, b) in outs[0].endpoint.iter().zip(&w11) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn start_residual_precondition_enforced() {
        let (fixed, start_rows) = two_surface_fixed();
        let bad = vec![c(5.0, 0.0), c(5.0, 0.0), c(5.0, 0.0)];
        let r = track_slice_move(&fixed, &start_rows, &start_rows.clone(), &[bad], &TrackerConfig::default());
        assert!(matches!(r, Err(TrackError::StartResidual { .. })));
    }
}
