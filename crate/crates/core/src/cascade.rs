//! Witness point supersets via the slack-variable cascade.
//!
//! The square system `f` is coupled to `i` generic hyperplanes through
//! slack coordinates `z_1..z_i`; solutions with vanishing slack at level
//! `i` are witness-superset candidates for the pure i-dimensional part,
//! and the nonzero-slack solutions start the paths of the next level down.

use num::BigInt;
use std::collections::BTreeMap;
use thiserror::Error;

use crate::budget::Budget;
use crate::exactalg::{self, ExactError, ExactSystem, GaussRat};
use crate::parse::ParsedSystem;
use crate::polysys::{
    numeric_rank, random_point, random_slice, square_up, LinearSlice, Poly, PolySystem,
    RandomizationMatrix, C64,
};
use crate::rngutil;
use crate::tracker::{
    self, solve_total_degree, track_batch, ConvexHomotopy, PathOutcome, PathStatus,
    TrackerConfig, DEDUP_TOL, SLACK_TOL, VERIFY_TOL,
};

#[derive(Debug, Error)]
pub enum CascadeError {
    #[error("time budget exhausted during cascade")]
    Deadline,
    #[error("slice override has {got} rows, expected {expected}")]
    BadSliceOverride { expected: usize, got: usize },
    #[error(transparent)]
    Track(#[from] tracker::TrackError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Poly(#[from] crate::polysys::PolyError),
}

/// The square system `f` coupled to the first `slack_count` slice rows.
#[derive(Clone, Debug)]
pub struct EmbeddedSystem {
    pub base: PolySystem,
    pub slack_count: usize,
    pub slice: LinearSlice,
    pub assembled: PolySystem,
}

impl EmbeddedSystem {
    /// First `N` assembled rows (`f_k + sum lambda_kj z_j`).
    pub fn coupled_rows(&self) -> PolySystem {
        let n = self.base.npolys();
        PolySystem::new(self.assembled.nvars(), self.assembled.polys()[..n].to_vec())
    }

    /// Trailing slice rows (`l_j + z_j`).
    pub fn slice_rows(&self) -> Vec<Poly> {
        let n = self.base.npolys();
        self.assembled.polys()[n..].to_vec()
    }

    /// Embed an x-space point with zero slack coordinates.
    pub fn lift_zero_slack(&self, x: &[C64]) -> Vec<C64> {
        let mut v = x.to_vec();
        v.extend(std::iter::repeat(C64::new(0.0, 0.0)).take(self.slack_count));
        v
    }
}

/// Build the level-`i` embedding; level 0 is `f` itself.
pub fn embed(
    f: &PolySystem,
    slice: &LinearSlice,
    lambda: &RandomizationMatrix,
    i: usize,
) -> Result<EmbeddedSystem, CascadeError> {
    if i > slice.rows() {
        return Err(CascadeError::BadSliceOverride { expected: slice.rows(), got: i });
    }
    let n = f.nvars();
    if i == 0 {
        return Ok(EmbeddedSystem {
            base: f.clone(),
            slack_count: 0,
            slice: slice.prefix(0),
            assembled: f.clone(),
        });
    }
    let total = n + i;
    let mut rows: Vec<Poly> = Vec::with_capacity(total);
    for (k, p) in f.polys().iter().enumerate() {
        let mut row = p.extended(i);
        for j in 0..i {
            row.add_term(crate::polysys::Monomial::var(total, n + j), lambda.entry(k, j));
        }
        rows.push(row);
    }
    for j in 0..i {
        let mut row = slice.row_poly(j, total);
        row.add_term(crate::polysys::Monomial::var(total, n + j), C64::new(1.0, 0.0));
        rows.push(row);
    }
    Ok(EmbeddedSystem {
        base: f.clone(),
        slack_count: i,
        slice: slice.prefix(i),
        assembled: PolySystem::new(total, rows),
    })
}

/// Output of the dimension setup stage.
#[derive(Clone, Debug)]
pub struct Dims {
    pub f: PolySystem,
    /// Top dimension; -1 when the variety is empty.
    pub d: i64,
    /// Bottom cascade level, `N - rank(Jf)` clamped to `d`.
    pub r: usize,
    pub slice: LinearSlice,
    pub lambda: RandomizationMatrix,
    pub warnings: Vec<String>,
}

/// Square the input system, compute the top dimension exactly (with a
/// fallback for inexact coefficients), the generic Jacobian corank, and
/// draw the global slice and slack couplings.
pub fn compute_dims(
    parsed: &ParsedSystem,
    seed: u64,
    budget: &Budget,
    slice_override: Option<&LinearSlice>,
) -> Result<Dims, CascadeError> {
    let original = &parsed.system;
    let n = original.nvars();
    let npolys = original.npolys();
    let mut warnings = Vec::new();

    let lambda_sq = if npolys == n {
        RandomizationMatrix::identity(n)
    } else {
        RandomizationMatrix::random(n, npolys, rngutil::child_seed(seed, rngutil::PURPOSE_SQUARE))
    };
    let f = square_up(original, &lambda_sq)?;

    // the exact dimension comes from the input system: squaring with an
    // injective map preserves the variety, and extra randomization
    // components are isolated points filtered downstream
    let d: i64 = match &parsed.exact {
        Some(exact) => match exactalg::buchberger(&exact.polys, budget) {
            Ok(gb) => exactalg::ideal_dimension(&gb),
            Err(ExactError::Deadline) => return Err(CascadeError::Deadline),
            Err(ExactError::Budget { pairs }) => {
                warnings.push(format!(
                    "basis computation aborted after {} pairs; falling back to top dimension {}",
                    pairs,
                    n - 1
                ));
                (n - 1) as i64
            }
            Err(e) => return Err(e.into()),
        },
        None => {
            warnings.push(format!(
                "inexact coefficients: exact dimension unavailable, starting cascade at {}",
                n - 1
            ));
            (n - 1) as i64
        }
    };

    let pt = random_point(n, seed);
    let jac = f.jacobian_at(&pt)?;
    let rank = numeric_rank(&jac, 1e-8)?;
    let mut r = n.saturating_sub(rank);
    if d >= 0 && (r as i64) > d {
        warnings.push(format!("corank {} exceeds dimension {}; clamping", r, d));
        r = d as usize;
    }

    let slice = match slice_override {
        Some(s) => {
            let want = d.max(0) as usize;
            if s.rows() != want {
                return Err(CascadeError::BadSliceOverride { expected: want, got: s.rows() });
            }
            s.clone()
        }
        None => random_slice(d.max(0) as usize, n, seed)?,
    };
    let lambda = RandomizationMatrix::random(
        n,
        d.max(0) as usize,
        rngutil::child_seed(seed, rngutil::PURPOSE_LAMBDA),
    );

    Ok(Dims { f, d, r, slice, lambda, warnings })
}

/// Per-level path accounting.
#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct LevelStats {
    pub level: usize,
    pub paths_tracked: usize,
    pub success: usize,
    pub diverged: usize,
    pub singular: usize,
    pub step_limit: usize,
    pub borderline: usize,
    pub rejected_original: usize,
    pub recovered: usize,
}

/// Witness point supersets plus the nonsolution sets feeding each level.
#[derive(Clone, Debug)]
pub struct SupersetResult {
    pub f: PolySystem,
    pub d: usize,
    pub r: usize,
    pub slice: LinearSlice,
    pub lambda: RandomizationMatrix,
    /// Level -> witness superset candidates, x-coordinates.
    pub supersets: BTreeMap<usize, Vec<Vec<C64>>>,
    /// Level -> nonzero-slack solutions in (x, z) coordinates.
    pub nonsolutions: BTreeMap<usize, Vec<Vec<C64>>>,
    pub stats: Vec<LevelStats>,
}

impl SupersetResult {
    pub fn empty(f: PolySystem, slice: LinearSlice, lambda: RandomizationMatrix) -> Self {
        SupersetResult {
            f,
            d: 0,
            r: 0,
            slice,
            lambda,
            supersets: BTreeMap::new(),
            nonsolutions: BTreeMap::new(),
            stats: vec![],
        }
    }
}

const BATCH_CHUNK: usize = 64;

fn track_chunked<H: tracker::Homotopy>(
    hom: &H,
    starts: &[Vec<C64>],
    cfg: &TrackerConfig,
    budget: &Budget,
) -> Result<Vec<PathOutcome>, CascadeError> {
    let mut out = Vec::with_capacity(starts.len());
    for chunk in starts.chunks(BATCH_CHUNK) {
        if budget.expired() {
            return Err(CascadeError::Deadline);
        }
        out.extend(track_batch(hom, chunk, cfg));
    }
    Ok(out)
}

/// Run the cascade from level `d` down to level `r`.
pub fn cascade_run(
    dims: &Dims,
    original: &PolySystem,
    exact: Option<&ExactSystem>,
    cfg: &TrackerConfig,
    seed: u64,
    budget: &Budget,
) -> Result<SupersetResult, CascadeError> {
    if dims.d < 0 {
        return Ok(SupersetResult::empty(dims.f.clone(), dims.slice.clone(), dims.lambda.clone()));
    }
    let d = dims.d as usize;
    let r = dims.r;
    let f = &dims.f;
    let n = f.nvars();

    let mut result = SupersetResult {
        f: f.clone(),
        d,
        r,
        slice: dims.slice.clone(),
        lambda: dims.lambda.clone(),
        supersets: BTreeMap::new(),
        nonsolutions: BTreeMap::new(),
        stats: vec![],
    };

    let mut carried: Vec<Vec<C64>> = Vec::new(); // S_{i+1} start points
    for i in (r..=d).rev() {
        if budget.expired() {
            return Err(CascadeError::Deadline);
        }
        let emb = embed(f, &dims.slice, &dims.lambda, i)?;

        let outcomes: Vec<PathOutcome> = if i == d {
            // top level: all Bezout paths of the embedded system
            let level_seed = rngutil::child_seed(seed, 0x1000 + i as u64);
            let starts_total: usize =
                emb.assembled.degrees().iter().map(|&v| v as usize).product();
            if starts_total > 200_000 {
                return Err(CascadeError::Deadline);
            }
            if budget.expired() {
                return Err(CascadeError::Deadline);
            }
            solve_total_degree(&emb.assembled, cfg, level_seed)?
        } else {
            if carried.is_empty() {
                result.stats.push(LevelStats { level: i, ..Default::default() });
                result.supersets.insert(i, vec![]);
                result.nonsolutions.insert(i, vec![]);
                continue;
            }
            // drive z_{i+1} to zero: start at the level-(i+1) embedding,
            // end at the level-i embedding augmented with the equation z_{i+1}
            let emb_above = embed(f, &dims.slice, &dims.lambda, i + 1)?;
            let total = n + i + 1;
            let mut target_rows: Vec<Poly> =
                emb.assembled.polys().iter().map(|p| p.extended(1)).collect();
            target_rows.push(Poly::variable(total, total - 1));
            let target = PolySystem::new(total, target_rows);
            let mut rng = rngutil::stream2(seed, rngutil::PURPOSE_GAMMA, i as u64, 0);
            let gamma = rngutil::unit(&mut rng);
            let hom = ConvexHomotopy::new(emb_above.assembled.clone(), target, gamma);
            track_chunked(&hom, &carried, cfg, budget)?
        };

        let mut stats =
            LevelStats { level: i, paths_tracked: outcomes.len(), ..Default::default() };
        let mut witnesses: Vec<Vec<C64>> = Vec::new();
        let mut nonsolutions: Vec<Vec<C64>> = Vec::new();
        let mut failed_endpoints: Vec<Vec<C64>> = Vec::new();

        for o in &outcomes {
            match o.status {
                PathStatus::Diverged => stats.diverged += 1,
                PathStatus::Singular => {
                    stats.singular += 1;
                    failed_endpoints.push(o.endpoint.clone());
                }
                PathStatus::StepLimit => {
                    stats.step_limit += 1;
                    failed_endpoints.push(o.endpoint.clone());
                }
                PathStatus::Success => {
                    stats.success += 1;
                    // at intermediate levels the tracked space carries the
                    // retired slack coordinate; drop it
                    let pt: Vec<C64> = o.endpoint[..n + i].to_vec();
                    let slack = pt[n..].iter().map(|z| z.norm()).fold(0.0, f64::max);
                    if slack <= SLACK_TOL {
                        if slack > 1e-8 {
                            stats.borderline += 1;
                        }
                        let x = pt[..n].to_vec();
                        if tracker::verify_on_system(original, &x, VERIFY_TOL)? {
                            witnesses.push(x);
                        } else {
                            stats.rejected_original += 1;
                        }
                    } else {
                        nonsolutions.push(pt);
                    }
                }
            }
        }

        // multiplicity clusters at the isolated level can be rescued when
        // they snap to a small rational point that verifies exactly
        if i == 0 {
            if let Some(exact_sys) = exact {
                for pt in &failed_endpoints {
                    let x = &pt[..n];
                    if let Some(snapped) = snap_to_exact_zero(exact_sys, x) {
                        witnesses.push(snapped);
                        stats.recovered += 1;
                    }
                }
            }
        }

        let witnesses = tracker::dedup(&witnesses, DEDUP_TOL);
        let nonsolutions = tracker::dedup(&nonsolutions, DEDUP_TOL);
        stats.recovered = stats.recovered.min(witnesses.len());
        result.stats.push(stats);
        result.supersets.insert(i, witnesses);
        result.nonsolutions.insert(i, nonsolutions.clone());
        carried = nonsolutions;
    }

    Ok(result)
}

/// Round each coordinate to a nearby rational with a small denominator and
/// accept only if the exact system vanishes at the rounded point exactly.
pub fn snap_to_exact_zero(exact: &ExactSystem, x: &[C64]) -> Option<Vec<C64>> {
    const DENOMS: [i64; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 12, 16];
    const SNAP_RADIUS: f64 = 0.4;
    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite() || z.norm() > 1e6) {
        return None;
    }
    'dens: for q in DENOMS {
        let den = BigInt::from(q);
        let mut rat_pt: Vec<GaussRat> = Vec::with_capacity(x.len());
        let mut num_pt: Vec<C64> = Vec::with_capacity(x.len());
        for z in x {
            let re = (z.re * q as f64).round() / q as f64;
            let im = (z.im * q as f64).round() / q as f64;
            if (z - C64::new(re, im)).norm() > SNAP_RADIUS {
                continue 'dens;
            }
            rat_pt.push(exactalg::rationalize(C64::new(re, im), &den).ok()?);
            num_pt.push(C64::new(re, im));
        }
        if exact.eval(&rat_pt).iter().all(|v| v.is_zero()) {
            return Some(num_pt);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_system;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn run_pipeline(src: &str, seed: u64, slice: Option<&LinearSlice>) -> (Dims, SupersetResult) {
        let parsed = parse_system(src).unwrap();
        let dims = compute_dims(&parsed, seed, &Budget::unlimited(), slice).unwrap();
        let sr = cascade_run(
            &dims,
            &parsed.system,
            parsed.exact.as_ref(),
            &TrackerConfig::default(),
            seed,
            &Budget::unlimited(),
        )
        .unwrap();
        (dims, sr)
    }

    #[test]
    fn embed_shapes() {
        let parsed = parse_system("vars x,y; x^2-y; y^2-x;").unwrap();
        let slice = random_slice(1, 2, 3).unwrap();
        let lambda = RandomizationMatrix::random(2, 1, 4);
        let e0 = embed(&parsed.system, &slice, &lambda, 0).unwrap();
        assert_eq!(e0.assembled, parsed.system);
        let e1 = embed(&parsed.system, &slice, &lambda, 1).unwrap();
        assert_eq!(e1.assembled.nvars(), 3);
        assert_eq!(e1.assembled.npolys(), 3);
        assert!(embed(&parsed.system, &slice, &lambda, 2).is_err());

        // a zero-slack solution of the embedding restricts to f = 0, l = 0
        let x = c(0.3, 0.1);
        let pt = vec![x, x, c(0.0, 0.0)];
        let v = e1.assembled.eval_unchecked(&pt);
        let fx = parsed.system.eval_unchecked(&[x, x]);
        assert!((v[0] - fx[0]).norm() < 1e-14);
        assert!((v[2] - slice.eval_row(0, &[x, x])).norm() < 1e-14);
    }

    #[test]
    fn dims_of_hypersurface_product() {
        // (x^3+z)(x^2-y): a surface with generic Jacobian corank 2
        let parsed = parse_system("vars x,y,z; (x^3+z)*(x^2-y);").unwrap();
        let dims = compute_dims(&parsed, 11, &Budget::unlimited(), None).unwrap();
        assert_eq!(dims.d, 2);
        assert_eq!(dims.r, 2);
        assert_eq!(dims.slice.rows(), 2);
    }

    #[test]
    fn dims_of_cusp_line_system() {
        let parsed =
            parse_system("vars x,y; x*(y^2-x^3)*(x-1); x*(y^2-x^3)*(y-2)*(3*x+y);").unwrap();
        let dims = compute_dims(&parsed, 5, &Budget::unlimited(), None).unwrap();
        assert_eq!(dims.d, 1);
        assert_eq!(dims.r, 0);
    }

    #[test]
    fn empty_variety_yields_empty_supersets() {
        let (dims, sr) = run_pipeline("vars x; x-1; x-2;", 3, None);
        assert_eq!(dims.d, -1);
        assert!(sr.supersets.values().all(|v| v.is_empty()));
    }

    #[test]
    fn pure_surface_witness_count_is_degree() {
        // the two-surface union has degree 5; the top (and only) level
        // should find exactly 5 witness points on the pinned slice
        let slice = LinearSlice::new(
            3,
            vec![
                vec![c(4.0, 0.0), c(7.0, 0.0), c(2.0, 0.0)],
                vec![c(5.0, 0.0), c(7.0, 0.0), c(3.0, 0.0)],
            ],
            vec![c(6.0, 0.0), c(6.0, 0.0)],
        );
        let (_, sr) = run_pipeline("vars x,y,z; (x^3+z)*(x^2-y);", 21, Some(&slice));
        let w2 = &sr.supersets[&2];
        assert_eq!(w2.len(), 5);
        let expect = [
            vec![c(1.0, 0.0), c(-8.0 / 7.0, 0.0), c(-1.0, 0.0)],
            vec![c(0.0, 0.0), c(-6.0 / 7.0, 0.0), c(0.0, 0.0)],
            vec![
                c(-0.1428571429, 0.9147320339),
                c(-0.8163265306, -0.2613520097),
                c(0.1428571429, -0.9147320339),
            ],
            vec![c(-1.0, 0.0), c(-4.0 / 7.0, 0.0), c(1.0, 0.0)],
            vec![
                c(-0.1428571429, -0.9147320339),
                c(-0.8163265306, 0.2613520097),
                c(0.1428571429, 0.9147320339),
            ],
        ];
        for e in &expect {
            let found = w2.iter().any(|w| {
                w.iter().zip(e).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) < 1e-6
            });
            assert!(found, "missing witness point {:?}", e);
        }
    }

    #[test]
    fn cusp_line_superset_counts() {
        let (_, sr) = run_pipeline(
            "vars x,y; x*(y^2-x^3)*(x-1); x*(y^2-x^3)*(y-2)*(3*x+y);",
            7,
            None,
        );
        // line contributes 1 slice point, the cubic 3
        assert_eq!(sr.supersets[&1].len(), 4);
        // both isolated points must appear among the level-0 candidates
        let w0 = &sr.supersets[&0];
        for target in [[c(1.0, 0.0), c(2.0, 0.0)], [c(1.0, 0.0), c(-3.0, 0.0)]] {
            assert!(
                w0.iter().any(|w| w
                    .iter()
                    .zip(&target)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max)
                    < 1e-6),
                "missing isolated point {:?} in {:?}",
                target,
                w0
            );
        }
        assert!(w0.len() >= 2);
    }

    #[test]
    fn superset_cardinalities_seed_invariant() {
        let src = "vars x,y; x*(y^2-x^3)*(x-1); x*(y^2-x^3)*(y-2)*(3*x+y);";
        let (_, a) = run_pipeline(src, 101, None);
        let (_, b) = run_pipeline(src, 20224, None);
        assert_eq!(a.supersets[&1].len(), b.supersets[&1].len());
    }

    #[test]
    fn snap_recovers_exact_rational_point() {
        let parsed = parse_system("vars x,y; x^2 - y; y - 1;").unwrap();
        let exact = parsed.exact.unwrap();
        let off = [c(1.02, -0.01), c(0.98, 0.02)];
        let snapped = snap_to_exact_zero(&exact, &off).unwrap();
        assert_eq!(snapped, vec![c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(snap_to_exact_zero(&exact, &[c(0.7, 0.0), c(0.7, 0.0)]).is_none());
    }
}
