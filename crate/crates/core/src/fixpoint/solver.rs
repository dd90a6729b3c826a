use rand::SeedableRng;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::point::Point;
use crate::space::{PointSampler, SampleRng};

use super::ContractionProblem;

pub const DEFAULT_STEP_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_ITER: u64 = 100_000;
/// Step distances above this abort the iteration.
pub const DIVERGENCE_STEP: f64 = 1e12;

#[derive(Debug, Clone, Serialize)]
pub struct ContractionViolation {
    pub x: Point,
    pub y: Point,
    /// `d(f x, f y)`
    pub lhs: f64,
    /// `psi(d(x, y))`
    pub rhs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContractionReport {
    pub map: String,
    pub psi: String,
    pub pairs_checked: usize,
    pub seed: u64,
    pub tolerance: f64,
    /// Smallest `psi(d(x, y)) - d(f x, f y)` seen.
    pub worst_slack: Option<f64>,
    pub violations: Vec<ContractionViolation>,
}

impl ContractionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `d(f x, f y) <= psi(d(x, y)) + tol` on `n_pairs` sampled pairs.
pub fn verify_contraction(
    problem: &ContractionProblem,
    sampler: &dyn PointSampler,
    n_pairs: usize,
    tol: f64,
    seed: u64,
) -> Result<ContractionReport> {
    if n_pairs == 0 {
        return Err(domain("n_pairs must be >= 1"));
    }
    let d = &problem.distance;
    let mut rng = SampleRng::seed_from_u64(seed);
    let mut violations = Vec::new();
    let mut worst: Option<f64> = None;
    for _ in 0..n_pairs {
        let x = sampler.sample(&mut rng);
        let y = sampler.sample(&mut rng);
        let lhs = d.distance(&problem.map.apply(&x)?, &problem.map.apply(&y)?)?;
        let rhs = problem.psi.apply(d.distance(&x, &y)?);
        let slack = rhs - lhs;
        worst = Some(worst.map_or(slack, |w| w.min(slack)));
        if lhs > rhs + tol {
            violations.push(ContractionViolation { x, y, lhs, rhs });
        }
    }
    violations.sort_by(|a, b| a.x.canonical_cmp(&b.x).then_with(|| a.y.canonical_cmp(&b.y)));
    Ok(ContractionReport {
        map: problem.map.label().to_string(),
        psi: problem.psi.label().to_string(),
        pairs_checked: n_pairs,
        seed,
        tolerance: tol,
        worst_slack: worst,
        violations,
    })
}

/// The orbit `x_0, x_1 = f x_0, ...` and its step distances
/// `d_i = d(x_i, x_{i+1})`.
#[derive(Debug, Clone, Default, Serialize)]
pub struct IterationTrace {
    pub points: Vec<Point>,
    pub step_distances: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FixedPointResult {
    pub x_star: Point,
    /// Number of applications of the map.
    pub iterations: u64,
    /// `d(x*, f x*)`, computed after the loop stops.
    pub residual: f64,
    pub converged: bool,
    #[serde(skip)]
    pub trace: IterationTrace,
}

/// Iterates `x_{n+1} = f(x_n)` from `problem.x0` until a step distance
/// drops below `step_tol` or `max_iter` steps are taken.
pub fn picard(problem: &ContractionProblem, max_iter: u64, step_tol: f64) -> Result<FixedPointResult> {
    if max_iter == 0 {
        return Err(domain("max_iter must be >= 1"));
    }
    if !(step_tol > 0.0) {
        return Err(domain(format!("step_tol must be > 0, got {step_tol}")));
    }
    problem.x0.validate()?;
    let step = |x: &Point| -> Result<(Point, f64)> {
        let next = problem.map.apply(x)?;
        let d = problem.distance.distance(x, &next).map_err(|e| match e {
            Error::Overflow(m) | Error::Domain(m) => Error::Divergence(format!("step distance: {m}")),
            other => other,
        })?;
        Ok((next, d))
    };

    let mut trace = IterationTrace { points: vec![problem.x0.clone()], step_distances: Vec::new() };
    let mut x = problem.x0.clone();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter {
        let (next, d) = step(&x)?;
        iterations += 1;
        if d > DIVERGENCE_STEP {
            return Err(Error::Divergence(format!(
                "step distance {d} at iteration {iterations} exceeds {DIVERGENCE_STEP}"
            )));
        }
        trace.points.push(next.clone());
        trace.step_distances.push(d);
        x = next;
        if d < step_tol {
            converged = true;
            break;
        }
    }
    let (_, residual) = step(&x)?;
    Ok(FixedPointResult { x_star: x, iterations, residual, converged, trace })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UniquenessVerdict {
    Unique,
    NotUnique,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct UniquenessRun {
    pub start: Point,
    pub x_star: Point,
    pub iterations: u64,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct UniquenessReport {
    pub runs: Vec<UniquenessRun>,
    pub tolerance: f64,
    pub max_pairwise_distance: f64,
    pub verdict: UniquenessVerdict,
}

impl UniquenessReport {
    pub fn passed(&self) -> bool {
        self.verdict == UniquenessVerdict::Unique
    }
}

/// Runs [`picard`] from every start and compares the limits pairwise.
pub fn uniqueness_check(
    problem: &ContractionProblem,
    starts: &[Point],
    tol: f64,
    max_iter: u64,
    step_tol: f64,
) -> Result<UniquenessReport> {
    if starts.len() < 2 {
        return Err(domain(format!("need at least 2 starts, got {}", starts.len())));
    }
    let runs = starts
        .iter()
        .map(|s| {
            let r = picard(&problem.with_start(s.clone()), max_iter, step_tol)?;
            Ok(UniquenessRun { start: s.clone(), x_star: r.x_star, iterations: r.iterations, converged: r.converged })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut max_pairwise: f64 = 0.0;
    for (i, a) in runs.iter().enumerate() {
        for b in &runs[i + 1..] {
            max_pairwise = max_pairwise.max(problem.distance.distance(&a.x_star, &b.x_star)?);
        }
    }
    let verdict = if runs.iter().any(|r| !r.converged) {
        UniquenessVerdict::Inconclusive
    } else if max_pairwise < tol {
        UniquenessVerdict::Unique
    } else {
        UniquenessVerdict::NotUnique
    };
    Ok(UniquenessReport { runs, tolerance: tol, max_pairwise_distance: max_pairwise, verdict })
}
