use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::discrete::DPoint;
use crate::error::{domain, Error, Result};
use crate::matkowski::ComparisonFunction;
use crate::point::Point;
use crate::space::SampleRng;
use crate::space::SpaceParams;

use super::bounds::{binomial, c_q_constant, esp_bound};
use super::solver::ContractionReport;
use super::ContractionProblem;

pub const DEFAULT_Q_CAP: u64 = 100_000;

/// Constants witnessing the Cauchy property of a Picard orbit.
#[derive(Debug, Clone, Serialize)]
pub struct CauchyCertificate {
    pub epsilon: f64,
    pub q: u64,
    pub c_q: f64,
    /// `eps / (b + sqrt(b^2 + rho eps))`
    pub threshold: f64,
    /// `eps - sum_{i=1}^{q-1} C(q,i) b^(q-i) rho^(i-1) (eps / (eps + q c_q))^i`;
    /// positive whenever the chained estimate closes.
    pub esp_slack: f64,
    /// Bound on the distance from the last iterate to the rest of the orbit.
    pub series_tail: Option<f64>,
}

/// `eps / (b + sqrt(b^2 + rho eps))`, the positive root of
/// `rho t^2 + 2 b t = eps` rewritten without cancellation.
pub fn cauchy_threshold(params: SpaceParams, eps: f64) -> f64 {
    let SpaceParams { b, rho } = params;
    eps / (b + (b * b + rho * eps).sqrt())
}

/// Smallest `q >= 2` with `psi^q(eps) < cauchy_threshold(params, eps)`,
/// together with `c_q` and the slack of the chained estimate.
pub fn q_threshold(psi: &ComparisonFunction, params: SpaceParams, eps: f64, q_cap: u64) -> Result<CauchyCertificate> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(domain(format!("epsilon must be finite and > 0, got {eps}")));
    }
    if q_cap < 2 {
        return Err(domain(format!("q_cap must be >= 2, got {q_cap}")));
    }
    let threshold = cauchy_threshold(params, eps);
    let mut v = psi.apply(psi.apply(eps));
    let mut q = 2;
    while !(v < threshold) {
        if q >= q_cap {
            return Err(Error::CapExceeded(format!(
                "{}: psi^{q}({eps}) = {v} still >= threshold {threshold}",
                psi.label()
            )));
        }
        v = psi.apply(v);
        q += 1;
    }
    let c_q = c_q_constant(params, q)?;
    let ratio = eps / (eps + q as f64 * c_q);
    let chained: f64 = (1..q)
        .map(|i| {
            binomial(q, i) * params.b.powf((q - i) as f64) * params.rho.powf((i - 1) as f64) * ratio.powf(i as f64)
        })
        .sum();
    Ok(CauchyCertificate { epsilon: eps, q, c_q, threshold, esp_slack: eps - chained, series_tail: None })
}

#[derive(Debug, Clone, Copy)]
pub struct BallOptions {
    /// Radial perturbations of the center to test.
    pub samples: usize,
    pub seed: u64,
    pub q_cap: u64,
}

impl Default for BallOptions {
    fn default() -> Self {
        BallOptions { samples: 1000, seed: 0, q_cap: DEFAULT_Q_CAP }
    }
}

/// A sampled `z` in the ball whose image `f^q z` left it.
#[derive(Debug, Clone, Serialize)]
pub struct Escape {
    pub z: Point,
    pub distance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BallReport {
    pub certificate: CauchyCertificate,
    pub max_m: u64,
    /// First block index from which `d(x_{(m+1)q}, x_{mq}) < threshold`
    /// for every observed `m`.
    pub p: u64,
    pub center: Point,
    pub orbit_samples: usize,
    pub perturbation_samples: usize,
    pub escapes: Vec<Escape>,
    /// Largest `d(f^q z, center) / eps` over the samples.
    pub worst_ratio: f64,
    /// First step index from which every observed `d_i < eps / (eps + q c_q)`.
    pub i0: Option<u64>,
    /// Smallest `m` with `m q > i0`.
    pub m0: Option<u64>,
    /// Pairs `(m, k)`, `m > m0`, `1 <= k < q`, checked for `d(x_{mq}, x_{mq+k}) < eps`.
    pub block_checks: usize,
    pub block_violations: usize,
    /// Pairs where `d(x_{mq}, x_{mq+k})` exceeded the symmetric-polynomial bound.
    pub esp_violations: usize,
    pub sampling: String,
}

impl BallReport {
    pub fn passed(&self) -> bool {
        self.escapes.is_empty() && self.block_violations == 0 && self.esp_violations == 0
    }
}

/// Empirical check that `f^q` maps `B(x_{pq}, eps)` into itself.
///
/// Refused unless `contraction` (a [`super::verify_contraction`] report for
/// the same problem) passed. The orbit `x_0 .. x_{(max_m+1) q}` locates
/// `p`; the ball is probed at orbit points and at radial perturbations of
/// the center, and the orbit blocks after `m0` are checked against `eps`
/// and the symmetric-polynomial bound.
pub fn invariant_ball_check(
    problem: &ContractionProblem,
    contraction: &ContractionReport,
    eps: f64,
    max_m: u64,
    opts: BallOptions,
) -> Result<BallReport> {
    if !contraction.passed() {
        return Err(Error::Precondition(format!(
            "contraction check for {} failed on {} of {} pairs",
            contraction.map,
            contraction.violations.len(),
            contraction.pairs_checked
        )));
    }
    let certificate = q_threshold(&problem.psi, problem.params, eps, opts.q_cap)?;
    let q = certificate.q;
    let d = &problem.distance;
    let f = &problem.map;

    let len = (max_m + 1) * q;
    let mut orbit = vec![problem.x0.clone()];
    for _ in 0..len {
        let next = f.apply(orbit.last().expect("non-empty"))?;
        orbit.push(next);
    }
    let x = |n: u64| &orbit[n as usize];

    let gaps = (0..=max_m).map(|m| d.distance(x((m + 1) * q), x(m * q))).collect::<Result<Vec<_>>>()?;
    let p = match gaps.iter().rposition(|g| !(*g < certificate.threshold)) {
        None => 0,
        Some(m) if (m as u64) < max_m => m as u64 + 1,
        Some(_) => {
            return Err(Error::CapExceeded(format!(
                "d(x_(m+1)q, x_mq) >= {} at m = max_m = {max_m}",
                certificate.threshold
            )))
        }
    };
    let center = x(p * q).clone();

    let mut zs: Vec<Point> = Vec::new();
    for n in p * q..=len {
        if d.distance(&center, x(n))? < eps {
            zs.push(x(n).clone());
        }
    }
    let orbit_samples = zs.len();
    zs.extend(perturbations(problem, &center, eps, opts)?);
    let perturbation_samples = zs.len() - orbit_samples;

    let mut escapes = Vec::new();
    let mut worst_ratio: f64 = 0.0;
    for z in zs {
        let image = f.apply_n(q, &z)?;
        let dist = d.distance(&image, &center)?;
        worst_ratio = worst_ratio.max(dist / eps);
        if !(dist < eps) {
            escapes.push(Escape { z, distance: dist });
        }
    }
    escapes.sort_by(|a, b| a.z.canonical_cmp(&b.z));

    let steps = (0..len).map(|i| d.distance(x(i), x(i + 1))).collect::<Result<Vec<_>>>()?;
    let step_bound = eps / (eps + q as f64 * certificate.c_q);
    let i0 = match steps.iter().rposition(|s| !(*s < step_bound)) {
        None => Some(0),
        Some(i) if i + 1 < steps.len() => Some(i as u64 + 1),
        Some(_) => None,
    };
    let m0 = i0.map(|i| i / q + 1);
    let (mut block_checks, mut block_violations, mut esp_violations) = (0, 0, 0);
    if let Some(m0) = m0 {
        for m in m0 + 1..=max_m {
            for k in 1..q {
                let dist = d.distance(x(m * q), x(m * q + k))?;
                let legs = &steps[(m * q) as usize..(m * q + k) as usize];
                let bound = esp_bound(problem.params, legs)?;
                block_checks += 1;
                if !(dist < eps) {
                    block_violations += 1;
                }
                if dist > bound + 1e-12 * bound.max(1.0) {
                    esp_violations += 1;
                }
            }
        }
    }

    Ok(BallReport {
        certificate,
        max_m,
        p,
        center,
        orbit_samples,
        perturbation_samples,
        escapes,
        worst_ratio,
        i0: i0.map(|i| i.min(len)),
        m0,
        block_checks,
        block_violations,
        esp_violations,
        sampling: format!(
            "orbit points x_n (n >= pq) inside the ball, plus {} radial perturbations of the center \
             (uniform direction, uniform fraction of the boundary radius along it; seed {})",
            opts.samples, opts.seed
        ),
    })
}

/// Points of `B(center, eps)`: along random rays the boundary crossing is
/// bracketed by doubling and bisection, then a uniform fraction of it is
/// taken. Discrete centers use the enumerated points instead.
fn perturbations(problem: &ContractionProblem, center: &Point, eps: f64, opts: BallOptions) -> Result<Vec<Point>> {
    let d = &problem.distance;
    let inside = |z: &Point| -> bool { matches!(d.distance(center, z), Ok(v) if v < eps) };
    if let Point::Discrete(_) = center {
        return Ok(DPoint::enumerate(1000).map(Point::Discrete).filter(|z| inside(z)).collect());
    }
    let dim = center.coords().map_or(0, <[f64]>::len);
    let mut rng = SampleRng::seed_from_u64(opts.seed);
    let mut out = Vec::with_capacity(opts.samples);
    for _ in 0..opts.samples {
        let mut dir: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        dir.iter_mut().for_each(|v| *v /= norm);
        let at = |s: f64| center.offset(&dir, s).expect("matching dimension");

        let mut hi = 1.0;
        let mut doublings = 0;
        while inside(&at(hi)) && doublings < 1000 {
            hi *= 2.0;
            doublings += 1;
        }
        let mut lo = 0.0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if inside(&at(mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let z = at(lo * rng.random::<f64>());
        if inside(&z) {
            out.push(z);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::quadratic_supra;
    use crate::fixpoint::{verify_contraction, SelfMap};
    use crate::space::ScalarBox;

    fn params(b: f64, rho: f64) -> SpaceParams {
        SpaceParams::new(b, rho).unwrap()
    }

    #[test]
    fn closed_form_q() {
        let half = ComparisonFunction::linear(0.5);
        for eps in [0.01, 1.0, 100.0] {
            assert_eq!(q_threshold(&half, SpaceParams::METRIC, eps, 100).unwrap().q, 2);
            assert_eq!(q_threshold(&half, params(2.0, 0.0), eps, 100).unwrap().q, 3);
        }
        let c = q_threshold(&half, params(1.0, 3.0), 1.0, 100).unwrap();
        assert_eq!(c.q, 2);
        assert!((c.threshold - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(c.c_q, 2.0);
        assert!(c.esp_slack > 0.0);
    }

    #[test]
    fn slow_psi_hits_the_cap() {
        let err = q_threshold(&ComparisonFunction::rational(), SpaceParams::METRIC, 1e-9, 10).unwrap_err();
        assert!(matches!(err, Error::CapExceeded(_)));
        assert!(q_threshold(&ComparisonFunction::linear(0.5), SpaceParams::METRIC, 0.0, 10).is_err());
    }

    fn problem() -> ContractionProblem {
        let c = quadratic_supra(1.0, 1.0).unwrap();
        ContractionProblem::new(
            c.distance,
            c.declared.unwrap(),
            SelfMap::affine(0.5, 1.0),
            ComparisonFunction::linear(0.5),
            Point::Scalar(10.0),
        )
    }

    #[test]
    fn ball_is_invariant() {
        let p = problem();
        let v = verify_contraction(&p, &ScalarBox::new(-10.0, 10.0), 1000, 1e-12, 0).unwrap();
        for eps in [0.1, 1.0, 10.0, 1e6] {
            let r = invariant_ball_check(&p, &v, eps, 60, BallOptions::default()).unwrap();
            assert!(r.passed(), "eps = {eps}: {:?}", r.escapes.first());
            assert!(r.perturbation_samples > 900);
            assert!(r.worst_ratio < 1.0);
        }
    }

    #[test]
    fn worked_ball_numbers() {
        // eps = 10: threshold 10/(1 + sqrt 21) = 1.79..., q = 3, and the first
        // block gap d(x_3, x_0) = 7 * 8 = 56 forces p = 1.
        let p = problem();
        let v = verify_contraction(&p, &ScalarBox::new(-10.0, 10.0), 100, 1e-12, 0).unwrap();
        let r = invariant_ball_check(&p, &v, 10.0, 40, BallOptions::default()).unwrap();
        assert_eq!(r.certificate.q, 3);
        assert_eq!(r.p, 1);
        assert_eq!(r.center, Point::Scalar(3.0));
    }

    #[test]
    fn refused_without_contraction() {
        let mut p = problem();
        p.map = SelfMap::identity();
        let v = verify_contraction(&p, &ScalarBox::new(-10.0, 10.0), 100, 1e-12, 0).unwrap();
        let err = invariant_ball_check(&p, &v, 1.0, 10, BallOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn p_beyond_max_m_is_cap_exceeded() {
        let mut p = problem();
        p.x0 = Point::Scalar(1e5);
        let v = verify_contraction(&p, &ScalarBox::new(-10.0, 10.0), 100, 1e-12, 0).unwrap();
        let err = invariant_ball_check(&p, &v, 0.1, 2, BallOptions::default()).unwrap_err();
        assert!(matches!(err, Error::CapExceeded(_)));
    }
}
