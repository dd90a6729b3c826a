//! Distance functions and the four axiom systems built on top of a
//! semimetric: b-metric, suprametric and b-suprametric.
//!
//! Every relaxed triangle inequality handled here is an instance of
//!
//! ```text
//! d(x, y) <= b * (d(x, z) + d(z, y)) + rho * d(x, z) * d(z, y)
//! ```
//!
//! with `b >= 1` and `rho >= 0`. A b-metric has `rho = 0`, a suprametric
//! has `b = 1`. The checks in this module are sampled or exhaustive, never
//! symbolic.

mod front;
mod sampler;

use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::point::Point;

pub use front::{estimate_min_params, pareto_front, HalfPlane};
pub use sampler::{DiscreteUniform, GridBox, PointSampler, SampleRng, ScalarBox, VectorBox};

/// The pair `(b, rho)` of the relaxed triangle inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub b: f64,
    pub rho: f64,
}

impl SpaceParams {
    /// Plain triangle inequality.
    pub const METRIC: SpaceParams = SpaceParams { b: 1.0, rho: 0.0 };

    pub fn new(b: f64, rho: f64) -> Result<Self> {
        if !b.is_finite() || !rho.is_finite() {
            return Err(domain(format!("non-finite space parameters (b={b}, rho={rho})")));
        }
        if b < 1.0 {
            return Err(domain(format!("b must be >= 1, got {b}")));
        }
        if rho < 0.0 {
            return Err(domain(format!("rho must be >= 0, got {rho}")));
        }
        Ok(SpaceParams { b, rho })
    }

    /// Right-hand side of the relaxed inequality for the two legs `dxz`, `dzy`.
    pub fn bound(&self, dxz: f64, dzy: f64) -> f64 {
        self.b * (dxz + dzy) + self.rho * dxz * dzy
    }

    /// `true` when `self` needs no more relaxation than `other` in either
    /// coordinate.
    pub fn dominated_by(&self, other: &SpaceParams) -> bool {
        self.b <= other.b && self.rho <= other.rho
    }
}

/// Which axiom system a distance is checked against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpaceClass {
    Semimetric,
    BMetric(f64),
    Suprametric(f64),
    BSuprametric(f64, f64),
}

impl SpaceClass {
    pub fn name(&self) -> &'static str {
        match self {
            SpaceClass::Semimetric => "semimetric",
            SpaceClass::BMetric(_) => "b-metric",
            SpaceClass::Suprametric(_) => "suprametric",
            SpaceClass::BSuprametric(..) => "b-suprametric",
        }
    }

    /// Parameters of the relaxed triangle inequality, `None` for a bare
    /// semimetric.
    pub fn params(&self) -> Option<SpaceParams> {
        match *self {
            SpaceClass::Semimetric => None,
            SpaceClass::BMetric(b) => Some(SpaceParams { b, rho: 0.0 }),
            SpaceClass::Suprametric(rho) => Some(SpaceParams { b: 1.0, rho }),
            SpaceClass::BSuprametric(b, rho) => Some(SpaceParams { b, rho }),
        }
    }

    /// The same class written as a b-suprametric.
    pub fn canonical(&self) -> SpaceClass {
        match self.params() {
            Some(p) => SpaceClass::BSuprametric(p.b, p.rho),
            None => SpaceClass::Semimetric,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.params() {
            Some(p) => SpaceParams::new(p.b, p.rho).map(|_| ()),
            None => Ok(()),
        }
    }
}

impl From<SpaceParams> for SpaceClass {
    fn from(p: SpaceParams) -> Self {
        SpaceClass::BSuprametric(p.b, p.rho)
    }
}

impl Serialize for SpaceClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

type DistanceEval = dyn Fn(&Point, &Point) -> Result<f64> + Send + Sync;

/// A labelled two-point function. [`DistanceFn::distance`] enforces that
/// every returned value is finite and nonnegative.
#[derive(Clone)]
pub struct DistanceFn {
    label: String,
    eval: Arc<DistanceEval>,
}

impl DistanceFn {
    pub fn new<F>(label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(&Point, &Point) -> Result<f64> + Send + Sync + 'static,
    {
        DistanceFn { label: label.into(), eval: Arc::new(eval) }
    }

    /// `|x - y|` on scalars.
    pub fn absolute() -> Self {
        DistanceFn::new("abs", |x, y| match (x, y) {
            (Point::Scalar(a), Point::Scalar(b)) => Ok((a - b).abs()),
            _ => Err(mismatch(x, y, "scalar")),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        let v = (self.eval)(x, y)?;
        if v.is_nan() {
            Err(domain(format!("{}: NaN distance between {x} and {y}", self.label)))
        } else if v.is_infinite() {
            Err(Error::Overflow(format!("{}: distance between {x} and {y} overflows", self.label)))
        } else if v < 0.0 {
            Err(domain(format!("{}: negative distance {v} between {x} and {y}", self.label)))
        } else {
            Ok(v)
        }
    }
}

impl fmt::Debug for DistanceFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DistanceFn").field("label", &self.label).finish_non_exhaustive()
    }
}

pub(crate) fn mismatch(x: &Point, y: &Point, expected: &str) -> Error {
    domain(format!("expected {expected} points, got {} and {}", x.kind(), y.kind()))
}

/// `b (d(x,z) + d(z,y)) + rho d(x,z) d(z,y) - d(x,y)`; the relaxed
/// inequality holds at `(x, y, z)` iff this is `>= 0`.
pub fn triple_defect(d: &DistanceFn, params: SpaceParams, x: &Point, y: &Point, z: &Point) -> Result<f64> {
    let dxy = d.distance(x, y)?;
    let dxz = d.distance(x, z)?;
    let dzy = d.distance(z, y)?;
    Ok(params.bound(dxz, dzy) - dxy)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub x: Point,
    pub y: Point,
    pub z: Point,
    pub defect: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SemimetricAxiom {
    /// `d(x, y) = 0` iff `x = y`.
    #[serde(rename = "d1")]
    Identity,
    /// `d(x, y) = d(y, x)`.
    #[serde(rename = "d2")]
    Symmetry,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemimetricFailure {
    pub axiom: SemimetricAxiom,
    pub x: Point,
    pub y: Point,
    pub value: f64,
}

/// Result of a sampled or exhaustive axiom check.
///
/// `violations` holds exactly the checked triples whose defect is below
/// `-tolerance`, sorted canonically by `(x, y, z)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub label: String,
    pub class: SpaceClass,
    pub params: Option<SpaceParams>,
    #[serde(rename = "samples")]
    pub samples_checked: usize,
    pub seed: Option<u64>,
    pub tolerance: f64,
    pub violations: Vec<Violation>,
    pub worst_defect: Option<f64>,
    pub semimetric_failures: Vec<SemimetricFailure>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.semimetric_failures.is_empty()
    }
}

/// Accumulates pair and triple checks into an [`AxiomReport`].
pub(crate) struct AxiomAccumulator<'a> {
    d: &'a DistanceFn,
    params: Option<SpaceParams>,
    tolerance: f64,
    checked: usize,
    violations: Vec<Violation>,
    failures: Vec<SemimetricFailure>,
    worst: Option<f64>,
}

impl<'a> AxiomAccumulator<'a> {
    pub(crate) fn new(d: &'a DistanceFn, cls: SpaceClass, tolerance: f64) -> Result<Self> {
        cls.validate()?;
        if !(tolerance >= 0.0) {
            return Err(domain(format!("tolerance must be >= 0, got {tolerance}")));
        }
        Ok(AxiomAccumulator {
            d,
            params: cls.params(),
            tolerance,
            checked: 0,
            violations: Vec::new(),
            failures: Vec::new(),
            worst: None,
        })
    }

    fn check_pair(&mut self, x: &Point, y: &Point) -> Result<f64> {
        let dxx = self.d.distance(x, x)?;
        if dxx > self.tolerance {
            self.failures.push(SemimetricFailure {
                axiom: SemimetricAxiom::Identity,
                x: x.clone(),
                y: x.clone(),
                value: dxx,
            });
        }
        let dxy = self.d.distance(x, y)?;
        if x != y && dxy <= 0.0 {
            self.failures.push(SemimetricFailure {
                axiom: SemimetricAxiom::Identity,
                x: x.clone(),
                y: y.clone(),
                value: dxy,
            });
        }
        let dyx = self.d.distance(y, x)?;
        if (dxy - dyx).abs() > self.tolerance {
            self.failures.push(SemimetricFailure {
                axiom: SemimetricAxiom::Symmetry,
                x: x.clone(),
                y: y.clone(),
                value: dxy - dyx,
            });
        }
        Ok(dxy)
    }

    pub(crate) fn check(&mut self, x: &Point, y: &Point, z: &Point) -> Result<()> {
        let dxy = self.check_pair(x, y)?;
        self.checked += 1;
        if let Some(params) = self.params {
            let defect = params.bound(self.d.distance(x, z)?, self.d.distance(z, y)?) - dxy;
            self.record(defect, || (x.clone(), y.clone(), z.clone()));
        }
        Ok(())
    }

    /// Records a triple whose defect was computed by the caller from
    /// precomputed distances; semimetric axioms are the caller's job.
    pub(crate) fn record<F>(&mut self, defect: f64, triple: F)
    where
        F: FnOnce() -> (Point, Point, Point),
    {
        self.worst = Some(self.worst.map_or(defect, |w: f64| w.min(defect)));
        if defect < -self.tolerance {
            let (x, y, z) = triple();
            self.violations.push(Violation { x, y, z, defect });
        }
    }

    pub(crate) fn count(&mut self, n: usize) {
        self.checked += n;
    }

    pub(crate) fn push_failure(&mut self, failure: SemimetricFailure) {
        self.failures.push(failure);
    }

    pub(crate) fn finish(mut self, cls: SpaceClass, seed: Option<u64>) -> AxiomReport {
        self.violations.sort_by(|a, b| {
            a.x.canonical_cmp(&b.x).then_with(|| a.y.canonical_cmp(&b.y)).then_with(|| a.z.canonical_cmp(&b.z))
        });
        self.failures.sort_by(|a, b| {
            (a.axiom as u8)
                .cmp(&(b.axiom as u8))
                .then_with(|| a.x.canonical_cmp(&b.x))
                .then_with(|| a.y.canonical_cmp(&b.y))
        });
        AxiomReport {
            label: self.d.label().to_string(),
            class: cls,
            params: self.params,
            samples_checked: self.checked,
            seed,
            tolerance: self.tolerance,
            violations: self.violations,
            worst_defect: self.worst,
            semimetric_failures: self.failures,
        }
    }
}

/// Samples `n_samples` triples from `sampler` (seeded by `seed`) and checks
/// identity and symmetry on `(x, y)` plus, unless `cls` is a bare
/// semimetric, the relaxed triangle inequality on `(x, y, z)`.
pub fn check_axioms(
    d: &DistanceFn,
    cls: SpaceClass,
    sampler: &dyn PointSampler,
    n_samples: usize,
    tolerance: f64,
    seed: u64,
) -> Result<AxiomReport> {
    if n_samples == 0 {
        return Err(domain("n_samples must be >= 1"));
    }
    let mut acc = AxiomAccumulator::new(d, cls, tolerance)?;
    let mut rng = SampleRng::seed_from_u64(seed);
    for _ in 0..n_samples {
        let x = sampler.sample(&mut rng);
        let y = sampler.sample(&mut rng);
        let z = sampler.sample(&mut rng);
        for p in [&x, &y, &z] {
            p.validate()?;
        }
        acc.check(&x, &y, &z)?;
    }
    Ok(acc.finish(cls, Some(seed)))
}

/// Same checks as [`check_axioms`] on an explicit list of `(x, y, z)` triples.
pub fn check_triples(
    d: &DistanceFn,
    cls: SpaceClass,
    triples: &[(Point, Point, Point)],
    tolerance: f64,
) -> Result<AxiomReport> {
    let mut acc = AxiomAccumulator::new(d, cls, tolerance)?;
    for (x, y, z) in triples {
        for p in [x, y, z] {
            p.validate()?;
        }
        acc.check(x, y, z)?;
    }
    Ok(acc.finish(cls, None))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic11() -> DistanceFn {
        // d^(1,1) over |.|, written out here independently of `constructions`.
        DistanceFn::new("quad11", |x, y| {
            let u = (x.as_scalar().unwrap() - y.as_scalar().unwrap()).abs();
            Ok(u * (u + 1.0))
        })
    }

    fn s(v: f64) -> Point {
        Point::Scalar(v)
    }

    #[test]
    fn distance_examples() {
        let abs = DistanceFn::absolute();
        assert_eq!(abs.distance(&s(3.0), &s(3.0)).unwrap(), 0.0);
        assert_eq!(abs.distance(&s(0.0), &s(1.0)).unwrap(), 1.0);
        assert_eq!(quadratic11().distance(&s(0.0), &s(2.0)).unwrap(), 6.0);
    }

    #[test]
    fn distance_rejects_mismatched_kinds() {
        let err = DistanceFn::absolute().distance(&s(0.0), &Point::Vector(vec![0.0])).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn distance_enforces_contract() {
        let neg = DistanceFn::new("neg", |_, _| Ok(-1.0));
        assert!(matches!(neg.distance(&s(0.0), &s(1.0)), Err(Error::Domain(_))));
        let inf = DistanceFn::new("inf", |_, _| Ok(f64::INFINITY));
        assert!(matches!(inf.distance(&s(0.0), &s(1.0)), Err(Error::Overflow(_))));
    }

    #[test]
    fn triple_defect_examples() {
        let abs = DistanceFn::absolute();
        let d = quadratic11();
        let (x, y, z) = (s(0.0), s(2.0), s(1.0));
        assert_eq!(triple_defect(&abs, SpaceParams::METRIC, &x, &y, &z).unwrap(), 0.0);
        assert_eq!(triple_defect(&d, SpaceParams::new(1.0, 2.0).unwrap(), &x, &y, &z).unwrap(), 6.0);
        assert_eq!(triple_defect(&d, SpaceParams::METRIC, &x, &y, &z).unwrap(), -2.0);
    }

    #[test]
    fn degenerate_triple_defect() {
        let d = quadratic11();
        let params = SpaceParams::new(2.5, 3.0).unwrap();
        let (x, y) = (s(-1.0), s(0.75));
        let dxy = d.distance(&x, &y).unwrap();
        assert_eq!(triple_defect(&d, params, &x, &y, &x).unwrap(), (params.b - 1.0) * dxy);
    }

    #[test]
    fn params_validation() {
        assert!(SpaceParams::new(0.5, 0.0).is_err());
        assert!(SpaceParams::new(1.0, -1.0).is_err());
        assert!(SpaceParams::new(f64::NAN, 0.0).is_err());
        assert!(SpaceParams::new(1.0, 0.0).is_ok());
    }

    #[test]
    fn class_conversions() {
        assert_eq!(SpaceClass::BMetric(2.0).canonical(), SpaceClass::BSuprametric(2.0, 0.0));
        assert_eq!(SpaceClass::Suprametric(3.0).canonical(), SpaceClass::BSuprametric(1.0, 3.0));
        assert_eq!(SpaceClass::Semimetric.params(), None);
    }

    #[test]
    fn metric_has_no_violations() {
        let report = check_axioms(
            &DistanceFn::absolute(),
            SpaceClass::BMetric(1.0),
            &ScalarBox::new(-10.0, 10.0),
            10_000,
            1e-9,
            3,
        )
        .unwrap();
        assert!(report.passed());
        assert_eq!(report.samples_checked, 10_000);
    }

    #[test]
    fn quadratic_is_suprametric_but_not_metric() {
        let d = quadratic11();
        let sampler = ScalarBox::new(-10.0, 10.0);
        let supra = check_axioms(&d, SpaceClass::Suprametric(2.0), &sampler, 10_000, 1e-9, 1).unwrap();
        assert!(supra.passed());
        let triples = vec![(s(0.0), s(2.0), s(1.0)), (s(5.0), s(5.0), s(1.0))];
        let metric = check_triples(&d, SpaceClass::BMetric(1.0), &triples, 1e-9).unwrap();
        assert_eq!(metric.violations.len(), 1);
        assert_eq!(metric.violations[0].defect, -2.0);
        assert_eq!(metric.worst_defect, Some(-2.0));
    }

    #[test]
    fn semimetric_failures_are_reported() {
        let asym = DistanceFn::new("asym", |x, y| {
            let (a, b) = (x.as_scalar().unwrap(), y.as_scalar().unwrap());
            Ok(if a < b { 2.0 * (b - a) } else { a - b })
        });
        let r = check_triples(&asym, SpaceClass::Semimetric, &[(s(0.0), s(1.0), s(2.0))], 1e-9).unwrap();
        assert_eq!(r.semimetric_failures.len(), 1);
        assert_eq!(r.semimetric_failures[0].axiom, SemimetricAxiom::Symmetry);
        assert_eq!(r.worst_defect, None);

        let degenerate = DistanceFn::new("zero", |_, _| Ok(0.0));
        let r = check_triples(&degenerate, SpaceClass::Semimetric, &[(s(0.0), s(1.0), s(2.0))], 1e-9).unwrap();
        assert_eq!(r.semimetric_failures[0].axiom, SemimetricAxiom::Identity);
    }

    #[test]
    fn invalid_sampler_is_a_domain_error() {
        let bad = |_: &mut SampleRng| Point::Scalar(f64::NAN);
        let err = check_axioms(&DistanceFn::absolute(), SpaceClass::Semimetric, &bad, 5, 1e-9, 0).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn class_conversion_reports_agree() {
        let d = quadratic11();
        let sampler = ScalarBox::new(-3.0, 3.0);
        let strip = |mut r: AxiomReport| {
            r.class = SpaceClass::Semimetric;
            r
        };
        for (a, b) in [
            (SpaceClass::BMetric(1.5), SpaceClass::BSuprametric(1.5, 0.0)),
            (SpaceClass::Suprametric(0.5), SpaceClass::BSuprametric(1.0, 0.5)),
        ] {
            let ra = check_axioms(&d, a, &sampler, 2_000, 1e-9, 11).unwrap();
            let rb = check_axioms(&d, b, &sampler, 2_000, 1e-9, 11).unwrap();
            assert_eq!(strip(ra), strip(rb));
        }
    }

    #[test]
    fn report_json_shape() {
        let r = check_triples(&quadratic11(), SpaceClass::BMetric(1.0), &[(s(0.0), s(2.0), s(1.0))], 1e-9).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["class"], "b-metric");
        assert_eq!(v["params"]["b"], 1.0);
        assert_eq!(v["params"]["rho"], 0.0);
        assert_eq!(v["samples"], 1);
        assert_eq!(v["violations"][0]["defect"], -2.0);
        assert_eq!(v["violations"][0]["z"], 1.0);
    }
}
