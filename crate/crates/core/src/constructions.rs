//! Concrete b-suprametrics built from an ordinary metric, each with the
//! parameters `(b, rho)` it is declared to satisfy.
//!
//! `lp` and `lp_grid` are finite-dimensional stand-ins for `l_p` and
//! `L_p[0, 1]` (`0 < p < 1`); the grid version integrates with the
//! midpoint rule on `grid` cells.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::point::Point;
use crate::space::{mismatch, DistanceFn, GridBox, PointSampler, ScalarBox, SpaceParams, VectorBox};

/// An ordinary metric `d_m` that the constructions are built on.
#[derive(Debug, Clone)]
pub struct BaseMetric {
    distance: DistanceFn,
}

impl BaseMetric {
    /// Wraps a function the caller vouches satisfies the triangle inequality.
    pub fn new(distance: DistanceFn) -> Self {
        BaseMetric { distance }
    }

    /// `|x - y|` on scalars, Euclidean distance on vectors and grid functions.
    pub fn standard() -> Self {
        BaseMetric::new(DistanceFn::new("std", |x, y| match (x, y) {
            (Point::Scalar(a), Point::Scalar(b)) => Ok((a - b).abs()),
            (Point::Vector(a), Point::Vector(b)) | (Point::GridFn(a), Point::GridFn(b)) => {
                if a.len() != b.len() {
                    return Err(domain(format!("length mismatch {} vs {}", a.len(), b.len())));
                }
                Ok(a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt())
            }
            _ => Err(mismatch(x, y, "scalar, vector or grid")),
        }))
    }

    pub fn label(&self) -> &str {
        self.distance.label()
    }

    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.distance.distance(x, y)
    }

    /// `d(x, y) = g(d_m(x, y))`.
    fn lift<G>(&self, label: String, g: G) -> DistanceFn
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let dm = self.distance.clone();
        DistanceFn::new(label, move |x, y| Ok(g(dm.distance(x, y)?)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionKind {
    /// `d_m (a d_m + scale)`
    Quadratic,
    /// `exp(beta d_m^2) - 1`
    ExpSquare,
    /// `gamma (exp(d_m) - 1)`
    ExpSupra,
    /// `(sum |x_i - y_i|^p)^(1/p)` on vectors of length `dim`
    Lp,
    /// `((1/grid) sum |x_i - y_i|^p)^(1/p)` on grid functions
    LpGrid,
    /// `d0 (d0 + 1)` with `d0` the `lp` distance
    ComposedLp,
    /// `d0 (d0 + 1)` with `d0` the `lp_grid` distance
    ComposedLpGrid,
    /// `d0 (d0 + 1)` with `d0` the quadratic distance
    ComposedQuadratic,
    /// `exp(d0^2) - 1` with `d0 = exp(d_m^2) - 1`
    ExpSquareOfSupra,
}

impl ConstructionKind {
    pub const ALL: [ConstructionKind; 9] = [
        ConstructionKind::Quadratic,
        ConstructionKind::ExpSquare,
        ConstructionKind::ExpSupra,
        ConstructionKind::Lp,
        ConstructionKind::LpGrid,
        ConstructionKind::ComposedLp,
        ConstructionKind::ComposedLpGrid,
        ConstructionKind::ComposedQuadratic,
        ConstructionKind::ExpSquareOfSupra,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ConstructionKind::Quadratic => "quadratic",
            ConstructionKind::ExpSquare => "exp_square",
            ConstructionKind::ExpSupra => "exp_supra",
            ConstructionKind::Lp => "lp",
            ConstructionKind::LpGrid => "lp_grid",
            ConstructionKind::ComposedLp => "composed_lp",
            ConstructionKind::ComposedLpGrid => "composed_lp_grid",
            ConstructionKind::ComposedQuadratic => "composed_quadratic",
            ConstructionKind::ExpSquareOfSupra => "exp_square_of_supra",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        let norm = name.replace('-', "_");
        Self::ALL.into_iter().find(|k| k.name() == norm)
    }
}

/// Parameters of a construction; only the ones its kind uses are set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
}

/// JSON-friendly description from which a [`Construction`] can be rebuilt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Descriptor {
    pub kind: ConstructionKind,
    pub params: ConstructionParams,
    #[serde(default)]
    pub declared: Option<SpaceParams>,
}

#[derive(Debug, Clone)]
pub struct Construction {
    pub distance: DistanceFn,
    pub declared: Option<SpaceParams>,
    pub descriptor: Descriptor,
}

impl Construction {
    fn new(kind: ConstructionKind, params: ConstructionParams, distance: DistanceFn, declared: SpaceParams) -> Self {
        Construction {
            distance,
            declared: Some(declared),
            descriptor: Descriptor { kind, params, declared: Some(declared) },
        }
    }

    pub fn kind(&self) -> ConstructionKind {
        self.descriptor.kind
    }

    /// Uniform sampler on `[lo, hi)` per coordinate, over the point kind the
    /// construction is defined on (vectors when a scalar-based construction
    /// carries a `dim`).
    pub fn sampler(&self, lo: f64, hi: f64) -> Box<dyn PointSampler + Send + Sync> {
        let ps = &self.descriptor.params;
        match self.kind() {
            ConstructionKind::Lp | ConstructionKind::ComposedLp => {
                Box::new(VectorBox { dim: ps.dim.unwrap_or(1), lo, hi })
            }
            ConstructionKind::LpGrid | ConstructionKind::ComposedLpGrid => {
                Box::new(GridBox { grid: ps.grid.unwrap_or(1), lo, hi })
            }
            _ => match ps.dim {
                Some(dim) => Box::new(VectorBox { dim, lo, hi }),
                None => Box::new(ScalarBox::new(lo, hi)),
            },
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{name} must be finite and > 0, got {v}")))
    }
}

fn at_least_one(name: &str, v: f64) -> Result<()> {
    if v >= 1.0 && v.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{name} must be finite and >= 1, got {v}")))
    }
}

fn exponent(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("p must lie strictly inside (0, 1), got {p}")))
    }
}

/// `d_m (a d_m + scale)`, a suprametric with `rho = 2a / scale`.
pub fn quadratic_supra(a: f64, scale: f64) -> Result<Construction> {
    quadratic_supra_on(&BaseMetric::standard(), a, scale)
}

pub fn quadratic_supra_on(dm: &BaseMetric, a: f64, scale: f64) -> Result<Construction> {
    positive("a", a)?;
    at_least_one("scale", scale)?;
    let d = dm.lift(format!("quadratic(a={a},scale={scale})"), move |t| t * (a * t + scale));
    let params = ConstructionParams { a: Some(a), scale: Some(scale), ..Default::default() };
    Ok(Construction::new(ConstructionKind::Quadratic, params, d, SpaceParams { b: 1.0, rho: 2.0 * a / scale }))
}

/// `exp(beta d_m^2) - 1`, declared `(1, 1)`.
pub fn exp_square_supra(beta: f64) -> Result<Construction> {
    exp_square_supra_on(&BaseMetric::standard(), beta)
}

pub fn exp_square_supra_on(dm: &BaseMetric, beta: f64) -> Result<Construction> {
    at_least_one("beta", beta)?;
    let d = dm.lift(format!("exp_square(beta={beta})"), move |t| (beta * t * t).exp_m1());
    let params = ConstructionParams { beta: Some(beta), ..Default::default() };
    Ok(Construction::new(ConstructionKind::ExpSquare, params, d, SpaceParams { b: 1.0, rho: 1.0 }))
}

/// `gamma (exp(d_m) - 1)`, a suprametric with `rho = 1 / gamma`.
pub fn exp_supra(gamma: f64) -> Result<Construction> {
    exp_supra_on(&BaseMetric::standard(), gamma)
}

pub fn exp_supra_on(dm: &BaseMetric, gamma: f64) -> Result<Construction> {
    positive("gamma", gamma)?;
    let d = dm.lift(format!("exp_supra(gamma={gamma})"), move |t| gamma * t.exp_m1());
    let params = ConstructionParams { gamma: Some(gamma), ..Default::default() };
    Ok(Construction::new(ConstructionKind::ExpSupra, params, d, SpaceParams { b: 1.0, rho: 1.0 / gamma }))
}

fn p_sum(p: f64, a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).abs().powf(p)).sum()
}

/// `(sum_i |x_i - y_i|^p)^(1/p)` on vectors of length `dim`, a b-metric
/// with `b = 2^(1/p)`.
pub fn lp_distance(p: f64, dim: usize) -> Result<Construction> {
    exponent(p)?;
    if dim == 0 {
        return Err(domain("dim must be >= 1"));
    }
    let d = DistanceFn::new(format!("lp(p={p})"), move |x, y| match (x, y) {
        (Point::Vector(a), Point::Vector(b)) if a.len() == b.len() => Ok(p_sum(p, a, b).powf(1.0 / p)),
        (Point::Vector(a), Point::Vector(b)) => Err(domain(format!("length mismatch {} vs {}", a.len(), b.len()))),
        _ => Err(mismatch(x, y, "vector")),
    });
    let params = ConstructionParams { p: Some(p), dim: Some(dim), ..Default::default() };
    Ok(Construction::new(ConstructionKind::Lp, params, d, SpaceParams { b: 2f64.powf(1.0 / p), rho: 0.0 }))
}

/// `((1/m) sum_i |x_i - y_i|^p)^(1/p)` on grid functions with `m = grid`
/// midpoint values, a b-metric with `b = 2^(1/p)`.
pub fn lp_grid_distance(p: f64, grid: usize) -> Result<Construction> {
    exponent(p)?;
    if grid == 0 {
        return Err(domain("grid must be >= 1"));
    }
    let d = DistanceFn::new(format!("lp_grid(p={p})"), move |x, y| match (x, y) {
        (Point::GridFn(a), Point::GridFn(b)) if a.len() == b.len() => {
            Ok((p_sum(p, a, b) / a.len() as f64).powf(1.0 / p))
        }
        (Point::GridFn(a), Point::GridFn(b)) => Err(domain(format!("grid mismatch {} vs {}", a.len(), b.len()))),
        _ => Err(mismatch(x, y, "grid")),
    });
    let params = ConstructionParams { p: Some(p), grid: Some(grid), ..Default::default() };
    Ok(Construction::new(ConstructionKind::LpGrid, params, d, SpaceParams { b: 2f64.powf(1.0 / p), rho: 0.0 }))
}

/// `d0 (d0 + 1)`. Declared `(4^(1/p), 8^(1/p))` over the `lp` and `lp_grid`
/// b-metrics and `(1, 1)` over the quadratic distance with `a = 1`,
/// `scale = 2`; anything else is left undeclared (see
/// [`crate::space::estimate_min_params`]).
pub fn compose_quadratic(base: &Construction) -> Construction {
    let d0 = base.distance.clone();
    let d = DistanceFn::new(format!("composed({})", d0.label()), move |x, y| {
        let t = d0.distance(x, y)?;
        Ok(t * (t + 1.0))
    });
    let ps = base.descriptor.params;
    let lp_params = |p: f64| SpaceParams { b: 4f64.powf(1.0 / p), rho: 8f64.powf(1.0 / p) };
    let (kind, declared) = match base.kind() {
        ConstructionKind::Lp => (ConstructionKind::ComposedLp, ps.p.map(lp_params)),
        ConstructionKind::LpGrid => (ConstructionKind::ComposedLpGrid, ps.p.map(lp_params)),
        ConstructionKind::Quadratic if ps.a == Some(1.0) && ps.scale == Some(2.0) => {
            (ConstructionKind::ComposedQuadratic, Some(SpaceParams { b: 1.0, rho: 1.0 }))
        }
        ConstructionKind::Quadratic => (ConstructionKind::ComposedQuadratic, None),
        other => {
            return Construction {
                distance: d,
                declared: None,
                descriptor: Descriptor { kind: other, params: ps, declared: None },
            }
        }
    };
    Construction { distance: d, declared, descriptor: Descriptor { kind, params: ps, declared } }
}

/// `exp(d0^2) - 1` with `d0 = exp(d_m^2) - 1`, declared `(1, 1)`.
pub fn exp_square_of_supra() -> Result<Construction> {
    exp_square_of_supra_on(&BaseMetric::standard())
}

pub fn exp_square_of_supra_on(dm: &BaseMetric) -> Result<Construction> {
    let d = dm.lift("exp_square_of_supra".into(), |t| {
        let d0 = (t * t).exp_m1();
        (d0 * d0).exp_m1()
    });
    let params = ConstructionParams { beta: Some(1.0), ..Default::default() };
    Ok(Construction::new(ConstructionKind::ExpSquareOfSupra, params, d, SpaceParams { b: 1.0, rho: 1.0 }))
}

fn required<T>(name: &str, v: Option<T>) -> Result<T> {
    v.ok_or_else(|| domain(format!("missing parameter {name}")))
}

/// Rebuilds a construction over the standard base metric. The `declared`
/// field of the descriptor is ignored: declared parameters are a function
/// of the kind and its parameters. A `dim` on a scalar-based kind only
/// affects [`Construction::sampler`].
pub fn from_descriptor(desc: &Descriptor) -> Result<Construction> {
    let ps = desc.params;
    let mut c = match desc.kind {
        ConstructionKind::Quadratic => quadratic_supra(required("a", ps.a)?, required("scale", ps.scale)?),
        ConstructionKind::ExpSquare => exp_square_supra(required("beta", ps.beta)?),
        ConstructionKind::ExpSupra => exp_supra(required("gamma", ps.gamma)?),
        ConstructionKind::Lp => lp_distance(required("p", ps.p)?, required("dim", ps.dim)?),
        ConstructionKind::LpGrid => lp_grid_distance(required("p", ps.p)?, required("grid", ps.grid)?),
        ConstructionKind::ComposedLp => {
            Ok(compose_quadratic(&lp_distance(required("p", ps.p)?, required("dim", ps.dim)?)?))
        }
        ConstructionKind::ComposedLpGrid => {
            Ok(compose_quadratic(&lp_grid_distance(required("p", ps.p)?, required("grid", ps.grid)?)?))
        }
        ConstructionKind::ComposedQuadratic => {
            Ok(compose_quadratic(&quadratic_supra(ps.a.unwrap_or(1.0), ps.scale.unwrap_or(2.0))?))
        }
        ConstructionKind::ExpSquareOfSupra => exp_square_of_supra(),
    }?;
    c.descriptor.params.dim = c.descriptor.params.dim.or(ps.dim);
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::space::{check_axioms, check_triples, SpaceClass};
    use approx::assert_relative_eq;

    fn s(v: f64) -> Point {
        Point::Scalar(v)
    }

    fn dist(c: &Construction, x: Point, y: Point) -> f64 {
        c.distance.distance(&x, &y).unwrap()
    }

    #[test]
    fn quadratic_values() {
        let c = quadratic_supra(1.0, 1.0).unwrap();
        assert_eq!(dist(&c, s(0.0), s(1.0)), 2.0);
        assert_eq!(dist(&c, s(1.0), s(2.0)), 2.0);
        assert_eq!(dist(&c, s(0.0), s(2.0)), 6.0);
        assert_eq!(c.declared, Some(SpaceParams { b: 1.0, rho: 2.0 }));
        assert_eq!(dist(&quadratic_supra(1.0, 2.0).unwrap(), s(0.0), s(1.0)), 3.0);
        assert_eq!(dist(&c, s(4.5), s(4.5)), 0.0);
        assert!(quadratic_supra(0.0, 1.0).is_err());
        assert!(quadratic_supra(1.0, 0.5).is_err());
    }

    #[test]
    fn exponential_values() {
        let e1 = std::f64::consts::E - 1.0;
        assert_relative_eq!(dist(&exp_square_supra(1.0).unwrap(), s(0.0), s(1.0)), e1, max_relative = 1e-15);
        assert_relative_eq!(dist(&exp_supra(1.0).unwrap(), s(0.0), s(1.0)), e1, max_relative = 1e-15);
        let g2 = exp_supra(2.0).unwrap();
        assert_relative_eq!(dist(&g2, s(0.0), s(1.0)), 3.43656365691809, max_relative = 1e-14);
        assert_eq!(g2.declared, Some(SpaceParams { b: 1.0, rho: 0.5 }));
        let nested = exp_square_of_supra().unwrap();
        assert_relative_eq!(dist(&nested, s(0.0), s(1.0)), 18.153633604974537, max_relative = 1e-13);
    }

    #[test]
    fn exponential_overflow() {
        let c = exp_supra(1.0).unwrap();
        let err = c.distance.distance(&s(0.0), &s(1000.0)).unwrap_err();
        assert!(matches!(err, Error::Overflow(_)));
        let nested = exp_square_of_supra().unwrap();
        assert!(matches!(nested.distance.distance(&s(-1.0), &s(1.0)), Err(Error::Overflow(_))));
    }

    #[test]
    fn lp_values() {
        let c = lp_distance(0.5, 2).unwrap();
        assert_eq!(dist(&c, Point::Vector(vec![1.0, 0.0]), Point::Vector(vec![0.0, 0.0])), 1.0);
        assert_eq!(dist(&c, Point::Vector(vec![1.0, 1.0]), Point::Vector(vec![0.0, 0.0])), 4.0);
        assert_eq!(c.declared, Some(SpaceParams { b: 4.0, rho: 0.0 }));
        let err = c.distance.distance(&Point::Vector(vec![1.0]), &Point::Vector(vec![1.0, 2.0]));
        assert!(matches!(err, Err(Error::Domain(_))));
        assert!(lp_distance(1.0, 2).is_err());
        assert!(lp_distance(0.0, 2).is_err());

        let g1 = lp_grid_distance(0.5, 1).unwrap();
        assert_eq!(dist(&g1, Point::GridFn(vec![1.0]), Point::GridFn(vec![0.0])), 1.0);
        let g2 = lp_grid_distance(0.5, 2).unwrap();
        assert_eq!(dist(&g2, Point::GridFn(vec![1.0, 1.0]), Point::GridFn(vec![0.0, 0.0])), 1.0);
        assert!(g2.distance.distance(&Point::GridFn(vec![1.0]), &Point::GridFn(vec![1.0, 0.0])).is_err());
    }

    #[test]
    fn lp_reduces_to_absolute_value_in_one_dimension() {
        for p in [0.2, 0.5, 1.0 / 3.0, 0.9] {
            let c = lp_distance(p, 1).unwrap();
            for (a, b) in [(0.0, 1.0), (-2.5, 4.0), (3.0, 3.0), (1e-3, -7.25)] {
                let got = dist(&c, Point::Vector(vec![a]), Point::Vector(vec![b]));
                assert_relative_eq!(got, (a - b).abs(), max_relative = 1e-14);
            }
        }
    }

    #[test]
    fn compose_declarations() {
        let c = compose_quadratic(&quadratic_supra(1.0, 2.0).unwrap());
        assert_eq!(dist(&c, s(0.0), s(1.0)), 12.0);
        assert_eq!(c.declared, Some(SpaceParams { b: 1.0, rho: 1.0 }));
        let l = compose_quadratic(&lp_distance(0.5, 2).unwrap());
        assert_eq!(l.declared, Some(SpaceParams { b: 16.0, rho: 64.0 }));
        assert_eq!(dist(&l, Point::Vector(vec![2.0, 2.0]), Point::Vector(vec![2.0, 2.0])), 0.0);
        assert_eq!(compose_quadratic(&quadratic_supra(1.0, 1.0).unwrap()).declared, None);
        assert_eq!(compose_quadratic(&exp_supra(1.0).unwrap()).declared, None);
    }

    #[test]
    fn plain_triangle_inequality_fails_for_quadratic() {
        let c = quadratic_supra(1.0, 1.0).unwrap();
        let r = check_triples(&c.distance, SpaceClass::Semimetric, &[(s(0.0), s(2.0), s(1.0))], 0.0).unwrap();
        assert!(r.passed());
        let r = check_triples(&c.distance, SpaceClass::BMetric(1.0), &[(s(0.0), s(2.0), s(1.0))], 0.0).unwrap();
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].defect, -2.0);
    }

    #[test]
    fn exp_square_fails_its_declared_params() {
        // Recorded counterexample: d(0, 2) = e^4 - 1 exceeds 2(e - 1) + (e - 1)^2.
        let c = exp_square_supra(1.0).unwrap();
        let cls = SpaceClass::from(c.declared.unwrap());
        let r = check_triples(&c.distance, cls, &[(s(0.0), s(2.0), s(1.0))], 1e-9).unwrap();
        assert_eq!(r.violations.len(), 1);
        assert_relative_eq!(
            r.worst_defect.unwrap(),
            2.0 * 1.718281828459045 + 1.718281828459045f64.powi(2) - 4f64.exp_m1(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn composed_quadratic_fails_its_declared_params() {
        let c = compose_quadratic(&quadratic_supra(1.0, 2.0).unwrap());
        let cls = SpaceClass::from(c.declared.unwrap());
        let r = check_axioms(&c.distance, cls, c.sampler(-10.0, 10.0).as_ref(), 20_000, 1e-9, 0).unwrap();
        assert!(!r.passed());
        // (1, 4) holds on the same sample.
        let r =
            check_axioms(&c.distance, SpaceClass::Suprametric(4.0), c.sampler(-10.0, 10.0).as_ref(), 20_000, 1e-9, 0)
                .unwrap();
        assert!(r.passed(), "{:?}", r.violations.first());
    }

    #[test]
    fn symmetric_and_zero_on_the_diagonal() {
        let cs = [
            quadratic_supra(1.5, 2.0).unwrap(),
            exp_square_supra(1.0).unwrap(),
            exp_supra(0.7).unwrap(),
            lp_distance(0.5, 3).unwrap(),
            lp_grid_distance(1.0 / 3.0, 4).unwrap(),
            compose_quadratic(&lp_distance(0.5, 3).unwrap()),
            compose_quadratic(&lp_grid_distance(0.5, 4).unwrap()),
            compose_quadratic(&quadratic_supra(1.0, 2.0).unwrap()),
            exp_square_of_supra().unwrap(),
        ];
        for c in &cs {
            let sampler = c.sampler(-0.6, 0.6);
            let r = check_axioms(&c.distance, SpaceClass::Semimetric, sampler.as_ref(), 2000, 1e-12, 11).unwrap();
            assert!(r.passed(), "{}: {:?}", c.kind().name(), r.semimetric_failures.first());
        }
    }

    #[test]
    fn quadratic_is_increasing_in_the_base_distance() {
        let c = quadratic_supra(0.3, 1.7).unwrap();
        let mut last = -1.0;
        for i in 0..200 {
            let v = dist(&c, s(0.0), s(i as f64 * 0.05));
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn descriptor_round_trip() {
        for c in [
            quadratic_supra(1.0, 1.0).unwrap(),
            lp_grid_distance(0.5, 8).unwrap(),
            compose_quadratic(&lp_distance(1.0 / 3.0, 4).unwrap()),
            compose_quadratic(&quadratic_supra(1.0, 2.0).unwrap()),
        ] {
            let json = serde_json::to_string(&c.descriptor).unwrap();
            let back: Descriptor = serde_json::from_str(&json).unwrap();
            assert_eq!(back, c.descriptor);
            let rebuilt = from_descriptor(&back).unwrap();
            assert_eq!(rebuilt.descriptor, c.descriptor);
        }
        let json = serde_json::to_value(&quadratic_supra(1.0, 1.0).unwrap().descriptor).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"kind": "quadratic", "params": {"a": 1.0, "scale": 1.0}, "declared": {"b": 1.0, "rho": 2.0}})
        );
        let missing = Descriptor { kind: ConstructionKind::Lp, params: ConstructionParams::default(), declared: None };
        assert!(from_descriptor(&missing).is_err());
    }

    #[test]
    fn kind_names() {
        for k in ConstructionKind::ALL {
            assert_eq!(ConstructionKind::from_name(k.name()), Some(k));
        }
        assert_eq!(ConstructionKind::from_name("exp-supra"), Some(ConstructionKind::ExpSupra));
        assert_eq!(ConstructionKind::from_name("nope"), None);
    }
}
