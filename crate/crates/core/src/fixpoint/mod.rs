//! Picard iteration for ψ-contractions on b-suprametric spaces, with the
//! constants and bounds that certify convergence of the orbit.

mod bounds;
mod certificate;
mod solver;

use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::matkowski::ComparisonFunction;
use crate::point::Point;
use crate::space::{DistanceFn, SpaceParams};

pub use bounds::{
    binomial, c_q_constant, chain_bound, esp, esp_all, esp_bound, four_point_expansion, four_point_simplified,
    series_bound, Horizon,
};
pub use certificate::{
    cauchy_threshold, invariant_ball_check, q_threshold, BallOptions, BallReport, CauchyCertificate, Escape,
    DEFAULT_Q_CAP,
};
pub use solver::{
    picard, uniqueness_check, verify_contraction, ContractionReport, ContractionViolation, FixedPointResult,
    IterationTrace, UniquenessReport, UniquenessRun, UniquenessVerdict, DEFAULT_MAX_ITER, DEFAULT_STEP_TOL,
    DIVERGENCE_STEP,
};

type Eval = dyn Fn(&Point) -> Result<Point> + Send + Sync;

/// A self-map `f: X -> X`.
#[derive(Clone)]
pub struct SelfMap {
    label: String,
    eval: Arc<Eval>,
}

impl SelfMap {
    pub fn new<F>(label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(&Point) -> Result<Point> + Send + Sync + 'static,
    {
        SelfMap { label: label.into(), eval: Arc::new(eval) }
    }

    /// Lifts a real function to scalar points.
    pub fn scalar<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        SelfMap::new(label, move |x| match x {
            Point::Scalar(v) => Ok(Point::Scalar(f(*v))),
            other => Err(domain(format!("scalar map applied to a {} point", other.kind()))),
        })
    }

    /// `x -> a x + c`, coordinatewise on scalars, vectors and grid functions.
    pub fn affine(a: f64, c: f64) -> Self {
        SelfMap::new(format!("affine:{a},{c}"), move |x| {
            let f = |v: &f64| a * v + c;
            match x {
                Point::Scalar(v) => Ok(Point::Scalar(f(v))),
                Point::Vector(vs) => Ok(Point::Vector(vs.iter().map(f).collect())),
                Point::GridFn(vs) => Ok(Point::GridFn(vs.iter().map(f).collect())),
                Point::Discrete(_) => Err(domain("affine map on a discrete point")),
            }
        })
    }

    /// The constant map onto `value`.
    pub fn constant(value: Point) -> Self {
        SelfMap::new(format!("const:{value}"), move |_| Ok(value.clone()))
    }

    pub fn identity() -> Self {
        SelfMap::new("identity", |x| Ok(x.clone()))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Applies the map. An output of a different kind is a domain error; a
    /// non-finite output is a divergence error.
    pub fn apply(&self, x: &Point) -> Result<Point> {
        let y = (self.eval)(x)?;
        if y.kind() != x.kind() {
            return Err(domain(format!("{} sent a {} point to a {} point", self.label, x.kind(), y.kind())));
        }
        y.validate().map_err(|e| Error::Divergence(format!("{}({x}): {e}", self.label)))?;
        Ok(y)
    }

    /// `f^n(x)`.
    pub fn apply_n(&self, n: u64, x: &Point) -> Result<Point> {
        let mut y = x.clone();
        for _ in 0..n {
            y = self.apply(&y)?;
        }
        Ok(y)
    }
}

impl fmt::Debug for SelfMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SelfMap").field("label", &self.label).finish()
    }
}

/// Hypotheses of the fixed-point theorems: a b-suprametric space, a
/// self-map, a comparison function and a starting point.
#[derive(Debug, Clone)]
pub struct ContractionProblem {
    pub distance: DistanceFn,
    pub params: SpaceParams,
    pub map: SelfMap,
    pub psi: ComparisonFunction,
    pub x0: Point,
}

impl ContractionProblem {
    pub fn new(distance: DistanceFn, params: SpaceParams, map: SelfMap, psi: ComparisonFunction, x0: Point) -> Self {
        ContractionProblem { distance, params, map, psi, x0 }
    }

    pub fn with_start(&self, x0: Point) -> Self {
        ContractionProblem { x0, ..self.clone() }
    }
}
