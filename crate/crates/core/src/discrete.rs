//! The countable space `X = {0, 1, 1/2, 1/3, ...}` with a piecewise
//! distance that is a b-suprametric for `(b, rho) = (3/2, 7)` but is not
//! continuous in each variable and has a ball that is not open.
//!
//! Case dispatch uses the integer denominators, never float comparisons.

use std::fmt;

use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::error::{domain, Result};
use crate::point::Point;
use crate::space::{
    AxiomAccumulator, AxiomReport, DistanceFn, SampleRng, SemimetricAxiom, SemimetricFailure, SpaceClass, SpaceParams,
};

/// Parameters under which the discrete distance is a b-suprametric.
pub const DISCRETE_PARAMS: SpaceParams = SpaceParams { b: 1.5, rho: 7.0 };

/// Radius of the ball around `1` that is not open.
pub const NON_OPEN_RADIUS: f64 = 9.0 / 40.0;

/// Inclusive bound used for the exhaustive check when none is given.
pub const DEFAULT_N: u64 = 200;

/// A point of `{0, 1, 1/2, 1/3, ...}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DPoint {
    Zero,
    One,
    /// `1/n` with `n >= 2`.
    Recip(u64),
}

impl DPoint {
    /// `0 -> 0`, `1 -> 1`, `n >= 2 -> 1/n`.
    pub fn from_index(idx: u64) -> DPoint {
        match idx {
            0 => DPoint::Zero,
            1 => DPoint::One,
            n => DPoint::Recip(n),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DPoint::Recip(n) if *n < 2 => Err(domain(format!("1/{n} is not a reciprocal point (need n >= 2)"))),
            _ => Ok(()),
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            DPoint::Zero => 0.0,
            DPoint::One => 1.0,
            DPoint::Recip(n) => 1.0 / n as f64,
        }
    }

    /// Membership in `{0} ∪ {1/(2n) : n >= 1}`.
    pub fn is_even_class(&self) -> bool {
        match self {
            DPoint::Zero => true,
            DPoint::One => false,
            DPoint::Recip(n) => n % 2 == 0,
        }
    }

    /// `{0, 1, 1/2, ..., 1/n_max}` in index order.
    pub fn enumerate(n_max: u64) -> impl Iterator<Item = DPoint> {
        (0..=n_max.max(1)).map(DPoint::from_index)
    }
}

impl fmt::Display for DPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DPoint::Zero => f.write_str("0"),
            DPoint::One => f.write_str("1"),
            DPoint::Recip(n) => write!(f, "1/{n}"),
        }
    }
}

impl Serialize for DPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `|x - y|` from the stored denominators.
fn gap(x: DPoint, y: DPoint) -> f64 {
    match (x, y) {
        (DPoint::Recip(m), DPoint::Recip(n)) => m.abs_diff(n) as f64 / (m as f64 * n as f64),
        (DPoint::Recip(n), DPoint::Zero) | (DPoint::Zero, DPoint::Recip(n)) => 1.0 / n as f64,
        (DPoint::Recip(n), DPoint::One) | (DPoint::One, DPoint::Recip(n)) => (n - 1) as f64 / n as f64,
        (a, b) if a == b => 0.0,
        _ => 1.0,
    }
}

pub fn ddist(x: DPoint, y: DPoint) -> f64 {
    if x == y {
        0.0
    } else if matches!((x, y), (DPoint::Zero, DPoint::One) | (DPoint::One, DPoint::Zero)) {
        0.2
    } else if x.is_even_class() && y.is_even_class() {
        -(-gap(x, y)).exp_m1()
    } else {
        0.25
    }
}

/// [`ddist`] as a [`DistanceFn`] over [`Point::Discrete`].
pub fn discrete_distance() -> DistanceFn {
    DistanceFn::new("discrete", |x, y| match (x, y) {
        (Point::Discrete(a), Point::Discrete(b)) => {
            a.validate()?;
            b.validate()?;
            Ok(ddist(*a, *b))
        }
        _ => Err(crate::space::mismatch(x, y, "discrete")),
    })
}

/// Checks identity, symmetry and the relaxed inequality at `(3/2, 7)` on
/// every ordered triple over `{0, 1, 1/2, ..., 1/n_max}`.
pub fn verify_inequality_exhaustive(n_max: u64) -> Result<AxiomReport> {
    verify_exhaustive_with(n_max, DISCRETE_PARAMS)
}

pub fn verify_exhaustive_with(n_max: u64, params: SpaceParams) -> Result<AxiomReport> {
    if n_max < 2 {
        return Err(domain(format!("n_max must be >= 2, got {n_max}")));
    }
    let points: Vec<DPoint> = DPoint::enumerate(n_max).collect();
    let k = points.len();
    let table: Vec<f64> = points.iter().flat_map(|&x| points.iter().map(move |&y| ddist(x, y))).collect();
    let at = |i: usize, j: usize| table[i * k + j];

    let d = discrete_distance();
    let cls = SpaceClass::from(params);
    let mut acc = AxiomAccumulator::new(&d, cls, 1e-12)?;
    for i in 0..k {
        for j in 0..k {
            let dij = at(i, j);
            if (i == j) != (dij == 0.0) {
                acc.push_failure(SemimetricFailure {
                    axiom: SemimetricAxiom::Identity,
                    x: points[i].into(),
                    y: points[j].into(),
                    value: dij,
                });
            }
            if dij != at(j, i) {
                acc.push_failure(SemimetricFailure {
                    axiom: SemimetricAxiom::Symmetry,
                    x: points[i].into(),
                    y: points[j].into(),
                    value: dij - at(j, i),
                });
            }
            for l in 0..k {
                let defect = params.bound(at(i, l), at(l, j)) - dij;
                acc.record(defect, || (points[i].into(), points[j].into(), points[l].into()));
            }
        }
    }
    acc.count(k * k * k);
    Ok(acc.finish(cls, None))
}

/// All triples over `{0, 1, 1/2, ..., 1/n_max}`, for parameter estimation.
pub fn all_triples(n_max: u64) -> Vec<(Point, Point, Point)> {
    let points: Vec<Point> = DPoint::enumerate(n_max).map(Point::from).collect();
    let mut out = Vec::with_capacity(points.len().pow(3));
    for x in &points {
        for y in &points {
            for z in &points {
                out.push((x.clone(), y.clone(), z.clone()));
            }
        }
    }
    out
}

/// `{x : ddist(center, x) < radius}` among `{0, 1, 1/2, ..., 1/n_max}`.
pub fn ball(center: DPoint, radius: f64, n_max: u64) -> Result<Vec<DPoint>> {
    if !(radius > 0.0) {
        return Err(domain(format!("radius must be > 0, got {radius}")));
    }
    center.validate()?;
    Ok(DPoint::enumerate(n_max).filter(|&x| ddist(center, x) < radius).collect())
}

/// A point `1/(2n)` (with `2n <= n_max`) lying in `B(0, r)` but outside
/// `B(1, 9/40)`, which shows the latter ball is not open.
pub fn non_open_witness(r: f64, n_max: u64) -> Result<Option<DPoint>> {
    if !(r > 0.0) {
        return Err(domain(format!("r must be > 0, got {r}")));
    }
    Ok((1..=n_max / 2)
        .map(|n| DPoint::Recip(2 * n))
        .find(|&p| ddist(DPoint::Zero, p) < r && ddist(DPoint::One, p) >= NON_OPEN_RADIUS))
}

/// A bound on the enumeration large enough for [`non_open_witness`] to
/// succeed at radius `r`.
pub fn witness_bound(r: f64) -> u64 {
    // 1 - e^{-s} < s, so 1/(2n) < r suffices.
    2 * ((1.0 / (2.0 * r)).ceil() as u64 + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Discontinuity {
    /// `d(0, 1/(2N))`, tends to 0.
    pub limit_at_0: f64,
    /// `d(1, 1/(2N))`, constantly 1/4.
    pub limit_at_1: f64,
    /// `d(1, 0) = 1/5`.
    pub d_1_0: f64,
}

pub fn discontinuity_check(n: u64) -> Result<Discontinuity> {
    if n < 1 {
        return Err(domain("n must be >= 1"));
    }
    let p = DPoint::Recip(2 * n);
    Ok(Discontinuity {
        limit_at_0: ddist(DPoint::Zero, p),
        limit_at_1: ddist(DPoint::One, p),
        d_1_0: ddist(DPoint::One, DPoint::Zero),
    })
}

/// The six exponential inequalities behind the `(3/2, 7)` claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LemmaChecks {
    pub i: bool,
    pub ii: bool,
    pub iii: bool,
    pub i_prime: bool,
    pub ii_prime: bool,
    pub iii_prime: bool,
}

impl LemmaChecks {
    pub fn all(&self) -> bool {
        self.i && self.ii && self.iii && self.i_prime && self.ii_prime && self.iii_prime
    }
}

pub fn lemma_check(s: f64, t: f64, b: f64) -> Result<LemmaChecks> {
    if !(s > 0.0 && t > 0.0) {
        return Err(domain(format!("s and t must be > 0, got s={s}, t={t}")));
    }
    if !(b >= 1.0) {
        return Err(domain(format!("b must be >= 1, got {b}")));
    }
    const TOL: f64 = 1e-12;
    let le = |lhs: f64, rhs: f64| lhs <= rhs + TOL;
    let e = |v: f64| (-v).exp();
    let st = (s - t).abs();
    Ok(LemmaChecks {
        i: le(e(st) - 1.0, e(s) - e(t)),
        ii: le(e(s) + e(t + s), e(t) + 1.0),
        iii: le(e(s) + e(t), e(st) + 1.0),
        i_prime: le(1.0 - e(s), b * (2.0 - e(t) - e(st))),
        ii_prime: le(1.0 - e(t), b * (2.0 - e(s) - e(t + s))),
        iii_prime: le(1.0 - e(st), b * (2.0 - e(t) - e(s))),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaSweep {
    pub samples: usize,
    pub failures: Vec<(f64, f64, f64)>,
}

/// [`lemma_check`] on `samples` seeded draws of `(s, t)` from `(0, 10]^2`
/// for each `b` in `bs`.
pub fn lemma_sweep(samples: usize, bs: &[f64], seed: u64) -> Result<LemmaSweep> {
    let mut rng = SampleRng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for _ in 0..samples {
        let s = 10.0 * (1.0 - rng.random::<f64>());
        let t = 10.0 * (1.0 - rng.random::<f64>());
        for &b in bs {
            if !lemma_check(s, t, b)?.all() {
                failures.push((s, t, b));
            }
        }
    }
    Ok(LemmaSweep { samples, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn distance_table() {
        assert_eq!(ddist(DPoint::Zero, DPoint::One), 0.2);
        assert_abs_diff_eq!(ddist(DPoint::Zero, DPoint::Recip(2)), 0.393469340287366, epsilon = 1e-14);
        assert_eq!(ddist(DPoint::One, DPoint::Recip(2)), 0.25);
        assert_eq!(ddist(DPoint::Recip(3), DPoint::Zero), 0.25);
        assert_eq!(ddist(DPoint::Recip(4), DPoint::Recip(3)), 0.25);
        assert_eq!(ddist(DPoint::Recip(5), DPoint::Recip(5)), 0.0);
        // |1/4 - 1/6| = 1/12
        assert_abs_diff_eq!(ddist(DPoint::Recip(4), DPoint::Recip(6)), 1.0 - (-1.0f64 / 12.0).exp(), epsilon = 1e-15);
    }

    #[test]
    fn symmetric_and_zero_on_diagonal() {
        let pts: Vec<DPoint> = DPoint::enumerate(500).collect();
        for &x in &pts {
            for &y in &pts {
                let d = ddist(x, y);
                assert_eq!(d, ddist(y, x));
                assert_eq!(d == 0.0, x == y, "{x} {y}");
            }
        }
    }

    #[test]
    fn worked_triple() {
        let d = discrete_distance();
        let defect = crate::space::triple_defect(
            &d,
            DISCRETE_PARAMS,
            &DPoint::Zero.into(),
            &DPoint::One.into(),
            &DPoint::Recip(2).into(),
        )
        .unwrap();
        let a = 1.0 - (-0.5f64).exp();
        assert_abs_diff_eq!(defect, 1.5 * (a + 0.25) + 7.0 * a * 0.25 - 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(defect, 1.45377535593394, epsilon = 1e-12);
    }

    #[test]
    fn degenerate_triple_defect_is_half_distance() {
        let d = discrete_distance();
        let (x, y): (Point, Point) = (DPoint::Recip(3).into(), DPoint::Recip(8).into());
        let defect = crate::space::triple_defect(&d, DISCRETE_PARAMS, &x, &y, &x).unwrap();
        assert_eq!(defect, 0.5 * d.distance(&x, &y).unwrap());
    }

    #[test]
    fn exhaustive_small() {
        let r = verify_inequality_exhaustive(30).unwrap();
        assert!(r.passed());
        assert_eq!(r.samples_checked, 31 * 31 * 31);
        assert!(verify_inequality_exhaustive(1).is_err());
    }

    #[test]
    fn balls() {
        assert_eq!(ball(DPoint::One, NON_OPEN_RADIUS, 1000).unwrap(), vec![DPoint::Zero, DPoint::One]);
        assert_eq!(ball(DPoint::Zero, 1.0, 10).unwrap().len(), 11);
        for c in DPoint::enumerate(20) {
            assert!(ball(c, 1e-9, 20).unwrap().contains(&c));
        }
        assert!(ball(DPoint::Zero, 0.0, 10).is_err());
    }

    #[test]
    fn witnesses() {
        let w = non_open_witness(0.1, 100).unwrap().unwrap();
        assert_eq!(w, DPoint::Recip(10));
        assert!(ddist(DPoint::Zero, w) < 0.1);
        assert_eq!(non_open_witness(1.0, 10).unwrap(), Some(DPoint::Recip(2)));
        assert_eq!(non_open_witness(1e-9, 10).unwrap(), None);
        assert!(non_open_witness(-1.0, 10).is_err());
    }

    #[test]
    fn discontinuity() {
        let c = discontinuity_check(1000).unwrap();
        assert_abs_diff_eq!(c.limit_at_0, 4.99875020830709e-4, epsilon = 1e-15);
        assert_eq!((c.limit_at_1, c.d_1_0), (0.25, 0.2));
        let c1 = discontinuity_check(1).unwrap();
        assert_abs_diff_eq!(c1.limit_at_0, 0.393469340287366, epsilon = 1e-14);
        for n in [1, 7, 100, 1 << 20] {
            assert_eq!(discontinuity_check(n).unwrap().limit_at_1, 0.25);
        }
    }

    #[test]
    fn lemma_examples() {
        let eq = lemma_check(1.0, 1.0, 1.0).unwrap();
        assert!(eq.all());
        assert!(lemma_check(2.0, 1.0, 1.0).unwrap().i);
        assert!(lemma_check(0.0, 1.0, 1.0).is_err());
        assert!(lemma_check(1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn lemma_sweep_small() {
        let r = lemma_sweep(2_000, &[1.0, 1.5, 5.0], 9).unwrap();
        assert!(r.failures.is_empty());
    }
}
