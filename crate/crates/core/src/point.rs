//! Points of the spaces handled by this crate.

use std::cmp::Ordering;
use std::fmt;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::discrete::DPoint;
use crate::error::{domain, Result};

/// An element of one of the supported spaces.
///
/// `GridFn` holds the values of a function on `[0, 1]` sampled at the
/// midpoints of a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub enum Point {
    Scalar(f64),
    Vector(Vec<f64>),
    GridFn(Vec<f64>),
    Discrete(DPoint),
}

impl Point {
    pub fn kind(&self) -> &'static str {
        match self {
            Point::Scalar(_) => "scalar",
            Point::Vector(_) => "vector",
            Point::GridFn(_) => "grid",
            Point::Discrete(_) => "discrete",
        }
    }

    /// Checks the representation invariants: finite entries, non-empty
    /// vectors and grids, `n >= 2` for reciprocal points.
    pub fn validate(&self) -> Result<()> {
        match self {
            Point::Scalar(v) if !v.is_finite() => Err(domain(format!("non-finite scalar {v}"))),
            Point::Vector(vs) | Point::GridFn(vs) => {
                if vs.is_empty() {
                    return Err(domain(format!("empty {}", self.kind())));
                }
                if let Some(v) = vs.iter().find(|v| !v.is_finite()) {
                    return Err(domain(format!("non-finite entry {v} in {}", self.kind())));
                }
                Ok(())
            }
            Point::Discrete(p) => p.validate(),
            Point::Scalar(_) => Ok(()),
        }
    }

    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            Point::Scalar(v) => Some(*v),
            _ => None,
        }
    }

    /// Real coordinates of the point, if it has any.
    pub fn coords(&self) -> Option<&[f64]> {
        match self {
            Point::Scalar(v) => Some(std::slice::from_ref(v)),
            Point::Vector(vs) | Point::GridFn(vs) => Some(vs),
            Point::Discrete(_) => None,
        }
    }

    /// Moves the point by `step * direction`. `direction` must match the
    /// coordinate count; discrete points cannot be moved.
    pub fn offset(&self, direction: &[f64], step: f64) -> Option<Point> {
        let shift = |vs: &[f64]| -> Option<Vec<f64>> {
            (vs.len() == direction.len()).then(|| vs.iter().zip(direction).map(|(v, d)| v + step * d).collect())
        };
        match self {
            Point::Scalar(v) => (direction.len() == 1).then(|| Point::Scalar(v + step * direction[0])),
            Point::Vector(vs) => shift(vs).map(Point::Vector),
            Point::GridFn(vs) => shift(vs).map(Point::GridFn),
            Point::Discrete(_) => None,
        }
    }

    /// Total order used to sort reports canonically.
    pub fn canonical_cmp(&self, other: &Point) -> Ordering {
        fn rank(p: &Point) -> u8 {
            match p {
                Point::Scalar(_) => 0,
                Point::Vector(_) => 1,
                Point::GridFn(_) => 2,
                Point::Discrete(_) => 3,
            }
        }
        match (self, other) {
            (Point::Scalar(a), Point::Scalar(b)) => a.total_cmp(b),
            (Point::Vector(a), Point::Vector(b)) | (Point::GridFn(a), Point::GridFn(b)) => a
                .iter()
                .zip(b)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or_else(|| a.len().cmp(&b.len())),
            (Point::Discrete(a), Point::Discrete(b)) => a.cmp(b),
            _ => rank(self).cmp(&rank(other)),
        }
    }
}

impl From<f64> for Point {
    fn from(v: f64) -> Self {
        Point::Scalar(v)
    }
}

impl From<DPoint> for Point {
    fn from(p: DPoint) -> Self {
        Point::Discrete(p)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Scalar(v) => write!(f, "{v}"),
            Point::Vector(vs) => write!(f, "{vs:?}"),
            Point::GridFn(vs) => write!(f, "grid{vs:?}"),
            Point::Discrete(p) => write!(f, "{p}"),
        }
    }
}

// Scalars and vectors serialize as plain JSON numbers/arrays, grid
// functions as {"grid": [...]}, discrete points as "0", "1" or "1/n".
impl Serialize for Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Point::Scalar(v) => serializer.serialize_f64(*v),
            Point::Vector(vs) => vs.serialize(serializer),
            Point::GridFn(vs) => {
                let mut map = serializer.serialize_map(Some(1))?;
                map.serialize_entry("grid", vs)?;
                map.end()
            }
            Point::Discrete(p) => serializer.collect_str(p),
        }
    }
}
