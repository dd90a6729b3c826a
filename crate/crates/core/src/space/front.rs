//! Pareto-minimal `(b, rho)` pairs for a finite set of triples.
//!
//! A triple with legs summing to `S`, leg product `P` and direct distance
//! `D` admits exactly the pairs with `b S + rho P >= D`. Intersecting these
//! half-planes with `b >= 1, rho >= 0` gives an upward-closed convex region
//! whose lower-left boundary is the graph of
//! `rho_min(b) = max(0, max_k (D_k - b S_k) / P_k)` for `b >= b_lo`, where
//! `b_lo` absorbs the constraints with `P = 0`. Its vertices are walked
//! exactly, line by line, without an LP solver.

use crate::error::{Error, Result};
use crate::point::Point;

use super::{DistanceFn, SpaceParams};

/// The constraint `b * s + rho * p >= d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlane {
    pub s: f64,
    pub p: f64,
    pub d: f64,
}

/// `rho >= slope * b + intercept`
#[derive(Debug, Clone, Copy)]
struct Line {
    slope: f64,
    intercept: f64,
}

impl Line {
    fn at(&self, b: f64) -> f64 {
        self.slope * b + self.intercept
    }
}

/// Vertices of the Pareto front of the feasible `(b, rho)` region, sorted
/// by `b` ascending (and hence `rho` descending).
pub fn pareto_front(constraints: &[HalfPlane]) -> Result<Vec<SpaceParams>> {
    let mut b_lo: f64 = 1.0;
    let mut lines: Vec<Line> = Vec::new();
    for c in constraints {
        if !(c.s >= 0.0 && c.p >= 0.0 && c.d.is_finite() && c.s.is_finite() && c.p.is_finite()) {
            return Err(Error::Domain(format!("invalid constraint {c:?}")));
        }
        if c.d <= 0.0 {
            continue;
        }
        match (c.s > 0.0, c.p > 0.0) {
            (false, false) => {
                return Err(Error::Infeasible(format!("direct distance {} with zero legs cannot be bounded", c.d)))
            }
            (true, false) => b_lo = b_lo.max(c.d / c.s),
            (_, true) => lines.push(Line { slope: -c.s / c.p, intercept: c.d / c.p }),
        }
    }

    // Keep the highest line per slope, sorted by slope ascending.
    lines.sort_by(|a, b| a.slope.total_cmp(&b.slope).then(b.intercept.total_cmp(&a.intercept)));
    lines.dedup_by(|later, kept| later.slope == kept.slope);

    let envelope = |b: f64| lines.iter().map(|l| l.at(b)).fold(f64::NEG_INFINITY, f64::max);
    let vertex = |b: f64| SpaceParams { b, rho: envelope(b).max(0.0) };

    if lines.is_empty() || envelope(b_lo) <= 0.0 {
        return Ok(vec![SpaceParams { b: b_lo, rho: 0.0 }]);
    }

    // Active line at b_lo: the maximum there, ties broken toward the
    // largest slope (it stays on top to the right).
    let top = envelope(b_lo);
    let mut active = lines
        .iter()
        .enumerate()
        .filter(|(_, l)| l.at(b_lo) >= top - 1e-12 * top.abs().max(1.0))
        .map(|(i, _)| i)
        .next_back()
        .expect("non-empty");
    let mut b = b_lo;
    let mut front = vec![vertex(b)];

    loop {
        let line = lines[active];
        let zero_at = if line.slope < 0.0 { -line.intercept / line.slope } else { f64::INFINITY };

        // Next breakpoint: the earliest crossing by a line of larger slope.
        let mut next: Option<(f64, usize)> = None;
        for (i, other) in lines.iter().enumerate().skip(active + 1) {
            let cross = (other.intercept - line.intercept) / (line.slope - other.slope);
            if cross > b && next.is_none_or(|(nb, _)| cross <= nb) {
                next = Some((cross, i));
            }
        }

        match next {
            Some((nb, i)) if nb < zero_at => {
                b = nb;
                active = i;
                front.push(vertex(b));
            }
            _ => {
                if zero_at.is_finite() {
                    front.push(SpaceParams { b: zero_at.max(b), rho: 0.0 });
                }
                break;
            }
        }
    }

    // Rounding at nearly coincident breakpoints must not leave a dominated pair behind.
    let mut pruned: Vec<SpaceParams> = Vec::with_capacity(front.len());
    for v in front {
        if let Some(last) = pruned.last() {
            if v.rho >= last.rho {
                continue;
            }
            if v.b <= last.b {
                pruned.pop();
            }
        }
        pruned.push(v);
    }
    Ok(pruned)
}

/// Pareto-minimal parameter pairs under which every triple satisfies the
/// relaxed triangle inequality.
pub fn estimate_min_params(d: &DistanceFn, triples: &[(Point, Point, Point)]) -> Result<Vec<SpaceParams>> {
    if triples.is_empty() {
        return Err(Error::Domain("no triples given".into()));
    }
    let constraints = triples
        .iter()
        .map(|(x, y, z)| {
            let dxz = d.distance(x, z)?;
            let dzy = d.distance(z, y)?;
            Ok(HalfPlane { s: dxz + dzy, p: dxz * dzy, d: d.distance(x, y)? })
        })
        .collect::<Result<Vec<_>>>()?;
    pareto_front(&constraints)
}
