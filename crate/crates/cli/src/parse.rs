//! Parsing of the map, comparison-function and point arguments.

use supra_core::constructions::{Construction, ConstructionKind};
use supra_core::expr::Expr;
use supra_core::fixpoint::SelfMap;
use supra_core::matkowski::ComparisonFunction;
use supra_core::{Error, Point};

fn numbers(src: &str, what: &str) -> Result<Vec<f64>, Error> {
    src.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Domain(format!("bad number '{s}' in {what}"))))
        .collect()
}

fn coefficients<const N: usize>(src: &str, what: &str) -> Result<[f64; N], Error> {
    let vs = numbers(src, what)?;
    vs.try_into().map_err(|v: Vec<f64>| Error::Domain(format!("{what} takes {N} coefficient(s), got {}", v.len())))
}

/// `affine:a,c`, `const:c`, `identity`, or an expression in `x`.
pub fn parse_map(src: &str) -> Result<SelfMap, Error> {
    let src = src.trim();
    if let Some(rest) = src.strip_prefix("affine:") {
        let [a, c] = coefficients(rest, "affine")?;
        return Ok(SelfMap::affine(a, c));
    }
    if let Some(rest) = src.strip_prefix("const:") {
        let [c] = coefficients(rest, "const")?;
        return Ok(SelfMap::affine(0.0, c));
    }
    if src == "identity" {
        return Ok(SelfMap::identity());
    }
    parse_map_expression(src)
}

/// A scalar self-map from an arithmetic expression in `x`.
pub fn parse_map_expression(src: &str) -> Result<SelfMap, Error> {
    let e = Expr::parse(src, "x")?;
    Ok(SelfMap::scalar(src.to_string(), move |x| e.eval(x)))
}

/// `linear:c`, `rational`, `sqrt-shift`, or an expression in `t`.
pub fn parse_psi(src: &str) -> Result<ComparisonFunction, Error> {
    let src = src.trim();
    if let Some(rest) = src.strip_prefix("linear:") {
        let [c] = coefficients(rest, "linear")?;
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::Domain(format!("linear coefficient must be >= 0, got {c}")));
        }
        return Ok(ComparisonFunction::linear(c));
    }
    match src {
        "rational" => Ok(ComparisonFunction::rational()),
        "sqrt-shift" | "sqrt_shift" => Ok(ComparisonFunction::sqrt_shift()),
        _ => {
            let e = Expr::parse(src, "t")?;
            Ok(ComparisonFunction::new(src.to_string(), move |t| e.eval(t)))
        }
    }
}

/// A point of the kind `c` is defined on, from comma-separated values. A
/// single value is broadcast to every coordinate of a vector or grid.
pub fn parse_point(src: &str, c: &Construction) -> Result<Point, Error> {
    point_from_values(numbers(src, "point")?, c)
}

/// [`parse_point`] on already-split values.
pub fn point_from_values(vs: Vec<f64>, c: &Construction) -> Result<Point, Error> {
    let ps = c.descriptor.params;
    type Wrap = fn(Vec<f64>) -> Point;
    let (len, wrap): (Option<usize>, Wrap) = match c.kind() {
        ConstructionKind::Lp | ConstructionKind::ComposedLp => (ps.dim, Point::Vector),
        ConstructionKind::LpGrid | ConstructionKind::ComposedLpGrid => (ps.grid, Point::GridFn),
        _ if ps.dim.is_some() => (ps.dim, Point::Vector),
        _ => {
            let [v] = vs.try_into().map_err(|_| Error::Domain("expected a single scalar".into()))?;
            return Ok(Point::Scalar(v));
        }
    };
    let len = len.unwrap_or(vs.len());
    let vs = match vs.len() {
        1 => vec![vs[0]; len],
        n if n == len => vs,
        n => return Err(Error::Domain(format!("point has {n} entries, expected {len}"))),
    };
    let p = wrap(vs);
    p.validate()?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use supra_core::constructions::{lp_distance, lp_grid_distance, quadratic_supra};

    #[test]
    fn maps() {
        let s = |v| Point::Scalar(v);
        assert_eq!(parse_map("x/2+1").unwrap().apply(&s(10.0)).unwrap(), s(6.0));
        assert_eq!(parse_map("exp(x)").unwrap().apply(&s(0.0)).unwrap(), s(1.0));
        assert_eq!(parse_map("affine:0.5,1").unwrap().apply(&s(4.0)).unwrap(), s(3.0));
        assert_eq!(parse_map("const:7").unwrap().apply(&s(4.0)).unwrap(), s(7.0));
        assert_eq!(parse_map("identity").unwrap().apply(&s(4.0)).unwrap(), s(4.0));
        assert!(matches!(parse_map("x//2"), Err(Error::Parse { column: 3, .. })));
        assert!(parse_map("affine:1").is_err());
    }

    #[test]
    fn psis() {
        assert_eq!(parse_psi("linear:0.5").unwrap().apply(3.0), 1.5);
        assert_eq!(parse_psi("rational").unwrap().apply(1.0), 0.5);
        assert_eq!(parse_psi("t/(1+t)").unwrap().apply(1.0), 0.5);
        assert!(parse_psi("linear:-1").is_err());
        assert!(parse_psi("x/2").is_err());
    }

    #[test]
    fn points() {
        let q = quadratic_supra(1.0, 1.0).unwrap();
        assert_eq!(parse_point("10", &q).unwrap(), Point::Scalar(10.0));
        assert!(parse_point("1,2", &q).is_err());
        let l = lp_distance(0.5, 3).unwrap();
        assert_eq!(parse_point("1", &l).unwrap(), Point::Vector(vec![1.0; 3]));
        assert_eq!(parse_point("1,2,3", &l).unwrap(), Point::Vector(vec![1.0, 2.0, 3.0]));
        assert!(parse_point("1,2", &l).is_err());
        let g = lp_grid_distance(0.5, 2).unwrap();
        assert_eq!(parse_point("0,1", &g).unwrap(), Point::GridFn(vec![0.0, 1.0]));
    }
}
