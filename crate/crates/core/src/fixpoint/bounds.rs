//! Closed-form bounds used by the convergence proofs: chained relaxed
//! triangle inequalities, elementary symmetric polynomials, the `c_q`
//! constant, the four-point estimate and the Picard series bound.

use crate::error::{domain, Error, Result};
use crate::matkowski::ComparisonFunction;
use crate::space::SpaceParams;

/// `C(n, k)` as a float.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// `max { C(q, i) b^(q-i) rho^(i-1) : i = 1..q-1 }`, with `rho^0 = 1`
/// even when `rho = 0`.
pub fn c_q_constant(params: SpaceParams, q: u64) -> Result<f64> {
    if q < 2 {
        return Err(domain(format!("q must be >= 2, got {q}")));
    }
    Ok((1..q)
        .map(|i| binomial(q, i) * params.b.powf((q - i) as f64) * params.rho.powf((i - 1) as f64))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// `[e_0, e_1, ..., e_k]` of `xs`.
pub fn esp_all(xs: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; xs.len() + 1];
    e[0] = 1.0;
    for (n, &x) in xs.iter().enumerate() {
        for j in (1..=n + 1).rev() {
            e[j] += x * e[j - 1];
        }
    }
    e
}

/// Elementary symmetric polynomial `e_i(xs)`.
pub fn esp(i: usize, xs: &[f64]) -> Result<f64> {
    if i < 1 || i > xs.len() {
        return Err(domain(format!("esp index {i} out of range 1..={}", xs.len())));
    }
    Ok(esp_all(xs)[i])
}

fn check_distances(ds: &[f64]) -> Result<()> {
    if ds.is_empty() {
        return Err(domain("empty distance list"));
    }
    if ds.iter().any(|d| !(*d >= 0.0 && d.is_finite())) {
        return Err(domain("distances must be finite and nonnegative"));
    }
    Ok(())
}

/// Bound on `d(x_0, x_k)` along a chain with consecutive distances `ds`,
/// from applying the relaxed inequality at each intermediate point:
/// `T(d1) = d1`, `T(d1, rest) = b (d1 + T(rest)) + rho d1 T(rest)`.
pub fn chain_bound(params: SpaceParams, ds: &[f64]) -> Result<f64> {
    check_distances(ds)?;
    let (last, head) = ds.split_last().expect("non-empty");
    Ok(head.iter().rev().fold(*last, |t, &d| params.bound(d, t)))
}

/// `sum_{i=1..k} b^(k-i) rho^(i-1) e_i(ds)`; dominates [`chain_bound`],
/// with equality when `b = 1`.
pub fn esp_bound(params: SpaceParams, ds: &[f64]) -> Result<f64> {
    check_distances(ds)?;
    let k = ds.len();
    let e = esp_all(ds);
    Ok((1..=k).map(|i| params.b.powf((k - i) as f64) * params.rho.powf((i - 1) as f64) * e[i]).sum())
}

/// Upper limit of a [`series_bound`] sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Horizon {
    Finite(u64),
    Infinite,
}

/// Terms with a ratio at or above this are not contracting.
const RATIO_CEILING: f64 = 1.0 - 1e-9;
/// Consecutive terms needed to accept or reject the ratio test.
const RATIO_RUN: usize = 10;
const RELATIVE_STOP: f64 = 1e-16;
const MAX_TERMS: u64 = 1_000_000;

/// `sum_{i=p}^{q-1} b psi^i(d0) prod_{j=0}^{i-1} (b + rho psi^j(d0))`,
/// a bound on `d(x_p, x_q)` along a Picard orbit whose first step is `d0`.
///
/// For [`Horizon::Infinite`] terms are added until a term falls below
/// `1e-16` of the sum after ten consecutive term ratios below `1 - 1e-9`,
/// and a geometric majorant of the remaining tail is added. Ten
/// consecutive ratios at or above `1 - 1e-9` once `rho psi^i(d0)` is
/// negligible against `b` (or a million terms without stopping) are a
/// divergence error.
pub fn series_bound(params: SpaceParams, psi: &ComparisonFunction, d0: f64, p: u64, q: Horizon) -> Result<f64> {
    if !(d0 >= 0.0 && d0.is_finite()) {
        return Err(domain(format!("d0 must be finite and >= 0, got {d0}")));
    }
    let SpaceParams { b, rho } = params;
    match q {
        Horizon::Finite(q) => {
            if p > q {
                return Err(domain(format!("p = {p} exceeds q = {q}")));
            }
            let mut sum = 0.0;
            let mut prod = 1.0;
            let mut psi_i = d0;
            for i in 0..q {
                if i >= p {
                    sum += b * psi_i * prod;
                }
                prod *= b + rho * psi_i;
                psi_i = psi.apply(psi_i);
            }
            if !sum.is_finite() {
                return Err(Error::Overflow(format!("series partial sum up to q = {q} overflows")));
            }
            Ok(sum)
        }
        Horizon::Infinite => {
            let mut acc = 0.0;
            let mut term = b * d0;
            let mut psi_i = d0;
            let (mut good, mut bad) = (0usize, 0usize);
            for i in 0..p.saturating_add(MAX_TERMS) {
                if i >= p {
                    acc += term;
                }
                let psi_next = psi.apply(psi_i);
                if term == 0.0 || psi_i == 0.0 {
                    if psi_next == 0.0 {
                        return Ok(acc);
                    }
                    return Err(domain(format!("{}: psi(0) = {psi_next} is not 0", psi.label())));
                }
                let next = term * (b + rho * psi_i) * (psi_next / psi_i);
                if !next.is_finite() {
                    return Err(Error::Overflow("series term overflows".into()));
                }
                let ratio = next / term;
                if ratio < RATIO_CEILING {
                    good += 1;
                    bad = 0;
                } else {
                    good = 0;
                    if rho * psi_i <= 1e-6 * b {
                        bad += 1;
                    }
                }
                if bad >= RATIO_RUN {
                    return Err(Error::Divergence(format!(
                        "series ratio {ratio} >= 1 persists at term {i} ({}, b = {b}, rho = {rho})",
                        psi.label()
                    )));
                }
                if i >= p && good >= RATIO_RUN && term < RELATIVE_STOP * acc {
                    return Ok(acc + next / (1.0 - ratio));
                }
                term = next;
                psi_i = psi_next;
            }
            Err(Error::Divergence(format!("series did not settle within {MAX_TERMS} terms ({})", psi.label())))
        }
    }
}

/// Exact expansion of the chained bound over four legs `u1..u4`.
pub fn four_point_expansion(params: SpaceParams, u1: f64, u2: f64, u3: f64, u4: f64) -> f64 {
    let SpaceParams { b, rho } = params;
    let s34 = u3 + u4;
    s34 * b.powi(3)
        + u2 * b * b
        + (u3 * u4 + u2 * s34 + u1 * s34) * rho * b * b
        + (u2 * u3 * u4 + u1 * (u3 * u4 + u2 * s34)) * b * rho * rho
        + u1 * u2 * b * rho
        + b * u1
        + rho.powi(3) * u1 * u2 * u3 * u4
}

/// `eps (eps^3 + eps^2 + eps + 1) max{rho^3, 4 b rho^2, 6 b^2 rho, 4 b^3}`,
/// which dominates [`four_point_expansion`] when every `u_i < eps`.
pub fn four_point_simplified(params: SpaceParams, eps: f64) -> f64 {
    let SpaceParams { b, rho } = params;
    let m = rho.powi(3).max(4.0 * b * rho * rho).max(6.0 * b * b * rho).max(4.0 * b.powi(3));
    eps * (eps.powi(3) + eps * eps + eps + 1.0) * m
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn params(b: f64, rho: f64) -> SpaceParams {
        SpaceParams::new(b, rho).unwrap()
    }

    /// Sum over all size-`i` index subsets, by bitmask.
    fn esp_brute(i: usize, xs: &[f64]) -> f64 {
        (0u32..1 << xs.len())
            .filter(|m| m.count_ones() as usize == i)
            .map(|m| (0..xs.len()).filter(|j| m & (1 << j) != 0).map(|j| xs[j]).product::<f64>())
            .sum()
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(10, 0), 1.0);
        assert_eq!(binomial(3, 4), 0.0);
    }

    #[test]
    fn c_q_examples() {
        assert_eq!(c_q_constant(params(1.0, 1.0), 3).unwrap(), 3.0);
        assert_eq!(c_q_constant(params(2.0, 1.0), 3).unwrap(), 12.0);
        assert_eq!(c_q_constant(params(1.0, 0.0), 2).unwrap(), 2.0);
        assert!(c_q_constant(params(1.0, 0.0), 1).is_err());
    }

    #[test]
    fn c_q_matches_enumeration() {
        for (b, rho) in [(1.0, 0.0), (1.5, 7.0), (3.0, 0.5)] {
            for q in 2..12u64 {
                let mut best = f64::NEG_INFINITY;
                for i in 1..q {
                    let mut c = 1.0;
                    for j in 0..i {
                        c = c * (q - j) as f64 / (j + 1) as f64;
                    }
                    let mut term = c;
                    for _ in 0..q - i {
                        term *= b;
                    }
                    for _ in 0..i - 1 {
                        term *= rho;
                    }
                    best = best.max(term);
                }
                let got = c_q_constant(params(b, rho), q).unwrap();
                assert!((got - best).abs() <= 1e-12 * best, "b={b} rho={rho} q={q}");
            }
        }
    }

    #[test]
    fn esp_examples() {
        assert_eq!(esp(2, &[1.0, 2.0, 3.0]).unwrap(), 11.0);
        assert_eq!(esp(1, &[1.0, 2.0, 3.0]).unwrap(), 6.0);
        assert_eq!(esp(3, &[1.0, 2.0, 3.0]).unwrap(), 6.0);
        assert!(esp(0, &[1.0]).is_err());
        assert!(esp(2, &[1.0]).is_err());
    }

    #[test]
    fn chain_examples() {
        assert_eq!(chain_bound(SpaceParams::METRIC, &[1.0, 2.0, 3.0]).unwrap(), 6.0);
        assert_abs_diff_eq!(chain_bound(params(1.5, 7.0), &[0.1, 0.2]).unwrap(), 0.59, epsilon = 1e-15);
        assert_eq!(chain_bound(params(4.0, 2.0), &[0.3]).unwrap(), 0.3);
        assert!(chain_bound(SpaceParams::METRIC, &[]).is_err());
    }

    #[test]
    fn esp_bound_examples() {
        assert_eq!(esp_bound(params(1.0, 1.0), &[1.0, 2.0, 3.0]).unwrap(), 23.0);
        assert_eq!(esp_bound(SpaceParams::METRIC, &[0.5, 2.0, 7.0]).unwrap(), 9.5);
        assert_eq!(esp_bound(params(2.0, 1.0), &[1.0, 1.0]).unwrap(), 5.0);
        assert_eq!(chain_bound(params(2.0, 1.0), &[1.0, 1.0]).unwrap(), 5.0);
    }

    #[test]
    fn four_point_examples() {
        assert_eq!(four_point_expansion(params(1.0, 1.0), 0.0, 0.0, 0.0, 0.0), 0.0);
        assert_eq!(four_point_expansion(SpaceParams::METRIC, 1.0, 1.0, 1.0, 1.0), 4.0);
        assert_eq!(four_point_expansion(params(1.0, 1.0), 1.0, 1.0, 1.0, 1.0), 15.0);
        assert_eq!(four_point_simplified(params(1.0, 1.0), 0.0), 0.0);
        assert_eq!(four_point_simplified(SpaceParams::METRIC, 1.0), 16.0);
        assert_eq!(four_point_simplified(params(1.0, 1.0), 1.0), 24.0);
    }

    #[test]
    fn series_examples() {
        let half = ComparisonFunction::linear(0.5);
        let s = series_bound(SpaceParams::METRIC, &half, 1.0, 0, Horizon::Infinite).unwrap();
        assert_abs_diff_eq!(s, 2.0, epsilon = 1e-14);
        let err = series_bound(params(2.0, 0.0), &half, 1.0, 0, Horizon::Infinite).unwrap_err();
        assert!(matches!(err, Error::Divergence(_)));
        assert_eq!(series_bound(params(2.0, 3.0), &half, 1.0, 7, Horizon::Finite(7)).unwrap(), 0.0);
        assert!(series_bound(SpaceParams::METRIC, &half, 1.0, 3, Horizon::Finite(2)).is_err());
    }

    #[test]
    fn series_finite_partial_sums() {
        // b = 1, rho = 0, psi = t/2, d0 = 1: sum_{i=p}^{q-1} 2^-i
        let half = ComparisonFunction::linear(0.5);
        let s = series_bound(SpaceParams::METRIC, &half, 1.0, 1, Horizon::Finite(4)).unwrap();
        assert_eq!(s, 0.5 + 0.25 + 0.125);
        // b = 2, rho = 1, psi = t/2, d0 = 1: u0 = 2, u1 = 2 * 0.5 * 3 = 3
        let s = series_bound(params(2.0, 1.0), &half, 1.0, 0, Horizon::Finite(2)).unwrap();
        assert_eq!(s, 5.0);
    }

    #[test]
    fn series_infinite_agrees_with_long_partial_sum() {
        let psi = ComparisonFunction::linear(0.3);
        let p = params(1.5, 2.0);
        let inf = series_bound(p, &psi, 3.0, 2, Horizon::Infinite).unwrap();
        let fin = series_bound(p, &psi, 3.0, 2, Horizon::Finite(400)).unwrap();
        assert!(inf >= fin);
        assert!((inf - fin) <= 1e-12 * fin);
    }

    #[test]
    fn series_large_early_ratios_are_not_divergence() {
        // rho psi^i(d0) dominates for the first dozen terms.
        let psi = ComparisonFunction::linear(0.5);
        assert!(series_bound(params(1.0, 2.0), &psi, 2652.0, 0, Horizon::Infinite).is_ok());
    }

    #[test]
    fn series_harmonic_like_diverges() {
        let err = series_bound(SpaceParams::METRIC, &ComparisonFunction::rational(), 1.0, 0, Horizon::Infinite);
        assert!(matches!(err, Err(Error::Divergence(_))));
    }

    proptest! {
        #[test]
        fn esp_matches_subset_enumeration(xs in prop::collection::vec(0.0f64..3.0, 1..9), i in 1usize..9) {
            prop_assume!(i <= xs.len());
            let fast = esp(i, &xs).unwrap();
            let slow = esp_brute(i, &xs);
            prop_assert!((fast - slow).abs() <= 1e-12 * slow.max(1.0));
        }

        #[test]
        fn esp_pascal_recurrence(xs in prop::collection::vec(-3i32..4, 2..9), i in 1usize..9) {
            // Integer-valued inputs keep every product and sum exact.
            let xs: Vec<f64> = xs.into_iter().map(f64::from).collect();
            prop_assume!(i <= xs.len());
            let rest = &xs[1..];
            let lhs = esp_brute(i, &xs);
            let rhs = esp_brute(i, rest) + xs[0] * if i == 1 { 1.0 } else { esp_brute(i - 1, rest) };
            prop_assert_eq!(lhs, rhs);
            prop_assert_eq!(esp(i, &xs).unwrap(), lhs);
        }

        #[test]
        fn four_point_is_the_chain_bound(
            b in 1.0f64..4.0, rho in 0.0f64..8.0,
            u in prop::array::uniform4(0.0f64..2.0)
        ) {
            let p = params(b, rho);
            let exp = four_point_expansion(p, u[0], u[1], u[2], u[3]);
            let chain = chain_bound(p, &u).unwrap();
            prop_assert!((exp - chain).abs() <= 1e-12 * chain.max(1.0));
        }
    }
}
