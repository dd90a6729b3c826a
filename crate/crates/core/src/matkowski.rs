//! Comparison functions `psi: R+ -> R+` and numeric membership tests for
//! the Matkowski class `M` (nondecreasing, iterates vanish) and its
//! subclass `M_b` (iterate ratios eventually below `1/b`).
//!
//! Limits are not decidable from samples. Reports state the grid that
//! was checked and carry an [`Verdict::Inconclusive`] verdict instead of
//! guessing when the numbers sit on the boundary.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{domain, Result};

type PsiEval = dyn Fn(f64) -> f64 + Send + Sync;
type PsiIterate = dyn Fn(u64, f64) -> f64 + Send + Sync;

/// Default grid `{10^k : k = -3..2}`.
pub const DEFAULT_GRID: [f64; 6] = [1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0];
pub const DEFAULT_N_MAX: u64 = 10_000_000;
pub const DEFAULT_VANISH_TOL: f64 = 1e-6;
pub const DEFAULT_N_WINDOW: u64 = 64;
pub const DEFAULT_MARGIN: f64 = 1e-6;

/// Largest `k` probed at indices `n = 2^k` through a closed-form iterate.
const FAR_PROBE_MAX_EXP: u32 = 60;

/// A comparison function with an optional closed form for its iterates.
#[derive(Clone)]
pub struct ComparisonFunction {
    label: String,
    eval: Arc<PsiEval>,
    closed_form: Option<Arc<PsiIterate>>,
}

impl ComparisonFunction {
    pub fn new<F>(label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        ComparisonFunction { label: label.into(), eval: Arc::new(eval), closed_form: None }
    }

    /// Attaches `(n, t) -> psi^n(t)`.
    pub fn with_closed_form<G>(mut self, iterate: G) -> Self
    where
        G: Fn(u64, f64) -> f64 + Send + Sync + 'static,
    {
        self.closed_form = Some(Arc::new(iterate));
        self
    }

    /// `psi(t) = c t`.
    pub fn linear(c: f64) -> Self {
        ComparisonFunction::new(format!("linear:{c}"), move |t| c * t)
            .with_closed_form(move |n, t| c.powf(n as f64) * t)
    }

    /// `psi(t) = t / (1 + t)`, with `psi^n(t) = t / (1 + n t)`.
    pub fn rational() -> Self {
        ComparisonFunction::new("rational", |t| t / (1.0 + t)).with_closed_form(|n, t| t / (1.0 + n as f64 * t))
    }

    /// `psi(t) = sqrt(1 + t) - 1`, with `psi^n(t) = (1 + t)^(2^-n) - 1`.
    pub fn sqrt_shift() -> Self {
        ComparisonFunction::new("sqrt-shift", |t| t.ln_1p().mul_add(0.5, 0.0).exp_m1())
            .with_closed_form(|n, t| (t.ln_1p() * 0.5f64.powf(n as f64)).exp_m1())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn apply(&self, t: f64) -> f64 {
        (self.eval)(t)
    }

    pub fn has_closed_form(&self) -> bool {
        self.closed_form.is_some()
    }

    pub fn closed_form_iterate(&self, n: u64, t: f64) -> Option<f64> {
        self.closed_form.as_ref().map(|g| g(n, t))
    }

    /// `psi^n(t)` by explicit composition; `n = 0` returns `t`.
    ///
    /// Stops early once an exact fixed point of `psi` is reached, since all
    /// later iterates equal it.
    pub fn iterate(&self, n: u64, t: f64) -> f64 {
        let mut v = t;
        for _ in 0..n {
            let next = self.apply(v);
            if next == v {
                break;
            }
            v = next;
        }
        v
    }

    /// `[t, psi(t), ..., psi^n(t)]`.
    pub fn orbit(&self, n: u64, t: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(n as usize + 1);
        let mut v = t;
        out.push(v);
        for _ in 0..n {
            v = self.apply(v);
            out.push(v);
        }
        out
    }
}

impl fmt::Debug for ComparisonFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComparisonFunction")
            .field("label", &self.label)
            .field("closed_form", &self.closed_form.is_some())
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Member,
    NonMember,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipDiagnostics {
    pub grid: Vec<f64>,
    pub n_max: u64,
    pub vanish_tol: f64,
    /// `psi^{n_max}(t)` per grid point.
    pub final_iterates: Vec<f64>,
    /// `psi(t)` per grid point.
    pub values: Vec<f64>,
    pub n_window: Option<u64>,
    pub margin: Option<f64>,
    /// Largest observed ratio `psi^{n+1}(t) / psi^n(t)` per grid point.
    pub ratio_max: Vec<Option<f64>>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipReport {
    pub label: String,
    pub is_monotone: bool,
    pub iterates_vanish: bool,
    /// `psi(t) < t` on the grid.
    pub below_identity: bool,
    pub zero_at_zero: bool,
    pub in_m: bool,
    pub b: Option<f64>,
    pub ratio_limsup_estimate: Option<f64>,
    /// `None` when the ratio test is inconclusive.
    pub in_mb: Option<bool>,
    pub verdict_mb: Option<Verdict>,
    pub diagnostics: MembershipDiagnostics,
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(domain("empty grid"));
    }
    if grid.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(domain("grid points must be positive and finite"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(domain("grid must be strictly ascending"));
    }
    Ok(())
}

/// Numeric test of membership in `M` on `grid`.
pub fn check_m(psi: &ComparisonFunction, grid: &[f64], n_max: u64, vanish_tol: f64) -> Result<MembershipReport> {
    validate_grid(grid)?;
    if n_max == 0 {
        return Err(domain("n_max must be >= 1"));
    }
    let values: Vec<f64> = grid.iter().map(|&t| psi.apply(t)).collect();
    let final_iterates: Vec<f64> = grid.iter().map(|&t| psi.iterate(n_max, t)).collect();

    let is_monotone = values.iter().all(|v| v.is_finite() && *v >= 0.0) && values.windows(2).all(|w| w[0] <= w[1]);
    let iterates_vanish = final_iterates.iter().all(|v| v.abs() < vanish_tol);
    let below_identity = grid.iter().zip(&values).all(|(t, v)| v < t);
    let zero_at_zero = psi.apply(0.0) == 0.0;

    Ok(MembershipReport {
        label: psi.label().to_string(),
        is_monotone,
        iterates_vanish,
        below_identity,
        zero_at_zero,
        in_m: is_monotone && iterates_vanish,
        b: None,
        ratio_limsup_estimate: None,
        in_mb: None,
        verdict_mb: None,
        diagnostics: MembershipDiagnostics {
            grid: grid.to_vec(),
            n_max,
            vanish_tol,
            final_iterates,
            values,
            n_window: None,
            margin: None,
            ratio_max: Vec::new(),
            notes: Vec::new(),
        },
    })
}

fn usable(v: f64) -> bool {
    v.is_normal() && v > 0.0
}

/// Ratio `num / den` when both iterates are precise enough to divide.
fn ratio(num: f64, den: f64) -> Option<f64> {
    (usable(den) && (usable(num) || num == 0.0)).then(|| num / den)
}

/// Numeric test of membership in `M_b`, with the `M` part run at the
/// default `n_max` and tolerance.
pub fn check_mb(psi: &ComparisonFunction, b: f64, grid: &[f64], n_window: u64) -> Result<MembershipReport> {
    check_mb_with(psi, b, grid, n_window, DEFAULT_MARGIN)
}

/// [`check_mb`] with an explicit margin.
///
/// The estimate is the largest ratio `psi^{n+1}(t) / psi^n(t)` over the
/// last `n_window / 2` indices below `n_window`, over the grid; when a
/// closed form is attached it also covers the far indices `n = 2^k`.
/// Member if the estimate is below `1/b - margin`, non-member if it
/// reaches `1/b`, inconclusive in between or when every ratio underflows.
pub fn check_mb_with(
    psi: &ComparisonFunction,
    b: f64,
    grid: &[f64],
    n_window: u64,
    margin: f64,
) -> Result<MembershipReport> {
    if !(b >= 1.0 && b.is_finite()) {
        return Err(domain(format!("b must be >= 1, got {b}")));
    }
    if n_window < 2 {
        return Err(domain("n_window must be >= 2"));
    }
    if !(margin >= 0.0) {
        return Err(domain("margin must be >= 0"));
    }
    let mut report = check_m(psi, grid, DEFAULT_N_MAX, DEFAULT_VANISH_TOL)?;
    let mut notes = Vec::new();
    let mut ratio_max = Vec::with_capacity(grid.len());
    let mut underflow = false;

    for &t in grid {
        let orbit = psi.orbit(n_window, t);
        let start = (n_window - n_window / 2) as usize;
        let mut best: Option<f64> = None;
        let mut bump = |r: Option<f64>| {
            if let Some(r) = r {
                best = Some(best.map_or(r, |m: f64| m.max(r)));
            }
        };
        for n in start..n_window as usize {
            bump(ratio(orbit[n + 1], orbit[n]));
        }
        if psi.has_closed_form() {
            for k in 1..=FAR_PROBE_MAX_EXP {
                let n = 1u64 << k;
                let (Some(hi), Some(lo)) = (psi.closed_form_iterate(n + 1, t), psi.closed_form_iterate(n, t)) else {
                    continue;
                };
                bump(ratio(hi, lo));
            }
        }
        if best.is_none() {
            underflow = true;
            notes.push(format!("t={t}: iterates underflow before the ratio window, no usable ratio"));
        }
        ratio_max.push(best);
    }

    let estimate = ratio_max.iter().flatten().copied().fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.max(r))));
    let threshold = 1.0 / b;
    let verdict = match estimate {
        _ if underflow => Verdict::Inconclusive,
        None => Verdict::Inconclusive,
        Some(e) if e >= threshold => Verdict::NonMember,
        Some(e) if e < threshold - margin => {
            if report.in_m {
                Verdict::Member
            } else {
                notes.push("ratio condition holds on the grid but psi failed the M test".into());
                Verdict::NonMember
            }
        }
        Some(_) => {
            notes.push(format!("estimate within {margin} of 1/b"));
            Verdict::Inconclusive
        }
    };
    if psi.has_closed_form() {
        notes.push(format!("closed form probed at n = 2^k, k <= {FAR_PROBE_MAX_EXP}"));
    }

    report.b = Some(b);
    report.ratio_limsup_estimate = estimate;
    report.verdict_mb = Some(verdict);
    report.in_mb = match verdict {
        Verdict::Member => Some(true),
        Verdict::NonMember => Some(false),
        Verdict::Inconclusive => None,
    };
    report.diagnostics.n_window = Some(n_window);
    report.diagnostics.margin = Some(margin);
    report.diagnostics.ratio_max = ratio_max;
    report.diagnostics.notes = notes;
    Ok(report)
}
