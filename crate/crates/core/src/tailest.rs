//! The tail estimators `F₁` and `F₂`.
//!
//! For `0 < t < 1`, `F(t)` is the least λ such that both
//! `Π_n E t^{Y_n/λ} <= 1/t` and `Π_n E t^{-Y_n/λ} <= 1/t`, where `Y_n` is `X_n`
//! truncated (weakly) at ℓ(t) for `F₁` or at `M*(t)` for `F₂`. In log form,
//! with `a = ln(1/t)/λ`, the condition reads
//! `max(Σ ln E e^{-a Y_n}, Σ ln E e^{a Y_n}) <= ln(1/t)`.

use serde::{Deserialize, Serialize};

use crate::distmodel::{ComponentDistribution, TruncSide};
use crate::error::{Error, Result};
use crate::rearrange::{ell, max_star, IndependentSequence};

pub const MAX_ITERATIONS: usize = 300;
/// Relative width of the final bisection bracket.
pub const REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TruncationMode {
    /// Truncate at ℓ(t): `F₁`.
    Ell,
    /// Truncate at `M*(t)`: `F₂`.
    Mstar,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub t: f64,
    pub mode: TruncationMode,
    pub truncation_level: f64,
    pub lambda: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// A sequence truncated once, with identical neighbours collapsed to
/// `(distribution, multiplicity)`.
#[derive(Debug, Clone)]
pub struct TruncatedSequence {
    groups: Vec<(ComponentDistribution, usize)>,
}

impl TruncatedSequence {
    pub fn new(seq: &IndependentSequence, level: f64) -> Self {
        let groups = seq
            .runs()
            .iter()
            .map(|&(start, len)| (seq.components()[start].truncate(level, TruncSide::Le), len))
            .collect();
        TruncatedSequence { groups }
    }

    pub fn is_zero(&self) -> bool {
        self.groups.iter().all(|(d, _)| d.is_zero())
    }

    /// `max(Σ ln E e^{-aY_n}, Σ ln E e^{aY_n})`
    pub fn log_g(&self, a: f64) -> f64 {
        let (mut plus, mut minus) = (0.0, 0.0);
        for (d, m) in &self.groups {
            let m = *m as f64;
            plus += m * d.log_exp_moment(a);
            minus += m * d.log_exp_moment(-a);
        }
        plus.max(minus)
    }
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t < 1.0 {
        Ok(())
    } else {
        Err(Error::DomainError(format!("t must lie in (0, 1), got {t}")))
    }
}

/// `log G(λ)` for the sequence truncated at `trunc`; feasible iff `<= ln(1/t)`.
pub fn log_g(seq: &IndependentSequence, t: f64, trunc: f64, lambda: f64) -> Result<f64> {
    check_t(t)?;
    if !(lambda > 0.0) {
        return Err(Error::DomainError("λ must be positive".into()));
    }
    Ok(TruncatedSequence::new(seq, trunc).log_g((1.0 / t).ln() / lambda))
}

/// Truncation level used by `mode` at `t`.
pub fn truncation_level(seq: &IndependentSequence, t: f64, mode: TruncationMode) -> f64 {
    match mode {
        TruncationMode::Ell => ell(seq, t),
        TruncationMode::Mstar => max_star(seq, t),
    }
}

/// Least λ satisfying the two product conditions, by bisection.
///
/// `log G` is nonincreasing in λ (it is the larger of a convex function of
/// `a = ln(1/t)/λ` vanishing at zero and its reflection), so the feasible set
/// is a half-line. Returns λ = 0 for `t >= 1` and for a truncated sum that
/// vanishes almost surely.
pub fn tail_estimate(seq: &IndependentSequence, t: f64, mode: TruncationMode) -> Result<TailEstimate> {
    if !(t > 0.0) {
        return Err(Error::DomainError(format!("t must be positive, got {t}")));
    }
    let zero = |level| TailEstimate {
        t,
        mode,
        truncation_level: level,
        lambda: 0.0,
        bracket: (0.0, 0.0),
        iterations: 0,
    };
    if t >= 1.0 {
        return Ok(zero(0.0));
    }
    let level = truncation_level(seq, t, mode);
    let truncated = TruncatedSequence::new(seq, level);
    if truncated.is_zero() {
        return Ok(zero(level));
    }
    let budget = (1.0 / t).ln();
    let feasible = |lambda: f64| truncated.log_g(budget / lambda) <= budget;

    let mut hi = if level > 0.0 { level } else { 1.0 };
    let mut iterations = 0;
    while !feasible(hi) {
        hi *= 2.0;
        iterations += 1;
        if iterations > MAX_ITERATIONS {
            return Err(Error::NonConvergence(iterations));
        }
    }
    let mut lo = 0.0;
    while hi - lo > REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
        if iterations > MAX_ITERATIONS {
            return Err(Error::NonConvergence(iterations));
        }
    }
    Ok(TailEstimate {
        t,
        mode,
        truncation_level: level,
        lambda: hi,
        bracket: (lo, hi),
        iterations,
    })
}

/// `F₁(t)` (or `F₂(t)`), returning zero for `t >= 1`.
pub fn tail_value(seq: &IndependentSequence, t: f64, mode: TruncationMode) -> Result<f64> {
    tail_estimate(seq, t, mode).map(|e| e.lambda)
}
