//! `L_p` norms of the maximal function `U` from its tail at `e^{-p}/4` and ‖ℓ‖_p.

use serde::{Deserialize, Serialize};

use crate::distmodel::TruncSide;
use crate::error::{Error, Result};
use crate::mcengine::{exact_max_partial_tail, simulate, McConfig};
use crate::rearrange::{ell, ell_lp_norm, IndependentSequence, StepCurve};
use crate::tailest::{tail_estimate, TruncationMode};

/// Smallest `p` accepted by default.
pub const DEFAULT_P0: f64 = 0.5;

/// Where `U*(e^{-p}/4)` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuantileSource {
    Mc,
    Enum,
    /// `F₂(e^{-p}/4)` stands in for the quantile.
    F2proxy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub p: f64,
    pub estimate: f64,
    pub u_quantile_term: f64,
    pub ell_norm_term: f64,
    pub quantile_source: QuantileSource,
}

/// `e^{-p}/4`
pub fn quantile_level(p: f64) -> f64 {
    (-p).exp() / 4.0
}

/// Smallest level a Monte Carlo tail of `n` samples resolves.
pub fn mc_resolution(n: usize) -> f64 {
    10.0 / n as f64
}

fn check_p(p: f64, p0: f64) -> Result<()> {
    if p0 > 0.0 && p >= p0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::DomainError(format!("need p >= p0 = {p0} > 0, got p = {p}")))
    }
}

/// `U*(e^{-p}/4) + ‖ℓ‖_p` with the quantile read off a given tail of `U`.
///
/// `resolution` is the smallest level the tail is trusted at (zero for
/// exact tails).
pub fn u_lp_estimate_from_tail(
    seq: &IndependentSequence,
    p: f64,
    u_tail: &StepCurve,
    source: QuantileSource,
    resolution: f64,
) -> Result<MomentEstimate> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::DomainError(format!("p must be positive, got {p}")));
    }
    let level = quantile_level(p);
    if level < resolution {
        return Err(Error::QuantileUnavailable { level, resolution });
    }
    let u_quantile_term = u_tail.quantile(level);
    let ell_norm_term = ell_lp_norm(seq, p);
    Ok(MomentEstimate {
        p,
        estimate: u_quantile_term + ell_norm_term,
        u_quantile_term,
        ell_norm_term,
        quantile_source: source,
    })
}

/// `‖U‖_p ≈ U*(e^{-p}/4) + ‖ℓ‖_p`.
pub fn u_lp_estimate(
    seq: &IndependentSequence,
    p: f64,
    source: QuantileSource,
    mc: Option<&McConfig>,
    p0: f64,
) -> Result<MomentEstimate> {
    check_p(p, p0)?;
    match source {
        QuantileSource::Enum => {
            let tail = exact_max_partial_tail(seq)?;
            u_lp_estimate_from_tail(seq, p, &tail, source, 0.0)
        }
        QuantileSource::Mc => {
            let cfg = mc.ok_or_else(|| Error::InvalidParameters("Monte Carlo source needs a config".into()))?;
            let level = quantile_level(p);
            if level < mc_resolution(cfg.n) {
                return Err(Error::QuantileUnavailable { level, resolution: mc_resolution(cfg.n) });
            }
            let summary = simulate(seq, cfg)?;
            u_lp_estimate_from_tail(seq, p, &summary.u_tail, source, mc_resolution(cfg.n))
        }
        QuantileSource::F2proxy => {
            let level = quantile_level(p);
            let u_quantile_term = tail_estimate(seq, level, TruncationMode::Mstar)?.lambda;
            let ell_norm_term = ell_lp_norm(seq, p);
            Ok(MomentEstimate {
                p,
                estimate: u_quantile_term + ell_norm_term,
                u_quantile_term,
                ell_norm_term,
                quantile_source: source,
            })
        }
    }
}

/// The variant `(U^{(≤ℓ(e^{-p}/8))})*(e^{-p}/4) + ‖ℓ‖_p`, from exact enumeration.
pub fn u_lp_estimate_truncated_exact(seq: &IndependentSequence, p: f64, p0: f64) -> Result<MomentEstimate> {
    check_p(p, p0)?;
    let level = ell(seq, (-p).exp() / 8.0);
    let tail = exact_max_partial_tail(&seq.truncate(level, TruncSide::Le))?;
    u_lp_estimate_from_tail(seq, p, &tail, QuantileSource::Enum, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GrowthForm {
    /// `c (q/max{p, ln(e+q)}) (‖U‖_p + M*(·)) + c ‖M‖_q`
    First,
    /// `c (q/max{p, ln(e+q)}) (‖U‖_p + ‖M‖_q)`
    Second,
}

/// `q / max{p, ln(e + q)}`
pub fn growth_factor(q: f64, p: f64) -> f64 {
    q / p.max((std::f64::consts::E + q).ln())
}

/// Bound on `‖U‖_q` from `‖U‖_p`, with caller-supplied constant.
///
/// `m_star` is the value `M*(c₂⁻¹ e^{-q})`, used by the first form only.
pub fn moment_growth_bound(q: f64, p: f64, u_p: f64, m_star: f64, m_q: f64, c: f64, form: GrowthForm) -> Result<f64> {
    if !(p > 0.0 && q >= p) {
        return Err(Error::DomainError(format!("need q >= p > 0, got q={q}, p={p}")));
    }
    if !(c > 0.0) {
        return Err(Error::DomainError("constant must be positive".into()));
    }
    let k = growth_factor(q, p);
    Ok(match form {
        GrowthForm::First => c * k * (u_p + m_star) + c * m_q,
        GrowthForm::Second => c * k * (u_p + m_q),
    })
}
