//! Closed-form upper bounds: Klass–Nowicki for the maximal function and the
//! disjoint decomposition of its large part.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rearrange::{ell, ell_lp_norm, IndependentSequence};

/// Default constant for [`kn_decr_bound`]. Empirical: only its existence is known.
pub const KN_DECR_C1_DEFAULT: f64 = 12.0;

/// `ln k!`
pub fn ln_factorial(k: u32) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnBoundInput {
    /// `Pr(U > t)`
    pub p_u: f64,
    /// `Pr(M > t)`
    pub p_m: f64,
    pub k: u32,
}

/// `(1/K!) (p_U / (1 - p_U))^K + p_M`, which bounds `Pr(U > (3K - 1) t)`.
pub fn kn_rhs(input: KnBoundInput) -> Result<f64> {
    let KnBoundInput { p_u, p_m, k } = input;
    if !(0.0..=1.0).contains(&p_u) || !(0.0..=1.0).contains(&p_m) {
        return Err(Error::DomainError("probabilities must lie in [0, 1]".into()));
    }
    if k == 0 {
        return Err(Error::DomainError("K must be at least 1".into()));
    }
    if p_u == 1.0 {
        return Ok(f64::INFINITY);
    }
    if p_u == 0.0 {
        return Ok(p_m);
    }
    let log_ratio = p_u.ln() - (-p_u).ln_1p();
    Ok((k as f64 * log_ratio - ln_factorial(k)).exp() + p_m)
}

/// `c1 · ln(1/t) / max{ln(1/s), ln ln(4/t)} · (U*(s) + M*(t/2))` for `0 < t <= s <= 1/2`.
pub fn kn_decr_bound(u_star_s: f64, m_star_half_t: f64, t: f64, s: f64, c1: f64) -> Result<f64> {
    if !(t > 0.0 && t <= s && s <= 0.5) {
        return Err(Error::DomainError(format!("need 0 < t <= s <= 1/2, got t={t}, s={s}")));
    }
    if !(c1 > 0.0) {
        return Err(Error::DomainError("c1 must be positive".into()));
    }
    let mass = u_star_s + m_star_half_t;
    if mass == 0.0 {
        return Ok(0.0);
    }
    let denom = (1.0 / s).ln().max((4.0 / t).ln().ln());
    Ok(c1 * (1.0 / t).ln() / denom * mass)
}

fn check_r(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(Error::DomainError(format!("r must lie in (0, 1), got {r}")))
    }
}

/// Argument of ℓ in the bound on `V_k*(t)`: `t (k-1)! / r^{k-1}`.
pub fn vk_argument(r: f64, k: u32, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let km1 = k - 1;
    (t.ln() + ln_factorial(km1) - km1 as f64 * r.ln()).exp()
}

/// `k · ℓ(t (k-1)! / r^{k-1})`, the bound on `V_k*(t)`.
pub fn vk_tail_bound(seq: &IndependentSequence, r: f64, k: u32, t: f64) -> Result<f64> {
    check_r(r)?;
    if k == 0 {
        return Err(Error::DomainError("k must be at least 1".into()));
    }
    if !(t >= 0.0) {
        return Err(Error::DomainError("t must be nonnegative".into()));
    }
    Ok(k as f64 * ell(seq, vk_argument(r, k, t)))
}

/// `2 e^{2^p r / p} ‖ℓ‖_p`, the bound on `‖U^{(>ℓ(r))}‖_p`.
pub fn large_part_lp_bound(seq: &IndependentSequence, r: f64, p: f64) -> Result<f64> {
    check_r(r)?;
    if !(p > 0.0) {
        return Err(Error::DomainError("p must be positive".into()));
    }
    let norm = ell_lp_norm(seq, p);
    if norm == 0.0 {
        return Ok(0.0);
    }
    let exponent = (p * std::f64::consts::LN_2 + r.ln() - p.ln()).exp();
    Ok((std::f64::consts::LN_2 + exponent + norm.ln()).exp())
}
