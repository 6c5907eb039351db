//! Step-curve algebra over a sequence: the disjoint-sum rearrangement ℓ,
//! quantiles of the largest summand `M`, and `L_p` norms of ℓ.

mod curve;
mod sequence;

use serde::{Deserialize, Serialize};

pub use curve::{Side, StepCurve};
pub use sequence::{detect_flags, IndependentSequence, LevyConstants, SequenceFlags};

/// Generalized inverse of a step curve.
pub fn inverse(curve: &StepCurve, x: f64, side: Side) -> f64 {
    curve.inverse(x, side)
}

/// ℓ(t): the least `x` with `Σ_n Pr(|X_n| > x) <= t` for `t ∈ [0, 1]`, zero above one.
pub fn ell(seq: &IndependentSequence, t: f64) -> f64 {
    if t > 1.0 {
        return 0.0;
    }
    seq.sum_tail().inverse(t.max(0.0), Side::Right)
}

/// `M*(t)`, the decreasing rearrangement of `M = max_n |X_n|`.
pub fn max_star(seq: &IndependentSequence, t: f64) -> f64 {
    seq.max_tail().inverse(t.max(0.0), Side::Right)
}

/// `‖ℓ‖_p` with ℓ viewed as a random variable on `[0, 1]`.
pub fn ell_lp_norm(seq: &IndependentSequence, p: f64) -> f64 {
    seq.sum_tail().rearrangement_lp_norm(p)
}

/// One row of the `ℓ(2t) <= ℓ(t/(1-t)) <= M*(t) <= ℓ(t)` chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainRow {
    pub t: f64,
    pub ell_2t: f64,
    pub ell_ratio: f64,
    pub max_star: f64,
    pub ell_t: f64,
    pub ok: bool,
}

/// Evaluates the ℓ / `M*` chain at each `t ∈ (0, 1)`; all comparisons are exact.
pub fn check_ell_max_chain(seq: &IndependentSequence, t_grid: &[f64]) -> Vec<ChainRow> {
    t_grid
        .iter()
        .map(|&t| {
            debug_assert!(t > 0.0 && t < 1.0);
            let ell_2t = ell(seq, 2.0 * t);
            let ell_ratio = ell(seq, t / (1.0 - t));
            let m = max_star(seq, t);
            let ell_t = ell(seq, t);
            ChainRow {
                t,
                ell_2t,
                ell_ratio,
                max_star: m,
                ell_t,
                ok: ell_2t <= ell_ratio && ell_ratio <= m && m <= ell_t,
            }
        })
        .collect()
}
