//! Orlicz norms for `Φ_t(x) = (t^{-x} - 1) / (t^{-1} - 1)`, `0 < t <= 1/4`.
//!
//! `E Φ_t(|X|/λ) <= 1` is the same as `ln E e^{a|X|} <= ln(1/t)` with
//! `a = ln(1/t)/λ`, which is how the norm is evaluated.

use crate::distmodel::ComponentDistribution;
use crate::error::{Error, Result};

pub const MAX_ITERATIONS: usize = 200;
const REL_TOL: f64 = 1e-12;

/// The Orlicz function `Φ_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiT {
    t: f64,
}

impl PhiT {
    pub fn new(t: f64) -> Result<Self> {
        if !(t > 0.0 && t <= 0.25) {
            return Err(Error::DomainError(format!("Φ_t needs 0 < t <= 1/4, got {t}")));
        }
        Ok(PhiT { t })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn eval(&self, x: f64) -> f64 {
        let l = (1.0 / self.t).ln();
        (l * x).exp_m1() / l.exp_m1()
    }

    /// `E Φ_t(|X|/λ) <= 1`
    fn feasible(&self, d: &ComponentDistribution, lambda: f64) -> bool {
        let l = (1.0 / self.t).ln();
        d.log_exp_moment_abs(l / lambda) <= l
    }
}

/// `‖X‖_{Φ_t} = inf { λ > 0 : E Φ_t(|X|/λ) <= 1 }` by bisection on λ.
pub fn phi_norm(d: &ComponentDistribution, t: f64) -> Result<f64> {
    let phi = PhiT::new(t)?;
    if d.is_zero() {
        return Ok(0.0);
    }
    let mut hi = d.max_magnitude();
    let mut iterations = 0;
    while !phi.feasible(d, hi) {
        hi *= 2.0;
        iterations += 1;
        if iterations > MAX_ITERATIONS {
            return Err(Error::NonConvergence(iterations));
        }
    }
    let mut lo = 0.0;
    while hi - lo > REL_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if phi.feasible(d, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
        if iterations > MAX_ITERATIONS {
            return Err(Error::NonConvergence(iterations));
        }
    }
    Ok(hi)
}

/// `sup_{0<=x<=1} [ln(1/t) / (ln(1/x) + ln(1/t))] X*(x)`, evaluated exactly.
///
/// The weight increases in `x` and `X*` is constant on `[Pr(|X| > m), Pr(|X| >= m))`,
/// so the supremum is approached at the right end of each such cell.
pub fn sup_formula(d: &ComponentDistribution, t: f64) -> Result<f64> {
    PhiT::new(t)?;
    let l = (1.0 / t).ln();
    let tail = d.tail_curve();
    let xs = tail.xs();
    let vs = tail.values();
    let best = (1..xs.len())
        .map(|j| {
            let x = vs[j - 1].min(1.0);
            let w = l / ((1.0 / x).ln() + l);
            w * xs[j]
        })
        .fold(0.0, f64::max);
    Ok(best)
}
