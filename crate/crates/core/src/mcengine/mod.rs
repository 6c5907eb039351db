//! Exact-enumeration and Monte Carlo oracles, constant fitting and the
//! verification suites.

pub mod battery;
mod enumerate;
mod fit;
mod montecarlo;
pub mod verify;

pub use enumerate::{
    enumerate_exact, exact_max_partial_tail, exact_sum_tail, for_each_outcome, ExactJoint, MassAccumulator,
    ENUM_LIMIT,
};
pub use fit::{fit_constants, fit_upper, geometric_grid, FitResult, FIT_C_MAX, FIT_RATIO};
pub use montecarlo::{
    dkw_radius, simulate, threads_from_env, with_threads, McConfig, McSummary, DEFAULT_CHUNK, DEFAULT_DELTA,
};
pub use verify::{verify_suite, Check, SuiteId, VerificationReport, VerifyConfig};

use serde::{Deserialize, Serialize};

use crate::rearrange::StepCurve;

/// Which of `|S|`, `U`, `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    S,
    U,
    M,
}

/// Anything carrying tails of `|S|`, `U` and `M`.
pub trait TailSource {
    fn tail(&self, which: Which) -> &StepCurve;
}

impl TailSource for ExactJoint {
    fn tail(&self, which: Which) -> &StepCurve {
        match which {
            Which::S => &self.s_tail,
            Which::U => &self.u_tail,
            Which::M => &self.m_tail,
        }
    }
}

impl TailSource for McSummary {
    fn tail(&self, which: Which) -> &StepCurve {
        match which {
            Which::S => &self.s_tail,
            Which::U => &self.u_tail,
            Which::M => &self.m_tail,
        }
    }
}

/// Right inverse of the selected tail at `t`; zero for `t >= 1`.
pub fn empirical_quantile(source: &impl TailSource, which: Which, t: f64) -> f64 {
    if t >= 1.0 {
        return 0.0;
    }
    source.tail(which).quantile(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distmodel::ComponentDistribution;
    use crate::rearrange::IndependentSequence;

    #[test]
    fn quantile_of_empirical_samples() {
        let tail = StepCurve::empirical_tail(&mut [3.0, 1.0, 2.0]);
        let mc = McSummary {
            n: 3,
            seed: 0,
            chunk: 1,
            delta: 1e-3,
            dkw_radius: dkw_radius(3, 1e-3),
            s_tail: tail.clone(),
            u_tail: tail.clone(),
            m_tail: tail,
        };
        assert_eq!(empirical_quantile(&mc, Which::S, 0.4), 2.0);
        assert_eq!(empirical_quantile(&mc, Which::S, 1.0), 0.0);
    }

    #[test]
    fn quantile_of_exact_rademacher_pair() {
        let seq = IndependentSequence::iid(ComponentDistribution::rademacher(), 2).unwrap();
        let exact = enumerate_exact(&seq).unwrap();
        assert_eq!(empirical_quantile(&exact, Which::U, 0.4), 2.0);
    }
}
