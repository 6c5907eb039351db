//! Approximate tail quantiles, Orlicz norms and moments of `|X_1 + ... + X_N|`
//! for finitely many independent real random variables, together with the
//! exact-enumeration and Monte Carlo oracles used to check them.

// Negated float comparisons below are NaN-rejecting guards.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod distmodel;
pub mod error;
pub mod mcengine;
pub mod momentest;
pub mod orlicz;
pub mod rearrange;
pub mod tailest;

pub use distmodel::{discretize, make_atomic, ComponentDistribution, ContinuousFamilySpec, Family, TruncSide};
pub use error::{Error, Result};
pub use rearrange::{ell, ell_lp_norm, max_star, IndependentSequence, LevyConstants, SequenceFlags, Side, StepCurve};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
