use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rearrange::{IndependentSequence, StepCurve};

/// Largest product space that [`for_each_outcome`] will walk.
pub const ENUM_LIMIT: f64 = 2e6;

/// Accumulates probability mass per magnitude (keyed by bit pattern).
#[derive(Debug, Default, Clone)]
pub struct MassAccumulator {
    masses: HashMap<u64, f64>,
}

impl MassAccumulator {
    pub fn add(&mut self, magnitude: f64, prob: f64) {
        *self.masses.entry(magnitude.to_bits()).or_insert(0.0) += prob;
    }

    pub fn total(&self) -> f64 {
        self.masses.values().sum()
    }

    /// Tail curve `x ↦ Pr(Y > x)` of the accumulated law.
    pub fn tail(&self) -> StepCurve {
        StepCurve::tail_from_masses(self.masses.iter().map(|(&b, &p)| (f64::from_bits(b), p)))
    }
}

/// Calls `f(values, prob)` for every outcome of the product space.
///
/// Outcomes are visited in lexicographic order of atom indices.
pub fn for_each_outcome<F>(seq: &IndependentSequence, mut f: F) -> Result<()>
where
    F: FnMut(&[f64], f64),
{
    let count = seq.outcome_count();
    if count > ENUM_LIMIT {
        return Err(Error::EnumTooLarge(count));
    }
    let comps = seq.components();
    let n = comps.len();
    let mut idx = vec![0usize; n];
    let mut values = vec![0.0; n];
    // prefix[k] = probability of the first k coordinates
    let mut prefix = vec![1.0; n + 1];
    let refresh = |from: usize, idx: &[usize], values: &mut [f64], prefix: &mut [f64]| {
        for k in from..n {
            let a = comps[k].atoms()[idx[k]];
            values[k] = a.value;
            prefix[k + 1] = prefix[k] * a.prob;
        }
    };
    refresh(0, &idx, &mut values, &mut prefix);
    loop {
        f(&values, prefix[n]);
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(());
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < comps[k].len() {
                break;
            }
            idx[k] = 0;
        }
        refresh(k, &idx, &mut values, &mut prefix);
    }
}

/// Per-outcome statistics shared by the exact and Monte Carlo oracles:
/// `(|S|, U, M)` with partial sums accumulated left to right.
#[inline]
pub(crate) fn path_stats(values: &[f64], mut on_partial: impl FnMut(usize, f64)) -> (f64, f64, f64) {
    let mut s = 0.0f64;
    let mut u = 0.0f64;
    let mut m = 0.0f64;
    for (k, &x) in values.iter().enumerate() {
        s += x;
        let a = s.abs();
        on_partial(k, a);
        u = u.max(a);
        m = m.max(x.abs());
    }
    (s.abs(), u, m)
}

/// Exact laws of `|S|`, `U = max_k |S_k|`, `M = max_n |X_n|` and every `|S_k|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactJoint {
    pub s_tail: StepCurve,
    pub u_tail: StepCurve,
    pub m_tail: StepCurve,
    pub partial_tails: Vec<StepCurve>,
    pub outcome_count: u64,
}

/// Walks the full product space of a small sequence.
pub fn enumerate_exact(seq: &IndependentSequence) -> Result<ExactJoint> {
    let n = seq.len();
    let mut s_law = MassAccumulator::default();
    let mut u_law = MassAccumulator::default();
    let mut m_law = MassAccumulator::default();
    let mut partial = vec![MassAccumulator::default(); n];
    let mut outcomes = 0u64;
    for_each_outcome(seq, |values, p| {
        let (s, u, m) = path_stats(values, |k, a| partial[k].add(a, p));
        s_law.add(s, p);
        u_law.add(u, p);
        m_law.add(m, p);
        outcomes += 1;
    })?;
    debug_assert!((s_law.total() - 1.0).abs() < 1e-12);
    Ok(ExactJoint {
        s_tail: s_law.tail(),
        u_tail: u_law.tail(),
        m_tail: m_law.tail(),
        partial_tails: partial.iter().map(|l| l.tail()).collect(),
        outcome_count: outcomes,
    })
}

/// Exact tail of `|S|` alone.
pub fn exact_sum_tail(seq: &IndependentSequence) -> Result<StepCurve> {
    let mut law = MassAccumulator::default();
    for_each_outcome(seq, |values, p| {
        let s: f64 = values.iter().fold(0.0, |acc, &x| acc + x);
        law.add(s.abs(), p);
    })?;
    Ok(law.tail())
}

/// Exact tail of `U` alone.
pub fn exact_max_partial_tail(seq: &IndependentSequence) -> Result<StepCurve> {
    let mut law = MassAccumulator::default();
    for_each_outcome(seq, |values, p| {
        let (_, u, _) = path_stats(values, |_, _| {});
        law.add(u, p);
    })?;
    Ok(law.tail())
}
