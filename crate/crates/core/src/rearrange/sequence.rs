use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::curve::StepCurve;
use crate::distmodel::{ComponentDistribution, TruncSide};
use crate::error::{Error, Result};

/// Structural properties of a sequence that imply the strong Lévy property.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceFlags {
    #[serde(default)]
    pub positive: bool,
    #[serde(default)]
    pub symmetric: bool,
    #[serde(default)]
    pub iid: bool,
}

impl SequenceFlags {
    pub fn any(&self) -> bool {
        self.positive || self.symmetric || self.iid
    }

    pub fn union(self, other: SequenceFlags) -> SequenceFlags {
        SequenceFlags {
            positive: self.positive || other.positive,
            symmetric: self.symmetric || other.symmetric,
            iid: self.iid || other.iid,
        }
    }
}

/// Constants `(c1, c2)` with `Pr(|S_A| > c1 t) <= c2 Pr(|S_B| > t)` for `A ⊆ B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevyConstants {
    pub c1: f64,
    pub c2: f64,
}

impl LevyConstants {
    pub const POSITIVE: LevyConstants = LevyConstants { c1: 1.0, c2: 1.0 };
    pub const SYMMETRIC: LevyConstants = LevyConstants { c1: 1.0, c2: 2.0 };
    pub const IID: LevyConstants = LevyConstants { c1: 7.0, c2: 2.0 };
    /// The other known pair for identically distributed sequences.
    pub const IID_ALT: LevyConstants = LevyConstants { c1: 5.0, c2: 4.0 };

    /// Registry lookup, checked in the order positive, symmetric, iid.
    pub fn for_flags(flags: SequenceFlags) -> Option<LevyConstants> {
        if flags.positive {
            Some(Self::POSITIVE)
        } else if flags.symmetric {
            Some(Self::SYMMETRIC)
        } else if flags.iid {
            Some(Self::IID)
        } else {
            None
        }
    }
}

/// A finite sequence of independent summands.
#[derive(Debug, Clone)]
pub struct IndependentSequence {
    components: Vec<ComponentDistribution>,
    flags: SequenceFlags,
    levy: Option<LevyConstants>,
    runs: Vec<(usize, usize)>,
    sum_tail: OnceLock<StepCurve>,
    max_tail: OnceLock<StepCurve>,
}

impl PartialEq for IndependentSequence {
    fn eq(&self, other: &Self) -> bool {
        self.components == other.components && self.flags == other.flags && self.levy == other.levy
    }
}

impl IndependentSequence {
    /// Validates the declared flags against the atoms.
    pub fn new(components: Vec<ComponentDistribution>, flags: SequenceFlags) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptySequence);
        }
        if flags.positive {
            if let Some(i) = components.iter().position(|c| !c.is_nonnegative()) {
                return Err(Error::FlagMismatch(format!("positive flag but component {i} has a negative atom")));
            }
        }
        if flags.symmetric {
            if let Some(i) = components.iter().position(|c| !c.is_symmetric()) {
                return Err(Error::FlagMismatch(format!("symmetric flag but component {i} is not symmetric")));
            }
        }
        if flags.iid {
            if let Some(i) = components.iter().position(|c| c != &components[0]) {
                return Err(Error::FlagMismatch(format!("iid flag but component {i} differs from component 0")));
            }
        }
        let mut runs: Vec<(usize, usize)> = Vec::new();
        for (i, c) in components.iter().enumerate() {
            match runs.last_mut() {
                Some((start, len)) if &components[*start] == c => *len += 1,
                _ => runs.push((i, 1)),
            }
        }
        Ok(IndependentSequence {
            components,
            flags,
            levy: LevyConstants::for_flags(flags),
            runs,
            sum_tail: OnceLock::new(),
            max_tail: OnceLock::new(),
        })
    }

    /// Builds a sequence with every flag that the atoms satisfy.
    pub fn with_detected_flags(components: Vec<ComponentDistribution>) -> Result<Self> {
        let flags = detect_flags(&components);
        IndependentSequence::new(components, flags)
    }

    /// `n` independent copies of one distribution.
    pub fn iid(d: ComponentDistribution, n: usize) -> Result<Self> {
        IndependentSequence::with_detected_flags(vec![d; n])
    }

    pub fn with_levy_constants(mut self, levy: LevyConstants) -> Result<Self> {
        if !(levy.c1 > 0.0 && levy.c2 > 0.0) {
            return Err(Error::InvalidParameters("Lévy constants must be positive".into()));
        }
        self.levy = Some(levy);
        Ok(self)
    }

    pub fn components(&self) -> &[ComponentDistribution] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn flags(&self) -> SequenceFlags {
        self.flags
    }

    pub fn levy_constants(&self) -> Option<LevyConstants> {
        self.levy
    }

    /// Maximal runs `(start, len)` of consecutive identical components.
    pub fn runs(&self) -> &[(usize, usize)] {
        &self.runs
    }

    /// Number of outcomes in the product space.
    pub fn outcome_count(&self) -> f64 {
        self.components.iter().map(|c| c.len() as f64).product()
    }

    /// Applies the same truncation to every component; flags are preserved.
    pub fn truncate(&self, s: f64, side: TruncSide) -> IndependentSequence {
        let comps = self.components.iter().map(|c| c.truncate(s, side)).collect();
        let mut out = IndependentSequence::new(comps, self.flags).expect("truncation keeps flags");
        out.levy = self.levy;
        out
    }

    /// The sequence `(c·X_n)` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<IndependentSequence> {
        if !(c > 0.0) {
            return Err(Error::DomainError("scale must be positive".into()));
        }
        let comps = self
            .components
            .iter()
            .map(|d| d.scaled(c))
            .collect::<Result<Vec<_>>>()?;
        let mut out = IndependentSequence::new(comps, self.flags)?;
        out.levy = self.levy;
        Ok(out)
    }

    /// `x ↦ Σ_n Pr(|X_n| > x)`, the tail of the disjoint sum.
    pub fn sum_tail(&self) -> &StepCurve {
        self.sum_tail.get_or_init(|| {
            let xs = StepCurve::merged_breakpoints(self.components.iter().map(|c| c.tail_curve()));
            StepCurve::from_sampled(&xs, |x| self.components.iter().map(|c| c.tail_at(x)).sum())
        })
    }

    /// `x ↦ Pr(M > x) = 1 − Π_n (1 − Pr(|X_n| > x))`.
    ///
    /// Accumulated as `q ← q + α(1 − q)` in component order, which keeps the
    /// result below the matching partial sum of `α` in floating point.
    pub fn max_tail(&self) -> &StepCurve {
        self.max_tail.get_or_init(|| {
            let xs = StepCurve::merged_breakpoints(self.components.iter().map(|c| c.tail_curve()));
            StepCurve::from_sampled(&xs, |x| {
                self.components.iter().fold(0.0, |q, c| q + c.tail_at(x) * (1.0 - q))
            })
        })
    }
}

/// The flags that hold for a list of components.
pub fn detect_flags(components: &[ComponentDistribution]) -> SequenceFlags {
    SequenceFlags {
        positive: components.iter().all(|c| c.is_nonnegative()),
        symmetric: components.iter().all(|c| c.is_symmetric()),
        iid: components.windows(2).all(|w| w[0] == w[1]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distmodel::make_atomic;

    #[test]
    fn flag_validation() {
        let r = ComponentDistribution::rademacher();
        let one = ComponentDistribution::point(1.0).unwrap();
        let sym = SequenceFlags { symmetric: true, ..Default::default() };
        let s = IndependentSequence::new(vec![r.clone()], sym).unwrap();
        assert_eq!(s.levy_constants(), Some(LevyConstants::SYMMETRIC));
        assert!(matches!(IndependentSequence::new(vec![one.clone()], sym), Err(Error::FlagMismatch(_))));
        let pos = SequenceFlags { positive: true, ..Default::default() };
        assert!(matches!(IndependentSequence::new(vec![r.clone()], pos), Err(Error::FlagMismatch(_))));
        let iid = SequenceFlags { iid: true, ..Default::default() };
        assert!(matches!(IndependentSequence::new(vec![r.clone(), one], iid), Err(Error::FlagMismatch(_))));
        assert!(matches!(IndependentSequence::new(vec![], iid), Err(Error::EmptySequence)));
    }

    #[test]
    fn levy_registry_order() {
        let all = SequenceFlags { positive: true, symmetric: true, iid: true };
        assert_eq!(LevyConstants::for_flags(all), Some(LevyConstants::POSITIVE));
        let si = SequenceFlags { symmetric: true, iid: true, ..Default::default() };
        assert_eq!(LevyConstants::for_flags(si), Some(LevyConstants::SYMMETRIC));
        let i = SequenceFlags { iid: true, ..Default::default() };
        assert_eq!(LevyConstants::for_flags(i), Some(LevyConstants { c1: 7.0, c2: 2.0 }));
        assert_eq!(LevyConstants::for_flags(SequenceFlags::default()), None);
    }

    #[test]
    fn detected_flags_and_runs() {
        let s = IndependentSequence::iid(ComponentDistribution::rademacher(), 100).unwrap();
        assert_eq!(s.flags(), SequenceFlags { positive: false, symmetric: true, iid: true });
        assert_eq!(s.runs(), &[(0, 100)]);
        let a = make_atomic([(5.0, 0.3)]).unwrap();
        let b = make_atomic([(2.0, 0.5)]).unwrap();
        let p = IndependentSequence::with_detected_flags(vec![a.clone(), a, b]).unwrap();
        assert_eq!(p.runs(), &[(0, 2), (2, 1)]);
        assert!(p.flags().positive && !p.flags().iid);
    }

    #[test]
    fn pair_tails() {
        let a = make_atomic([(5.0, 0.3)]).unwrap();
        let b = make_atomic([(2.0, 0.5)]).unwrap();
        let s = IndependentSequence::with_detected_flags(vec![a, b]).unwrap();
        assert!((s.sum_tail().eval(1.0) - 0.8).abs() < 1e-15);
        assert!((s.sum_tail().eval(2.0) - 0.3).abs() < 1e-15);
        assert!((s.max_tail().eval(1.0) - 0.65).abs() < 1e-15);
        assert_eq!(s.max_tail().eval(5.0), 0.0);
    }
}
