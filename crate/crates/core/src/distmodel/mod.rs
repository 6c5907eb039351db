//! Finite atomic distributions for the individual summands.
//!
//! Every summand is a finite list of signed atoms. Continuous families are
//! brought in through [`discretize`], so every downstream quantity (tails,
//! rearrangements, exponential moments) is an exact finite computation.

mod family;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rearrange::StepCurve;

pub use family::{discretize, ContinuousFamilySpec, Family};

/// Mass tolerance used for normalization checks.
pub const MASS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub value: f64,
    pub prob: f64,
}

/// Which part of a variable survives truncation at level `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TruncSide {
    /// `X · 1{|X| <= s}`
    Le,
    /// `X · 1{|X| > s}`
    Gt,
}

/// One independent summand: finitely many atoms, sorted by value, total mass one.
#[derive(Debug, Clone)]
pub struct ComponentDistribution {
    atoms: Vec<Atom>,
    cdf: Vec<f64>,
    tail: StepCurve,
}

impl PartialEq for ComponentDistribution {
    fn eq(&self, other: &Self) -> bool {
        self.atoms == other.atoms
    }
}

impl Serialize for ComponentDistribution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<(f64, f64)> = self.atoms.iter().map(|a| (a.value, a.prob)).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComponentDistribution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<(f64, f64)>::deserialize(d)?;
        make_atomic(pairs).map_err(serde::de::Error::custom)
    }
}

/// Builds a distribution from `(value, prob)` pairs.
///
/// Atoms with bit-identical values are merged (`-0.0` is read as `0.0`),
/// zero-probability atoms are dropped, and a mass deficit larger than
/// [`MASS_TOL`] is placed on an atom at zero.
pub fn make_atomic<I>(atoms: I) -> Result<ComponentDistribution>
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let mut raw: Vec<Atom> = Vec::new();
    for (value, prob) in atoms {
        if !value.is_finite() {
            return Err(Error::NonFiniteValue(value));
        }
        if !prob.is_finite() || prob < 0.0 {
            return Err(Error::NegativeProb(prob));
        }
        if prob == 0.0 {
            continue;
        }
        let value = if value == 0.0 { 0.0 } else { value };
        raw.push(Atom { value, prob });
    }
    raw.sort_by(|a, b| a.value.total_cmp(&b.value));
    let mut merged: Vec<Atom> = Vec::with_capacity(raw.len());
    for a in raw {
        match merged.last_mut() {
            Some(last) if last.value.to_bits() == a.value.to_bits() => last.prob += a.prob,
            _ => merged.push(a),
        }
    }
    let total: f64 = merged.iter().map(|a| a.prob).sum();
    if total > 1.0 + MASS_TOL {
        return Err(Error::TotalMassExceedsOne(total));
    }
    let deficit = 1.0 - total;
    if deficit > MASS_TOL {
        match merged.binary_search_by(|a| a.value.total_cmp(&0.0)) {
            Ok(i) => merged[i].prob += deficit,
            Err(i) => merged.insert(i, Atom { value: 0.0, prob: deficit }),
        }
    }
    Ok(ComponentDistribution::from_sorted(merged))
}

impl ComponentDistribution {
    fn from_sorted(atoms: Vec<Atom>) -> Self {
        let mut acc = 0.0;
        let cdf = atoms
            .iter()
            .map(|a| {
                acc += a.prob;
                acc
            })
            .collect();
        let tail = StepCurve::tail_from_masses(atoms.iter().map(|a| (a.value.abs(), a.prob)));
        ComponentDistribution { atoms, cdf, tail }
    }

    /// The point mass at `c`.
    pub fn point(c: f64) -> Result<Self> {
        make_atomic([(c, 1.0)])
    }

    /// `±1` with probability one half each.
    pub fn rademacher() -> Self {
        make_atomic([(-1.0, 0.5), (1.0, 0.5)]).expect("valid atoms")
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        *self.cdf.last().unwrap_or(&0.0)
    }

    /// Largest `|value|` over the atoms.
    pub fn max_magnitude(&self) -> f64 {
        self.atoms.iter().map(|a| a.value.abs()).fold(0.0, f64::max)
    }

    /// True when the variable is almost surely zero.
    pub fn is_zero(&self) -> bool {
        self.atoms.iter().all(|a| a.value == 0.0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.atoms.iter().all(|a| a.value >= 0.0)
    }

    /// Atom multiset closed under negation (probabilities compared to 1e-12).
    pub fn is_symmetric(&self) -> bool {
        let n = self.atoms.len();
        (0..n).all(|i| {
            let a = self.atoms[i];
            let b = self.atoms[n - 1 - i];
            a.value == -b.value && (a.prob - b.prob).abs() <= MASS_TOL
        })
    }

    /// Tail curve `x ↦ Pr(|X| > x)`.
    pub fn tail_curve(&self) -> &StepCurve {
        &self.tail
    }

    /// `Pr(|X| > x)`.
    pub fn tail_at(&self, x: f64) -> f64 {
        self.tail.eval(x)
    }

    /// Decreasing rearrangement `X*(u) = sup { y : Pr(|X| > y) > u }`.
    pub fn quantile_at(&self, u: f64) -> f64 {
        self.tail.quantile(u)
    }

    /// `ln E e^{aX}` by log-sum-exp.
    pub fn log_exp_moment(&self, a: f64) -> f64 {
        if a == 0.0 {
            return 0.0;
        }
        let m = self
            .atoms
            .iter()
            .map(|at| a * at.value)
            .fold(f64::NEG_INFINITY, f64::max);
        let s: f64 = self
            .atoms
            .iter()
            .map(|at| at.prob * (a * at.value - m).exp())
            .sum();
        m + s.ln()
    }

    /// `ln E e^{a|X|}`.
    pub fn log_exp_moment_abs(&self, a: f64) -> f64 {
        if a == 0.0 {
            return 0.0;
        }
        let m = self
            .atoms
            .iter()
            .map(|at| a * at.value.abs())
            .fold(f64::NEG_INFINITY, f64::max);
        let s: f64 = self
            .atoms
            .iter()
            .map(|at| at.prob * (a * at.value.abs() - m).exp())
            .sum();
        m + s.ln()
    }

    /// Truncation at level `s`; the removed mass moves to zero.
    pub fn truncate(&self, s: f64, side: TruncSide) -> ComponentDistribution {
        let keep = |v: f64| match side {
            TruncSide::Le => v.abs() <= s,
            TruncSide::Gt => v.abs() > s,
        };
        if self.atoms.iter().all(|a| keep(a.value) || a.value == 0.0) {
            return self.clone();
        }
        let mut zero = 0.0;
        let mut kept = Vec::with_capacity(self.atoms.len());
        for a in &self.atoms {
            if a.value != 0.0 && keep(a.value) {
                kept.push(*a);
            } else {
                zero += a.prob;
            }
        }
        let i = kept.partition_point(|a| a.value < 0.0);
        kept.insert(i, Atom { value: 0.0, prob: zero });
        ComponentDistribution::from_sorted(kept)
    }

    /// The law of `c·X`.
    pub fn scaled(&self, c: f64) -> Result<ComponentDistribution> {
        if !c.is_finite() {
            return Err(Error::NonFiniteValue(c));
        }
        make_atomic(self.atoms.iter().map(|a| (c * a.value, a.prob)))
    }

    /// One inverse-CDF draw from a single uniform.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random::<f64>() * self.total_mass();
        let i = self.cdf.partition_point(|&c| c <= u);
        self.atoms[i.min(self.atoms.len() - 1)].value
    }
}
