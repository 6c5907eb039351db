//! Test corpora: random atomic sequences and a battery of named sequences
//! with the strong Lévy property.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distmodel::{discretize, make_atomic, ComponentDistribution, ContinuousFamilySpec, Family};
use crate::rearrange::IndependentSequence;

/// A random component with `1..=max_atoms` atoms on the half-integer lattice
/// in `[-5, 5]` and continuous random masses (a deficit goes to zero).
pub fn random_component<R: Rng>(rng: &mut R, max_atoms: usize) -> ComponentDistribution {
    let k = rng.random_range(1..=max_atoms);
    let weights: Vec<f64> = (0..=k).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let atoms: Vec<(f64, f64)> = weights[..k]
        .iter()
        .map(|w| (rng.random_range(-10i32..=10) as f64 * 0.5, w / total))
        .collect();
    make_atomic(atoms).expect("random atoms are valid")
}

/// A random sequence of `1..=max_n` components.
pub fn random_sequence<R: Rng>(rng: &mut R, max_n: usize, max_atoms: usize) -> IndependentSequence {
    let n = rng.random_range(1..=max_n);
    let comps = (0..n).map(|_| random_component(rng, max_atoms)).collect();
    IndependentSequence::with_detected_flags(comps).expect("nonempty")
}

pub fn random_corpus(count: usize, max_n: usize, max_atoms: usize, seed: u64) -> Vec<IndependentSequence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_sequence(&mut rng, max_n, max_atoms)).collect()
}

/// Sequences small enough for exact enumeration: `N <= 6`, at most 4 atoms each.
pub fn enumerable_corpus(count: usize, seed: u64) -> Vec<IndependentSequence> {
    random_corpus(count, 6, 4, seed)
}

pub struct BatteryEntry {
    pub name: &'static str,
    pub seq: IndependentSequence,
}

fn weighted_rademachers(weights: impl IntoIterator<Item = f64>) -> IndependentSequence {
    let r = ComponentDistribution::rademacher();
    let comps = weights.into_iter().map(|w| r.scaled(w).expect("finite weight")).collect();
    IndependentSequence::with_detected_flags(comps).expect("nonempty")
}

fn family(f: Family, params: Vec<f64>, eps_value: f64) -> ComponentDistribution {
    discretize(&ContinuousFamilySpec::new(f, params, 1e-3, eps_value)).expect("valid family")
}

fn iid(d: ComponentDistribution, n: usize) -> IndependentSequence {
    IndependentSequence::iid(d, n).expect("nonempty")
}

/// Named sequences, each positive, symmetric or identically distributed.
pub fn tail_battery() -> Vec<BatteryEntry> {
    let geometric = |scale: f64| {
        make_atomic([(scale, 0.2), (2.0 * scale, 0.1), (4.0 * scale, 0.05), (8.0 * scale, 0.025)]).expect("valid")
    };
    let gaussian = family(Family::Gaussian, vec![0.0, 1.0], 0.05);
    let exponential = family(Family::Exponential, vec![1.0], 0.05);
    vec![
        BatteryEntry { name: "rademacher-iid-100", seq: weighted_rademachers(vec![1.0; 100]) },
        BatteryEntry { name: "rademacher-harmonic-20", seq: weighted_rademachers((1..=20).map(|k| 1.0 / k as f64)) },
        BatteryEntry { name: "rademacher-sqrt-50", seq: weighted_rademachers((1..=50).map(|k| (k as f64).powf(-0.5))) },
        BatteryEntry { name: "rademacher-geometric-12", seq: weighted_rademachers((0..12).map(|k| 0.5f64.powi(k))) },
        BatteryEntry {
            name: "rademacher-one-big-41",
            seq: weighted_rademachers(std::iter::once(10.0).chain(std::iter::repeat_n(1.0, 40))),
        },
        BatteryEntry {
            name: "positive-geometric-30",
            seq: IndependentSequence::with_detected_flags((0..30).map(|n| geometric(1.0 + (n % 3) as f64)).collect())
                .expect("nonempty"),
        },
        BatteryEntry { name: "bernoulli-sparse-50", seq: iid(make_atomic([(1.0, 0.02)]).expect("valid"), 50) },
        BatteryEntry { name: "gaussian-iid-10", seq: iid(gaussian.clone(), 10) },
        BatteryEntry { name: "gaussian-iid-100", seq: iid(gaussian, 100) },
        BatteryEntry { name: "exponential-iid-20", seq: iid(exponential.clone(), 20) },
        BatteryEntry { name: "exponential-iid-100", seq: iid(exponential, 100) },
        BatteryEntry { name: "pareto3-iid-50", seq: iid(family(Family::Pareto, vec![1.0, 3.0], 0.05), 50) },
        BatteryEntry {
            name: "gaussian-mixed-scales-30",
            seq: IndependentSequence::with_detected_flags(
                (0..30)
                    .map(|n| {
                        let sd = 10f64.powi(n % 3 - 1);
                        family(Family::Gaussian, vec![0.0, sd], 0.05 * sd)
                    })
                    .collect(),
            )
            .expect("nonempty"),
        },
        BatteryEntry { name: "weibull-half-iid-20", seq: iid(family(Family::Weibull, vec![0.5, 1.0], 0.05), 20) },
    ]
}
