use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tailsum::bounds::{kn_rhs, KnBoundInput};
use tailsum::cli::SpecFile;
use tailsum::mcengine::battery::{random_component, random_sequence};
use tailsum::mcengine::fit_constants;
use tailsum::orlicz::{phi_norm, sup_formula};
use tailsum::tailest::{tail_estimate, TruncationMode};
use tailsum::{discretize, ell, max_star, ContinuousFamilySpec, Family, IndependentSequence, TruncSide};

fn seq_from(seed: u64) -> IndependentSequence {
    random_sequence(&mut ChaCha8Rng::seed_from_u64(seed), 8, 4)
}

/// Composite Simpson rule on `[a, b]`.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

/// `(density, support)` written out independently of the library.
fn density(family: Family, p: &[f64]) -> (Box<dyn Fn(f64) -> f64>, f64, f64) {
    let inf = f64::INFINITY;
    match family {
        Family::Gaussian => {
            let (m, s) = (p[0], p[1]);
            let c = 1.0 / (s * (2.0 * std::f64::consts::PI).sqrt());
            (Box::new(move |x| c * (-(x - m) * (x - m) / (2.0 * s * s)).exp()), -inf, inf)
        }
        Family::Exponential => {
            let r = p[0];
            (Box::new(move |x| r * (-r * x).exp()), 0.0, inf)
        }
        Family::Pareto => {
            let (s, a) = (p[0], p[1]);
            (Box::new(move |x| a * s.powf(a) / x.powf(a + 1.0)), s, inf)
        }
        Family::Uniform => {
            let (a, b) = (p[0], p[1]);
            (Box::new(move |_| 1.0 / (b - a)), a, b)
        }
        Family::Weibull => {
            let (k, l) = (p[0], p[1]);
            (Box::new(move |x| k / l * (x / l).powf(k - 1.0) * (-(x / l).powf(k)).exp()), 0.0, inf)
        }
    }
}

/// `Pr(|X| > x)` by quadrature of the density over `[-x, x]`.
fn oracle_tail(family: Family, p: &[f64], x: f64) -> f64 {
    let (f, lo, hi) = density(family, p);
    1.0 - simpson(f, lo.max(-x), hi.min(x), 20_000)
}

fn family_case() -> impl Strategy<Value = (Family, Vec<f64>)> {
    prop_oneof![
        (-2.0..2.0f64, 0.3..3.0f64).prop_map(|(m, s)| (Family::Gaussian, vec![m, s])),
        (0.2..4.0f64).prop_map(|r| (Family::Exponential, vec![r])),
        (0.5..2.0f64, 2.0..5.0f64).prop_map(|(s, a)| (Family::Pareto, vec![s, a])),
        (-3.0..1.0f64, 0.1..4.0f64).prop_map(|(a, w)| (Family::Uniform, vec![a, a + w])),
        (1.0..3.0f64, 0.5..2.0f64).prop_map(|(k, l)| (Family::Weibull, vec![k, l])),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ell_is_the_right_inverse_of_the_summed_tail(seed in any::<u64>(), t in 0.0..=1.0f64, x in 0.0..6.0f64) {
        let seq = seq_from(seed);
        prop_assert_eq!(ell(&seq, t) <= x, seq.sum_tail().eval(x) <= t);
    }

    #[test]
    fn max_star_is_the_right_inverse_of_the_max_tail(seed in any::<u64>(), t in 0.0..=1.0f64, x in 0.0..6.0f64) {
        let seq = seq_from(seed);
        prop_assert_eq!(max_star(&seq, t) <= x, seq.max_tail().eval(x) <= t);
    }

    #[test]
    fn ell_and_max_star_are_nonincreasing(seed in any::<u64>(), a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let seq = seq_from(seed);
        let (s, t) = (a.min(b), a.max(b));
        prop_assert!(ell(&seq, t) <= ell(&seq, s));
        prop_assert!(max_star(&seq, t) <= max_star(&seq, s));
        prop_assert!(max_star(&seq, t) <= ell(&seq, t));
    }

    #[test]
    fn log_exp_moment_is_convex(seed in any::<u64>(), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let d = random_component(&mut ChaCha8Rng::seed_from_u64(seed), 6);
        let mid = d.log_exp_moment(0.5 * (a + b));
        let chord = 0.5 * (d.log_exp_moment(a) + d.log_exp_moment(b));
        prop_assert!(mid <= chord + 1e-12 * (1.0 + chord.abs()));
    }

    #[test]
    fn truncation_splits_the_tail(seed in any::<u64>(), s in 0.0..5.0f64, x in 0.0..6.0f64) {
        let d = random_component(&mut ChaCha8Rng::seed_from_u64(seed), 6);
        let le = d.truncate(s, TruncSide::Le);
        let gt = d.truncate(s, TruncSide::Gt);
        prop_assert!((le.tail_at(x) + gt.tail_at(x) - d.tail_at(x)).abs() < 1e-12);
        prop_assert!(le.max_magnitude() <= s);
    }

    #[test]
    fn tail_estimate_is_homogeneous(seed in any::<u64>(), t in 0.001..0.9f64, c in 0.1..10.0f64) {
        let seq = seq_from(seed);
        let scaled = seq.scaled(c).unwrap();
        for mode in [TruncationMode::Ell, TruncationMode::Mstar] {
            let a = tail_estimate(&seq, t, mode).unwrap().lambda;
            let b = tail_estimate(&scaled, t, mode).unwrap().lambda;
            prop_assert!((b - c * a).abs() <= 1e-9 * (c * a).max(1e-300), "{} vs {}", b, c * a);
        }
    }

    #[test]
    fn spec_round_trip(seed in any::<u64>()) {
        let seq = seq_from(seed);
        let json = SpecFile::from_sequence(&seq).to_json();
        let back = SpecFile::from_json(&json).unwrap().to_sequence().unwrap();
        prop_assert_eq!(back, seq);
    }

    #[test]
    fn fit_of_identical_curves_is_one(seed in any::<u64>()) {
        let seq = seq_from(seed);
        let f = |t: f64| ell(&seq, t);
        let grid: Vec<f64> = (1..40).map(|i| i as f64 / 40.0).collect();
        prop_assert_eq!(fit_constants(f, f, &grid).unwrap().c, 1.0);
    }

    #[test]
    fn orlicz_norm_is_sandwiched(seed in any::<u64>(), t in 1e-6..0.25f64) {
        let d = random_component(&mut ChaCha8Rng::seed_from_u64(seed), 8);
        let norm = phi_norm(&d, t).unwrap();
        let sup = sup_formula(&d, t).unwrap();
        prop_assert!(sup <= norm * (1.0 + 1e-9) && norm <= 2.0 * sup * (1.0 + 1e-9));
    }

    #[test]
    fn kn_rhs_is_monotone(pu in 0.0..0.5f64, du in 0.0..0.4f64, pm in 0.0..0.5f64, dm in 0.0..0.5f64, k in 1u32..5) {
        let f = |p_u, p_m, k| kn_rhs(KnBoundInput { p_u, p_m, k }).unwrap();
        prop_assert!(f(pu, pm, k) <= f(pu + du, pm, k));
        prop_assert!(f(pu, pm, k) <= f(pu, pm + dm, k));
        prop_assert!(f(pu, pm, k + 1) <= f(pu, pm, k));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn discretized_tail_is_within_eps_mass((family, params) in family_case(), eps_mass in 0.002..0.05f64) {
        let spec = ContinuousFamilySpec::new(family, params.clone(), eps_mass, 0.1);
        let d = discretize(&spec).unwrap();
        let scale = d.max_magnitude();
        for i in 0..60 {
            let x = scale * i as f64 / 60.0;
            let err = (d.tail_at(x) - oracle_tail(family, &params, x)).abs();
            prop_assert!(err <= eps_mass + 1e-6, "{:?} {:?} x={} err={}", family, params, x, err);
        }
    }
}
