//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Pass criterion numbers as arguments to run a subset, e.g.
//! `cargo test --test acceptance -- 7 11`.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tailsum::mcengine::battery::{enumerable_corpus, random_component, random_corpus, tail_battery};
use tailsum::mcengine::{
    enumerate_exact, geometric_grid, simulate, verify_suite, with_threads, McConfig, SuiteId, VerifyConfig,
};
use tailsum::orlicz::{phi_norm, sup_formula};
use tailsum::rearrange::IndependentSequence;
use tailsum::tailest::{log_g, tail_estimate, TruncationMode};
use tailsum::ComponentDistribution;

struct Outcome {
    pass: bool,
    summary: String,
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn outcome(pass: bool, summary: String) -> Outcome {
    Outcome { pass, summary }
}

/// Runs one exact suite over a corpus; returns (checks, violations, failing sequences).
fn exact_suite(corpus: &[IndependentSequence], suite: SuiteId, config: &VerifyConfig) -> (usize, usize, usize) {
    let (mut points, mut violations, mut failing) = (0, 0, 0);
    for seq in corpus {
        let report = verify_suite(seq, suite, config).expect("suite runs");
        for c in report.checks.iter().filter(|c| !c.informational) {
            points += c.points;
            violations += c.violations;
        }
        failing += usize::from(!report.passed);
    }
    (points, violations, failing)
}

fn c1_ell_max_chain() -> Outcome {
    let start = Instant::now();
    let corpus = random_corpus(1000, 20, 5, 1);
    let config = VerifyConfig { t_grid: Some(geometric_grid(1e-4, 0.99, 40)), ..Default::default() };
    let (points, violations, _) = exact_suite(&corpus, SuiteId::Ellmax, &config);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        violations == 0 && points == 40_000 && secs < 60.0,
        format!("{points} rows, {violations} violations, {secs:.1}s"),
    )
}

fn enumerable() -> Vec<IndependentSequence> {
    enumerable_corpus(50, 2)
}

fn c2_klass_nowicki() -> Outcome {
    let corpus = enumerable();
    let config = VerifyConfig::default();
    let (points, violations, _) = exact_suite(&corpus, SuiteId::Kn, &config);
    let c1 = corpus
        .iter()
        .map(|s| {
            let r = verify_suite(s, SuiteId::Kn, &config).unwrap();
            r.checks.iter().find(|c| c.informational).and_then(|c| c.value).unwrap_or(0.0)
        })
        .fold(0.0, f64::max);
    outcome(
        violations == 0,
        format!("{points} levels over K = 1..3, {violations} violations; empirical c1 = {c1:.3}"),
    )
}

fn c3_levy_ottaviani() -> Outcome {
    let (points, violations, _) = exact_suite(&enumerable(), SuiteId::LevyOtt, &VerifyConfig::default());
    outcome(violations == 0, format!("{points} levels, {violations} violations"))
}

fn c4_truncation_lemma() -> Outcome {
    let (points, violations, _) = exact_suite(&enumerable(), SuiteId::LevyL3, &VerifyConfig::default());
    outcome(violations == 0, format!("{points} (t, s) pairs, {violations} violations"))
}

fn c5_disjoint() -> Outcome {
    let (points, violations, _) = exact_suite(&enumerable(), SuiteId::Disjoint, &VerifyConfig::default());
    outcome(violations == 0, format!("{points} checks over r in {{0.1, 0.5, 0.9}}, {violations} violations"))
}

fn c6_orlicz() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (lo, hi) = (1.0 / (2.0 * 1.01), 2.0 * 1.01);
    let (mut min_r, mut max_r, mut count, mut bad, mut zero) = (f64::INFINITY, 0.0f64, 0, 0, 0);
    for _ in 0..200 {
        let d = random_component(&mut rng, 8);
        for t in [0.25, 0.1, 0.01, 1e-4] {
            let norm = phi_norm(&d, t).unwrap();
            let sup = sup_formula(&d, t).unwrap();
            if sup == 0.0 {
                zero += 1;
                bad += usize::from(norm != 0.0);
                continue;
            }
            let r = norm / sup;
            min_r = min_r.min(r);
            max_r = max_r.max(r);
            count += 1;
            bad += usize::from(!(lo..=hi).contains(&r));
        }
    }
    outcome(
        bad == 0,
        format!("{count} ratios in [{min_r:.4}, {max_r:.4}] (band [{lo:.4}, {hi:.4}]), {zero} zero variables, {bad} outside"),
    )
}

fn c7_closed_forms() -> Outcome {
    let mut worst: f64 = 0.0;
    let one = IndependentSequence::iid(ComponentDistribution::rademacher(), 1).unwrap();
    for t in [0.5, 0.1, 0.01, 1e-4] {
        let closed = (1.0f64 / t).ln() / (1.0 / t).acosh();
        let got = tail_estimate(&one, t, TruncationMode::Ell).unwrap().lambda;
        worst = worst.max((got - closed).abs() / closed);
    }
    for n in [10, 100] {
        let seq = IndependentSequence::iid(ComponentDistribution::rademacher(), n).unwrap();
        for t in [0.5, 0.1, 0.01, 1e-4] {
            let closed = (1.0f64 / t).ln() / t.powf(-1.0 / n as f64).acosh();
            let got = tail_estimate(&seq, t, TruncationMode::Ell).unwrap().lambda;
            worst = worst.max((got - closed).abs() / closed);
        }
    }
    outcome(worst <= 1e-6, format!("max relative error {worst:.2e}"))
}

fn c8_tail_constants() -> Outcome {
    let config = VerifyConfig {
        samples: Some(1_000_000),
        seed: 8,
        t_grid: Some(geometric_grid(1e-3, 0.5, 40)),
        ..Default::default()
    };
    let mut worst: f64 = 0.0;
    let mut all_finite = true;
    let mut lines = Vec::new();
    let battery = tail_battery();
    for e in &battery {
        let r = verify_suite(&e.seq, SuiteId::Tail, &config).expect("TAIL suite runs");
        let c = |name: &str| r.check(name).and_then(|c| c.value);
        let (f1, f2) = (c("S*_MC ~ F1"), c("S*_MC ~ F2"));
        all_finite &= f1.is_some() && f2.is_some();
        worst = worst.max(f1.unwrap_or(f64::INFINITY)).max(f2.unwrap_or(f64::INFINITY));
        lines.push(format!("{}: F1 {:.3}, F2 {:.3}", e.name, f1.unwrap_or(f64::INFINITY), f2.unwrap_or(f64::INFINITY)));
    }
    for l in &lines {
        println!("    {l}");
    }
    outcome(
        all_finite && worst <= 50.0 && battery.len() >= 12,
        format!("{} sequences, battery-wide c = {worst:.3} (budget 50)", battery.len()),
    )
}

/// Sample count making `e^{-12}/4` resolvable under the `10/n` rule.
const LP_SAMPLES: usize = 7_000_000;

fn c9_lp_uniformity() -> Outcome {
    let orders = [1.0, 2.0, 4.0, 8.0, 12.0];
    let config = VerifyConfig { samples: Some(LP_SAMPLES), seed: 9, lp_orders: orders.to_vec(), ..Default::default() };
    let mut c_by_p = [0.0f64; 5];
    let mut missing = 0;
    for e in &tail_battery() {
        let r = verify_suite(&e.seq, SuiteId::Lp, &config).expect("LP suite runs");
        let mut ratios = Vec::new();
        for (i, p) in orders.iter().enumerate() {
            match r.check(&format!("||U||_p / estimate, p = {p}")).and_then(|c| c.value) {
                Some(ratio) => {
                    c_by_p[i] = c_by_p[i].max(ratio.max(1.0 / ratio));
                    ratios.push(format!("{ratio:.3}"));
                }
                None => {
                    missing += 1;
                    ratios.push("-".into());
                }
            }
        }
        println!("    {}: ratios {}", e.name, ratios.join(" "));
    }
    let c = c_by_p.iter().copied().fold(0.0, f64::max);
    let growth = c_by_p[4] / c_by_p[0];
    let per_p: Vec<String> = c_by_p.iter().map(|c| format!("{c:.3}")).collect();
    outcome(
        missing == 0 && c <= 10.0 && growth < 1.5,
        format!("n = {LP_SAMPLES}, c by p = [{}], c = {c:.3} (budget 10), c(12)/c(1) = {growth:.3}", per_p.join(", ")),
    )
}

fn c10_oracle_agreement() -> Outcome {
    let corpus = enumerable_corpus(20, 10);
    let mut worst_failures = 0;
    for seq in &corpus {
        let exact = enumerate_exact(seq).unwrap();
        let mut failures = 0;
        for seed in 0..100u64 {
            let mc = simulate(seq, &McConfig::new(100_000, seed)).unwrap();
            let d = mc
                .s_tail
                .sup_distance(&exact.s_tail)
                .max(mc.u_tail.sup_distance(&exact.u_tail))
                .max(mc.m_tail.sup_distance(&exact.m_tail));
            failures += usize::from(d > mc.dkw_radius);
        }
        worst_failures = worst_failures.max(failures);
    }
    let probe = &corpus[0];
    let cfg = McConfig { chunk: 1000, ..McConfig::new(20_000, 3) };
    let runs: Vec<_> = [1, 4, 8]
        .into_iter()
        .map(|k| with_threads(Some(k), || simulate(probe, &cfg).unwrap()))
        .collect();
    let deterministic = runs.windows(2).all(|w| w[0] == w[1]);
    outcome(
        worst_failures <= 1 && deterministic,
        format!(
            "worst sequence: {} of 100 seeds outside the DKW band; workers 1/4/8 identical: {deterministic}",
            worst_failures
        ),
    )
}

fn c11_bisection_certificate() -> Outcome {
    let (mut monotone_bad, mut cert_bad, mut cases) = (0, 0, 0);
    for e in &tail_battery() {
        for t in [0.1, 0.01] {
            for mode in [TruncationMode::Ell, TruncationMode::Mstar] {
                let est = tail_estimate(&e.seq, t, mode).unwrap();
                let level = est.truncation_level;
                let scale = if est.lambda > 0.0 { est.lambda } else { 1.0 };
                let lambdas = geometric_grid(scale / 100.0, scale * 100.0, 100);
                let values: Vec<f64> = lambdas.iter().map(|&l| log_g(&e.seq, t, level, l).unwrap()).collect();
                monotone_bad += values.windows(2).filter(|w| w[1] > w[0]).count();
                if est.lambda > 0.0 {
                    let budget = (1.0 / t).ln();
                    let above = log_g(&e.seq, t, level, est.lambda * (1.0 + 1e-9)).unwrap();
                    let below = log_g(&e.seq, t, level, est.lambda * (1.0 - 1e-9)).unwrap();
                    cert_bad += usize::from(!(above <= budget && below > budget));
                }
                cases += 1;
            }
        }
    }
    outcome(
        monotone_bad == 0 && cert_bad == 0,
        format!("{cases} (sequence, t, mode) cases: {monotone_bad} monotonicity breaks, {cert_bad} certificate failures"),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        (1, "ell / M* chain", c1_ell_max_chain),
        (2, "Klass-Nowicki", c2_klass_nowicki),
        (3, "Levy-Ottaviani", c3_levy_ottaviani),
        (4, "truncation lemma, exact part", c4_truncation_lemma),
        (5, "disjoint decomposition bounds", c5_disjoint),
        (6, "Orlicz norm equivalence", c6_orlicz),
        (7, "closed-form tail estimates", c7_closed_forms),
        (8, "tail estimate constants", c8_tail_constants),
        (9, "L_p estimate uniformity", c9_lp_uniformity),
        (10, "oracle agreement and determinism", c10_oracle_agreement),
        (11, "bisection certificate", c11_bisection_certificate),
    ];
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, run) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("{status} criterion {id:>2} ({name}): {} [{:.1}s]", o.summary, start.elapsed().as_secs_f64());
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
