//! Verification suites: exact checks of the inequalities that hold with
//! explicit constants, and constant fits for those that are existential.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::enumerate::{enumerate_exact, exact_max_partial_tail, exact_sum_tail, for_each_outcome, path_stats};
use super::enumerate::{ExactJoint, MassAccumulator};
use super::fit::{fit_constants, fit_upper, geometric_grid, FitResult};
use super::montecarlo::{simulate, McConfig, McSummary, DEFAULT_CHUNK, DEFAULT_DELTA};
use crate::bounds::{kn_rhs, large_part_lp_bound, vk_argument, vk_tail_bound, KnBoundInput};
use crate::distmodel::TruncSide;
use crate::error::{Error, Result};
use crate::momentest::{growth_factor, mc_resolution, u_lp_estimate_from_tail, QuantileSource};
use crate::rearrange::{check_ell_max_chain, ell, max_star, IndependentSequence, StepCurve};
use crate::tailest::{tail_value, TruncationMode};

/// Probability slack of the exact checks.
pub const EXACT_SLACK: f64 = 1e-12;
/// Default Monte Carlo sample count of the TAIL and LP suites.
pub const DEFAULT_MC_SAMPLES: usize = 1_000_000;
/// Default Monte Carlo sample count of the other suites.
pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_LP_ORDERS: [f64; 5] = [1.0, 2.0, 4.0, 8.0, 12.0];
pub const DISJOINT_R: [f64; 3] = [0.1, 0.5, 0.9];
pub const DISJOINT_P: [f64; 3] = [1.0, 2.0, 4.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SuiteId {
    Ellmax,
    Kn,
    LevyOtt,
    LevyL3,
    Tail,
    Lp,
    Disjoint,
}

impl SuiteId {
    pub const ALL: [SuiteId; 7] = [
        SuiteId::Ellmax,
        SuiteId::Kn,
        SuiteId::LevyOtt,
        SuiteId::LevyL3,
        SuiteId::Tail,
        SuiteId::Lp,
        SuiteId::Disjoint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteId::Ellmax => "ELLMAX",
            SuiteId::Kn => "KN",
            SuiteId::LevyOtt => "LEVY_OTT",
            SuiteId::LevyL3 => "LEVY_L3",
            SuiteId::Tail => "TAIL",
            SuiteId::Lp => "LP",
            SuiteId::Disjoint => "DISJOINT",
        }
    }

    /// Whether the suite walks the full outcome space.
    pub fn needs_enumeration(self) -> bool {
        matches!(self, SuiteId::Kn | SuiteId::LevyOtt | SuiteId::LevyL3 | SuiteId::Disjoint)
    }

    pub fn default_samples(self) -> usize {
        match self {
            SuiteId::Tail | SuiteId::Lp => DEFAULT_MC_SAMPLES,
            _ => DEFAULT_SAMPLES,
        }
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SuiteId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        SuiteId::ALL
            .into_iter()
            .find(|id| id.name() == key)
            .ok_or_else(|| Error::Parse(format!("unknown suite '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    /// Monte Carlo sample count; `None` picks the suite default.
    pub samples: Option<usize>,
    pub seed: u64,
    pub delta: f64,
    pub chunk: usize,
    /// Grid of levels `t`; `None` picks the suite default.
    pub t_grid: Option<Vec<f64>>,
    pub lp_orders: Vec<f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            samples: None,
            seed: 0,
            delta: DEFAULT_DELTA,
            chunk: DEFAULT_CHUNK,
            t_grid: None,
            lp_orders: DEFAULT_LP_ORDERS.to_vec(),
        }
    }
}

impl VerifyConfig {
    pub fn mc_config(&self, suite: SuiteId) -> McConfig {
        McConfig {
            n: self.samples.unwrap_or(suite.default_samples()),
            seed: self.seed,
            chunk: self.chunk,
            delta: self.delta,
        }
    }

    fn grid(&self) -> Vec<f64> {
        self.t_grid.clone().unwrap_or_else(default_grid)
    }
}

/// Geometric grid of 40 levels from `1e-4` to `0.5`.
pub fn default_grid() -> Vec<f64> {
    geometric_grid(1e-4, 0.5, 40)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Smallest margin of an exact check, or the fitted constant; `None` when unbounded.
    pub value: Option<f64>,
    pub passed: bool,
    /// Reported only; never fails the suite.
    pub informational: bool,
    pub points: usize,
    pub violations: usize,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    fn info(name: impl Into<String>, value: Option<f64>, detail: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            value,
            passed: value.is_some(),
            informational: true,
            points: 0,
            violations: 0,
            detail: detail.into(),
        }
    }

    fn fit(name: impl Into<String>, fit: Result<FitResult>, informational: bool) -> Result<Check> {
        let name = name.into();
        match fit {
            Ok(f) => Ok(Check {
                name,
                value: Some(f.c),
                passed: true,
                informational,
                points: f.grid.len(),
                violations: 0,
                detail: format!("witness t = {}", f.witness_t),
            }),
            Err(Error::NoFit(cmax)) => Ok(Check {
                name,
                value: None,
                passed: false,
                informational,
                points: 0,
                violations: 0,
                detail: format!("no constant up to {cmax}"),
            }),
            Err(e) => Err(e),
        }
    }
}

/// Running tally of an exact inequality `lhs <= rhs + slack`.
struct Tally {
    name: String,
    points: usize,
    violations: usize,
    margin: f64,
}

impl Tally {
    fn new(name: impl Into<String>) -> Self {
        Tally { name: name.into(), points: 0, violations: 0, margin: f64::INFINITY }
    }

    fn record(&mut self, lhs: f64, rhs: f64, slack: f64) {
        self.points += 1;
        if !(lhs <= rhs + slack) {
            self.violations += 1;
        }
        let m = rhs - lhs;
        if !m.is_nan() {
            self.margin = self.margin.min(m);
        }
    }

    fn finish(self) -> Check {
        Check {
            name: self.name,
            value: self.margin.is_finite().then_some(self.margin),
            passed: self.violations == 0,
            informational: false,
            points: self.points,
            violations: self.violations,
            detail: String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: SuiteId,
    /// Monte Carlo settings, for the suites that sample.
    pub mc: Option<McConfig>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl VerificationReport {
    fn new(suite: SuiteId, mc: Option<McConfig>, checks: Vec<Check>) -> Self {
        let passed = checks.iter().all(|c| c.informational || c.passed);
        VerificationReport { suite, mc, checks, passed }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Runs one suite on one sequence.
pub fn verify_suite(seq: &IndependentSequence, suite: SuiteId, config: &VerifyConfig) -> Result<VerificationReport> {
    match suite {
        SuiteId::Ellmax => Ok(ellmax(seq, config)),
        SuiteId::Kn => kn(seq, config),
        SuiteId::LevyOtt => levy_ott(seq),
        SuiteId::LevyL3 => levy_l3(seq, config),
        SuiteId::Disjoint => disjoint(seq),
        SuiteId::Tail => tail(seq, config),
        SuiteId::Lp => lp(seq, config),
    }
}

fn ellmax(seq: &IndependentSequence, config: &VerifyConfig) -> VerificationReport {
    let grid: Vec<f64> = config.t_grid.clone().unwrap_or_else(|| geometric_grid(1e-4, 0.99, 40));
    let grid: Vec<f64> = grid.into_iter().filter(|&t| t > 0.0 && t < 1.0).collect();
    let mut tally = Tally::new("ell(2t) <= ell(t/(1-t)) <= M*(t) <= ell(t)");
    for row in check_ell_max_chain(seq, &grid) {
        let gap = (row.ell_ratio - row.ell_2t)
            .min(row.max_star - row.ell_ratio)
            .min(row.ell_t - row.max_star);
        tally.points += 1;
        if !row.ok {
            tally.violations += 1;
        }
        tally.margin = tally.margin.min(gap);
    }
    VerificationReport::new(SuiteId::Ellmax, None, vec![tally.finish()])
}

fn quantile(tail: &StepCurve, t: f64) -> f64 {
    if t >= 1.0 {
        0.0
    } else {
        tail.quantile(t.max(0.0))
    }
}

fn kn(seq: &IndependentSequence, config: &VerifyConfig) -> Result<VerificationReport> {
    let exact = enumerate_exact(seq)?;
    let mut checks = Vec::new();
    for k in 1..=3u32 {
        let factor = (3 * k - 1) as f64;
        let mut points: Vec<f64> = vec![0.0];
        points.extend_from_slice(exact.u_tail.xs());
        points.extend_from_slice(exact.m_tail.xs());
        points.extend(exact.u_tail.xs().iter().map(|x| x / factor));
        let mut tally = Tally::new(format!("Pr(U > {}t) <= KN(K={k})", 3 * k - 1));
        for &t in &points {
            let lhs = exact.u_tail.eval(factor * t);
            let rhs = kn_rhs(KnBoundInput {
                p_u: exact.u_tail.eval(t).clamp(0.0, 1.0),
                p_m: exact.m_tail.eval(t).clamp(0.0, 1.0),
                k,
            })?;
            tally.record(lhs, rhs, EXACT_SLACK);
        }
        checks.push(tally.finish());
    }
    checks.push(Check::info(
        "least c1 of the decreasing-rate bound",
        Some(required_kn_c1(&exact, &config.grid())),
        "smallest constant making the bound hold on the grid pairs t <= s <= 1/2",
    ));
    Ok(VerificationReport::new(SuiteId::Kn, None, checks))
}

/// Least `c1` with `U*(t) <= c1 ln(1/t)/max{ln(1/s), ln ln(4/t)} (U*(s) + M*(t/2))`
/// over grid pairs `t <= s <= 1/2`.
pub fn required_kn_c1(exact: &ExactJoint, grid: &[f64]) -> f64 {
    let grid: Vec<f64> = grid.iter().copied().filter(|&t| t > 0.0 && t <= 0.5).collect();
    let mut c1: f64 = 0.0;
    for &t in &grid {
        let lhs = quantile(&exact.u_tail, t);
        if lhs == 0.0 {
            continue;
        }
        let m_half = quantile(&exact.m_tail, t / 2.0);
        for &s in grid.iter().filter(|&&s| s >= t) {
            let denom = (1.0 / s).ln().max((4.0 / t).ln().ln());
            let rhs_unit = (1.0 / t).ln() / denom * (quantile(&exact.u_tail, s) + m_half);
            c1 = c1.max(lhs / rhs_unit);
        }
    }
    c1
}

fn levy_ott(seq: &IndependentSequence) -> Result<VerificationReport> {
    let exact = enumerate_exact(seq)?;
    let sup_partial = |t: f64| exact.partial_tails.iter().map(|c| c.eval(t)).fold(0.0, f64::max);
    let mut points: Vec<f64> = vec![0.0];
    points.extend(exact.u_tail.xs().iter().map(|x| x / 3.0));
    for c in &exact.partial_tails {
        points.extend_from_slice(c.xs());
    }
    let mut tally = Tally::new("Pr(U > 3t) <= 3 sup_k Pr(|S_k| > t)");
    for &t in &points {
        tally.record(exact.u_tail.eval(3.0 * t), 3.0 * sup_partial(t), EXACT_SLACK);
    }
    let mut checks = vec![tally.finish()];
    if let Some(levy) = seq.levy_constants() {
        let mut tally = Tally::new(format!("Pr(U > {}t) <= {} Pr(|S| > t)", 3.0 * levy.c1, 3.0 * levy.c2));
        let mut points: Vec<f64> = vec![0.0];
        points.extend(exact.u_tail.xs().iter().map(|x| x / (3.0 * levy.c1)));
        points.extend_from_slice(exact.s_tail.xs());
        for &t in &points {
            tally.record(exact.u_tail.eval(3.0 * levy.c1 * t), 3.0 * levy.c2 * exact.s_tail.eval(t), EXACT_SLACK);
        }
        checks.push(tally.finish());
    }
    Ok(VerificationReport::new(SuiteId::LevyOtt, None, checks))
}

/// Exact tails of `|S|` for the sequence truncated at various levels.
struct TruncatedTails<'a> {
    seq: &'a IndependentSequence,
    cache: std::cell::RefCell<HashMap<u64, StepCurve>>,
}

impl<'a> TruncatedTails<'a> {
    fn new(seq: &'a IndependentSequence) -> Self {
        TruncatedTails { seq, cache: Default::default() }
    }

    fn get(&self, level: f64) -> Result<StepCurve> {
        if let Some(c) = self.cache.borrow().get(&level.to_bits()) {
            return Ok(c.clone());
        }
        let c = exact_sum_tail(&self.seq.truncate(level, TruncSide::Le))?;
        self.cache.borrow_mut().insert(level.to_bits(), c.clone());
        Ok(c)
    }

    /// `(S^{(≤M*(s))})*(t)`
    fn quantile(&self, s: f64, t: f64) -> f64 {
        let tail = self.get(max_star(self.seq, s)).expect("enumerability checked up front");
        quantile(&tail, t)
    }
}

fn levy_l3(seq: &IndependentSequence, config: &VerifyConfig) -> Result<VerificationReport> {
    let s_tail = exact_sum_tail(seq)?;
    let trunc = TruncatedTails::new(seq);
    let mut grid: Vec<f64> = config.grid();
    grid.extend(s_tail.values().iter().copied().filter(|&v| v > 0.0 && v < 1.0));
    grid.retain(|&t| t > 0.0 && t < 1.0);
    let mut checks = Vec::new();
    for (div, label) in [(2.0, "t/2"), (4.0, "t/4")] {
        let mut upper = Tally::new(format!("S*(t) <= (S^(<=M*(s)))*(t-s), s = {label}"));
        let mut lower = Tally::new(format!("(S^(<=M*(s)))*(t) <= S*(t-s), s = {label}"));
        for &t in &grid {
            let s = t / div;
            let t_tail = trunc.get(max_star(seq, s))?;
            // `X*(t) <= y` iff `Pr(|X| > y) <= t`.
            upper.record(s_tail.eval(quantile(&t_tail, t - s)), t, EXACT_SLACK);
            lower.record(t_tail.eval(quantile(&s_tail, t - s)), t, EXACT_SLACK);
        }
        checks.push(upper.finish());
        checks.push(lower.finish());
    }

    let fit_grid = geometric_grid(1e-3, 0.5, 20);
    let s_star = |t: f64| quantile(&s_tail, t);
    for s in [0.5, 0.25, 0.1] {
        checks.push(Check::fit(
            format!("part 1: (S^(<=M*({s})))* <= c S*(./c)"),
            fit_upper(s_star, |t| trunc.quantile(s, t), &fit_grid),
            true,
        )?);
    }
    for (r, s) in [(0.1, 0.5), (0.01, 0.25)] {
        checks.push(Check::fit(
            format!("part 2: (S^(<=M*({s})))* <= c (S^(<=M*({r})))*(./c)"),
            fit_upper(|t| trunc.quantile(r, t), |t| trunc.quantile(s, t), &fit_grid),
            true,
        )?);
    }
    checks.push(Check::fit(
        "part 4: (S^(<=M*(t)))*(t) ~ (S^(<=M*(t/2)))*(2t)",
        fit_constants(|t| trunc.quantile(t, t), |t| trunc.quantile(t / 2.0, 2.0 * t), &fit_grid),
        true,
    )?);
    checks.push(Check::fit(
        "part 5: S*(t) ~ (S^(<=M*(t)))*(t)",
        fit_constants(s_star, |t| trunc.quantile(t, t), &fit_grid),
        true,
    )?);
    Ok(VerificationReport::new(SuiteId::LevyL3, None, checks))
}

/// Exact tails of `V_k`, the maximal function of the large parts on the event
/// that exactly `k` of them are nonzero, and of the large-part maximal function.
pub fn exact_large_part_tails(seq: &IndependentSequence, r: f64) -> Result<(Vec<StepCurve>, StepCurve)> {
    let large = seq.truncate(ell(seq, r), TruncSide::Gt);
    let mut vk = vec![MassAccumulator::default(); seq.len() + 1];
    let mut u = MassAccumulator::default();
    for_each_outcome(&large, |values, p| {
        let (_, um, _) = path_stats(values, |_, _| {});
        let k = values.iter().filter(|&&x| x != 0.0).count();
        vk[k].add(um, p);
        u.add(um, p);
    })?;
    Ok((vk.iter().map(|a| a.tail()).collect(), u.tail()))
}

fn disjoint(seq: &IndependentSequence) -> Result<VerificationReport> {
    let mut checks = Vec::new();
    let sum_values: Vec<f64> = seq.sum_tail().values().iter().copied().filter(|&v| v <= 1.0).collect();
    for r in DISJOINT_R {
        let (vk, u_large) = exact_large_part_tails(seq, r)?;
        let mut tally = Tally::new(format!("V_k*(t) <= k ell(t(k-1)!/r^(k-1)), r = {r}"));
        for (k, tail) in vk.iter().enumerate().skip(1) {
            let k = k as u32;
            let scale = vk_argument(r, k, 1.0);
            let mut points: Vec<f64> = vec![0.0, 1.0 / scale];
            points.extend(tail.values().iter().copied().filter(|&v| v > 0.0 && v < 1.0));
            points.extend(sum_values.iter().map(|v| v / scale));
            let right: Vec<f64> = points.iter().map(|t| t * (1.0 + 1e-9)).collect();
            points.extend(right);
            for &t in &points {
                let rhs = vk_tail_bound(seq, r, k, t)?;
                tally.record(tail.eval(rhs), t, EXACT_SLACK);
            }
        }
        checks.push(tally.finish());
        let mut tally = Tally::new(format!("||U^(>ell(r))||_p <= 2 e^(2^p r/p) ||ell||_p, r = {r}"));
        for p in DISJOINT_P {
            let lhs = u_large.rearrangement_lp_norm(p);
            let rhs = large_part_lp_bound(seq, r, p)?;
            tally.record(lhs, rhs, EXACT_SLACK * rhs.max(1.0));
        }
        checks.push(tally.finish());
    }
    Ok(VerificationReport::new(SuiteId::Disjoint, None, checks))
}

/// Grid levels an MC tail resolves: at least ten DKW radii.
pub fn mc_grid(grid: &[f64], summary: &McSummary) -> Vec<f64> {
    let lo = 10.0 * summary.dkw_radius;
    grid.iter().copied().filter(|&t| t >= lo && t <= 0.5).collect()
}

fn tail(seq: &IndependentSequence, config: &VerifyConfig) -> Result<VerificationReport> {
    let mc = config.mc_config(SuiteId::Tail);
    let summary = simulate(seq, &mc)?;
    let grid = mc_grid(&config.grid(), &summary);
    if grid.is_empty() {
        return Err(Error::InvalidParameters("no grid level above the Monte Carlo resolution".into()));
    }
    let informational = seq.levy_constants().is_none();
    let s_star = |t: f64| quantile(&summary.s_tail, t);
    let mut checks = Vec::new();
    let mut curves = Vec::new();
    for (mode, label) in [(TruncationMode::Ell, "F1"), (TruncationMode::Mstar, "F2")] {
        let values = grid.iter().map(|&t| tail_value(seq, t, mode)).collect::<Result<Vec<f64>>>()?;
        let g = |t: f64| values[grid.iter().position(|&x| x == t).expect("grid point")];
        checks.push(Check::fit(format!("S*_MC ~ {label}"), fit_constants(s_star, g, &grid), informational)?);
        curves.push(values);
    }
    let ratio = curves[0]
        .iter()
        .zip(&curves[1])
        .filter(|(a, b)| **a > 0.0 || **b > 0.0)
        .map(|(a, b)| (a / b).max(b / a))
        .fold(1.0, f64::max);
    checks.push(Check::info("max pointwise ratio F1/F2", ratio.is_finite().then_some(ratio), ""));
    Ok(VerificationReport::new(SuiteId::Tail, Some(mc), checks))
}

fn lp(seq: &IndependentSequence, config: &VerifyConfig) -> Result<VerificationReport> {
    let mc = config.mc_config(SuiteId::Lp);
    let summary = simulate(seq, &mc)?;
    let resolution = mc_resolution(mc.n);
    let mut checks = Vec::new();
    let mut norms = Vec::new();
    for &p in &config.lp_orders {
        let name = format!("||U||_p / estimate, p = {p}");
        match u_lp_estimate_from_tail(seq, p, &summary.u_tail, QuantileSource::Mc, resolution) {
            Ok(est) => {
                let u_p = summary.u_tail.rearrangement_lp_norm(p);
                let ratio = if est.estimate > 0.0 { u_p / est.estimate } else if u_p == 0.0 { 1.0 } else { f64::INFINITY };
                let ok = ratio.is_finite() && ratio > 0.0;
                checks.push(Check {
                    name,
                    value: ok.then_some(ratio),
                    passed: ok,
                    informational: false,
                    points: 1,
                    violations: usize::from(!ok),
                    detail: format!("||U||_p = {u_p}, estimate = {}", est.estimate),
                });
                norms.push((p, u_p));
            }
            Err(Error::QuantileUnavailable { level, resolution }) => checks.push(Check::info(
                name,
                None,
                format!("skipped: level {level} below resolution {resolution}"),
            )),
            Err(e) => return Err(e),
        }
    }
    let mut growth: f64 = 0.0;
    for &(p, u_p) in &norms {
        for &(q, u_q) in &norms {
            if q >= p && [1.0, 2.0, 4.0].contains(&(q / p)) {
                let m_q = summary.m_tail.rearrangement_lp_norm(q);
                let denom = growth_factor(q, p) * (u_p + m_q);
                if denom > 0.0 {
                    growth = growth.max(u_q / denom);
                }
            }
        }
    }
    checks.push(Check::info("least constant of the moment growth bound", Some(growth), "second form, q/p in {1, 2, 4}"));
    Ok(VerificationReport::new(SuiteId::Lp, Some(mc), checks))
}

/// Exact `‖U‖_p` from enumeration.
pub fn exact_u_lp_norm(seq: &IndependentSequence, p: f64) -> Result<f64> {
    Ok(exact_max_partial_tail(seq)?.rearrangement_lp_norm(p))
}
