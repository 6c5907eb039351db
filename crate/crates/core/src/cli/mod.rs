//! Command-line front end: spec files in, JSON reports out.

mod spec;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

pub use spec::{parse_spec, read_spec, SpecFile, VariableSpec};

use crate::bounds::{kn_rhs, large_part_lp_bound, vk_tail_bound, KnBoundInput};
use crate::error::{Error, Result};
use crate::mcengine::{
    enumerate_exact, geometric_grid, verify_suite, ExactJoint, McConfig, SuiteId, VerificationReport, VerifyConfig,
    DEFAULT_CHUNK, DEFAULT_DELTA,
};
use crate::momentest::{u_lp_estimate, MomentEstimate, QuantileSource, DEFAULT_P0};
use crate::rearrange::IndependentSequence;
use crate::tailest::{tail_estimate, TailEstimate, TruncationMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "tailsum", version, about = "Tail and moment estimates for sums of independent random variables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Ell,
    Mstar,
}

impl From<ModeArg> for TruncationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Ell => TruncationMode::Ell,
            ModeArg::Mstar => TruncationMode::Mstar,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SourceArg {
    Mc,
    Enum,
    F2proxy,
}

impl From<SourceArg> for QuantileSource {
    fn from(s: SourceArg) -> Self {
        match s {
            SourceArg::Mc => QuantileSource::Mc,
            SourceArg::Enum => QuantileSource::Enum,
            SourceArg::F2proxy => QuantileSource::F2proxy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// `Pr(U > (3K-1)t)` against its bound, from exact enumeration.
    Kn,
    /// Bound on `V_k*(t)`.
    Vk,
    /// Bound on the `L_p` norm of the large-part maximal function.
    LargeLp,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tail quantile estimates F1 (mode ell) or F2 (mode mstar).
    EstimateTail {
        #[arg(long)]
        spec: PathBuf,
        /// Comma-separated levels.
        #[arg(long, value_delimiter = ',', num_args = 1.., conflicts_with = "t_grid", required_unless_present = "t_grid")]
        t: Vec<f64>,
        /// Geometric grid `LO:HI:N`.
        #[arg(long)]
        t_grid: Option<String>,
        #[arg(long, value_enum, default_value = "ell")]
        mode: ModeArg,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Curve table with columns `t,value`.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// `L_p` norm estimates of the maximal function.
    EstimateMoment {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        p: Vec<f64>,
        #[arg(long, value_enum, default_value = "mc")]
        source: SourceArg,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_P0)]
        p0: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form upper bounds.
    Bound {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum)]
        kind: BoundKind,
        /// Levels (kn, vk).
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        t: Vec<f64>,
        /// K for kn, k for vk.
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// r for vk and large-lp.
        #[arg(long, default_value_t = 0.5)]
        r: f64,
        /// Orders for large-lp.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        p: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs verification suites; exits 1 if any check fails.
    Verify {
        #[arg(long)]
        spec: PathBuf,
        /// Comma-separated suite names, or `all`.
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        suite: Vec<String>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact laws of |S|, U, M and the partial sums.
    Enumerate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-runs the configuration embedded in a report; exits 1 if the result differs.
    Replay {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Fully resolved parameters of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Invocation {
    EstimateTail {
        t: Vec<f64>,
        mode: TruncationMode,
    },
    EstimateMoment {
        p: Vec<f64>,
        source: QuantileSource,
        mc: McConfig,
        p0: f64,
    },
    Bound {
        kind: BoundKind,
        t: Vec<f64>,
        k: u32,
        r: f64,
        p: Vec<f64>,
    },
    Verify {
        suites: Vec<SuiteId>,
        config: VerifyConfig,
    },
    Enumerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    /// `t` for kn and vk, `p` for large-lp.
    pub x: f64,
    /// `None` encodes `+∞`.
    pub bound: Option<f64>,
    /// Exact left-hand side when available.
    pub exact: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Results {
    Tail(Vec<TailEstimate>),
    Moment(Vec<MomentEstimate>),
    Bound(Vec<BoundRow>),
    Verify(Vec<VerificationReport>),
    Enumerate(ExactJoint),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub invocation: Invocation,
    pub spec: SpecFile,
    pub results: Results,
    pub passed: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Report> {
        Ok(serde_json::from_str(text)?)
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Parses `LO:HI:N` into a geometric grid.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::Parse(format!("grid must be LO:HI:N with 0 < LO <= HI and N >= 1, got '{s}'"));
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else { return Err(bad()) };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if !(lo > 0.0 && lo <= hi && hi.is_finite() && n >= 1) {
        return Err(bad());
    }
    Ok(if n == 1 { vec![lo] } else { geometric_grid(lo, hi, n) })
}

fn parse_suites(names: &[String]) -> Result<Vec<SuiteId>> {
    if names.iter().any(|n| n.eq_ignore_ascii_case("all")) {
        return Ok(SuiteId::ALL.to_vec());
    }
    names.iter().map(|n| n.parse()).collect()
}

/// Executes an invocation on a sequence.
pub fn execute(seq: &IndependentSequence, invocation: &Invocation) -> Result<(Results, bool)> {
    match invocation {
        Invocation::EstimateTail { t, mode } => {
            let rows = t.iter().map(|&t| tail_estimate(seq, t, *mode)).collect::<Result<Vec<_>>>()?;
            Ok((Results::Tail(rows), true))
        }
        Invocation::EstimateMoment { p, source, mc, p0 } => {
            let rows = p
                .iter()
                .map(|&p| u_lp_estimate(seq, p, *source, Some(mc), *p0))
                .collect::<Result<Vec<_>>>()?;
            Ok((Results::Moment(rows), true))
        }
        Invocation::Bound { kind, t, k, r, p } => Ok((Results::Bound(bound_rows(seq, *kind, t, *k, *r, p)?), true)),
        Invocation::Verify { suites, config } => {
            let reports = suites.iter().map(|&s| verify_suite(seq, s, config)).collect::<Result<Vec<_>>>()?;
            let passed = reports.iter().all(|r| r.passed);
            Ok((Results::Verify(reports), passed))
        }
        Invocation::Enumerate => Ok((Results::Enumerate(enumerate_exact(seq)?), true)),
    }
}

fn bound_rows(seq: &IndependentSequence, kind: BoundKind, t: &[f64], k: u32, r: f64, p: &[f64]) -> Result<Vec<BoundRow>> {
    let need = |v: &[f64], what: &str| {
        if v.is_empty() {
            Err(Error::InvalidParameters(format!("bound kind needs --{what}")))
        } else {
            Ok(())
        }
    };
    match kind {
        BoundKind::Kn => {
            need(t, "t")?;
            let exact = enumerate_exact(seq)?;
            t.iter()
                .map(|&t| {
                    let rhs = kn_rhs(KnBoundInput {
                        p_u: exact.u_tail.eval(t).clamp(0.0, 1.0),
                        p_m: exact.m_tail.eval(t).clamp(0.0, 1.0),
                        k,
                    })?;
                    Ok(BoundRow { x: t, bound: finite(rhs), exact: Some(exact.u_tail.eval((3 * k - 1) as f64 * t)) })
                })
                .collect()
        }
        BoundKind::Vk => {
            need(t, "t")?;
            t.iter()
                .map(|&t| Ok(BoundRow { x: t, bound: finite(vk_tail_bound(seq, r, k, t)?), exact: None }))
                .collect()
        }
        BoundKind::LargeLp => {
            need(p, "p")?;
            p.iter()
                .map(|&p| Ok(BoundRow { x: p, bound: finite(large_part_lp_bound(seq, r, p)?), exact: None }))
                .collect()
        }
    }
}

/// Runs an invocation and wraps the result with its provenance.
pub fn make_report(spec: SpecFile, invocation: Invocation) -> Result<Report> {
    let seq = spec.to_sequence()?;
    let (results, passed) = execute(&seq, &invocation)?;
    Ok(Report {
        tool: "tailsum".into(),
        version: crate::VERSION.into(),
        invocation,
        spec,
        results,
        passed,
    })
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{text}")?;
            Ok(())
        }
    }
}

/// Curve table with columns `t,value`.
pub fn curve_csv(rows: impl IntoIterator<Item = (f64, f64)>) -> String {
    let mut s = String::from("t,value\n");
    for (t, v) in rows {
        s.push_str(&format!("{t},{v}\n"));
    }
    s
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match dispatch(cli.command) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(command: Command) -> Result<bool> {
    let (spec, invocation, out, csv) = match command {
        Command::EstimateTail { spec, t, t_grid, mode, out, csv } => {
            let t = match t_grid {
                Some(g) => parse_grid(&g)?,
                None => t,
            };
            (read_spec(spec)?, Invocation::EstimateTail { t, mode: mode.into() }, out, csv)
        }
        Command::EstimateMoment { spec, p, source, samples, seed, p0, out } => {
            let mc = McConfig { n: samples, seed, chunk: DEFAULT_CHUNK, delta: DEFAULT_DELTA };
            (read_spec(spec)?, Invocation::EstimateMoment { p, source: source.into(), mc, p0 }, out, None)
        }
        Command::Bound { spec, kind, t, k, r, p, out } => {
            (read_spec(spec)?, Invocation::Bound { kind, t, k, r, p }, out, None)
        }
        Command::Verify { spec, suite, samples, seed, delta, out } => {
            let config = VerifyConfig { samples, seed, delta, ..VerifyConfig::default() };
            (read_spec(spec)?, Invocation::Verify { suites: parse_suites(&suite)?, config }, out, None)
        }
        Command::Enumerate { spec, out } => (read_spec(spec)?, Invocation::Enumerate, Some(out), None),
        Command::Replay { report, out } => {
            let text = std::fs::read_to_string(&report)
                .map_err(|e| Error::Io(format!("{}: {e}", report.display())))?;
            let old = Report::from_json(&text)?;
            let new = make_report(old.spec.clone(), old.invocation.clone())?;
            let json = new.to_json();
            write_text(out.as_deref(), &json)?;
            let same = json == old.to_json();
            if !same {
                eprintln!("replay differs from {}", report.display());
            }
            return Ok(same);
        }
    };
    let report = make_report(spec, invocation)?;
    if let Some(path) = csv {
        if let Results::Tail(rows) = &report.results {
            write_text(Some(&path), &curve_csv(rows.iter().map(|r| (r.t, r.lambda))))?;
        }
    }
    write_text(out.as_deref(), &report.to_json())?;
    Ok(report.passed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = parse_grid("0.001:0.5:5").unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g[0], 0.001);
        assert!((g[4] - 0.5).abs() < 1e-15);
        assert!(parse_grid("1:0.5:3").is_err());
        assert!(parse_grid("a:b").is_err());
    }

    #[test]
    fn suite_list() {
        assert_eq!(parse_suites(&["all".into()]).unwrap().len(), 7);
        assert_eq!(parse_suites(&["ellmax".into(), "kn".into()]).unwrap(), vec![SuiteId::Ellmax, SuiteId::Kn]);
        assert!(parse_suites(&["x".into()]).is_err());
    }

    #[test]
    fn report_round_trip() {
        let spec = SpecFile::from_json(r#"{"variables":[{"type":"atomic","atoms":[[1,0.5],[-1,0.5]]}]}"#).unwrap();
        let inv = Invocation::EstimateTail { t: vec![0.1, 1.5], mode: TruncationMode::Ell };
        let report = make_report(spec, inv).unwrap();
        let Results::Tail(rows) = &report.results else { panic!() };
        assert!((rows[0].lambda - 0.769_266_176).abs() < 1e-9);
        assert_eq!(rows[1].lambda, 0.0);
        let back = Report::from_json(&report.to_json()).unwrap();
        assert_eq!(back, report);
    }
}
