use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::enumerate::path_stats;
use crate::error::{Error, Result};
use crate::rearrange::{IndependentSequence, StepCurve};

pub const DEFAULT_CHUNK: usize = 8192;
pub const DEFAULT_DELTA: f64 = 1e-3;

/// `sqrt(ln(2/δ) / (2n))`
pub fn dkw_radius(n: usize, delta: f64) -> f64 {
    ((2.0 / delta).ln() / (2.0 * n as f64)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub n: usize,
    pub seed: u64,
    pub chunk: usize,
    pub delta: f64,
}

impl McConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        McConfig {
            n,
            seed,
            chunk: DEFAULT_CHUNK,
            delta: DEFAULT_DELTA,
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }
}

/// Empirical tails of `|S|`, `U` and `M` from `n` independent replicas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    pub n: usize,
    pub seed: u64,
    pub chunk: usize,
    pub delta: f64,
    pub dkw_radius: f64,
    pub s_tail: StepCurve,
    pub u_tail: StepCurve,
    pub m_tail: StepCurve,
}

/// Substream for one chunk: ChaCha keyed by `seed`, stream id = chunk index.
fn chunk_rng(seed: u64, chunk_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk_index as u64);
    rng
}

/// Draws `cfg.n` replicas of the sequence.
///
/// Chunk `i` always reads stream `i` of the seed, so the output depends only
/// on `(seq, n, seed, chunk)` and never on how many workers run the chunks.
pub fn simulate(seq: &IndependentSequence, cfg: &McConfig) -> Result<McSummary> {
    if cfg.n < 1000 {
        return Err(Error::DomainError(format!("need at least 1000 samples, got {}", cfg.n)));
    }
    if !(cfg.delta > 0.0 && cfg.delta <= 0.1) {
        return Err(Error::DomainError(format!("δ must lie in (0, 0.1], got {}", cfg.delta)));
    }
    if cfg.chunk == 0 {
        return Err(Error::DomainError("chunk size must be positive".into()));
    }
    let chunks = cfg.n.div_ceil(cfg.chunk);
    let comps = seq.components();
    let parts: Vec<[Vec<f64>; 3]> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let len = cfg.chunk.min(cfg.n - c * cfg.chunk);
            let mut rng = chunk_rng(cfg.seed, c);
            let mut values = vec![0.0; comps.len()];
            let mut out = [Vec::with_capacity(len), Vec::with_capacity(len), Vec::with_capacity(len)];
            for _ in 0..len {
                for (v, d) in values.iter_mut().zip(comps) {
                    *v = d.sample(&mut rng);
                }
                let (s, u, m) = path_stats(&values, |_, _| {});
                debug_assert!(u >= s && m <= 2.0 * u * (1.0 + 1e-12) + 1e-300);
                out[0].push(s);
                out[1].push(u);
                out[2].push(m);
            }
            out
        })
        .collect();
    let gather = |i: usize| {
        let mut v = Vec::with_capacity(cfg.n);
        for p in &parts {
            v.extend_from_slice(&p[i]);
        }
        StepCurve::empirical_tail(&mut v)
    };
    Ok(McSummary {
        n: cfg.n,
        seed: cfg.seed,
        chunk: cfg.chunk,
        delta: cfg.delta,
        dkw_radius: dkw_radius(cfg.n, cfg.delta),
        s_tail: gather(0),
        u_tail: gather(1),
        m_tail: gather(2),
    })
}

/// Runs `f` on a pool of `threads` workers (the global pool when `None`).
pub fn with_threads<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}

/// Worker cap from the `TAILSUM_THREADS` environment variable.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("TAILSUM_THREADS").ok()?.trim().parse().ok()
}
