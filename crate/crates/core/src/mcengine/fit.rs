use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest constant tried by the fits.
pub const FIT_C_MAX: f64 = 1e4;
/// Ratio of the geometric grid of candidate constants.
pub const FIT_RATIO: f64 = 1.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub c: f64,
    /// Grid point that needs the largest constant.
    pub witness_t: f64,
    pub grid: Vec<f64>,
}

fn candidates() -> Vec<f64> {
    let mut out = vec![1.0];
    loop {
        let next = out.last().unwrap() * FIT_RATIO;
        if next > FIT_C_MAX {
            return out;
        }
        out.push(next);
    }
}

/// Least grid constant satisfying a condition that is monotone in `c`.
fn least(cands: &[f64], ok: impl Fn(f64) -> bool) -> Option<usize> {
    let j = cands.partition_point(|&c| !ok(c));
    (j < cands.len()).then_some(j)
}

fn fit_with(grid: &[f64], ok_at: impl Fn(usize, f64) -> bool) -> Result<FitResult> {
    let cands = candidates();
    let mut best = (0usize, grid.first().copied().unwrap_or(0.0));
    for (i, &t) in grid.iter().enumerate() {
        match least(&cands, |c| ok_at(i, c)) {
            Some(j) if j > best.0 => best = (j, t),
            Some(_) => {}
            None => return Err(Error::NoFit(FIT_C_MAX)),
        }
    }
    Ok(FitResult {
        c: cands[best.0],
        witness_t: best.1,
        grid: grid.to_vec(),
    })
}

/// Least `c` on the grid `1.05^k <= 10^4` with
/// `f(min(c t, 1)) / c <= g(t) <= c f(t / c)` at every grid point.
///
/// This is the one-constant form of `f ≈_t g`. Both sides are monotone in
/// `c` for nonincreasing `f`, so each grid point is resolved by binary search.
pub fn fit_constants(f: impl Fn(f64) -> f64, g: impl Fn(f64) -> f64, grid: &[f64]) -> Result<FitResult> {
    let gs: Vec<f64> = grid.iter().map(|&t| g(t)).collect();
    fit_with(grid, |i, c| {
        let t = grid[i];
        f((c * t).min(1.0)) / c <= gs[i] && gs[i] <= c * f(t / c)
    })
}

/// Least `c` with `g(t) <= c f(t / c)` on the grid.
pub fn fit_upper(f: impl Fn(f64) -> f64, g: impl Fn(f64) -> f64, grid: &[f64]) -> Result<FitResult> {
    let gs: Vec<f64> = grid.iter().map(|&t| g(t)).collect();
    fit_with(grid, |i, c| gs[i] <= c * f(grid[i] / c))
}

/// `n` points from `lo` to `hi`, geometrically spaced.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && n >= 1);
    if n == 1 {
        return vec![lo];
    }
    let r = (hi / lo).ln() / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo * (r * i as f64).exp() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_curves_need_no_constant() {
        let f = |t: f64| if t >= 1.0 { 0.0 } else { -t.ln() };
        let grid = geometric_grid(1e-4, 0.5, 40);
        let fit = fit_constants(f, f, &grid).unwrap();
        assert_eq!(fit.c, 1.0);
    }

    #[test]
    fn constant_curves() {
        let grid = geometric_grid(1e-3, 0.5, 10);
        let fit = fit_constants(|_| 1.0, |_| 2.0, &grid).unwrap();
        assert!(fit.c >= 2.0 && fit.c < 2.0 * FIT_RATIO, "{}", fit.c);
        // at c / 1.05 the condition fails
        assert!(2.0 > (fit.c / FIT_RATIO) * 1.0);
    }

    #[test]
    fn no_fit_when_not_equivalent() {
        let grid = geometric_grid(1e-3, 0.5, 10);
        assert!(matches!(fit_constants(|_| 1.0, |_| 1e5, &grid), Err(Error::NoFit(_))));
        assert!(matches!(fit_constants(|_| 0.0, |_| 1.0, &grid), Err(Error::NoFit(_))));
    }

    #[test]
    fn witness_is_the_hardest_point() {
        let grid = [0.1, 0.2, 0.3];
        let fit = fit_upper(|_| 1.0, |t| if t == 0.2 { 3.0 } else { 1.5 }, &grid).unwrap();
        assert_eq!(fit.witness_t, 0.2);
        assert!(fit.c >= 3.0);
    }

    #[test]
    fn grid_endpoints() {
        let g = geometric_grid(1e-4, 0.5, 40);
        assert_eq!(g.len(), 40);
        assert_eq!(g[0], 1e-4);
        assert_eq!(g[39], 0.5);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
