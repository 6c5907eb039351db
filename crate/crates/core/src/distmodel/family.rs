use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};
use statrs::function::gamma::{gamma, gamma_ur};

use super::{make_atomic, ComponentDistribution};
use crate::error::{Error, Result};

const MAX_CELLS: usize = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// params: `[mean, sd]`
    Gaussian,
    /// params: `[rate]`
    Exponential,
    /// params: `[scale, shape]`, shape > 1
    Pareto,
    /// params: `[lo, hi]`
    Uniform,
    /// params: `[shape, scale]`
    Weibull,
}

/// A continuous family plus the tolerances of its discretization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousFamilySpec {
    pub family: Family,
    pub params: Vec<f64>,
    #[serde(default = "default_eps_mass")]
    pub eps_mass: f64,
    #[serde(default = "default_eps_value")]
    pub eps_value: f64,
}

fn default_eps_mass() -> f64 {
    1e-3
}

fn default_eps_value() -> f64 {
    0.05
}

impl ContinuousFamilySpec {
    pub fn new(family: Family, params: Vec<f64>, eps_mass: f64, eps_value: f64) -> Self {
        ContinuousFamilySpec {
            family,
            params,
            eps_mass,
            eps_value,
        }
    }

    fn law(&self) -> Result<Law> {
        let bad = |msg: &str| Err(Error::InvalidParameters(format!("{:?}: {msg}", self.family)));
        if !(self.eps_mass > 0.0 && self.eps_mass <= 0.5) {
            return bad("eps_mass must lie in (0, 0.5]");
        }
        if !(self.eps_value > 0.0) {
            return bad("eps_value must be positive");
        }
        if self.params.iter().any(|p| !p.is_finite()) {
            return bad("parameters must be finite");
        }
        let p = &self.params;
        let want = |n: usize| p.len() == n;
        match self.family {
            Family::Gaussian if want(2) && p[1] > 0.0 => Ok(Law::Gaussian {
                mean: p[0],
                sd: p[1],
                normal: Normal::new(0.0, 1.0).expect("standard normal"),
            }),
            Family::Exponential if want(1) && p[0] > 0.0 => Ok(Law::Exponential { rate: p[0] }),
            Family::Pareto if want(2) && p[0] > 0.0 && p[1] > 1.0 => Ok(Law::Pareto {
                scale: p[0],
                shape: p[1],
            }),
            Family::Uniform if want(2) && p[0] <= p[1] => Ok(Law::Uniform { lo: p[0], hi: p[1] }),
            Family::Weibull if want(2) && p[0] > 0.0 && p[1] > 0.0 => Ok(Law::Weibull {
                shape: p[0],
                scale: p[1],
            }),
            _ => bad("wrong parameter count or out-of-range parameter"),
        }
    }
}

#[derive(Debug, Clone)]
enum Law {
    Gaussian { mean: f64, sd: f64, normal: Normal },
    /// `|N(0, sd²)|`
    HalfGaussian { sd: f64, normal: Normal },
    Exponential { rate: f64 },
    Pareto { scale: f64, shape: f64 },
    Uniform { lo: f64, hi: f64 },
    Weibull { shape: f64, scale: f64 },
}

impl Law {
    fn support(&self) -> (f64, f64) {
        match *self {
            Law::Gaussian { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Law::HalfGaussian { .. } | Law::Exponential { .. } | Law::Weibull { .. } => (0.0, f64::INFINITY),
            Law::Pareto { scale, .. } => (scale, f64::INFINITY),
            Law::Uniform { lo, hi } => (lo, hi),
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        match self {
            Law::Gaussian { mean, sd, normal } => normal.cdf((x - mean) / sd),
            Law::HalfGaussian { sd, normal } => 2.0 * normal.cdf(x / sd) - 1.0,
            Law::Exponential { rate } => -(-rate * x).exp_m1(),
            Law::Pareto { scale, shape } => 1.0 - (scale / x).powf(*shape),
            Law::Uniform { lo, hi } => (x - lo) / (hi - lo),
            Law::Weibull { shape, scale } => -(-(x / scale).powf(*shape)).exp_m1(),
        }
    }

    fn quantile(&self, u: f64) -> f64 {
        match self {
            Law::Gaussian { mean, sd, normal } => mean + sd * normal.inverse_cdf(u),
            Law::HalfGaussian { sd, normal } => sd * normal.inverse_cdf(0.5 + 0.5 * u),
            Law::Exponential { rate } => -(-u).ln_1p() / rate,
            Law::Pareto { scale, shape } => scale * (1.0 - u).powf(-1.0 / shape),
            Law::Uniform { lo, hi } => lo + u * (hi - lo),
            Law::Weibull { shape, scale } => scale * (-(-u).ln_1p()).powf(1.0 / shape),
        }
    }

    /// `E[X; a < X <= b]`
    fn partial_mean(&self, a: f64, b: f64) -> f64 {
        match self {
            Law::Gaussian { mean, sd, normal } => {
                let (za, zb) = ((a - mean) / sd, (b - mean) / sd);
                let mass = normal.cdf(zb) - normal.cdf(za);
                mean * mass + sd * (normal.pdf(za) - normal.pdf(zb))
            }
            Law::HalfGaussian { sd, normal } => 2.0 * sd * (normal.pdf(a / sd) - normal.pdf(b / sd)),
            Law::Exponential { rate } => {
                let f = |x: f64| if x.is_infinite() { 0.0 } else { (x + 1.0 / rate) * (-rate * x).exp() };
                f(a) - f(b)
            }
            Law::Pareto { scale, shape } => {
                let f = |x: f64| if x.is_infinite() { 0.0 } else { x.powf(1.0 - shape) };
                shape * scale.powf(*shape) / (shape - 1.0) * (f(a) - f(b))
            }
            Law::Uniform { lo, hi } => (b * b - a * a) / (2.0 * (hi - lo)),
            Law::Weibull { shape, scale } => {
                let s = 1.0 + 1.0 / shape;
                // upper regularized incomplete gamma of `(x/scale)^shape`
                let q = |x: f64| {
                    let z = (x / scale).powf(*shape);
                    if z <= 0.0 {
                        1.0
                    } else if z.is_infinite() {
                        0.0
                    } else {
                        gamma_ur(s, z)
                    }
                };
                scale * gamma(s) * (q(a) - q(b))
            }
        }
    }
}

/// Cells `[a, b]` covering the support: two extreme cells of mass `cap`
/// and interior cells of mass at most `cap` and width at most `width`.
fn cells(law: &Law, cap: f64, width: f64) -> Result<Vec<(f64, f64)>> {
    let (lo, hi) = law.support();
    let inner_lo = law.quantile(cap);
    let inner_hi = law.quantile(1.0 - cap);
    let mut out = vec![(lo, inner_lo)];
    let inner_mass = 1.0 - 2.0 * cap;
    if inner_mass > 0.0 {
        let k = (inner_mass / cap - 1e-9).ceil().max(1.0) as usize;
        let step = inner_mass / k as f64;
        let mut a = inner_lo;
        for i in 1..=k {
            let b = if i == k { inner_hi } else { law.quantile(cap + step * i as f64) };
            let pieces = ((b - a) / width).ceil().max(1.0);
            if out.len() as f64 + pieces > MAX_CELLS as f64 {
                return Err(Error::InvalidParameters("discretization needs too many cells".into()));
            }
            let pieces = pieces as usize;
            for j in 0..pieces {
                let x0 = a + (b - a) * j as f64 / pieces as f64;
                let x1 = if j + 1 == pieces { b } else { a + (b - a) * (j + 1) as f64 / pieces as f64 };
                out.push((x0, x1));
            }
            a = b;
        }
    }
    out.push((inner_hi, hi));
    Ok(out)
}

fn cell_atoms(law: &Law, cells: &[(f64, f64)]) -> Vec<(f64, f64)> {
    cells
        .iter()
        .filter_map(|&(a, b)| {
            let mass = law.cdf(b) - law.cdf(a);
            if !(mass > 0.0) {
                return None;
            }
            let mut mean = law.partial_mean(a, b) / mass;
            if !mean.is_finite() {
                mean = if a.is_finite() && b.is_finite() { 0.5 * (a + b) } else if a.is_finite() { a } else { b };
            }
            Some((mean.clamp(a, b), mass))
        })
        .collect()
}

fn normalized(mut atoms: Vec<(f64, f64)>) -> Result<ComponentDistribution> {
    let total: f64 = atoms.iter().map(|a| a.1).sum();
    for a in &mut atoms {
        a.1 /= total;
    }
    make_atomic(atoms)
}

/// Discretizes a continuous family onto a quantile grid.
///
/// The tail `Pr(|X| > x)` of the result is within `eps_mass` of the exact
/// tail at every `x`. Laws symmetric about zero are discretized through
/// `|X|` and mirrored; laws whose support straddles zero otherwise use
/// cells of half the mass budget.
pub fn discretize(spec: &ContinuousFamilySpec) -> Result<ComponentDistribution> {
    let law = spec.law()?;
    let (lo, hi) = law.support();
    if lo == hi {
        return ComponentDistribution::point(lo);
    }
    let symmetric_half = match law {
        Law::Gaussian { mean: 0.0, sd, normal } => Some(Law::HalfGaussian { sd, normal }),
        Law::Uniform { lo, hi } if lo == -hi => Some(Law::Uniform { lo: 0.0, hi }),
        _ => None,
    };
    if let Some(half) = symmetric_half {
        let atoms = cell_atoms(&half, &cells(&half, spec.eps_mass, spec.eps_value)?);
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        let mirrored = atoms
            .iter()
            .flat_map(|&(v, p)| {
                let p = 0.5 * p / total;
                if v == 0.0 {
                    vec![(0.0, 2.0 * p)]
                } else {
                    vec![(v, p), (-v, p)]
                }
            })
            .collect::<Vec<_>>();
        return make_atomic(mirrored);
    }
    let cap = if lo < 0.0 && hi > 0.0 { 0.5 * spec.eps_mass } else { spec.eps_mass };
    normalized(cell_atoms(&law, &cells(&law, cap, spec.eps_value)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_uniform_is_a_point_mass() {
        let d = discretize(&ContinuousFamilySpec::new(Family::Uniform, vec![2.0, 2.0], 0.01, 0.1)).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.atoms()[0].value, 2.0);
        assert_eq!(d.atoms()[0].prob, 1.0);
    }

    #[test]
    fn uniform_quarter_cells() {
        let d = discretize(&ContinuousFamilySpec::new(Family::Uniform, vec![0.0, 1.0], 0.25, 1.0)).unwrap();
        let got: Vec<(f64, f64)> = d.atoms().iter().map(|a| (a.value, a.prob)).collect();
        let want = [(0.125, 0.25), (0.375, 0.25), (0.625, 0.25), (0.875, 0.25)];
        assert_eq!(got.len(), 4);
        for (g, w) in got.iter().zip(want) {
            assert!((g.0 - w.0).abs() < 1e-12 && (g.1 - w.1).abs() < 1e-12, "{g:?} vs {w:?}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let bad = [
            ContinuousFamilySpec::new(Family::Gaussian, vec![0.0, -1.0], 0.01, 0.1),
            ContinuousFamilySpec::new(Family::Pareto, vec![1.0, 1.0], 0.01, 0.1),
            ContinuousFamilySpec::new(Family::Exponential, vec![1.0, 2.0], 0.01, 0.1),
            ContinuousFamilySpec::new(Family::Uniform, vec![1.0, 0.0], 0.01, 0.1),
            ContinuousFamilySpec::new(Family::Weibull, vec![1.0, 1.0], 0.0, 0.1),
            ContinuousFamilySpec::new(Family::Weibull, vec![1.0, 1.0], 0.01, 0.0),
        ];
        for spec in bad {
            assert!(matches!(discretize(&spec), Err(Error::InvalidParameters(_))), "{spec:?}");
        }
    }

    #[test]
    fn symmetric_families_discretize_symmetrically() {
        let g = discretize(&ContinuousFamilySpec::new(Family::Gaussian, vec![0.0, 2.0], 1e-3, 0.05)).unwrap();
        assert!(g.is_symmetric());
        let u = discretize(&ContinuousFamilySpec::new(Family::Uniform, vec![-1.0, 1.0], 1e-2, 0.05)).unwrap();
        assert!(u.is_symmetric());
    }

    #[test]
    fn extreme_cells_use_conditional_means() {
        // exponential(1): upper cell beyond q(1 - eps) has conditional mean q + 1
        let eps = 0.01;
        let d = discretize(&ContinuousFamilySpec::new(Family::Exponential, vec![1.0], eps, 10.0)).unwrap();
        let top = d.atoms().last().unwrap();
        let q = -eps.ln();
        assert!((top.value - (q + 1.0)).abs() < 1e-9);
        assert!((top.prob - eps).abs() < 1e-12);
    }
}
