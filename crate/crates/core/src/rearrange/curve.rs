use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which generalized inverse of a nonincreasing function to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `sup { y : f(y) >= x }`
    Left,
    /// `sup { y : f(y) > x }`
    Right,
}

/// A nonincreasing, right-continuous step function on `[0, ∞)`.
///
/// `xs[0] == 0` and `xs` is strictly increasing; the curve equals `values[i]`
/// on `[xs[i], xs[i + 1])` and `values.last()` from the last breakpoint on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurveRepr", into = "CurveRepr")]
pub struct StepCurve {
    xs: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CurveRepr {
    breakpoints: Vec<(f64, f64)>,
}

impl TryFrom<CurveRepr> for StepCurve {
    type Error = Error;
    fn try_from(r: CurveRepr) -> Result<Self> {
        StepCurve::from_breakpoints(r.breakpoints)
    }
}

impl From<StepCurve> for CurveRepr {
    fn from(c: StepCurve) -> Self {
        CurveRepr {
            breakpoints: c.breakpoints().collect(),
        }
    }
}

impl StepCurve {
    /// Builds a curve from `(x, value)` pairs, validating the step invariants.
    pub fn from_breakpoints(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameters("step curve needs a breakpoint".into()));
        }
        if points[0].0 != 0.0 {
            return Err(Error::InvalidParameters("first breakpoint must be at 0".into()));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidParameters("breakpoints must increase".into()));
            }
            if w[1].1 > w[0].1 {
                return Err(Error::InvalidParameters("values must not increase".into()));
            }
        }
        if points.iter().any(|&(x, v)| !x.is_finite() || !(v >= 0.0)) {
            return Err(Error::InvalidParameters("non-finite breakpoint or negative value".into()));
        }
        let (xs, values) = points.into_iter().unzip();
        Ok(StepCurve { xs, values })
    }

    pub(crate) fn from_parts_unchecked(xs: Vec<f64>, values: Vec<f64>) -> Self {
        debug_assert_eq!(xs.len(), values.len());
        debug_assert!(xs.first() == Some(&0.0));
        debug_assert!(xs.windows(2).all(|w| w[1] > w[0]));
        debug_assert!(values.windows(2).all(|w| w[1] <= w[0]));
        StepCurve { xs, values }
    }

    /// The constant curve.
    pub fn constant(value: f64) -> Self {
        StepCurve::from_parts_unchecked(vec![0.0], vec![value])
    }

    /// Tail curve `y ↦ Pr(|X| > y)` of a law given by `(magnitude, mass)` pairs.
    ///
    /// Masses are accumulated from the largest magnitude downwards, so the
    /// curve is exactly zero beyond the top of the support.
    pub fn tail_from_masses<I>(masses: I) -> Self
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut pts: Vec<(f64, f64)> = masses.into_iter().filter(|&(_, p)| p > 0.0).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut mags: Vec<f64> = Vec::with_capacity(pts.len());
        let mut mass: Vec<f64> = Vec::with_capacity(pts.len());
        for (m, p) in pts {
            debug_assert!(m >= 0.0);
            if mags.last() == Some(&m) {
                *mass.last_mut().unwrap() += p;
            } else {
                mags.push(m);
                mass.push(p);
            }
        }
        // breakpoints: 0, then each positive magnitude
        let start = usize::from(mags.first() == Some(&0.0));
        let positive = &mags[start..];
        let pmass = &mass[start..];
        let k = positive.len();
        let mut values = vec![0.0; k + 1];
        for j in (0..k).rev() {
            values[j] = values[j + 1] + pmass[j];
        }
        let mut xs = Vec::with_capacity(k + 1);
        xs.push(0.0);
        xs.extend_from_slice(positive);
        StepCurve::from_parts_unchecked(xs, values)
    }

    /// Empirical tail `y ↦ #{i : x_i > y} / n` of nonnegative samples.
    pub fn empirical_tail(samples: &mut [f64]) -> Self {
        let n = samples.len();
        if n == 0 {
            return StepCurve::constant(0.0);
        }
        samples.sort_unstable_by(|a, b| a.total_cmp(b));
        let nf = n as f64;
        let mut xs = vec![0.0];
        let first_pos = samples.partition_point(|&v| v <= 0.0);
        let mut values = vec![(n - first_pos) as f64 / nf];
        let mut i = first_pos;
        while i < n {
            let v = samples[i];
            let mut j = i;
            while j < n && samples[j] == v {
                j += 1;
            }
            xs.push(v);
            values.push((n - j) as f64 / nf);
            i = j;
        }
        StepCurve::from_parts_unchecked(xs, values)
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.values.iter().copied())
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Value at `y`; negative arguments read the first segment.
    pub fn eval(&self, y: f64) -> f64 {
        let k = self.xs.partition_point(|&x| x <= y);
        self.values[k.saturating_sub(1)]
    }

    /// Limit from the left at `y` (equals `eval(0)` at `y <= 0`).
    pub fn left_limit(&self, y: f64) -> f64 {
        let k = self.xs.partition_point(|&x| x < y);
        self.values[k.saturating_sub(1)]
    }

    /// Generalized inverse; `sup ∅ = 0`, and `+∞` when the final segment qualifies.
    pub fn inverse(&self, x: f64, side: Side) -> f64 {
        let k = match side {
            Side::Right => self.values.partition_point(|&v| v > x),
            Side::Left => self.values.partition_point(|&v| v >= x),
        };
        if k == 0 {
            0.0
        } else if k == self.xs.len() {
            f64::INFINITY
        } else {
            self.xs[k]
        }
    }

    /// Right-continuous inverse, i.e. the decreasing rearrangement for a tail curve.
    pub fn quantile(&self, t: f64) -> f64 {
        self.inverse(t, Side::Right)
    }

    /// `(∫₀¹ f⁻¹(t+)^p dt)^{1/p}`: the `L_p` norm of the rearrangement seen as a
    /// random variable on `[0, 1]`. Values above one are clipped to the unit
    /// interval, which is how ℓ is restricted to `[0, 1]`.
    pub fn rearrangement_lp_norm(&self, p: f64) -> f64 {
        assert!(p > 0.0, "p must be positive");
        if *self.values.last().unwrap() > 0.0 {
            return f64::INFINITY;
        }
        let cells: Vec<(f64, f64)> = (1..self.xs.len())
            .map(|j| {
                let w = self.values[j - 1].min(1.0) - self.values[j].min(1.0);
                (self.xs[j], w)
            })
            .filter(|&(_, w)| w > 0.0)
            .collect();
        let top = cells.iter().map(|c| c.0).fold(0.0, f64::max);
        if top == 0.0 {
            return 0.0;
        }
        let sum: f64 = cells.iter().map(|&(x, w)| w * (x / top).powf(p)).sum();
        top * sum.powf(1.0 / p)
    }

    /// Union of the breakpoints of several curves, sorted and deduplicated.
    pub fn merged_breakpoints<'a, I>(curves: I) -> Vec<f64>
    where
        I: IntoIterator<Item = &'a StepCurve>,
    {
        let mut xs: Vec<f64> = curves.into_iter().flat_map(|c| c.xs.iter().copied()).collect();
        xs.sort_by(|a, b| a.total_cmp(b));
        xs.dedup();
        xs
    }

    /// Builds a curve on a given breakpoint set from per-breakpoint values.
    /// Consecutive equal values are collapsed and the result is forced to be
    /// nonincreasing.
    pub(crate) fn from_sampled(xs: &[f64], mut value_at: impl FnMut(f64) -> f64) -> Self {
        let mut out_x = Vec::with_capacity(xs.len());
        let mut out_v: Vec<f64> = Vec::with_capacity(xs.len());
        for &x in xs {
            let v = value_at(x);
            if let Some(&last) = out_v.last() {
                // rounding may nudge a value up by an ulp
                if v >= last {
                    continue;
                }
            }
            out_x.push(x);
            out_v.push(v);
        }
        StepCurve::from_parts_unchecked(out_x, out_v)
    }

    /// `sup_y |f(y) - g(y)|`; both curves are constant between merged breakpoints.
    pub fn sup_distance(&self, other: &StepCurve) -> f64 {
        StepCurve::merged_breakpoints([self, other])
            .into_iter()
            .map(|x| (self.eval(x) - other.eval(x)).abs())
            .fold(0.0, f64::max)
    }

    /// Returns the curve `y ↦ f(y / c)` for `c > 0`.
    pub fn scaled(&self, c: f64) -> StepCurve {
        assert!(c > 0.0);
        StepCurve::from_parts_unchecked(self.xs.iter().map(|x| x * c).collect(), self.values.clone())
    }
}
