//! Proximal operators for the separable penalties used by the solver.
//!
//! A [`ScalarPenalty`] describes a function of one real variable; wrapping it
//! in [`Separable`] applies it coordinate-wise and yields a [`ProxOracle`].

use crate::error::{Error, Result};
use crate::model::ProxOracle;

/// A one-dimensional penalty with an exact proximal map.
pub trait ScalarPenalty: Send + Sync {
    fn value(&self, t: f64) -> f64;
    /// `argmin_t value(t) + (t − v)² / (2 step)`.
    fn prox(&self, v: f64, step: f64) -> f64;
}

/// `Σ_j φ(z_j)` over a block of fixed width.
#[derive(Debug, Clone)]
pub struct Separable<P> {
    penalty: P,
    dim: usize,
}

impl<P: ScalarPenalty> Separable<P> {
    pub fn new(penalty: P, dim: usize) -> Self {
        Separable { penalty, dim }
    }

    pub fn penalty(&self) -> &P {
        &self.penalty
    }
}

impl<P: ScalarPenalty> ProxOracle for Separable<P> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, point: &[f64]) -> f64 {
        self.accumulate_value(point, 0.0)
    }

    fn accumulate_value(&self, point: &[f64], acc: f64) -> f64 {
        let mut s = acc;
        for &t in point {
            let v = self.penalty.value(t);
            if v == f64::INFINITY {
                return f64::INFINITY;
            }
            s += v;
        }
        s
    }

    fn prox(&self, point: &[f64], step: f64, out: &mut [f64]) {
        for (o, &v) in out.iter_mut().zip(point) {
            *o = self.penalty.prox(v, step);
        }
    }
}

/// The zero penalty; its prox is the identity.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroPenalty;

impl ScalarPenalty for ZeroPenalty {
    fn value(&self, _t: f64) -> f64 {
        0.0
    }
    fn prox(&self, v: f64, _step: f64) -> f64 {
        v
    }
}

/// `weight · |t|`.
#[derive(Debug, Clone, Copy)]
pub struct AbsPenalty {
    weight: f64,
}

impl AbsPenalty {
    pub fn new(weight: f64) -> Result<Self> {
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "l1 weight must be positive, got {weight}"
            )));
        }
        Ok(AbsPenalty { weight })
    }
}

impl ScalarPenalty for AbsPenalty {
    fn value(&self, t: f64) -> f64 {
        self.weight * t.abs()
    }
    fn prox(&self, v: f64, step: f64) -> f64 {
        soft_threshold_scalar(v, self.weight * step)
    }
}

/// `λ·F(t)` with the clipped quadratic
/// `F(t) = |t| − η t²` for `|t| ≤ 1/(2η)`, and `1/(4η)` beyond.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClippedQuadPenalty {
    lambda: f64,
    eta: f64,
}

impl ClippedQuadPenalty {
    pub fn new(lambda: f64, eta: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() || !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "clipped quadratic needs lambda > 0 and eta > 0, got lambda={lambda}, eta={eta}"
            )));
        }
        Ok(ClippedQuadPenalty { lambda, eta })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// The unweighted `F(t)`.
    pub fn shape(&self, t: f64) -> f64 {
        clipped_quad_shape(t, self.eta)
    }
}

fn clipped_quad_shape(t: f64, eta: f64) -> f64 {
    let a = t.abs();
    if a <= 0.5 / eta {
        a - eta * t * t
    } else {
        0.25 / eta
    }
}

impl ScalarPenalty for ClippedQuadPenalty {
    fn value(&self, t: f64) -> f64 {
        self.lambda * clipped_quad_shape(t, self.eta)
    }
    fn prox(&self, v: f64, step: f64) -> f64 {
        clipped_quad_prox_scalar(v, self.lambda * step, self.eta)
    }
}

/// Global minimizer of `c·F(t) + ½(t − v)²`.
///
/// The objective is piecewise quadratic on `(−∞, −τ], [−τ, 0], [0, τ], [τ, ∞)`
/// with `τ = 1/(2η)`, so the minimizer is one of: the breakpoints `0, ±τ`,
/// `v` itself on the flat outer pieces, or the stationary point of an inner
/// piece when that piece is convex (`1 − 2cη > 0`). Ties go to the smaller
/// `|t|`, then to the nonnegative candidate, which keeps the map odd in `v`.
fn clipped_quad_prox_scalar(v: f64, c: f64, eta: f64) -> f64 {
    let tau = 0.5 / eta;
    let objective = |t: f64| c * clipped_quad_shape(t, eta) + 0.5 * (t - v) * (t - v);

    let mut best: f64 = 0.0;
    let mut best_obj = objective(0.0);
    let mut consider = |t: f64| {
        let o = objective(t);
        let better = o < best_obj
            || (o == best_obj
                && (t.abs() < best.abs() || (t.abs() == best.abs() && t >= 0.0 && best < 0.0)));
        if better {
            best = t;
            best_obj = o;
        }
    };

    consider(tau);
    consider(-tau);
    if v.abs() >= tau {
        consider(v);
    }
    let denom = 1.0 - 2.0 * c * eta;
    if denom > 0.0 {
        let pos = (v - c) / denom;
        if pos > 0.0 && pos < tau {
            consider(pos);
        }
        let neg = (v + c) / denom;
        if neg < 0.0 && neg > -tau {
            consider(neg);
        }
    }
    best
}

/// Indicator of `Mᴺ` for a finite set `M ⊂ R`: 0 on the set, `+∞` elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSetIndicator {
    elements: Vec<f64>,
}

impl FiniteSetIndicator {
    /// Sorts and deduplicates; the set must be nonempty and finite.
    pub fn new(mut elements: Vec<f64>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidParameter("finite set must be nonempty".into()));
        }
        if elements.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFinite("finite set element"));
        }
        elements.sort_by(f64::total_cmp);
        elements.dedup();
        Ok(FiniteSetIndicator { elements })
    }

    /// The integers `lo..=hi`.
    pub fn integer_range(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidParameter(format!("empty integer range {lo}..{hi}")));
        }
        Self::new((lo..=hi).map(|k| k as f64).collect())
    }

    pub fn elements(&self) -> &[f64] {
        &self.elements
    }

    /// Nearest element; ties go to the smaller one.
    pub fn nearest(&self, v: f64) -> f64 {
        let e = &self.elements;
        let idx = e.partition_point(|&x| x < v);
        if idx == 0 {
            return e[0];
        }
        if idx == e.len() {
            return e[e.len() - 1];
        }
        let (lo, hi) = (e[idx - 1], e[idx]);
        if hi - v < v - lo {
            hi
        } else {
            lo
        }
    }
}

impl ScalarPenalty for FiniteSetIndicator {
    fn value(&self, t: f64) -> f64 {
        if self.elements.binary_search_by(|x| x.total_cmp(&t)).is_ok() {
            0.0
        } else {
            f64::INFINITY
        }
    }
    fn prox(&self, v: f64, _step: f64) -> f64 {
        self.nearest(v)
    }
}

fn soft_threshold_scalar(v: f64, c: f64) -> f64 {
    if v > c {
        v - c
    } else if v < -c {
        v + c
    } else {
        0.0
    }
}

/// Coordinate-wise `sign(v)·max(|v| − c, 0)`, the prox of `c‖·‖₁`.
pub fn soft_threshold(v: &[f64], c: f64) -> Vec<f64> {
    v.iter().map(|&vi| soft_threshold_scalar(vi, c)).collect()
}

/// Exact prox of `λ Σ F` with step `step`, coordinate-wise.
pub fn prox_clipped_quad(v: &[f64], penalty: &ClippedQuadPenalty, step: f64) -> Vec<f64> {
    v.iter().map(|&vi| penalty.prox(vi, step)).collect()
}

/// Coordinate-wise nearest element of the set; `step` has no effect.
pub fn project_finite_set(v: &[f64], ind: &FiniteSetIndicator, _step: f64) -> Vec<f64> {
    v.iter().map(|&vi| ind.nearest(vi)).collect()
}

/// Brute-force prox: minimizes `value_fn(t) + (t − v)²/(2 step)` over the
/// grid `v − window, v − window + resolution, …, v + window` and the points
/// `{0, v}`. Meant as ground truth in tests.
pub fn prox_grid_oracle<F: Fn(f64) -> f64>(
    v: f64,
    value_fn: F,
    step: f64,
    window: f64,
    resolution: f64,
) -> f64 {
    assert!(resolution > 0.0 && window > 0.0 && step > 0.0);
    let objective = |t: f64| value_fn(t) + (t - v) * (t - v) / (2.0 * step);
    let mut best = v;
    let mut best_obj = objective(v);
    let mut consider = |t: f64| {
        let o = objective(t);
        if o < best_obj {
            best = t;
            best_obj = o;
        }
    };
    consider(0.0);
    let steps = (2.0 * window / resolution).floor() as usize;
    let lo = v - window;
    for j in 0..=steps {
        consider(lo + j as f64 * resolution);
    }
    best
}
