//! Problem description for
//!
//! ```text
//!   minimize    g(x, y) + Σ_i f_i(x_i) + h(y)
//!   subject to  Σ_i A_i x_i + B y = 0
//! ```
//!
//! together with the iterate state and evaluation of the objective and the
//! augmented Lagrangian
//! `L_β(x, y, γ) = g + f + h + ⟨γ, Ax + By⟩ + (β/2)‖Ax + By‖²`.

use crate::certify::top_eigenvalue_gram;
use crate::error::{Error, Result};
use crate::linalg::{dist, dot, Matrix};

/// A differentiable function with a globally Lipschitz gradient.
pub trait SmoothOracle: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, point: &[f64]) -> f64;
    /// Writes `∇value(point)` into `grad`.
    fn gradient(&self, point: &[f64], grad: &mut [f64]);
    /// Lipschitz modulus of the gradient.
    fn lipschitz_constant(&self) -> f64;
    /// True for the identically zero function; lets the solver skip gradient work.
    fn is_zero(&self) -> bool {
        false
    }
}

/// A possibly nonsmooth, possibly nonconvex function with a computable
/// proximal map `prox(v, s) = argmin_t value(t) + ‖t − v‖² / (2s)`.
///
/// `value` may return `f64::INFINITY` (indicator functions). `prox` must
/// return a point with finite value.
pub trait ProxOracle: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, point: &[f64]) -> f64;
    fn prox(&self, point: &[f64], step: f64, out: &mut [f64]);
    /// `acc + value(point)`. Separable oracles override this to add term by
    /// term, so a sum over blocks does not depend on how `x` is split.
    fn accumulate_value(&self, point: &[f64], acc: f64) -> f64 {
        acc + self.value(point)
    }
}

/// The zero function on `R^dim`.
#[derive(Debug, Clone, Copy)]
pub struct ZeroOracle {
    pub dim: usize,
}

impl SmoothOracle for ZeroOracle {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, _point: &[f64]) -> f64 {
        0.0
    }
    fn gradient(&self, _point: &[f64], grad: &mut [f64]) {
        grad.iter_mut().for_each(|g| *g = 0.0);
    }
    fn lipschitz_constant(&self) -> f64 {
        0.0
    }
    fn is_zero(&self) -> bool {
        true
    }
}

/// `weight · ‖z − center‖²`.
#[derive(Debug, Clone)]
pub struct SquaredDistance {
    center: Vec<f64>,
    weight: f64,
}

impl SquaredDistance {
    pub fn new(center: Vec<f64>, weight: f64) -> Result<Self> {
        if !(weight >= 0.0) || !weight.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "squared-distance weight must be finite and nonnegative, got {weight}"
            )));
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("squared-distance center"));
        }
        Ok(SquaredDistance { center, weight })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }
}

impl SmoothOracle for SquaredDistance {
    fn dim(&self) -> usize {
        self.center.len()
    }
    fn value(&self, point: &[f64]) -> f64 {
        let d = dist(point, &self.center);
        self.weight * d * d
    }
    fn gradient(&self, point: &[f64], grad: &mut [f64]) {
        for ((g, p), c) in grad.iter_mut().zip(point).zip(&self.center) {
            *g = 2.0 * self.weight * (p - c);
        }
    }
    fn lipschitz_constant(&self) -> f64 {
        2.0 * self.weight
    }
    fn is_zero(&self) -> bool {
        self.weight == 0.0
    }
}

/// `Σ_j (½ q_j z_j² + l_j z_j) + c`; coordinates with `q_j = l_j = 0` are inert.
#[derive(Debug, Clone)]
pub struct SeparableQuadratic {
    quad: Vec<f64>,
    linear: Vec<f64>,
    constant: f64,
}

impl SeparableQuadratic {
    pub fn new(quad: Vec<f64>, linear: Vec<f64>, constant: f64) -> Result<Self> {
        if quad.len() != linear.len() {
            return Err(Error::Dimension {
                context: "separable quadratic coefficients",
                expected: quad.len(),
                found: linear.len(),
            });
        }
        if quad.iter().chain(&linear).any(|v| !v.is_finite()) || !constant.is_finite() {
            return Err(Error::NonFinite("separable quadratic coefficients"));
        }
        Ok(SeparableQuadratic {
            quad,
            linear,
            constant,
        })
    }
}

impl SmoothOracle for SeparableQuadratic {
    fn dim(&self) -> usize {
        self.quad.len()
    }
    fn value(&self, point: &[f64]) -> f64 {
        let mut s = self.constant;
        for ((z, q), l) in point.iter().zip(&self.quad).zip(&self.linear) {
            s += 0.5 * q * z * z + l * z;
        }
        s
    }
    fn gradient(&self, point: &[f64], grad: &mut [f64]) {
        for (((g, z), q), l) in grad.iter_mut().zip(point).zip(&self.quad).zip(&self.linear) {
            *g = q * z + l;
        }
    }
    fn lipschitz_constant(&self) -> f64 {
        self.quad.iter().fold(0.0, |m, q| m.max(q.abs()))
    }
    fn is_zero(&self) -> bool {
        self.constant == 0.0
            && self.quad.iter().all(|&q| q == 0.0)
            && self.linear.iter().all(|&l| l == 0.0)
    }
}

/// `½ zᵀQz + lᵀz` with a dense symmetric `Q`; couples every coordinate.
#[derive(Debug, Clone)]
pub struct DenseQuadratic {
    q: Matrix,
    linear: Vec<f64>,
    lipschitz: f64,
}

impl DenseQuadratic {
    pub fn new(q: Matrix, linear: Vec<f64>) -> Result<Self> {
        let n = q.rows();
        if q.cols() != n {
            return Err(Error::Dimension {
                context: "dense quadratic Q must be square",
                expected: n,
                found: q.cols(),
            });
        }
        if linear.len() != n {
            return Err(Error::Dimension {
                context: "dense quadratic linear term",
                expected: n,
                found: linear.len(),
            });
        }
        for i in 0..n {
            for j in 0..i {
                let (a, b) = (q.get(i, j), q.get(j, i));
                if (a - b).abs() > 1e-12 * (1.0 + a.abs().max(b.abs())) {
                    return Err(Error::InvalidParameter(format!(
                        "dense quadratic Q is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        // ‖Q‖₂ = sqrt(λ_max(QᵀQ)); pad slightly so round-off never under-reports it.
        let lipschitz = if n == 0 {
            0.0
        } else {
            top_eigenvalue_gram(&q)?.sqrt() * (1.0 + 1e-9)
        };
        Ok(DenseQuadratic {
            q,
            linear,
            lipschitz,
        })
    }
}

impl SmoothOracle for DenseQuadratic {
    fn dim(&self) -> usize {
        self.q.rows()
    }
    fn value(&self, point: &[f64]) -> f64 {
        let qz = self.q.mul_vec(point);
        0.5 * dot(point, &qz) + dot(&self.linear, point)
    }
    fn gradient(&self, point: &[f64], grad: &mut [f64]) {
        grad.iter_mut().for_each(|g| *g = 0.0);
        self.q.mul_vec_acc(point, grad);
        for (g, l) in grad.iter_mut().zip(&self.linear) {
            *g += l;
        }
    }
    fn lipschitz_constant(&self) -> f64 {
        self.lipschitz
    }
}

/// One problem instance. Immutable once built; shareable across threads.
pub struct ProblemSpec {
    g: Box<dyn SmoothOracle>,
    h: Box<dyn SmoothOracle>,
    f_blocks: Vec<Box<dyn ProxOracle>>,
    a_blocks: Vec<Matrix>,
    b: Matrix,
    offsets: Vec<usize>,
    coercive_attested: bool,
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("blocks", &self.num_blocks())
            .field("p", &self.x_dim())
            .field("q", &self.y_dim())
            .field("n", &self.constraint_dim())
            .field("coercive_attested", &self.coercive_attested)
            .finish()
    }
}

impl ProblemSpec {
    /// Validates shapes: every `A_i` and `B` share the row count `n`,
    /// `f_i` and `A_i` agree on block width, `h` lives on `R^q` and `g` on `R^{p+q}`.
    pub fn new(
        g: Box<dyn SmoothOracle>,
        h: Box<dyn SmoothOracle>,
        f_blocks: Vec<Box<dyn ProxOracle>>,
        a_blocks: Vec<Matrix>,
        b: Matrix,
        coercive_attested: bool,
    ) -> Result<Self> {
        if f_blocks.is_empty() {
            return Err(Error::InvalidParameter("at least one x-block is required".into()));
        }
        if f_blocks.len() != a_blocks.len() {
            return Err(Error::Dimension {
                context: "number of A blocks",
                expected: f_blocks.len(),
                found: a_blocks.len(),
            });
        }
        let n = b.rows();
        let mut offsets = Vec::with_capacity(f_blocks.len() + 1);
        offsets.push(0);
        for (f, a) in f_blocks.iter().zip(&a_blocks) {
            if a.rows() != n {
                return Err(Error::Dimension {
                    context: "row count of A block",
                    expected: n,
                    found: a.rows(),
                });
            }
            if f.dim() != a.cols() {
                return Err(Error::Dimension {
                    context: "prox block width vs A block columns",
                    expected: a.cols(),
                    found: f.dim(),
                });
            }
            if !a.is_finite() {
                return Err(Error::NonFinite("A block"));
            }
            offsets.push(offsets.last().unwrap() + a.cols());
        }
        if !b.is_finite() {
            return Err(Error::NonFinite("B"));
        }
        let p = *offsets.last().unwrap();
        let q = b.cols();
        if h.dim() != q {
            return Err(Error::Dimension {
                context: "h dimension",
                expected: q,
                found: h.dim(),
            });
        }
        if g.dim() != p + q {
            return Err(Error::Dimension {
                context: "g dimension (p + q)",
                expected: p + q,
                found: g.dim(),
            });
        }
        Ok(ProblemSpec {
            g,
            h,
            f_blocks,
            a_blocks,
            b,
            offsets,
            coercive_attested,
        })
    }

    pub fn num_blocks(&self) -> usize {
        self.f_blocks.len()
    }
    pub fn x_dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }
    pub fn y_dim(&self) -> usize {
        self.b.cols()
    }
    pub fn constraint_dim(&self) -> usize {
        self.b.rows()
    }
    /// Start offsets of the x-blocks, with the total dimension appended.
    pub fn block_offsets(&self) -> &[usize] {
        &self.offsets
    }
    pub fn block_range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }
    pub fn g(&self) -> &dyn SmoothOracle {
        self.g.as_ref()
    }
    pub fn h(&self) -> &dyn SmoothOracle {
        self.h.as_ref()
    }
    pub fn f_block(&self, i: usize) -> &dyn ProxOracle {
        self.f_blocks[i].as_ref()
    }
    pub fn a_block(&self, i: usize) -> &Matrix {
        &self.a_blocks[i]
    }
    pub fn a_blocks(&self) -> &[Matrix] {
        &self.a_blocks
    }
    pub fn b(&self) -> &Matrix {
        &self.b
    }
    pub fn coercive_attested(&self) -> bool {
        self.coercive_attested
    }
    /// The stacked matrix `A = [A_1 ... A_K]`.
    pub fn a_stacked(&self) -> Matrix {
        Matrix::hcat(&self.a_blocks).expect("row counts validated at construction")
    }

    /// `A x`, accumulated block by block in ascending order.
    pub fn apply_a(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.constraint_dim()];
        self.apply_a_into(x, &mut out);
        out
    }

    pub fn apply_a_into(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (i, a) in self.a_blocks.iter().enumerate() {
            a.mul_vec_acc(&x[self.block_range(i)], out);
        }
    }

    /// `Aᵀ w`.
    pub fn apply_a_t(&self, w: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.x_dim()];
        for (i, a) in self.a_blocks.iter().enumerate() {
            a.tr_mul_vec_into(w, &mut out[self.block_range(i)]);
        }
        out
    }

    /// `(∇_x g, ∇_y g)` at `(x, y)`. Returns `None` when g is the zero oracle.
    pub fn g_gradient(&self, x: &[f64], y: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
        if self.g.is_zero() {
            return None;
        }
        let z = concat(x, y);
        let mut grad = vec![0.0; z.len()];
        self.g.gradient(&z, &mut grad);
        let gy = grad.split_off(x.len());
        Some((grad, gy))
    }

    /// `Σ_i f_i(x_i)`, short-circuiting to `+∞` on the first infinite block.
    pub fn f_value(&self, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for (i, f) in self.f_blocks.iter().enumerate() {
            s = f.accumulate_value(&x[self.block_range(i)], s);
            if s == f64::INFINITY {
                return f64::INFINITY;
            }
        }
        s
    }

    pub fn g_value(&self, x: &[f64], y: &[f64]) -> f64 {
        if self.g.is_zero() {
            0.0
        } else {
            self.g.value(&concat(x, y))
        }
    }

    fn check_xy(&self, x: &[f64], y: &[f64]) -> Result<()> {
        if x.len() != self.x_dim() {
            return Err(Error::Dimension {
                context: "x",
                expected: self.x_dim(),
                found: x.len(),
            });
        }
        if y.len() != self.y_dim() {
            return Err(Error::Dimension {
                context: "y",
                expected: self.y_dim(),
                found: y.len(),
            });
        }
        Ok(())
    }
}

fn concat(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut z = Vec::with_capacity(x.len() + y.len());
    z.extend_from_slice(x);
    z.extend_from_slice(y);
    z
}

/// `g(x,y) + Σ f_i(x_i) + h(y)`; `+∞` when an indicator block is violated.
pub fn evaluate_objective(spec: &ProblemSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    spec.check_xy(x, y)?;
    Ok(objective_unchecked(spec, x, y))
}

pub(crate) fn objective_unchecked(spec: &ProblemSpec, x: &[f64], y: &[f64]) -> f64 {
    let f = spec.f_value(x);
    if f == f64::INFINITY {
        return f64::INFINITY;
    }
    spec.g_value(x, y) + f + spec.h.value(y)
}

/// `⟨γ, r⟩ + (β/2)‖r‖²` with `r = ax + by`.
pub(crate) fn coupling_terms(gamma: &[f64], ax: &[f64], by: &[f64], beta: f64) -> f64 {
    let mut inner = 0.0;
    let mut sq = 0.0;
    for ((g, a), b) in gamma.iter().zip(ax).zip(by) {
        let r = a + b;
        inner += g * r;
        sq += r * r;
    }
    inner + 0.5 * beta * sq
}

/// Augmented Lagrangian at the state's current iterate, using the cached `Ax`, `By`.
pub fn evaluate_lagrangian(spec: &ProblemSpec, state: &IterateState, beta: f64) -> Result<f64> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    spec.check_xy(&state.x, &state.y)?;
    if state.gamma.len() != spec.constraint_dim() {
        return Err(Error::Dimension {
            context: "gamma",
            expected: spec.constraint_dim(),
            found: state.gamma.len(),
        });
    }
    let finite = |v: &[f64]| v.iter().all(|e| e.is_finite());
    if !finite(&state.x) || !finite(&state.y) || !finite(&state.gamma) {
        return Err(Error::NonFinite("iterate"));
    }
    let obj = objective_unchecked(spec, &state.x, &state.y);
    if obj == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    Ok(obj + coupling_terms(&state.gamma, &state.ax, &state.by, beta))
}

/// Current iterate plus one-step (two-step for y) history and the cached
/// products `Ax`, `By`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateState {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub gamma: Vec<f64>,
    pub x_prev: Vec<f64>,
    pub y_prev: Vec<f64>,
    pub y_prev2: Vec<f64>,
    pub gamma_prev: Vec<f64>,
    pub ax: Vec<f64>,
    pub by: Vec<f64>,
    pub iter: usize,
}

impl IterateState {
    /// `x⁰ = 0, y⁰ = 0, γ⁰ = 0`.
    pub fn zeros(spec: &ProblemSpec) -> Self {
        Self::new(
            spec,
            vec![0.0; spec.x_dim()],
            vec![0.0; spec.y_dim()],
            vec![0.0; spec.constraint_dim()],
        )
        .expect("dimensions taken from spec")
    }

    /// A fresh state at `(x0, y0, γ0)`; history slots are copies of the start.
    pub fn new(spec: &ProblemSpec, x0: Vec<f64>, y0: Vec<f64>, gamma0: Vec<f64>) -> Result<Self> {
        spec.check_xy(&x0, &y0)?;
        if gamma0.len() != spec.constraint_dim() {
            return Err(Error::Dimension {
                context: "gamma",
                expected: spec.constraint_dim(),
                found: gamma0.len(),
            });
        }
        let mut s = IterateState {
            x_prev: x0.clone(),
            y_prev: y0.clone(),
            y_prev2: y0.clone(),
            gamma_prev: gamma0.clone(),
            ax: Vec::new(),
            by: Vec::new(),
            x: x0,
            y: y0,
            gamma: gamma0,
            iter: 0,
        };
        s.refresh_cache(spec);
        Ok(s)
    }

    /// Recomputes `Ax` and `By` from scratch.
    pub fn refresh_cache(&mut self, spec: &ProblemSpec) {
        self.ax = spec.apply_a(&self.x);
        self.by = spec.b().mul_vec(&self.y);
    }

    /// `r = Ax + By` from the cache.
    pub fn constraint_residual(&self) -> Vec<f64> {
        self.ax.iter().zip(&self.by).map(|(a, b)| a + b).collect()
    }
}

/// Per-iteration increments and feasibility, all Euclidean norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    pub dx: f64,
    pub dy: f64,
    pub dgamma: f64,
    pub feas: f64,
}

pub fn residuals(state: &IterateState) -> Result<Residuals> {
    if state.iter == 0 {
        return Err(Error::State("residuals requested before the first iteration"));
    }
    Ok(Residuals {
        dx: dist(&state.x, &state.x_prev),
        dy: dist(&state.y, &state.y_prev),
        dgamma: dist(&state.gamma, &state.gamma_prev),
        feas: crate::linalg::norm(&state.constraint_residual()),
    })
}
