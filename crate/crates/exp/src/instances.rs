//! Instance builders for the two shipped problem families.

use ladmm::linalg::Matrix;
use ladmm::model::{SeparableQuadratic, SquaredDistance, ZeroOracle};
use ladmm::prox::{ClippedQuadPenalty, FiniteSetIndicator, Separable};
use ladmm::{top_eigenvalue_gram, IterateState, ProblemSpec, ProxOracle};

use crate::config::{IntProgConfig, LassoConfig, QuadraticTarget};
use crate::error::{ExpError, Result};
use crate::rng::NormalSampler;

/// `A` (`m×n`) and `b` (`m`), standard normal, then `A` scaled so that
/// `λ_max(AAᵀ) = 1`. The draw order is `A` row-major, then `b`.
pub fn draw_lasso_data(n: usize, m: usize, seed: u64) -> Result<(Matrix, Vec<f64>)> {
    let mut rng = NormalSampler::new(seed);
    let mut data = vec![0.0; m * n];
    rng.fill(&mut data);
    let mut b = vec![0.0; m];
    rng.fill(&mut b);
    let mut a = Matrix::from_row_major(m, n, data)?;
    let sigma = top_eigenvalue_gram(&a)?;
    a.scale(1.0 / sigma.sqrt());
    Ok((a, b))
}

pub struct LassoInstance {
    pub spec: ProblemSpec,
    /// The normalized data matrix, unsplit.
    pub a: Matrix,
    pub b: Vec<f64>,
}

/// `min λ Σ F(x_j) + ‖y − b‖²  s.t.  Ax − y = 0`, with `x` split into
/// `config.blocks` equal blocks.
pub fn generate_lasso(config: &LassoConfig) -> Result<LassoInstance> {
    config.validate()?;
    let (a, b) = draw_lasso_data(config.n, config.m, config.seed)?;
    let width = config.n / config.blocks;
    let penalty = ClippedQuadPenalty::new(config.lambda, config.eta)?;
    let f_blocks: Vec<Box<dyn ProxOracle>> = (0..config.blocks)
        .map(|_| Box::new(Separable::new(penalty, width)) as Box<dyn ProxOracle>)
        .collect();
    let a_blocks = (0..config.blocks)
        .map(|i| a.column_block(i * width, (i + 1) * width))
        .collect();
    let spec = ProblemSpec::new(
        Box::new(ZeroOracle { dim: config.n + config.m }),
        Box::new(SquaredDistance::new(b.clone(), 1.0)?),
        f_blocks,
        a_blocks,
        Matrix::scaled_identity(config.m, -1.0),
        true,
    )?;
    Ok(LassoInstance { spec, a, b })
}

pub struct IntProgInstance {
    pub spec: ProblemSpec,
    pub set: FiniteSetIndicator,
    pub target: QuadraticTarget,
    pub mu: f64,
    /// The minimizer of `f` over `[min M, max M]`, with `γ = ∇h(y)`.
    pub start: IterateState,
}

/// The target used when none is given: `(t − c)²` with `c` uniform on
/// `[lo − 1, hi + 1]`.
pub fn draw_target(lo: i64, hi: i64, seed: u64) -> QuadraticTarget {
    let mut rng = NormalSampler::new(seed);
    let span = (hi - lo) as f64 + 2.0;
    QuadraticTarget::centered(1.0, lo as f64 - 1.0 + span * rng.uniform())
}

/// Minimizer of the quadratic over the interval `[lo, hi]`.
fn relaxed_minimizer(t: &QuadraticTarget, lo: f64, hi: f64) -> f64 {
    if t.a > 0.0 {
        (-t.b / (2.0 * t.a)).clamp(lo, hi)
    } else if t.value(lo) <= t.value(hi) {
        lo
    } else {
        hi
    }
}

/// `min τ(x) + (f(x) − h(x)) + h(y)  s.t.  x − y = 0` with `h(t) = (μ/2)t²`
/// and `τ` the indicator of the integer range.
pub fn generate_intprog(config: &IntProgConfig) -> Result<IntProgInstance> {
    config.validate()?;
    let target = config
        .target
        .unwrap_or_else(|| draw_target(config.lo, config.hi, config.seed));
    let set = FiniteSetIndicator::integer_range(config.lo, config.hi)?;
    let mu = config.mu;
    // g(x, y) = f(x) − (μ/2)x², written over (x, y)
    let g = SeparableQuadratic::new(vec![2.0 * target.a - mu, 0.0], vec![target.b, 0.0], target.c)?;
    let h = SeparableQuadratic::new(vec![mu], vec![0.0], 0.0)?;
    let spec = ProblemSpec::new(
        Box::new(g),
        Box::new(h),
        vec![Box::new(Separable::new(set.clone(), 1))],
        vec![Matrix::identity(1)],
        Matrix::scaled_identity(1, -1.0),
        true,
    )
    .map_err(ExpError::from)?;
    let t0 = relaxed_minimizer(&target, config.lo as f64, config.hi as f64);
    let start = IterateState::new(&spec, vec![t0], vec![t0], vec![mu * t0])?;
    Ok(IntProgInstance {
        spec,
        set,
        target,
        mu,
        start,
    })
}
