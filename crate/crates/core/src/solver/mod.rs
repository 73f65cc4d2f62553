//! The parallel linearized ADMM iteration.
//!
//! One iteration, with `r = Ax + By` and `w = γ + βr`:
//!
//! ```text
//!   x_i⁺ = prox_{f_i / L_x}( x_i − (A_iᵀ w + ∇_{x_i} g(x, y)) / L_x )        (all blocks in parallel)
//!   y⁺   = (L_y I + β BᵀB)⁻¹ ( L_y y − ∇_y g(x⁺, y) − ∇h(y) − Bᵀ(γ + β A x⁺) )
//!   γ⁺   = γ + β (A x⁺ + B y⁺)
//! ```

mod diagnostics;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certify::{check_assumptions, Certificate};
use crate::error::{Error, Result};
use crate::linalg::{Cholesky, Matrix};
use crate::model::{residuals, IterateState, ProblemSpec, Residuals};

pub use diagnostics::{check_invariants, compute_diagnostics, DiagnosticsRecord};

/// The per-iteration inequalities monitored at [`DiagLevel::Assert`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Lemma {
    /// `Bᵀγ⁺ = −∇_y g(x⁺, y) − ∇h(y) − L_y (y⁺ − y)`.
    DualIdentity,
    /// `L_β` drops by at least `C_0‖Δx‖²` over the x-step.
    XDescent,
    /// `L_β` drops by at least `C_1‖Δy‖²` over the y-step.
    YDescent,
    /// `‖Δγ‖²/β ≤ C_2‖Δx‖² + C_3‖Δy‖² + C_4‖Δy_prev‖²`.
    DualAscent,
    /// `m_k = L_β + C_m‖Δy‖²` is nonincreasing.
    LyapunovMonotone,
}

impl std::fmt::Display for Lemma {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Lemma::DualIdentity => "dual-update identity",
            Lemma::XDescent => "x-step sufficient descent",
            Lemma::YDescent => "y-step sufficient descent",
            Lemma::DualAscent => "dual-step ascent bound",
            Lemma::LyapunovMonotone => "Lyapunov monotonicity",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapMode {
    /// `max(‖Δx‖, ‖Δy‖, ‖Δγ‖)`.
    AlgorithmGap,
    /// `max(‖Δx‖, ‖Δy‖, ‖Ax + By‖)`.
    ExperimentGap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StoppingRule {
    pub epsilon: f64,
    pub mode: GapMode,
    pub max_iters: usize,
}

impl Default for StoppingRule {
    fn default() -> Self {
        StoppingRule {
            epsilon: 1e-4,
            mode: GapMode::ExperimentGap,
            max_iters: 1_000_000,
        }
    }
}

impl StoppingRule {
    pub fn gap(&self, r: &Residuals) -> f64 {
        let third = match self.mode {
            GapMode::AlgorithmGap => r.dgamma,
            GapMode::ExperimentGap => r.feas,
        };
        r.dx.max(r.dy).max(third)
    }

    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagLevel {
    /// Residuals only; a record is produced for the final iterate.
    #[default]
    Off,
    /// A record per iteration, handed to the sink.
    Trace,
    /// As `Trace`, and every monitored inequality is enforced.
    Assert,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub diag: DiagLevel,
    /// Worker threads for the block updates; 0 uses every available core.
    pub threads: usize,
    pub check_assumptions: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            diag: DiagLevel::Off,
            threads: 0,
            check_assumptions: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    IterationCap,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub termination: Termination,
    pub iterations: usize,
    /// Whether the parameters carried a convergence certificate; the dual-ascent
    /// and Lyapunov checks only apply when they did.
    pub certified: bool,
    pub final_record: DiagnosticsRecord,
    pub state: IterateState,
}

/// Factorization of `L_y I + β BᵀB`, computed once per run.
#[derive(Debug, Clone)]
pub struct YSolveCache {
    chol: Cholesky,
    l_y: f64,
    beta: f64,
}

impl YSolveCache {
    pub fn new(b: &Matrix, l_y: f64, beta: f64) -> Result<Self> {
        let mut m = b.gram();
        m.scale(beta);
        for i in 0..m.rows() {
            m.set(i, i, m.get(i, i) + l_y);
        }
        Ok(YSolveCache {
            chol: Cholesky::factor(&m)?,
            l_y,
            beta,
        })
    }

    pub fn l_y(&self) -> f64 {
        self.l_y
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Intermediate quantities of one iteration that the diagnostics need.
#[derive(Debug, Clone, PartialEq)]
pub struct StepInfo {
    /// `A x^k` and `B y^k` before the step.
    pub ax_old: Vec<f64>,
    pub by_old: Vec<f64>,
    /// `Aᵀ(γ + βr) + ∇_x g` at `(x^k, y^k, γ^k)`.
    pub x_bracket: Vec<f64>,
    /// `∇_y g(x^{k+1}, y^k) + ∇h(y^k)`.
    pub y_lin_grad: Vec<f64>,
}

fn check_params(params: &Certificate) -> Result<()> {
    for (name, v) in [("beta", params.beta), ("L_x", params.l_x), ("L_y", params.l_y)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(())
}

/// `γ + β(Ax + By)`.
fn multiplier_shift(state: &IterateState, beta: f64) -> Vec<f64> {
    state
        .gamma
        .iter()
        .zip(&state.ax)
        .zip(&state.by)
        .map(|((g, a), b)| g + beta * (a + b))
        .collect()
}

/// One block's linearized proximal step. Writes the new block to `out` and
/// the linearization `A_iᵀ w + ∇_{x_i} g` to `bracket`.
fn x_block_step(
    spec: &ProblemSpec,
    i: usize,
    x_i: &[f64],
    w: &[f64],
    gx_i: Option<&[f64]>,
    l_x: f64,
    out: &mut [f64],
    bracket: &mut [f64],
) {
    spec.a_block(i).tr_mul_vec_into(w, bracket);
    if let Some(gx) = gx_i {
        for (b, g) in bracket.iter_mut().zip(gx) {
            *b += g;
        }
    }
    let point: Vec<f64> = x_i
        .iter()
        .zip(bracket.iter())
        .map(|(x, b)| x - b / l_x)
        .collect();
    spec.f_block(i).prox(&point, 1.0 / l_x, out);
}

/// The new value of block `i`, computed from `state` alone.
pub fn x_update_block(spec: &ProblemSpec, state: &IterateState, params: &Certificate, i: usize) -> Result<Vec<f64>> {
    check_params(params)?;
    if i >= spec.num_blocks() {
        return Err(Error::InvalidParameter(format!(
            "block {i} out of range for {} blocks",
            spec.num_blocks()
        )));
    }
    let range = spec.block_range(i);
    let w = multiplier_shift(state, params.beta);
    let gx = spec.g_gradient(&state.x, &state.y).map(|(gx, _)| gx);
    let mut out = vec![0.0; range.len()];
    let mut bracket = vec![0.0; range.len()];
    x_block_step(
        spec,
        i,
        &state.x[range.clone()],
        &w,
        gx.as_ref().map(|g| &g[range]),
        params.l_x,
        &mut out,
        &mut bracket,
    );
    Ok(out)
}

/// All blocks, sequentially.
pub fn x_update(spec: &ProblemSpec, state: &IterateState, params: &Certificate) -> Result<Vec<f64>> {
    check_params(params)?;
    let (x, _) = x_step(spec, state, params, None);
    Ok(x)
}

fn x_step(
    spec: &ProblemSpec,
    state: &IterateState,
    params: &Certificate,
    pool: Option<&rayon::ThreadPool>,
) -> (Vec<f64>, Vec<f64>) {
    let w = multiplier_shift(state, params.beta);
    let gx = spec.g_gradient(&state.x, &state.y).map(|(gx, _)| gx);
    let mut x_new = vec![0.0; spec.x_dim()];
    let mut bracket = vec![0.0; spec.x_dim()];

    let mut jobs: Vec<(usize, &mut [f64], &mut [f64])> = Vec::with_capacity(spec.num_blocks());
    let mut rest_x = x_new.as_mut_slice();
    let mut rest_b = bracket.as_mut_slice();
    for i in 0..spec.num_blocks() {
        let len = spec.block_range(i).len();
        let (bx, tx) = rest_x.split_at_mut(len);
        let (bb, tb) = rest_b.split_at_mut(len);
        jobs.push((i, bx, bb));
        rest_x = tx;
        rest_b = tb;
    }
    let run = |(i, out, br): &mut (usize, &mut [f64], &mut [f64])| {
        let range = spec.block_range(*i);
        x_block_step(
            spec,
            *i,
            &state.x[range.clone()],
            &w,
            gx.as_ref().map(|g| &g[range]),
            params.l_x,
            out,
            br,
        );
    };
    match pool {
        Some(pool) if jobs.len() > 1 => pool.install(|| jobs.par_iter_mut().for_each(run)),
        _ => jobs.iter_mut().for_each(run),
    }
    (x_new, bracket)
}

/// `∇_y g(x, y) + ∇h(y)` at the state's `x` (already updated) and `y`.
fn y_linearization(spec: &ProblemSpec, state: &IterateState) -> Vec<f64> {
    let mut grad = vec![0.0; spec.y_dim()];
    spec.h().gradient(&state.y, &mut grad);
    if let Some((_, gy)) = spec.g_gradient(&state.x, &state.y) {
        for (a, b) in grad.iter_mut().zip(gy) {
            *a += b;
        }
    }
    grad
}

fn y_solve(spec: &ProblemSpec, state: &IterateState, cache: &YSolveCache, lin: &[f64]) -> Vec<f64> {
    let shifted: Vec<f64> = state
        .gamma
        .iter()
        .zip(&state.ax)
        .map(|(g, a)| g + cache.beta * a)
        .collect();
    let mut rhs = spec.b().tr_mul_vec(&shifted);
    for ((r, y), l) in rhs.iter_mut().zip(&state.y).zip(lin) {
        *r = cache.l_y * y - l - *r;
    }
    cache.chol.solve_in_place(&mut rhs);
    rhs
}

/// The y-step. `state` must already hold `x^{k+1}` (and its cached `Ax`)
/// together with `y^k` and `γ^k`.
pub fn y_update(spec: &ProblemSpec, state: &IterateState, params: &Certificate, cache: &YSolveCache) -> Result<Vec<f64>> {
    check_params(params)?;
    if cache.l_y != params.l_y || cache.beta != params.beta {
        return Err(Error::InvalidParameter(
            "y-solve cache was factored for different parameters".into(),
        ));
    }
    let lin = y_linearization(spec, state);
    Ok(y_solve(spec, state, cache, &lin))
}

/// `γ + β(Ax + By)` from the cached products.
pub fn gamma_update(state: &IterateState, beta: f64) -> Vec<f64> {
    multiplier_shift(state, beta)
}

/// Runs iterations against a fixed problem and parameter set.
pub struct Solver<'a> {
    spec: &'a ProblemSpec,
    params: &'a Certificate,
    cache: YSolveCache,
    pool: Option<rayon::ThreadPool>,
}

impl<'a> Solver<'a> {
    pub fn new(spec: &'a ProblemSpec, params: &'a Certificate, threads: usize) -> Result<Self> {
        check_params(params)?;
        let cache = YSolveCache::new(spec.b(), params.l_y, params.beta)?;
        let pool = if threads == 1 || spec.num_blocks() == 1 {
            None
        } else {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?,
            )
        };
        Ok(Solver {
            spec,
            params,
            cache,
            pool,
        })
    }

    /// Advances `state` by one iteration.
    pub fn step(&self, state: &mut IterateState) -> StepInfo {
        let spec = self.spec;
        let (x_new, x_bracket) = x_step(spec, state, self.params, self.pool.as_ref());
        let ax_old = std::mem::take(&mut state.ax);
        let by_old = state.by.clone();
        state.x_prev = std::mem::replace(&mut state.x, x_new);
        state.ax = spec.apply_a(&state.x);

        let y_lin_grad = y_linearization(spec, state);
        let y_new = y_solve(spec, state, &self.cache, &y_lin_grad);
        state.y_prev2 = std::mem::replace(&mut state.y_prev, std::mem::replace(&mut state.y, y_new));
        state.by = spec.b().mul_vec(&state.y);

        let gamma_new = gamma_update(state, self.params.beta);
        state.gamma_prev = std::mem::replace(&mut state.gamma, gamma_new);
        state.iter += 1;
        StepInfo {
            ax_old,
            by_old,
            x_bracket,
            y_lin_grad,
        }
    }
}

/// Iterates from `init` until the stopping gap falls below `ε` or the
/// iteration cap is hit. At [`DiagLevel::Trace`] and above every record is
/// passed to `sink`.
pub fn run<F>(
    spec: &ProblemSpec,
    params: &Certificate,
    init: IterateState,
    stopping: &StoppingRule,
    options: &RunOptions,
    mut sink: F,
) -> Result<RunOutcome>
where
    F: FnMut(&DiagnosticsRecord),
{
    stopping.validate()?;
    if init.x.len() != spec.x_dim()
        || init.y.len() != spec.y_dim()
        || init.gamma.len() != spec.constraint_dim()
    {
        return Err(Error::Dimension {
            context: "initial state",
            expected: spec.x_dim() + spec.y_dim() + spec.constraint_dim(),
            found: init.x.len() + init.y.len() + init.gamma.len(),
        });
    }
    if options.check_assumptions {
        check_assumptions(spec)?;
    }
    let solver = Solver::new(spec, params, options.threads)?;
    let mut state = init;
    state.refresh_cache(spec);
    let mut prev: Option<DiagnosticsRecord> = None;
    loop {
        let step = solver.step(&mut state);
        let res = residuals(&state)?;
        let gap = stopping.gap(&res);
        if !gap.is_finite() {
            return Err(Error::NonFinite("iterate (the iteration diverged)"));
        }
        let converged = gap < stopping.epsilon;
        let done = converged || state.iter >= stopping.max_iters;
        if options.diag != DiagLevel::Off || done {
            let record = compute_diagnostics(spec, &state, params, &step, prev.as_ref())?;
            if options.diag == DiagLevel::Assert {
                check_invariants(&record, prev.as_ref(), params)?;
            }
            if options.diag != DiagLevel::Off {
                sink(&record);
            }
            prev = Some(record);
        }
        if done {
            return Ok(RunOutcome {
                termination: if converged {
                    Termination::Converged
                } else {
                    Termination::IterationCap
                },
                iterations: state.iter,
                certified: params.certified,
                final_record: prev.expect("final record is always computed"),
                state,
            });
        }
    }
}
