use serde::{Deserialize, Serialize};

use super::{Lemma, StepInfo};
use crate::certify::Certificate;
use crate::error::{Error, Result};
use crate::linalg::{dist, norm};
use crate::model::{coupling_terms, objective_unchecked, residuals, IterateState, ProblemSpec};

/// Descent-inequality tolerance, relative to `1 + |L_β|`.
pub const DESCENT_TOL: f64 = 1e-9;
/// Lyapunov monotonicity tolerance, relative to `1 + |m_k|`.
pub const MONOTONE_TOL: f64 = 1e-8;

/// Everything measured at the end of one iteration `k → k+1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub iter: usize,
    /// `L_β(x^{k+1}, y^{k+1}, γ^{k+1})`.
    pub l_beta: f64,
    /// `L_β + C_m ‖y^{k+1} − y^k‖²`.
    pub m_k: f64,
    pub objective: f64,
    pub dx: f64,
    pub dy: f64,
    pub dgamma: f64,
    pub feas: f64,
    pub kkt_x: f64,
    pub kkt_y: f64,
    /// `(L_β(x^k,y^k,γ^k) − L_β(x^{k+1},y^k,γ^k)) − C_0‖Δx‖²`.
    pub slack_x: f64,
    /// `(L_β(x^{k+1},y^k,γ^k) − L_β(x^{k+1},y^{k+1},γ^k)) − C_1‖Δy‖²`.
    pub slack_y: f64,
    /// `C_2‖Δx‖² + C_3‖Δy‖² + C_4‖y^k − y^{k−1}‖² − ‖Δγ‖²/β`.
    pub slack_gamma: f64,
    /// `‖Bᵀγ^{k+1} + ∇_y g(x^{k+1},y^k) + ∇h(y^k) + L_y(y^{k+1} − y^k)‖`.
    pub gamma_identity: f64,
    pub gamma_norm: f64,
}

fn lagrangian(obj: f64, gamma: &[f64], ax: &[f64], by: &[f64], beta: f64) -> f64 {
    if obj == f64::INFINITY {
        f64::INFINITY
    } else {
        obj + coupling_terms(gamma, ax, by, beta)
    }
}

/// Builds the record for the iteration that produced `state`.
///
/// `prev_record` is reused for `L_β(x^k, y^k, γ^k)` when it describes the
/// immediately preceding iteration.
pub fn compute_diagnostics(
    spec: &ProblemSpec,
    state: &IterateState,
    params: &Certificate,
    step: &StepInfo,
    prev_record: Option<&DiagnosticsRecord>,
) -> Result<DiagnosticsRecord> {
    let res = residuals(state)?;
    let beta = params.beta;

    let l0 = match prev_record {
        Some(p) if p.iter + 1 == state.iter => p.l_beta,
        _ => lagrangian(
            objective_unchecked(spec, &state.x_prev, &state.y_prev),
            &state.gamma_prev,
            &step.ax_old,
            &step.by_old,
            beta,
        ),
    };
    let l1 = lagrangian(
        objective_unchecked(spec, &state.x, &state.y_prev),
        &state.gamma_prev,
        &state.ax,
        &step.by_old,
        beta,
    );
    let objective = objective_unchecked(spec, &state.x, &state.y);
    let l2 = lagrangian(objective, &state.gamma_prev, &state.ax, &state.by, beta);
    let l3 = lagrangian(objective, &state.gamma, &state.ax, &state.by, beta);

    let dx2 = res.dx * res.dx;
    let dy2 = res.dy * res.dy;
    let dy_prev = dist(&state.y_prev, &state.y_prev2);

    // w = γ + β r at the new iterate
    let w: Vec<f64> = state
        .gamma
        .iter()
        .zip(&state.ax)
        .zip(&state.by)
        .map(|((g, a), b)| g + beta * (a + b))
        .collect();
    let grads = spec.g_gradient(&state.x, &state.y);

    let mut ky = vec![0.0; spec.y_dim()];
    spec.h().gradient(&state.y, &mut ky);
    if let Some((_, gy)) = &grads {
        ky.iter_mut().zip(gy).for_each(|(k, g)| *k += g);
    }
    let btw = spec.b().tr_mul_vec(&w);
    ky.iter_mut().zip(&btw).for_each(|(k, v)| *k += v);

    // d̄ = ∇_x g(new) − [bracket + L_x(x⁺ − x)] + Aᵀ(γ⁺ + βr⁺)
    let mut kx = spec.apply_a_t(&w);
    for (j, k) in kx.iter_mut().enumerate() {
        *k -= step.x_bracket[j] + params.l_x * (state.x[j] - state.x_prev[j]);
    }
    if let Some((gx, _)) = &grads {
        kx.iter_mut().zip(gx).for_each(|(k, g)| *k += g);
    }

    let mut ident = spec.b().tr_mul_vec(&state.gamma);
    for (j, v) in ident.iter_mut().enumerate() {
        *v += step.y_lin_grad[j] + params.l_y * (state.y[j] - state.y_prev[j]);
    }

    Ok(DiagnosticsRecord {
        iter: state.iter,
        l_beta: l3,
        m_k: l3 + params.c_m * dy2,
        objective,
        dx: res.dx,
        dy: res.dy,
        dgamma: res.dgamma,
        feas: res.feas,
        kkt_x: norm(&kx),
        kkt_y: norm(&ky),
        slack_x: (l0 - l1) - params.c0 * dx2,
        slack_y: (l1 - l2) - params.c1 * dy2,
        slack_gamma: params.c2 * dx2 + params.c3 * dy2 + params.c4 * dy_prev * dy_prev
            - res.dgamma * res.dgamma / beta,
        gamma_identity: norm(&ident),
        gamma_norm: norm(&state.gamma),
    })
}

/// Enforces the monitored inequalities on `record`. The dual-ascent bound
/// (from the second iteration on) and Lyapunov monotonicity are only
/// enforced for certified parameters.
pub fn check_invariants(
    record: &DiagnosticsRecord,
    prev: Option<&DiagnosticsRecord>,
    params: &Certificate,
) -> Result<()> {
    let fail = |lemma, value, tolerance| {
        Err(Error::Invariant {
            lemma,
            iter: record.iter,
            value,
            tolerance,
        })
    };
    let ident_tol = DESCENT_TOL * (1.0 + record.gamma_norm);
    if !(record.gamma_identity <= ident_tol) {
        return fail(Lemma::DualIdentity, -record.gamma_identity, -ident_tol);
    }
    let tol = DESCENT_TOL * (1.0 + record.l_beta.abs());
    if !(record.slack_x >= -tol) {
        return fail(Lemma::XDescent, record.slack_x, -tol);
    }
    if !(record.slack_y >= -tol) {
        return fail(Lemma::YDescent, record.slack_y, -tol);
    }
    if !params.certified {
        return Ok(());
    }
    if record.iter >= 2 && !(record.slack_gamma >= -tol) {
        return fail(Lemma::DualAscent, record.slack_gamma, -tol);
    }
    if let Some(p) = prev {
        if p.iter + 1 == record.iter && p.iter >= 1 {
            let mtol = MONOTONE_TOL * (1.0 + p.m_k.abs());
            let rise = record.m_k - p.m_k;
            if !(rise <= mtol) {
                return fail(Lemma::LyapunovMonotone, -rise, -mtol);
            }
        }
    }
    Ok(())
}
