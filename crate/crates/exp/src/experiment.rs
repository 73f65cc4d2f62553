//! End-to-end runs: build the instance, choose parameters, iterate.

use std::time::{Duration, Instant};

use ladmm::{
    derive_parameters, run, validate_parameters, Certificate, DiagLevel, DiagnosticsRecord,
    GapMode, IterateState, ProblemSpec, RunOptions, RunOutcome, SpectralConstants, StoppingRule,
};

use crate::config::{IntProgConfig, LassoConfig, ParamChoice};
use crate::error::Result;
use crate::instances::{generate_intprog, generate_lasso, IntProgInstance, LassoInstance};
use crate::report::{ConfigEcho, RunReport};

/// Parameters for `spec` under `choice`. Manual parameters are returned
/// with their validation result, certified or not.
pub fn choose_parameters(spec: &ProblemSpec, choice: &ParamChoice) -> Result<Certificate> {
    let l_g = spec.g().lipschitz_constant();
    let l_h = spec.h().lipschitz_constant();
    let constants = SpectralConstants::of(spec)?;
    Ok(match *choice {
        ParamChoice::Derived => derive_parameters(&constants, l_g, l_h)?,
        ParamChoice::Manual { beta, l_x, l_y } => {
            validate_parameters(beta, l_x, l_y, &constants, l_g, l_h)
        }
    })
}

pub struct Run<I> {
    pub instance: I,
    pub certificate: Certificate,
    pub outcome: RunOutcome,
    pub elapsed: Duration,
}

fn solve<F>(
    spec: &ProblemSpec,
    certificate: &Certificate,
    init: IterateState,
    epsilon: f64,
    mode: GapMode,
    max_iters: usize,
    diag: DiagLevel,
    threads: usize,
    sink: F,
) -> Result<RunOutcome>
where
    F: FnMut(&DiagnosticsRecord),
{
    let stopping = StoppingRule {
        epsilon,
        mode,
        max_iters,
    };
    let options = RunOptions {
        diag,
        threads,
        check_assumptions: true,
    };
    Ok(run(spec, certificate, init, &stopping, &options, sink)?)
}

/// Runs the LASSO experiment from `x⁰ = 0, y⁰ = 0, γ⁰ = 0`.
pub fn run_lasso<F>(config: &LassoConfig, threads: usize, sink: F) -> Result<Run<LassoInstance>>
where
    F: FnMut(&DiagnosticsRecord),
{
    let start = Instant::now();
    let instance = generate_lasso(config)?;
    let certificate = choose_parameters(&instance.spec, &config.params)?;
    let outcome = solve(
        &instance.spec,
        &certificate,
        IterateState::zeros(&instance.spec),
        config.epsilon,
        config.mode,
        config.max_iters,
        config.diag,
        threads,
        sink,
    )?;
    Ok(Run {
        instance,
        certificate,
        outcome,
        elapsed: start.elapsed(),
    })
}

/// Runs the integer-programming toy from the relaxed minimizer.
pub fn run_intprog<F>(config: &IntProgConfig, threads: usize, sink: F) -> Result<Run<IntProgInstance>>
where
    F: FnMut(&DiagnosticsRecord),
{
    let start = Instant::now();
    let instance = generate_intprog(config)?;
    let certificate = choose_parameters(&instance.spec, &config.params)?;
    let outcome = solve(
        &instance.spec,
        &certificate,
        instance.start.clone(),
        config.epsilon,
        config.mode,
        config.max_iters,
        config.diag,
        threads,
        sink,
    )?;
    Ok(Run {
        instance,
        certificate,
        outcome,
        elapsed: start.elapsed(),
    })
}

pub fn lasso_report(config: &LassoConfig, run: &Run<LassoInstance>) -> RunReport {
    RunReport::new(
        ConfigEcho::Lasso(config.clone()),
        config.seed,
        run.certificate.clone(),
        run.outcome.termination,
        run.outcome.iterations,
        &run.outcome.final_record,
    )
}

pub fn intprog_report(config: &IntProgConfig, run: &Run<IntProgInstance>) -> RunReport {
    let mut echo = config.clone();
    echo.target = Some(run.instance.target);
    let mut report = RunReport::new(
        ConfigEcho::Intprog(echo),
        config.seed,
        run.certificate.clone(),
        run.outcome.termination,
        run.outcome.iterations,
        &run.outcome.final_record,
    );
    report.solution = Some(run.outcome.state.x.clone());
    report
}
