//! The `ladmm` command line.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ladmm::{validate_parameters, DiagLevel, DiagnosticsRecord, GapMode, SpectralConstants, Termination};

use crate::config::{IntProgConfig, LassoConfig, ParamChoice, QuadraticTarget};
use crate::error::{ExpError, Result};
use crate::experiment::{intprog_report, lasso_report, run_intprog, run_lasso};
use crate::report::RunReport;
use crate::trace::TraceWriter;

pub const THREADS_ENV: &str = "LADMM_THREADS";

#[derive(Debug, Parser)]
#[command(name = "ladmm", about = "Parallel linearized ADMM experiments", disable_version_flag = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Nonconvex-penalty LASSO on a seeded Gaussian instance.
    Lasso(LassoArgs),
    /// Integer programming over an integer range via the x = y splitting.
    Intprog(IntProgArgs),
    /// Print the parameter certificate (derived, or validated) as JSON.
    CheckParams(CheckArgs),
    /// Print the version.
    Version,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Alg,
    Exp,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DiagArg {
    Off,
    Trace,
    Assert,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ParamsArg {
    Auto,
}

#[derive(Debug, Args)]
struct ParamArgs {
    /// Use the derived certified parameters (the default).
    #[arg(long, value_enum, conflicts_with_all = ["beta", "lx", "ly"])]
    params: Option<ParamsArg>,
    #[arg(long, requires_all = ["lx", "ly"])]
    beta: Option<f64>,
    #[arg(long, requires_all = ["beta", "ly"])]
    lx: Option<f64>,
    #[arg(long, requires_all = ["beta", "lx"])]
    ly: Option<f64>,
}

impl ParamArgs {
    fn choice(&self) -> ParamChoice {
        match (self.beta, self.lx, self.ly) {
            (Some(beta), Some(l_x), Some(l_y)) => ParamChoice::Manual { beta, l_x, l_y },
            _ => ParamChoice::Derived,
        }
    }
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    max_iters: usize,
    #[arg(long, value_enum, default_value = "exp")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "trace")]
    diag: DiagArg,
    /// Directory receiving trace.csv and report.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print elapsed wall-clock time to stderr.
    #[arg(long)]
    time: bool,
    #[command(flatten)]
    params: ParamArgs,
}

impl RunArgs {
    fn mode(&self) -> GapMode {
        match self.mode {
            ModeArg::Alg => GapMode::AlgorithmGap,
            ModeArg::Exp => GapMode::ExperimentGap,
        }
    }

    fn diag(&self) -> DiagLevel {
        match self.diag {
            DiagArg::Off => DiagLevel::Off,
            DiagArg::Trace => DiagLevel::Trace,
            DiagArg::Assert => DiagLevel::Assert,
        }
    }
}

#[derive(Debug, Args)]
struct LassoArgs {
    #[arg(long, default_value_t = 1024)]
    n: usize,
    #[arg(long, default_value_t = 256)]
    m: usize,
    #[arg(long, default_value_t = 0.1)]
    lambda: f64,
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    #[arg(long, default_value_t = 1)]
    blocks: usize,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Args)]
struct IntProgArgs {
    /// Integer range `LO..HI`, both ends included.
    #[arg(long, default_value = "0..5", value_parser = parse_range)]
    set: (i64, i64),
    /// Center `c` of the target `a (t − c)²`; drawn from the seed when absent.
    #[arg(long, allow_hyphen_values = true)]
    target: Option<f64>,
    /// Curvature `a` of the target.
    #[arg(long, default_value_t = 1.0)]
    curvature: f64,
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long, default_value_t = 0.0)]
    lg: f64,
    #[arg(long, default_value_t = 2.0)]
    lh: f64,
    #[arg(long, default_value_t = 1.0)]
    la: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda_bb: f64,
    #[command(flatten)]
    params: ParamArgs,
}

fn parse_range(s: &str) -> std::result::Result<(i64, i64), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected LO..HI, got {s:?}"))?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("bad lower end: {e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("bad upper end: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok((lo, hi))
}

fn threads_from_env() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| ExpError::Config(format!("{THREADS_ENV} must be a nonnegative integer, got {v:?}"))),
        Err(_) => Ok(0),
    }
}

/// Streams records to `dir/trace.csv` when an output directory is set.
struct TraceSink {
    writer: Option<TraceWriter<BufWriter<File>>>,
    error: Option<ExpError>,
}

impl TraceSink {
    fn open(out: Option<&Path>) -> Result<Self> {
        let writer = match out {
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                Some(TraceWriter::new(BufWriter::new(File::create(dir.join("trace.csv"))?)))
            }
            None => None,
        };
        Ok(TraceSink { writer, error: None })
    }

    fn push(&mut self, record: &DiagnosticsRecord) {
        if self.error.is_some() {
            return;
        }
        if let Some(w) = self.writer.as_mut() {
            if let Err(e) = w.write(record) {
                self.error = Some(e);
            }
        }
    }

    fn close(self) -> Result<()> {
        if let Some(e) = self.error {
            return Err(e);
        }
        if let Some(w) = self.writer {
            w.finish()?.flush()?;
        }
        Ok(())
    }
}

fn finish_run(mut report: RunReport, out: Option<&Path>, elapsed: f64, time: bool, stdout: &mut dyn Write) -> Result<i32> {
    if time {
        eprintln!("elapsed: {elapsed:.3} s");
        report.elapsed_seconds = Some(elapsed);
    }
    if let Some(dir) = out {
        report.trace_path = Some(dir.join("trace.csv").display().to_string());
        report.write(&dir.join("report.json"))?;
    }
    writeln!(stdout, "{}", report.to_json()?)?;
    Ok(match report.termination {
        Termination::Converged => 0,
        Termination::IterationCap => 2,
    })
}

fn cmd_lasso(args: &LassoArgs, stdout: &mut dyn Write) -> Result<i32> {
    let r = &args.run;
    let config = LassoConfig {
        n: args.n,
        m: args.m,
        lambda: args.lambda,
        eta: args.eta,
        seed: r.seed,
        blocks: args.blocks,
        params: r.params.choice(),
        epsilon: r.eps.unwrap_or(1e-4),
        mode: r.mode(),
        max_iters: r.max_iters,
        diag: r.diag(),
        out: r.out.clone(),
    };
    config.validate()?;
    let threads = threads_from_env()?;
    let mut sink = TraceSink::open(r.out.as_deref())?;
    let result = run_lasso(&config, threads, |rec| sink.push(rec));
    sink.close()?;
    let run = result?;
    finish_run(lasso_report(&config, &run), r.out.as_deref(), run.elapsed.as_secs_f64(), r.time, stdout)
}

fn cmd_intprog(args: &IntProgArgs, stdout: &mut dyn Write) -> Result<i32> {
    let r = &args.run;
    let config = IntProgConfig {
        lo: args.set.0,
        hi: args.set.1,
        target: args.target.map(|c| QuadraticTarget::centered(args.curvature, c)),
        mu: args.mu,
        seed: r.seed,
        params: r.params.choice(),
        epsilon: r.eps.unwrap_or(1e-8),
        mode: r.mode(),
        max_iters: r.max_iters,
        diag: r.diag(),
        out: r.out.clone(),
    };
    config.validate()?;
    let threads = threads_from_env()?;
    let mut sink = TraceSink::open(r.out.as_deref())?;
    let result = run_intprog(&config, threads, |rec| sink.push(rec));
    sink.close()?;
    let run = result?;
    finish_run(intprog_report(&config, &run), r.out.as_deref(), run.elapsed.as_secs_f64(), r.time, stdout)
}

fn cmd_check(args: &CheckArgs, stdout: &mut dyn Write) -> Result<i32> {
    let constants = SpectralConstants::new(args.la, args.lambda_bb, args.lg, args.lh);
    let cert = match args.params.choice() {
        ParamChoice::Derived => ladmm::derive_parameters(&constants, args.lg, args.lh)?,
        ParamChoice::Manual { beta, l_x, l_y } => {
            validate_parameters(beta, l_x, l_y, &constants, args.lg, args.lh)
        }
    };
    writeln!(stdout, "{}", serde_json::to_string_pretty(&cert)?)?;
    Ok(if cert.certified { 0 } else { 4 })
}

/// Parses `args` (program name first) and runs the command, writing normal
/// output to `stdout`. Returns the process exit code.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
        }
    };
    let result = match &cli.command {
        Command::Lasso(a) => cmd_lasso(a, stdout),
        Command::Intprog(a) => cmd_intprog(a, stdout),
        Command::CheckParams(a) => cmd_check(a, stdout),
        Command::Version => writeln!(stdout, "ladmm {}", env!("CARGO_PKG_VERSION"))
            .map(|_| 0)
            .map_err(ExpError::from),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parser() {
        assert_eq!(parse_range("0..5"), Ok((0, 5)));
        assert_eq!(parse_range("-3..-1"), Ok((-3, -1)));
        assert!(parse_range("5..0").is_err());
        assert!(parse_range("5").is_err());
    }

    #[test]
    fn manual_params_need_all_three() {
        let mut out = Vec::new();
        assert_eq!(run_cli(["ladmm", "check-params", "--beta", "12"], &mut out), 3);
        assert_eq!(
            run_cli(["ladmm", "check-params", "--params", "auto", "--beta", "1", "--lx", "1", "--ly", "1"], &mut out),
            3
        );
    }
}
