//! Command-line front end: `solve`, `sweep` and `embed`.
//!
//! Exit status: 0 on success, 1 on I/O or data errors, 2 on usage or
//! configuration errors, 3 when a solve does not converge.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bench::{self, default_grid, emit_csv, outer_alpha, ExperimentSpec, Mode};
use crate::cone::embed;
use crate::error::Error;
use crate::gap::{GapConfig, GapOperator, SolveOptions, SolveResult, Termination};
use crate::io::{FeasibilityFile, ProblemFile};
use crate::linesearch::{LineSearchConfig, Strategy, TriggerRule};
use crate::projections::Point;
use crate::rng::GaussianStream;

pub const EXIT_ERROR: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_UNCONVERGED: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "gapls", version, about = "Generalized alternating projections with line search")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a feasibility problem or cone program read from a JSON file.
    Solve(SolveArgs),
    /// Sweep α₁ = α₂ on a random nonnegative-feasibility instance and write CSV.
    Sweep(SweepArgs),
    /// Write the primal-dual feasibility embedding of a cone program.
    Embed(EmbedArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    None,
    Basic,
    Projected,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::None => Mode::Nominal,
            ModeArg::Basic => Mode::Basic,
            ModeArg::Projected => Mode::Projected,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum StrategyArg {
    Forward,
    Golden,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TriggerArg {
    Misaligned,
    Aligned,
}

#[derive(Debug, Args)]
pub struct LineSearchArgs {
    #[arg(long, value_enum, default_value = "none")]
    pub mode: ModeArg,
    /// Required relative decrease ε for accepting a step.
    #[arg(long, default_value_t = 0.01)]
    pub eps: f64,
    /// Largest step tried (default: α · 1.4^18).
    #[arg(long)]
    pub alpha_max: Option<f64>,
    #[arg(long, default_value_t = 1e-4)]
    pub trigger_tol: f64,
    /// Fire on misaligned (cos < 1 − tol) or aligned (cos > 1 − tol) residuals.
    #[arg(long, value_enum, default_value = "misaligned")]
    pub trigger: TriggerArg,
    #[arg(long, value_enum, default_value = "forward")]
    pub strategy: StrategyArg,
}

impl LineSearchArgs {
    fn config(&self) -> LineSearchConfig {
        LineSearchConfig {
            epsilon: self.eps,
            alpha_max: self.alpha_max,
            trigger_tol: self.trigger_tol,
            trigger_rule: match self.trigger {
                TriggerArg::Misaligned => TriggerRule::Misaligned,
                TriggerArg::Aligned => TriggerRule::Aligned,
            },
            strategy: match self.strategy {
                StrategyArg::Forward => Strategy::ForwardTrack,
                StrategyArg::Golden => Strategy::GoldenSection,
            },
            ..LineSearchConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Problem file (cone program or feasibility problem).
    pub file: PathBuf,
    #[command(flatten)]
    pub ls: LineSearchArgs,
    #[arg(long, default_value_t = 1.95)]
    pub alpha1: f64,
    /// Defaults to `--alpha1`.
    #[arg(long)]
    pub alpha2: Option<f64>,
    /// Outer relaxation; defaults to 0.85/β (0.85 if some αᵢ = 2).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Start from a standard normal point drawn with this seed instead of zero.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Tolerance on the affine residual of the monitored point.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_iter: usize,
    /// Write the solution as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub ls: LineSearchArgs,
    /// Run a single grid point instead of 1.00, 1.05, …, 2.00.
    #[arg(long)]
    pub alpha1: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 50)]
    pub m: usize,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000_000)]
    pub max_iter: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// Cone program file.
    pub file: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses the process arguments and runs the selected command.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_UNCONVERGED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidConfig(_) | Error::BetaDomain(_) | Error::InvalidLineSearch(_) => EXIT_USAGE,
        _ => EXIT_ERROR,
    }
}

/// Runs a command; `Ok(false)` means it finished but did not converge.
pub fn run(command: Command) -> crate::Result<bool> {
    match command {
        Command::Solve(a) => solve(&a),
        Command::Sweep(a) => sweep(&a),
        Command::Embed(a) => {
            let ProblemFile::Cone(f) = ProblemFile::read(&a.file)? else {
                return Err(Error::InvalidProblem("embed expects a cone program file".into()));
            };
            let e = embed(&f.to_program()?)?;
            FeasibilityFile::from_embedding(&e)?.write(&a.out)?;
            println!(
                "wrote {} ({} rows, {} columns)",
                a.out.display(),
                e.matrix().nrows(),
                e.matrix().ncols()
            );
            Ok(true)
        }
    }
}

fn solve(a: &SolveArgs) -> crate::Result<bool> {
    let alphas = vec![a.alpha1, a.alpha2.unwrap_or(a.alpha1)];
    let config = GapConfig::new(a.alpha.unwrap_or_else(|| outer_alpha(&alphas)), alphas)?;
    let opts = SolveOptions {
        termination: Termination::new(a.tol, 0.0),
        max_iter: a.max_iter,
        stepper: Mode::from(a.ls.mode).stepper(&a.ls.config()),
        ..SolveOptions::default()
    };
    let start = |op: &GapOperator| -> Point {
        match a.seed {
            Some(s) => GaussianStream::new(s).vector(op.dim()),
            None => Point::zeros(op.dim()),
        }
    };

    let (res, mut report) = match ProblemFile::read(&a.file)? {
        ProblemFile::Cone(f) => {
            let e = embed(&f.to_program()?)?;
            let op = e.operator(config)?;
            let res = op.solve(&start(&op), &opts)?;
            let sol = e.recover(&res.solution)?;
            println!("objective {:.10e}", sol.x.dot(e.program().c()));
            println!("gap {:.3e}", sol.gap);
            println!("primal residual {:.3e}", sol.primal_residual);
            println!("dual residual {:.3e}", sol.dual_residual);
            let report = json!({
                "x": sol.x.as_slice(), "s": sol.s.as_slice(), "y": sol.y.as_slice(),
                "gap": sol.gap, "primal_residual": sol.primal_residual, "dual_residual": sol.dual_residual,
            });
            (res, report)
        }
        ProblemFile::Feasibility(f) => {
            let prob = f.to_problem()?;
            let op = GapOperator::new(prob.sets(), config)?;
            let res = op.solve(&start(&op), &opts)?;
            let violation = opts.termination.violation(&op, &res.solution);
            println!("violation {violation:.3e}");
            let report = json!({ "z": res.solution.as_slice(), "violation": violation });
            (res, report)
        }
    };
    print_summary(&res);
    if let Some(out) = &a.out {
        report["converged"] = json!(res.converged);
        report["iterations"] = json!(res.iterations);
        std::fs::write(out, serde_json::to_string_pretty(&report)?)?;
    }
    Ok(res.converged)
}

fn print_summary(res: &SolveResult) {
    println!(
        "{} after {} iterations (stop: {:?})",
        if res.converged { "converged" } else { "not converged" },
        res.iterations,
        res.stop_reason
    );
    println!("residual {:.3e}", res.final_residual);
    println!(
        "line search: {} triggered, {} accepted, {} candidates",
        res.stats.triggered, res.stats.accepted, res.stats.candidates_total
    );
}

fn sweep(a: &SweepArgs) -> crate::Result<bool> {
    let spec = ExperimentSpec {
        m: a.m,
        n: a.n,
        seed: a.seed,
        alpha_grid: a.alpha1.map_or_else(default_grid, |v| vec![v]),
        alpha_override: a.alpha,
        mode: a.ls.mode.into(),
        tol: a.tol,
        max_iter: a.max_iter,
        line_search: a.ls.config(),
        ..ExperimentSpec::default()
    };
    let records = bench::run_sweep(&spec)?;
    emit_csv(&records, &a.out)?;
    for r in &records {
        println!(
            "alpha1 {:.2}  {:>9}  {:>8} iterations  converged {}",
            r.alpha1, r.mode, r.iterations, r.converged
        );
    }
    Ok(true)
}
