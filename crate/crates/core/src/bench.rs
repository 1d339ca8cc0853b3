//! The random nonnegative-feasibility experiment and parameter sweeps over
//! `α_1 = α_2`.
//!
//! Instances are `find z : Q(z − p) = 0, z ≥ 0` with `Q` an `m × n` standard
//! normal matrix drawn from [`GaussianStream`] (row-major, seed `seed`),
//! followed by `n` more normals for the starting point, and `p = p_scale · 1`.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gap::{beta, GapConfig, GapOperator, SolveOptions, SolveResult, Stepper, Termination};
use crate::linesearch::LineSearchConfig;
use crate::projections::{AffineSubspace, ConvexSet, Point};
use crate::rng::GaussianStream;

/// Environment variable capping the sweep's worker threads.
pub const THREADS_ENV: &str = "GAPLS_THREADS";

/// Averagedness constant targeted by the default outer relaxation rule.
pub const TARGET_AVERAGEDNESS: f64 = 0.85;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[serde(rename = "none")]
    Nominal,
    Basic,
    Projected,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Nominal => "none",
            Mode::Basic => "basic",
            Mode::Projected => "projected",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "none" | "nominal" => Ok(Mode::Nominal),
            "basic" => Ok(Mode::Basic),
            "projected" => Ok(Mode::Projected),
            other => Err(format!("unknown mode '{other}' (expected none, basic or projected)")),
        }
    }
}

impl Mode {
    pub fn stepper(self, ls: &LineSearchConfig) -> Stepper {
        match self {
            Mode::Nominal => Stepper::Nominal,
            Mode::Basic => Stepper::Basic(ls.clone()),
            Mode::Projected => Stepper::Projected(ls.clone()),
        }
    }
}

/// `α = 0.85/β`, or `α = 0.85` when some `α_i = 2` leaves β undefined.
pub fn outer_alpha(alphas: &[f64]) -> f64 {
    match beta(alphas) {
        Ok(b) => TARGET_AVERAGEDNESS / b,
        Err(_) => TARGET_AVERAGEDNESS,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub m: usize,
    pub n: usize,
    pub p_scale: f64,
    pub seed: u64,
    /// Values of `α_1 = α_2`.
    pub alpha_grid: Vec<f64>,
    /// Replaces the `0.85/β` rule when set.
    pub alpha_override: Option<f64>,
    pub mode: Mode,
    pub tol: f64,
    pub max_iter: usize,
    pub line_search: LineSearchConfig,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            m: 50,
            n: 100,
            p_scale: 1e-7,
            seed: 1,
            alpha_grid: default_grid(),
            alpha_override: None,
            mode: Mode::Nominal,
            tol: 1e-10,
            max_iter: 10_000_000,
            line_search: LineSearchConfig::default(),
        }
    }
}

/// `1.00, 1.05, …, 2.00`
pub fn default_grid() -> Vec<f64> {
    (0..=20).map(|i| 1.0 + i as f64 * 0.05).collect()
}

/// A generated instance: `C = {z : Q z = Q p}`, `D = {z ≥ 0}`.
#[derive(Debug, Clone)]
pub struct Instance {
    pub q: DMatrix<f64>,
    pub p: DVector<f64>,
    pub x0: Point,
    pub affine: AffineSubspace,
    pub tol: f64,
}

impl Instance {
    pub fn sets(&self) -> Vec<ConvexSet> {
        vec![self.affine.clone().into(), ConvexSet::Nonnegative(self.q.ncols())]
    }

    /// `‖Q(z − p)‖ ≤ tol` and `z ≥ 0` exactly.
    pub fn termination(&self) -> Termination {
        Termination::new(self.tol, 0.0)
    }

    /// Checks the criterion directly on `z`.
    pub fn is_solution(&self, z: &Point) -> bool {
        (&self.q * (z - &self.p)).norm() <= self.tol && z.iter().all(|v| *v >= 0.0)
    }

    pub fn operator(&self, alpha1: f64, alpha2: f64, alpha: Option<f64>) -> Result<GapOperator> {
        let alphas = vec![alpha1, alpha2];
        let alpha = alpha.unwrap_or_else(|| outer_alpha(&alphas));
        GapOperator::new(self.sets(), GapConfig::new(alpha, alphas)?)
    }
}

pub fn generate_instance(spec: &ExperimentSpec) -> Result<Instance> {
    let mut g = GaussianStream::new(spec.seed);
    let q = g.matrix(spec.m, spec.n);
    let x0 = g.vector(spec.n);
    let p = DVector::from_element(spec.n, spec.p_scale);
    let affine = AffineSubspace::from_dense(&q, &q * &p)?;
    Ok(Instance { q, p, x0, affine, tol: spec.tol })
}

/// One row of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub alpha1: f64,
    pub alpha: f64,
    pub mode: Mode,
    pub iterations: usize,
    pub converged: bool,
    pub ls_triggered: usize,
    pub ls_accepted: usize,
    pub candidates_total: usize,
    pub final_residual: f64,
    pub wall_time_s: f64,
}

impl RunRecord {
    /// Equality ignoring `wall_time_s`.
    pub fn same_outcome(&self, other: &Self) -> bool {
        Self { wall_time_s: 0.0, ..self.clone() } == Self { wall_time_s: 0.0, ..other.clone() }
    }
}

/// Solves `instance` at `α_1 = α_2 = alpha1`.
pub fn run_one(
    instance: &Instance,
    alpha1: f64,
    alpha_override: Option<f64>,
    mode: Mode,
    line_search: &LineSearchConfig,
    max_iter: usize,
) -> Result<(RunRecord, SolveResult)> {
    let op = instance.operator(alpha1, alpha1, alpha_override)?;
    let opts = SolveOptions {
        termination: instance.termination(),
        max_iter,
        stepper: mode.stepper(line_search),
        use_affine_cache: true,
        record_history: true,
    };
    let start = Instant::now();
    let res = op.solve(&instance.x0, &opts)?;
    let wall_time_s = start.elapsed().as_secs_f64();
    let rec = RunRecord {
        alpha1,
        alpha: op.config().alpha(),
        mode,
        iterations: res.iterations,
        converged: res.converged,
        ls_triggered: res.stats.triggered,
        ls_accepted: res.stats.accepted,
        candidates_total: res.stats.candidates_total,
        final_residual: res.final_residual,
        wall_time_s,
    };
    Ok((rec, res))
}

fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|n| *n > 0)
}

/// Runs every grid point of `spec`; unconverged runs are recorded, not errors.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<Vec<RunRecord>> {
    let instance = generate_instance(spec)?;
    let run = || -> Result<Vec<RunRecord>> {
        spec.alpha_grid
            .par_iter()
            .map(|&a| {
                run_one(&instance, a, spec.alpha_override, spec.mode, &spec.line_search, spec.max_iter)
                    .map(|(r, _)| r)
            })
            .collect()
    };
    let mut records = match thread_cap() {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidProblem(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    sort_records(&mut records);
    Ok(records)
}

fn sort_records(records: &mut [RunRecord]) {
    records.sort_by(|a, b| a.alpha1.total_cmp(&b.alpha1).then(a.mode.cmp(&b.mode)));
}

/// Writes the records as CSV, ordered by `alpha1` then mode.
pub fn emit_csv(records: &[RunRecord], path: impl AsRef<Path>) -> Result<()> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    let mut sorted = records.to_vec();
    sort_records(&mut sorted);
    let mut w = csv::Writer::from_path(path)?;
    for r in &sorted {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentSpec {
        ExperimentSpec { m: 5, n: 10, seed: 3, ..Default::default() }
    }

    #[test]
    fn instance_is_deterministic_and_p_is_feasible() {
        let a = generate_instance(&small()).unwrap();
        let b = generate_instance(&small()).unwrap();
        assert_eq!(a.q, b.q);
        assert_eq!(a.x0, b.x0);
        assert!(a.is_solution(&a.p));
        assert!(a.termination().is_satisfied(&a.operator(1.0, 1.0, None).unwrap(), &a.p));
    }

    #[test]
    fn outer_alpha_rule() {
        assert!((outer_alpha(&[1.0, 1.0]) - 0.85 * 1.5).abs() < 1e-15);
        assert_eq!(outer_alpha(&[2.0, 2.0]), 0.85);
    }

    #[test]
    fn mode_names() {
        for m in [Mode::Nominal, Mode::Basic, Mode::Projected] {
            assert_eq!(m.to_string().parse::<Mode>().unwrap(), m);
        }
        assert!("fast".parse::<Mode>().is_err());
    }

    #[test]
    fn empty_csv_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(emit_csv(&[], dir.path().join("x.csv")), Err(Error::EmptyRecords)));
    }
}
