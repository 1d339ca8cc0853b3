//! Generalized alternating projections on a line and a disk.
//!
//! With `α₁ = α₂ = 2` and `α = 1/2` the iteration is Douglas–Rachford. Its
//! fixed points need not lie in the intersection, but their projections onto
//! the first set do. Alternating projections (`α₁ = α₂ = α = 1`) approach
//! the intersection directly.

use gapls::{AffineSubspace, Ball, ConvexSet, GapConfig, GapOperator, Point, SolveOptions, Termination};
use nalgebra::{dmatrix, dvector};

fn run(label: &str, config: GapConfig) -> gapls::Result<()> {
    let line = AffineSubspace::from_dense(&dmatrix![1.0, 0.0], dvector![0.8])?;
    let disk = ConvexSet::Ball(Ball::new(vec![0.0, 0.0], 1.0)?);
    let case = config.case();
    let op = GapOperator::new(vec![line.into(), disk], config)?;
    let opts = SolveOptions { termination: Termination::new(1e-12, 1e-12), ..Default::default() };
    let res = op.solve(&Point::from_vec(vec![-2.0, 3.0]), &opts)?;
    println!(
        "{label:>22} ({case}): {:>4} iterations, monitored {:?} = {:.6?}, iterate {:.6?}",
        res.iterations,
        res.monitor,
        res.solution.as_slice(),
        res.final_iterate.as_slice()
    );
    Ok(())
}

fn main() -> gapls::Result<()> {
    run("alternating projections", GapConfig::new(1.0, vec![1.0, 1.0])?)?;
    run("Douglas-Rachford", GapConfig::new(0.5, vec![2.0, 2.0])?)?;
    run("GAP α₁=α₂=1.5", GapConfig::with_averagedness(0.85, vec![1.5, 1.5])?)?;
    Ok(())
}
