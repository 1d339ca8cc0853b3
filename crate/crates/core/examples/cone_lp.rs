//! Solves a small linear program through the primal-dual embedding.
//!
//! ```text
//! minimize   −x₁ − 2x₂
//! subject to x₁ + x₂ ≤ 4,  x₁ ≤ 3,  x₂ ≤ 3,  x ≥ 0
//! ```
//!
//! The optimum is `x = (1, 3)` with value −7.

use gapls::{
    bench::outer_alpha, embed, ConeProgram, ConvexSet, GapConfig, LineSearchConfig, Point, ProductSet,
    SolveOptions, Stepper,
};

fn main() -> gapls::Result<()> {
    let triplets = [(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (2, 1, 1.0), (3, 0, -1.0), (4, 1, -1.0)];
    let program = ConeProgram::from_triplets(
        5,
        2,
        &triplets,
        vec![4.0, 3.0, 3.0, 0.0, 0.0],
        vec![-1.0, -2.0],
        ProductSet::new(vec![ConvexSet::Nonnegative(5)]),
    )?;
    let embedded = embed(&program)?;

    let alphas = vec![1.95, 1.95];
    let op = embedded.operator(GapConfig::new(outer_alpha(&alphas), alphas)?)?;
    let opts = SolveOptions {
        stepper: Stepper::Projected(LineSearchConfig::default()),
        max_iter: 200_000,
        ..Default::default()
    };
    let res = op.solve(&Point::zeros(embedded.dim()), &opts)?;
    let sol = embedded.recover(&res.solution)?;

    println!("converged {} after {} iterations ({} searches accepted)", res.converged, res.iterations, res.stats.accepted);
    println!("x = [{:.6}, {:.6}]   objective {:.6}", sol.x[0], sol.x[1], -sol.x[0] - 2.0 * sol.x[1]);
    println!("y = {:.6?}", sol.y.as_slice());
    println!("gap {:.2e}  primal residual {:.2e}  dual residual {:.2e}", sol.gap, sol.primal_residual, sol.dual_residual);
    Ok(())
}
