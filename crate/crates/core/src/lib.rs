//! Generalized alternating projections (GAP) for convex feasibility problems,
//! with line searches along the fixed-point residual.
//!
//! A [`GapOperator`] combines relaxed projections onto a list of sets. Its
//! [`solve`](GapOperator::solve) method iterates the averaged map with one of
//! three steppers: the plain iteration, a basic residual line search, or a
//! projected line search for two-set problems whose first set is affine.
//! [`embed`] turns a conic program into such a problem, [`bench`](mod@bench) reproduces the
//! random nonnegative-feasibility experiment, and [`cli`](mod@cli) backs the `gapls`
//! binary.
#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod bench;
pub mod cli;
pub mod cone;
pub mod error;
pub mod gap;
pub mod io;
pub mod linesearch;
pub mod projections;
pub mod rng;

pub use cone::{dual_cone, embed, ConeProgram, EmbeddedFeasibility, PrimalDualSolution};
pub use error::{Error, Result};
pub use gap::{GapConfig, GapOperator, SolveOptions, SolveResult, Stepper, Termination};
pub use linesearch::{LineSearchConfig, Strategy, TriggerRule};
pub use projections::{AffineSubspace, Ball, BoxSet, ConvexSet, Point, ProductSet, RelaxedProjector};
