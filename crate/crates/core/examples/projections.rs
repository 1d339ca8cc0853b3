//! Projections onto the primitive sets and their relaxed versions.

use gapls::{AffineSubspace, Ball, BoxSet, ConvexSet, RelaxedProjector};
use nalgebra::{dmatrix, dvector};

fn main() -> gapls::Result<()> {
    let x = dvector![3.0, -4.0, 1.0];

    let plane = AffineSubspace::from_dense(&dmatrix![1.0, 1.0, 1.0], dvector![1.0])?;
    let sets = [
        ("plane x₁+x₂+x₃ = 1", ConvexSet::from(plane)),
        ("orthant", ConvexSet::Nonnegative(3)),
        ("box [0,1]³", ConvexSet::Box(BoxSet::new(vec![0.0; 3], vec![1.0; 3])?)),
        ("second-order cone", ConvexSet::SecondOrderCone(3)),
        ("unit ball", ConvexSet::Ball(Ball::new(vec![0.0; 3], 1.0)?)),
        ("R × {0}²", ConvexSet::product(vec![ConvexSet::Free(1), ConvexSet::Zero(2)])),
    ];

    println!("x = {:?}", x.as_slice());
    for (name, set) in sets {
        let p = set.project(&x)?;
        let reflect = RelaxedProjector::new(set.clone(), 2.0)?.apply(&x)?;
        println!(
            "{name:>20}: Π x = {:>24}   dist {:.4}   reflection {:?}",
            format!("{:.4?}", p.as_slice()),
            set.distance(&x)?,
            reflect.as_slice()
        );
    }
    Ok(())
}
