//! Random problem data shared by the integration tests.
#![allow(dead_code)]

use gapls::rng::GaussianStream;
use gapls::{AffineSubspace, Ball, BoxSet, ConvexSet, Point};
use nalgebra::{DMatrix, DVector};

pub fn gaussian(g: &mut GaussianStream, n: usize) -> Point {
    g.vector(n)
}

/// A random affine subspace of codimension `m` through `center`.
pub fn affine_through(g: &mut GaussianStream, m: usize, center: &Point) -> AffineSubspace {
    let a: DMatrix<f64> = g.matrix(m, center.len());
    let b = &a * center;
    AffineSubspace::from_dense(&a, b).expect("gaussian matrices have full row rank")
}

/// A non-affine primitive set in dimension `n` together with an interior point.
pub fn primitive_with_interior(g: &mut GaussianStream, kind: usize, n: usize) -> (ConvexSet, Point) {
    let u = g.vector(n);
    match kind % 4 {
        0 => (ConvexSet::Nonnegative(n), u.map(|v| v.abs() + 0.5)),
        1 => {
            let set = ConvexSet::Box(BoxSet::new(vec![-1.0; n], vec![2.0; n]).unwrap());
            (set, u.map(|v| 0.5 + 0.4 * v.tanh()))
        }
        2 => {
            let mut w = u.clone();
            w[0] = u.rows(1, n - 1).norm() + 1.0;
            (ConvexSet::SecondOrderCone(n), w)
        }
        _ => {
            let c = g.vector(n);
            let set = ConvexSet::Ball(Ball::new(c.as_slice().to_vec(), 3.0).unwrap());
            let w = &c + u.normalize() * 0.5;
            (set, w)
        }
    }
}

/// Euclidean projection onto the null space of a subspace's matrix.
pub fn null_direction(affine: &AffineSubspace, v: &Point) -> Point {
    affine.project_linear(v).unwrap()
}

/// Points of `C ∩ D` near the interior point `w` of `D`, where `C` passes through `w`.
pub fn intersection_samples(
    g: &mut GaussianStream,
    affine: &AffineSubspace,
    set: &ConvexSet,
    w: &Point,
    count: usize,
) -> Vec<Point> {
    let mut out = vec![w.clone()];
    while out.len() < count {
        let d = null_direction(affine, &g.vector(w.len()));
        let mut t = 1.0;
        loop {
            let x = w + t * &d;
            if set.distance(&x).unwrap() == 0.0 {
                out.push(x);
                break;
            }
            t *= 0.5;
        }
    }
    out
}

/// `dist_D` for the nonnegative orthant, computed independently of the library.
pub fn orthant_distance(x: &Point) -> f64 {
    x.iter().map(|v| v.min(0.0).powi(2)).sum::<f64>().sqrt()
}

pub fn dense(affine: &AffineSubspace) -> DMatrix<f64> {
    let a = affine.matrix();
    let mut d = DMatrix::zeros(a.nrows(), a.ncols());
    for (i, j, v) in a.triplet_iter() {
        d[(i, j)] += v;
    }
    d
}

/// Orthogonal projection onto `{z : A z = b}` through a fresh SVD pseudo-inverse.
pub fn affine_oracle(affine: &AffineSubspace, x: &Point) -> Point {
    let a = dense(affine);
    let resid = &a * x - affine.rhs();
    let pinv = a.clone().pseudo_inverse(1e-14).unwrap();
    x - pinv * resid
}

pub fn vec_of(v: &[f64]) -> Point {
    DVector::from_column_slice(v)
}
