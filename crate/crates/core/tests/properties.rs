mod common;

use gapls::linesearch::{cached_candidate_residual, AffineCache};
use gapls::gap::IterationState;
use gapls::rng::GaussianStream;
use gapls::{ConvexSet, GapConfig, GapOperator, Point};
use proptest::prelude::*;

use common::*;

/// A random set of kind `kind` in dimension `n`, built from `seed`.
fn set_of(seed: u64, kind: usize, n: usize) -> ConvexSet {
    let mut g = GaussianStream::new(seed);
    match kind {
        0..=3 => primitive_with_interior(&mut g, kind, n).0,
        4 => {
            let c = g.vector(n);
            affine_through(&mut g, 1 + (seed as usize) % (n - 1), &c).into()
        }
        _ => ConvexSet::product(vec![ConvexSet::Nonnegative(1), ConvexSet::SecondOrderCone(n - 1)]),
    }
}

fn point(seed: u64, n: usize, scale: f64) -> Point {
    scale * GaussianStream::new(seed).vector(n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_is_idempotent(seed in 0u64..10_000, kind in 0usize..6, n in 3usize..12) {
        let set = set_of(seed, kind, n);
        let p = set.project(&point(seed + 1, n, 4.0)).unwrap();
        let pp = set.project(&p).unwrap();
        prop_assert!((pp - &p).norm() <= 1e-12 * (1.0 + p.norm()));
    }

    #[test]
    fn projection_is_firmly_nonexpansive(seed in 0u64..10_000, kind in 0usize..6, n in 3usize..12) {
        let set = set_of(seed, kind, n);
        let x = point(seed + 1, n, 4.0);
        let y = point(seed + 2, n, 4.0);
        let d = set.project(&x).unwrap() - set.project(&y).unwrap();
        prop_assert!(d.norm_squared() <= d.dot(&(&x - &y)) + 1e-10);
    }

    #[test]
    fn projection_satisfies_variational_inequality(seed in 0u64..10_000, kind in 0usize..6, n in 3usize..12) {
        let set = set_of(seed, kind, n);
        let x = point(seed + 1, n, 4.0);
        let px = set.project(&x).unwrap();
        let z = set.project(&point(seed + 2, n, 4.0)).unwrap();
        prop_assert!((&x - &px).dot(&(&z - &px)) <= 1e-10 * (1.0 + x.norm() * z.norm()));
    }

    #[test]
    fn affine_projection_lands_on_the_subspace(seed in 0u64..10_000, n in 3usize..20) {
        let mut g = GaussianStream::new(seed);
        let c = g.vector(n);
        let a = affine_through(&mut g, 1 + seed as usize % (n - 1), &c);
        let x = 5.0 * g.vector(n);
        let p = ConvexSet::from(a.clone()).project(&x).unwrap();
        prop_assert!(a.residual_norm(p.as_slice()) <= 1e-10 * (1.0 + x.norm()));
        prop_assert!((p - affine_oracle(&a, &x)).norm() <= 1e-10 * (1.0 + x.norm()));
    }

    #[test]
    fn s_is_nonexpansive(seed in 0u64..10_000, kind in 0usize..4, n in 3usize..12, a1 in 0.1f64..2.0, a2 in 0.1f64..=2.0) {
        let mut g = GaussianStream::new(seed);
        let (set, w) = primitive_with_interior(&mut g, kind, n);
        let aff = affine_through(&mut g, 1, &w);
        let op = GapOperator::new(vec![aff.into(), set], GapConfig::new(0.5, vec![a1, a2]).unwrap()).unwrap();
        let x = 3.0 * g.vector(n);
        let y = 3.0 * g.vector(n);
        let d = op.apply_s(&x).unwrap() - op.apply_s(&y).unwrap();
        prop_assert!(d.norm() <= (&x - &y).norm() * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn t_is_averaged(seed in 0u64..10_000, kind in 0usize..4, n in 3usize..12, a1 in 0.1f64..1.99, a2 in 0.1f64..1.99) {
        let mut g = GaussianStream::new(seed);
        let (set, w) = primitive_with_interior(&mut g, kind, n);
        let aff = affine_through(&mut g, 1, &w);
        let cfg = GapConfig::with_averagedness(0.9, vec![a1, a2]).unwrap();
        let k = cfg.averagedness_constant();
        let op = GapOperator::new(vec![aff.into(), set], cfg).unwrap();
        let x = 3.0 * g.vector(n);
        let y = 3.0 * g.vector(n);
        let (tx, _) = op.apply_t(&x).unwrap();
        let (ty, _) = op.apply_t(&y).unwrap();
        let lhs = (&tx - &ty).norm_squared() + (1.0 - k) / k * ((&x - &tx) - (&y - &ty)).norm_squared();
        prop_assert!(lhs <= (&x - &y).norm_squared() + 1e-9);
    }

    #[test]
    fn cached_residual_matches_direct(seed in 0u64..10_000, kind in 0usize..4, n in 4usize..15, t in 0.0f64..20.0) {
        let mut g = GaussianStream::new(seed);
        let (set, w) = primitive_with_interior(&mut g, kind, n);
        let aff = affine_through(&mut g, 2, &w);
        let op = GapOperator::new(vec![aff.into(), set], GapConfig::with_averagedness(0.85, vec![1.7, 1.7]).unwrap()).unwrap();
        let x = 3.0 * g.vector(n);
        let mut cache = AffineCache::new(&op, &x, 0).unwrap();
        let state = IterationState::new(&op, 0, x.clone(), op.residual(&x).unwrap()).unwrap();
        cache.set_direction(&op, &state.r);
        let cached = cached_candidate_residual(&op, &cache, &state, t).unwrap();
        let xt = &x + t * &state.r;
        let direct = op.residual(&xt).unwrap().norm();
        prop_assert!((cached - direct).abs() <= 1e-9 * (1.0 + direct));
    }

    #[test]
    fn projected_candidate_residual_is_scaled_distance(seed in 0u64..10_000, n in 4usize..15, a1 in 0.1f64..=2.0, a2 in 0.1f64..=2.0, t in 0.0f64..10.0) {
        let mut g = GaussianStream::new(seed);
        let c = g.vector(n);
        let aff = affine_through(&mut g, 1 + seed as usize % (n - 1), &c);
        let op = GapOperator::new(vec![aff.clone().into(), ConvexSet::Nonnegative(n)], GapConfig::new(0.5, vec![a1, a2]).unwrap()).unwrap();
        let x = 2.0 * g.vector(n);
        let r = op.residual(&x).unwrap();
        let xp = ConvexSet::from(aff).project(&(&x + t * &r)).unwrap();
        let lhs = op.residual(&xp).unwrap().norm();
        prop_assert!((lhs - a2 * orthant_distance(&xp)).abs() <= 1e-10 * (1.0 + xp.norm()));
    }

    #[test]
    fn projected_distance_is_midpoint_convex(seed in 0u64..10_000, n in 4usize..15, a in 0.0f64..10.0, b in 0.0f64..10.0) {
        let mut g = GaussianStream::new(seed);
        let c = g.vector(n);
        let aff = ConvexSet::from(affine_through(&mut g, 1 + seed as usize % (n - 1), &c));
        let x = 2.0 * g.vector(n);
        let d = g.vector(n);
        let phi = |t: f64| orthant_distance(&aff.project(&(&x + t * &d)).unwrap());
        prop_assert!(phi(0.5 * (a + b)) <= 0.5 * (phi(a) + phi(b)) + 1e-9);
    }

    #[test]
    fn relaxed_projection_fixes_exactly_the_set(seed in 0u64..10_000, kind in 0usize..6, n in 3usize..10, a in prop::sample::select(vec![0.5, 1.0, 1.5, 2.0])) {
        let set = set_of(seed, kind, n);
        let p = gapls::RelaxedProjector::new(set.clone(), a).unwrap();
        let w = point(seed + 3, n, 4.0);
        let inside = set.project(&w).unwrap();
        prop_assert!((p.apply(&inside).unwrap() - &inside).norm() <= 1e-12 * (1.0 + inside.norm()));
        let moved = (p.apply(&w).unwrap() - &w).norm();
        prop_assert!((moved - a * set.distance(&w).unwrap()).abs() <= 1e-12 * (1.0 + w.norm()));
    }
}
