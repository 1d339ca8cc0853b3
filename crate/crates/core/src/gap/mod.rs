//! The generalized alternating projections (GAP) operator
//!
//! ```text
//! T = (1 − α) Id + α S,    S = P^{α_p}_{C_p} ⋯ P^{α_1}_{C_1}
//! ```
//!
//! **Ordering:** `alphas[0]` and `sets[0]` form the *first-applied* projector
//! `P^{α_1}_{C_1}`; the composition is applied left to right over the list.

mod solve;

pub use solve::{
    IterationState, LineSearchStats, SolveOptions, SolveResult, Stepper, StopReason,
};

use std::fmt;

use crate::error::{Error, Result};
use crate::projections::{check_dim, ConvexSet, Point, RelaxedProjector};

/// `β = Σ a_i/(2−a_i) / (1 + Σ a_i/(2−a_i))`; undefined when any `a_i = 2`.
pub fn beta(alphas: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    for &a in alphas {
        if !(a > 0.0 && a < 2.0) {
            return Err(Error::BetaDomain(a));
        }
        sum += a / (2.0 - a);
    }
    Ok(sum / (1.0 + sum))
}

/// Which parameter regime makes the GAP operator averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssumptionCase {
    /// all `α_i ∈ (0, 2)` and `α ∈ (0, 1/β)`
    A1,
    /// `α ∈ (0, 1)`, `α_i ∈ (0, 2]`, at most one `α_i = 2`
    A2,
    /// `α ∈ (0, 1)`, two sets, `α_1 = α_2 = 2` (Douglas–Rachford)
    A3,
}

impl fmt::Display for AssumptionCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AssumptionCase::A1 => "A1",
            AssumptionCase::A2 => "A2",
            AssumptionCase::A3 => "A3",
        };
        f.write_str(s)
    }
}

/// Returns the first satisfied case (A1 is preferred where A1 and A2 overlap,
/// since `αβ < α` is the tighter averagedness constant).
pub fn validate(alpha: f64, alphas: &[f64], p: usize) -> Result<AssumptionCase> {
    let mut why = Vec::new();
    if alphas.len() != p {
        return Err(Error::InvalidConfig(vec![format!(
            "{} relaxation parameters for {p} sets",
            alphas.len()
        )]));
    }
    if p == 0 {
        return Err(Error::InvalidConfig(vec!["at least one set is required".into()]));
    }
    let alpha_ok = alpha.is_finite() && alpha > 0.0;

    // A1
    let bad_open: Vec<_> = alphas.iter().filter(|a| !(**a > 0.0 && **a < 2.0)).collect();
    if bad_open.is_empty() {
        let b = beta(alphas)?;
        if alpha_ok && alpha < 1.0 / b {
            return Ok(AssumptionCase::A1);
        }
        why.push(format!("A1: alpha {alpha} not in (0, 1/beta) = (0, {})", 1.0 / b));
    } else {
        why.push(format!("A1: relaxations {bad_open:?} not in (0, 2)"));
    }

    let alpha_unit = alpha_ok && alpha < 1.0;
    let in_closed = alphas.iter().all(|a| *a > 0.0 && *a <= 2.0);
    let twos = alphas.iter().filter(|a| **a == 2.0).count();

    // A2
    let mut a2 = Vec::new();
    if !alpha_unit {
        a2.push(format!("alpha {alpha} not in (0, 1)"));
    }
    if !in_closed {
        a2.push("some relaxation not in (0, 2]".to_string());
    }
    if twos > 1 {
        a2.push(format!("{twos} relaxations equal 2 (at most one allowed)"));
    }
    if a2.is_empty() {
        return Ok(AssumptionCase::A2);
    }
    why.push(format!("A2: {}", a2.join(", ")));

    // A3
    let mut a3 = Vec::new();
    if !alpha_unit {
        a3.push(format!("alpha {alpha} not in (0, 1)"));
    }
    if p != 2 {
        a3.push(format!("p = {p}, needs 2"));
    }
    if !(p == 2 && twos == 2) {
        a3.push("needs alpha_1 = alpha_2 = 2".to_string());
    }
    if a3.is_empty() {
        return Ok(AssumptionCase::A3);
    }
    why.push(format!("A3: {}", a3.join(", ")));
    Err(Error::InvalidConfig(why))
}

/// Relaxation parameters of a GAP operator, validated against the assumption cases.
#[derive(Debug, Clone, PartialEq)]
pub struct GapConfig {
    alpha: f64,
    alphas: Vec<f64>,
    case: AssumptionCase,
}

impl GapConfig {
    pub fn new(alpha: f64, alphas: Vec<f64>) -> Result<Self> {
        let case = validate(alpha, &alphas, alphas.len())?;
        Ok(Self { alpha, alphas, case })
    }

    /// Picks `α` so the averagedness constant equals `target`: `α = target/β`
    /// when every `α_i < 2`, otherwise `α = target` (β is undefined there).
    pub fn with_averagedness(target: f64, alphas: Vec<f64>) -> Result<Self> {
        let alpha = match beta(&alphas) {
            Ok(b) => target / b,
            Err(_) => target,
        };
        Self::new(alpha, alphas)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn case(&self) -> AssumptionCase {
        self.case
    }

    /// `αβ` under A1, `α` under A2/A3.
    pub fn averagedness_constant(&self) -> f64 {
        match self.case {
            AssumptionCase::A1 => self.alpha * beta(&self.alphas).expect("A1 implies beta is defined"),
            AssumptionCase::A2 | AssumptionCase::A3 => self.alpha,
        }
    }
}

/// Which projected sequence a monitored point comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonitorLabel {
    /// `Π_{C_1} x`
    FirstProjection,
    /// `Π_{C_p} ⋯ Π_{C_2} Π_{C_1} x`
    ProjectionChain,
}

impl fmt::Display for MonitorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonitorLabel::FirstProjection => f.write_str("first-projection"),
            MonitorLabel::ProjectionChain => f.write_str("projection-chain"),
        }
    }
}

/// Termination test applied to monitored points.
///
/// Affine sets are checked through `‖A z − b‖₂ ≤ affine_tol`; every other set
/// through `dist(z) ≤ set_tol`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Termination {
    pub affine_tol: f64,
    pub set_tol: f64,
}

impl Default for Termination {
    fn default() -> Self {
        Self { affine_tol: 1e-10, set_tol: 0.0 }
    }
}

impl Termination {
    pub fn new(affine_tol: f64, set_tol: f64) -> Self {
        Self { affine_tol, set_tol }
    }

    /// Largest violation of the criterion, `≤ 0` when satisfied.
    pub fn violation(&self, op: &GapOperator, z: &Point) -> f64 {
        op.sets()
            .map(|s| match s {
                ConvexSet::Affine(a) => a.residual_norm(z.as_slice()) - self.affine_tol,
                other => other.distance_slice(z.as_slice()) - self.set_tol,
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_satisfied(&self, op: &GapOperator, z: &Point) -> bool {
        self.violation(op, z) <= 0.0
    }
}

/// `T = (1 − α) Id + α P^{α_p}_{C_p} ⋯ P^{α_1}_{C_1}`
#[derive(Debug, Clone)]
pub struct GapOperator {
    projectors: Vec<RelaxedProjector>,
    config: GapConfig,
    dim: usize,
}

impl GapOperator {
    /// `sets[i]` is paired with `config.alphas()[i]`; `sets[0]` is applied first.
    pub fn new(sets: Vec<ConvexSet>, config: GapConfig) -> Result<Self> {
        if sets.len() != config.alphas.len() {
            return Err(Error::InvalidConfig(vec![format!(
                "{} sets but {} relaxation parameters",
                sets.len(),
                config.alphas.len()
            )]));
        }
        let dim = sets
            .first()
            .map(ConvexSet::dim)
            .ok_or_else(|| Error::InvalidConfig(vec!["at least one set is required".into()]))?;
        for s in &sets {
            check_dim(dim, s.dim())?;
        }
        let projectors = sets
            .into_iter()
            .zip(&config.alphas)
            .map(|(s, &a)| RelaxedProjector::new(s, a))
            .collect::<Result<_>>()?;
        Ok(Self { projectors, config, dim })
    }

    pub fn config(&self) -> &GapConfig {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_sets(&self) -> usize {
        self.projectors.len()
    }

    pub fn projectors(&self) -> &[RelaxedProjector] {
        &self.projectors
    }

    pub fn sets(&self) -> impl Iterator<Item = &ConvexSet> {
        self.projectors.iter().map(RelaxedProjector::set)
    }

    pub fn set(&self, i: usize) -> &ConvexSet {
        self.projectors[i].set()
    }

    /// `S x = P^{α_p}_{C_p} ⋯ P^{α_1}_{C_1} x`
    pub fn apply_s(&self, x: &Point) -> Result<Point> {
        check_dim(self.dim, x.len())?;
        let mut v = x.clone();
        self.apply_from(0, v.as_mut_slice());
        Ok(v)
    }

    /// Returns `(T x, S x − x)`.
    pub fn apply_t(&self, x: &Point) -> Result<(Point, Point)> {
        let residual = self.residual(x)?;
        let next = x + self.config.alpha * &residual;
        Ok((next, residual))
    }

    /// Fixed-point residual `r(x) = S x − x`.
    pub fn residual(&self, x: &Point) -> Result<Point> {
        Ok(self.apply_s(x)? - x)
    }

    /// Applies projectors `start..p` in place.
    pub(crate) fn apply_from(&self, start: usize, v: &mut [f64]) {
        for p in &self.projectors[start..] {
            p.apply_in_place(v);
        }
    }

    /// Number of leading affine sets: the prefix over which `S` is affine.
    pub fn affine_prefix_len(&self) -> usize {
        self.projectors.iter().take_while(|p| p.set().is_affine()).count()
    }

    /// Monitored points at `x`: `Π_{C_1} x` and, for `p ≥ 2`, the chain of
    /// plain projections continuing from it.
    pub fn monitored_candidates(&self, x: &Point) -> Result<Vec<(MonitorLabel, Point)>> {
        let first = self.set(0).project(x)?;
        Ok(self.candidates_from_first(first))
    }

    pub(crate) fn candidates_from_first(&self, first: Point) -> Vec<(MonitorLabel, Point)> {
        let mut out = Vec::with_capacity(2);
        if self.projectors.len() > 1 {
            let mut chain = first.clone();
            for p in &self.projectors[1..] {
                p.set().project_in_place(chain.as_mut_slice());
            }
            out.push((MonitorLabel::FirstProjection, first));
            out.push((MonitorLabel::ProjectionChain, chain));
        } else {
            out.push((MonitorLabel::FirstProjection, first));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::projections::{AffineSubspace, Ball, BoxSet};
    use approx::assert_abs_diff_eq;
    use nalgebra::{dvector, DMatrix};

    /// `C_1 = {x_2 = 0}`, `C_2 = {x_1 ≥ 1}`.
    fn line_and_halfspace() -> Vec<ConvexSet> {
        let line = AffineSubspace::from_dense(&DMatrix::from_row_slice(1, 2, &[0.0, 1.0]), dvector![0.0]).unwrap();
        let half = BoxSet::new(vec![1.0, f64::NEG_INFINITY], vec![f64::INFINITY, f64::INFINITY]).unwrap();
        vec![line.into(), ConvexSet::Box(half)]
    }

    #[test]
    fn beta_values() {
        assert_abs_diff_eq!(beta(&[1.0, 1.0]).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(beta(&[1.5, 1.5]).unwrap(), 6.0 / 7.0, epsilon = 1e-15);
        assert_abs_diff_eq!(beta(&[1.9, 1.9]).unwrap(), 38.0 / 39.0, epsilon = 1e-14);
        assert!(matches!(beta(&[2.0, 1.0]), Err(Error::BetaDomain(_))));
        assert!(matches!(beta(&[0.0]), Err(Error::BetaDomain(_))));
    }

    #[test]
    fn averagedness_constants() {
        let c = GapConfig::new(1.0, vec![1.0, 1.0]).unwrap();
        assert_eq!(c.case(), AssumptionCase::A1);
        assert_abs_diff_eq!(c.averagedness_constant(), 2.0 / 3.0, epsilon = 1e-15);

        let c = GapConfig::new(0.5, vec![2.0, 2.0]).unwrap();
        assert_eq!(c.case(), AssumptionCase::A3);
        assert_eq!(c.averagedness_constant(), 0.5);

        let c = GapConfig::with_averagedness(0.85, vec![1.9, 1.9]).unwrap();
        assert_abs_diff_eq!(c.averagedness_constant(), 0.85, epsilon = 1e-14);
    }

    #[test]
    fn validate_cases() {
        assert_eq!(validate(1.0, &[1.0, 1.0], 2).unwrap(), AssumptionCase::A1);
        assert_eq!(validate(0.5, &[2.0, 2.0], 2).unwrap(), AssumptionCase::A3);
        assert_eq!(validate(0.5, &[2.0, 1.0], 2).unwrap(), AssumptionCase::A2);
        match validate(1.0, &[2.0, 2.0], 2) {
            Err(Error::InvalidConfig(why)) => {
                assert_eq!(why.len(), 3);
                assert!(why[2].contains("alpha 1 not in (0, 1)"));
            }
            other => panic!("{other:?}"),
        }
        assert!(validate(1.5, &[1.0, 1.0], 2).is_err());
        assert!(validate(0.5, &[2.0, 2.0, 2.0], 3).is_err());
        assert!(validate(0.5, &[1.0], 2).is_err());
    }

    #[test]
    fn apply_s_and_t_on_toy() {
        let op = GapOperator::new(line_and_halfspace(), GapConfig::new(1.0, vec![1.0, 1.0]).unwrap()).unwrap();
        assert_eq!(op.apply_s(&dvector![0.0, 2.0]).unwrap(), dvector![1.0, 0.0]);
        let (next, r) = op.apply_t(&dvector![0.0, 2.0]).unwrap();
        assert_eq!(next, dvector![1.0, 0.0]);
        assert_eq!(r, dvector![1.0, -2.0]);

        let (next, r) = op.apply_t(&dvector![3.0, 0.0]).unwrap();
        assert_eq!(next, dvector![3.0, 0.0]);
        assert_eq!(r.norm(), 0.0);

        let cands = op.monitored_candidates(&dvector![0.0, 2.0]).unwrap();
        assert_eq!(cands[0], (MonitorLabel::FirstProjection, dvector![0.0, 0.0]));
        assert_eq!(cands[1], (MonitorLabel::ProjectionChain, dvector![1.0, 0.0]));
    }

    #[test]
    fn single_set_is_projection() {
        let op = GapOperator::new(vec![ConvexSet::Nonnegative(3)], GapConfig::new(1.0, vec![1.0]).unwrap()).unwrap();
        assert_eq!(op.apply_s(&dvector![-1.0, 2.0, -3.0]).unwrap(), dvector![0.0, 2.0, 0.0]);
    }

    /// Fig. 1 geometry: the line `x_1 = 1` and the unit disk.
    fn line_and_disk() -> Vec<ConvexSet> {
        let line = AffineSubspace::from_dense(&DMatrix::from_row_slice(1, 2, &[1.0, 0.0]), dvector![1.0]).unwrap();
        vec![line.into(), ConvexSet::Ball(Ball::new(vec![0.0, 0.0], 1.0).unwrap())]
    }

    #[test]
    fn douglas_rachford_step_is_midpoint() {
        let op = GapOperator::new(line_and_disk(), GapConfig::new(0.5, vec![2.0, 2.0]).unwrap()).unwrap();
        let x = dvector![0.3, -0.9];
        let refl = |s: &ConvexSet, v: &Point| 2.0 * s.project(v).unwrap() - v;
        let rr = refl(op.set(1), &refl(op.set(0), &x));
        let (next, _) = op.apply_t(&x).unwrap();
        assert!((next - 0.5 * (&x + rr)).norm() < 1e-15);
    }

    #[test]
    fn douglas_rachford_fixed_point_projects_into_intersection() {
        // x = (0.5, 0): reflect across x_1 = 1 gives (1.5, 0), reflect through the
        // disk gives back (0.5, 0). It is not on the line, but its shadow is.
        let op = GapOperator::new(line_and_disk(), GapConfig::new(0.5, vec![2.0, 2.0]).unwrap()).unwrap();
        let x = dvector![0.5, 0.0];
        let (next, r) = op.apply_t(&x).unwrap();
        assert!(r.norm() < 1e-15 && (next - &x).norm() < 1e-15);
        assert!(op.set(0).distance(&x).unwrap() > 0.4);
        let cands = op.monitored_candidates(&x).unwrap();
        let shadow = &cands[0].1;
        // brute-force membership: on the line and inside the disk
        assert!((shadow[0] - 1.0).abs() < 1e-15);
        assert!(shadow.norm() <= 1.0 + 1e-15);
    }

    #[test]
    fn termination_checks_every_set() {
        let op = GapOperator::new(line_and_halfspace(), GapConfig::new(1.0, vec![1.0, 1.0]).unwrap()).unwrap();
        let t = Termination::default();
        assert!(t.is_satisfied(&op, &dvector![1.0, 0.0]));
        assert!(!t.is_satisfied(&op, &dvector![0.0, 0.0]));
        assert!(!t.is_satisfied(&op, &dvector![1.0, 1e-9]));
    }

    #[test]
    fn operator_rejects_mismatch() {
        let sets = vec![ConvexSet::Nonnegative(2), ConvexSet::Nonnegative(3)];
        assert!(GapOperator::new(sets, GapConfig::new(1.0, vec![1.0, 1.0]).unwrap()).is_err());
        let op = GapOperator::new(vec![ConvexSet::Nonnegative(2)], GapConfig::new(1.0, vec![1.0]).unwrap()).unwrap();
        assert!(op.apply_t(&dvector![1.0]).is_err());
    }
}
