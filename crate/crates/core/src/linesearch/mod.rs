//! Line searches along the fixed-point residual.
//!
//! Two variants are provided. The basic one tries `x^k + t r^k` and accepts
//! when the residual there beats the nominal step's residual by a factor
//! `1 − ε`. The projected one (two sets, `C_1` affine) tries
//! `Π_{C_1}(x^k + t r^k)`, where the residual norm reduces to
//! `α_2 · dist_{C_2}`, and compares against the residual recorded right after
//! the last accepted search.

mod cache;

pub use cache::{cached_candidate_residual, AffineCache};

use crate::error::{Error, Result};
use crate::gap::{GapOperator, IterationState};
use crate::projections::Point;

/// How candidate step lengths are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// `t = t_0, t_0 f, t_0 f², …` keeping the largest accepted.
    ForwardTrack,
    /// Minimize the (convex) projected-search residual on `[α, α_max]`.
    GoldenSection,
}

/// When a line search is attempted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TriggerRule {
    /// Fire when `cos(r, r̄) < 1 − tol`.
    #[default]
    Misaligned,
    /// Fire when `cos(r, r̄) > 1 − tol`, i.e. consecutive residuals point the same way.
    Aligned,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineSearchConfig {
    pub epsilon: f64,
    /// Defaults to `α · tracking_factor^max_candidates`.
    pub alpha_max: Option<f64>,
    pub tracking_factor: f64,
    pub max_candidates: usize,
    pub trigger_tol: f64,
    pub trigger_rule: TriggerRule,
    pub strategy: Strategy,
}

impl Default for LineSearchConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.01,
            alpha_max: None,
            tracking_factor: 1.4,
            max_candidates: 18,
            trigger_tol: 1e-4,
            trigger_rule: TriggerRule::Misaligned,
            strategy: Strategy::ForwardTrack,
        }
    }
}

impl LineSearchConfig {
    pub fn alpha_max_for(&self, alpha: f64) -> f64 {
        self.alpha_max
            .unwrap_or_else(|| alpha * self.tracking_factor.powi(self.max_candidates as i32))
    }

    pub fn validate(&self, alpha: f64) -> Result<()> {
        let mut why = Vec::new();
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            why.push(format!("epsilon {} not in (0, 1)", self.epsilon));
        }
        if !(self.tracking_factor > 1.0) {
            why.push(format!("tracking factor {} must exceed 1", self.tracking_factor));
        }
        let amax = self.alpha_max_for(alpha);
        if !(amax >= alpha) {
            why.push(format!("alpha_max {amax} below alpha {alpha}"));
        }
        if !(self.trigger_tol >= 0.0) {
            why.push(format!("trigger tolerance {} is negative", self.trigger_tol));
        }
        if why.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidLineSearch(why.join(", ")))
        }
    }
}

/// `⟨r, r̄⟩ / (‖r‖‖r̄‖) < 1 − tol`; never fires on a zero residual.
pub fn trigger(r: &Point, r_nom: &Point, tol: f64) -> bool {
    let denom = r.norm() * r_nom.norm();
    if !(denom > 0.0) {
        return false;
    }
    r.dot(r_nom) / denom < 1.0 - tol
}

impl TriggerRule {
    pub fn fires(self, r: &Point, r_nom: &Point, tol: f64) -> bool {
        match self {
            TriggerRule::Misaligned => trigger(r, r_nom, tol),
            TriggerRule::Aligned => {
                let denom = r.norm() * r_nom.norm();
                denom > 0.0 && r.dot(r_nom) / denom > 1.0 - tol
            }
        }
    }
}

/// Result of a forward-tracking search.
#[derive(Debug, Clone)]
pub struct ForwardTrack<T> {
    /// Largest accepted step and its evaluation.
    pub best: Option<(f64, T)>,
    pub evaluated: usize,
}

/// Tests `alpha0, alpha0·factor, …` up to `alpha_max` or `max_candidates`
/// evaluations; returns the largest accepted step. Stops at the first
/// rejection once something has been accepted.
pub fn forward_track<T>(
    alpha0: f64,
    factor: f64,
    alpha_max: f64,
    max_candidates: usize,
    mut evaluate: impl FnMut(f64) -> T,
    mut accept: impl FnMut(&T) -> bool,
) -> ForwardTrack<T> {
    let limit = alpha_max * (1.0 + 1e-12);
    let mut best = None;
    let mut evaluated = 0;
    let mut t = alpha0;
    while evaluated < max_candidates && t <= limit {
        let value = evaluate(t);
        evaluated += 1;
        if accept(&value) {
            best = Some((t, value));
        } else if best.is_some() {
            break;
        }
        t *= factor;
    }
    ForwardTrack { best, evaluated }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenResult {
    pub argmin: f64,
    pub value: f64,
    pub evaluations: usize,
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimization of a unimodal `phi` on `[lo, hi]`, stopping once
/// the bracket is narrower than `tol` or `max_eval` evaluations were spent.
/// Returns the best point evaluated.
pub fn golden_section(
    mut phi: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
    max_eval: usize,
) -> GoldenResult {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut evals = 0;
    let mut best = (f64::NAN, f64::INFINITY);
    let mut eval = |t: f64, evals: &mut usize, best: &mut (f64, f64)| {
        let v = phi(t);
        *evals += 1;
        if v < best.1 || best.0.is_nan() {
            *best = (t, v);
        }
        v
    };
    if max_eval == 0 {
        return GoldenResult { argmin: 0.5 * (a + b), value: f64::NAN, evaluations: 0 };
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c, &mut evals, &mut best);
    if evals >= max_eval {
        return GoldenResult { argmin: best.0, value: best.1, evaluations: evals };
    }
    let mut fd = eval(d, &mut evals, &mut best);
    while (b - a) > tol && evals < max_eval {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c, &mut evals, &mut best);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d, &mut evals, &mut best);
        }
    }
    GoldenResult { argmin: best.0, value: best.1, evaluations: evals }
}

/// Reference residual for the projected line search.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedLsState {
    /// `‖r(x^{i_LS + 1})‖`, or `‖r(x^0)‖` before the first acceptance.
    pub reference_residual_norm: f64,
    /// `i_LS`
    pub last_ls_iteration: Option<usize>,
}

impl ProjectedLsState {
    pub fn new(initial_residual_norm: f64) -> Self {
        Self { reference_residual_norm: initial_residual_norm, last_ls_iteration: None }
    }
}

#[derive(Debug, Clone)]
pub struct LineSearchOutcome {
    pub accepted: bool,
    pub alpha_k: f64,
    pub candidates_evaluated: usize,
    pub next_x: Point,
    pub next_residual_norm: f64,
    /// `r(next_x)` when the search already produced it.
    pub next_residual: Option<Point>,
}

impl LineSearchOutcome {
    fn nominal(state: &IterationState, alpha: f64, evaluated: usize) -> Self {
        Self {
            accepted: false,
            alpha_k: alpha,
            candidates_evaluated: evaluated,
            next_x: state.x_nom.clone(),
            next_residual_norm: state.r_nom.norm(),
            next_residual: Some(state.r_nom.clone()),
        }
    }
}

/// Basic line search along `x^k + t r^k`, accepting
/// `‖r(x^k + t r^k)‖ ≤ (1 − ε)‖r̄^k‖`. Falls back to the nominal step.
///
/// Candidates go through `cache` when given (no affine projections), otherwise
/// through `S` directly.
pub fn basic_step(
    op: &GapOperator,
    state: &IterationState,
    cache: Option<&AffineCache>,
    cfg: &LineSearchConfig,
) -> Result<LineSearchOutcome> {
    let alpha = op.config().alpha();
    if cfg.strategy != Strategy::ForwardTrack {
        return Err(Error::InvalidLineSearch(
            "basic line search supports forward tracking only".into(),
        ));
    }
    if let Some(c) = cache {
        c.check_current(state.k)?;
    }
    let bound = (1.0 - cfg.epsilon) * state.r_nom.norm();
    let search = forward_track(
        alpha * cfg.tracking_factor,
        cfg.tracking_factor,
        cfg.alpha_max_for(alpha),
        cfg.max_candidates,
        |t| -> Result<(Point, Point, f64)> {
            let (r, xt) = match cache {
                Some(c) => c.candidate_residual_vec(op, &state.x, &state.r, t),
                None => {
                    let xt = &state.x + t * &state.r;
                    (op.residual(&xt)?, xt)
                }
            };
            let n = r.norm();
            Ok((r, xt, n))
        },
        |v| matches!(v, Ok((_, _, n)) if *n <= bound),
    );
    match search.best {
        Some((t, value)) => {
            let (r, xt, n) = value?;
            Ok(LineSearchOutcome {
                accepted: true,
                alpha_k: t,
                candidates_evaluated: search.evaluated,
                next_x: xt,
                next_residual_norm: n,
                next_residual: Some(r),
            })
        }
        None => Ok(LineSearchOutcome::nominal(state, alpha, search.evaluated)),
    }
}

/// Checks that `op` has the shape the projected line search needs.
pub fn check_projected(op: &GapOperator) -> Result<()> {
    if op.num_sets() != 2 {
        return Err(Error::InvalidLineSearch(format!(
            "projected line search needs exactly two sets, got {}",
            op.num_sets()
        )));
    }
    if !op.set(0).is_affine() {
        return Err(Error::InvalidLineSearch("projected line search needs an affine first set".into()));
    }
    Ok(())
}

/// Projected line search: candidates `Π_{C_1}(x^k + t r^k)`, residual
/// `α_2 · dist_{C_2}`, accepted when `≤ (1 − ε) · reference`. The caller
/// refreshes the reference with the residual at the following iterate.
pub fn projected_step(
    op: &GapOperator,
    state: &IterationState,
    pls: &ProjectedLsState,
    cache: Option<&AffineCache>,
    cfg: &LineSearchConfig,
) -> Result<LineSearchOutcome> {
    check_projected(op)?;
    if let Some(c) = cache {
        c.check_current(state.k)?;
    }
    let alpha = op.config().alpha();
    let alpha2 = op.projectors()[1].relaxation();
    let target = op.set(1);
    let bound = (1.0 - cfg.epsilon) * pls.reference_residual_norm;
    let alpha_max = cfg.alpha_max_for(alpha);

    let point = |t: f64| -> Result<Point> {
        match cache {
            Some(c) => Ok(c.candidate_first_projection(t)),
            None => op.set(0).project(&(&state.x + t * &state.r)),
        }
    };
    let residual_at = |x: &Point| alpha2 * target.distance_slice(x.as_slice());

    let (best, evaluated) = match cfg.strategy {
        Strategy::ForwardTrack => {
            let search = forward_track(
                alpha * cfg.tracking_factor,
                cfg.tracking_factor,
                alpha_max,
                cfg.max_candidates,
                |t| point(t).map(|x| {
                    let n = residual_at(&x);
                    (x, n)
                }),
                |v| matches!(v, Ok((_, n)) if *n <= bound),
            );
            let best = match search.best {
                Some((t, v)) => Some((t, v?)),
                None => None,
            };
            (best, search.evaluated)
        }
        Strategy::GoldenSection => {
            let mut failure = None;
            let g = golden_section(
                |t| match point(t) {
                    Ok(x) => residual_at(&x),
                    Err(e) => {
                        failure.get_or_insert(e);
                        f64::INFINITY
                    }
                },
                alpha,
                alpha_max,
                1e-9 * alpha_max,
                cfg.max_candidates.max(2),
            );
            if let Some(e) = failure {
                return Err(e);
            }
            let best = if g.argmin > alpha && g.value <= bound {
                Some((g.argmin, (point(g.argmin)?, g.value)))
            } else {
                None
            };
            (best, g.evaluations)
        }
    };

    match best {
        Some((t, (x, n))) => Ok(LineSearchOutcome {
            accepted: true,
            alpha_k: t,
            candidates_evaluated: evaluated,
            next_x: x,
            next_residual_norm: n,
            next_residual: None,
        }),
        None => Ok(LineSearchOutcome::nominal(state, alpha, evaluated)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    #[test]
    fn trigger_examples() {
        assert!(!trigger(&dvector![1.0, 0.0], &dvector![2.0, 0.0], 1e-4));
        assert!(trigger(&dvector![1.0, 0.0], &dvector![0.0, 1.0], 1e-4));
        // cos = 1/sqrt(1.0004) = 0.99980006 < 0.9999
        let c = 1.0 / (1.0f64 + 0.02 * 0.02).sqrt();
        assert!((c - 0.999_800_06).abs() < 1e-8);
        assert!(trigger(&dvector![1.0, 0.0], &dvector![1.0, 0.02], 1e-4));
        assert!(!trigger(&dvector![0.0, 0.0], &dvector![1.0, 0.0], 1e-4));
    }

    #[test]
    fn aligned_rule_is_the_complement_away_from_zero() {
        let r = dvector![1.0, 0.0];
        for r_nom in [dvector![2.0, 0.0], dvector![0.0, 1.0], dvector![1.0, 0.02], dvector![-1.0, 0.0]] {
            let a = TriggerRule::Aligned.fires(&r, &r_nom, 1e-4);
            assert_eq!(a, !TriggerRule::Misaligned.fires(&r, &r_nom, 1e-4));
        }
        assert!(!TriggerRule::Aligned.fires(&dvector![0.0, 0.0], &r, 1e-4));
    }

    #[test]
    fn forward_track_grid() {
        let mut seen = Vec::new();
        let ft = forward_track(1.0, 1.4, 5.0, 100, |t| { seen.push(t); t }, |_| true);
        let (best, _) = ft.best.unwrap();
        assert!((best - 3.8416).abs() < 1e-12);
        assert_eq!(ft.evaluated, 5);

        let ft = forward_track(1.0, 1.4, 1e9, 7, |t| t, |_| false);
        assert!(ft.best.is_none());
        assert_eq!(ft.evaluated, 7);
    }

    #[test]
    fn forward_track_stops_after_first_failure_past_a_pass() {
        // passes for t in [2, 3] only; grid 1, 1.4, 1.96, 2.744, 3.84
        let ft = forward_track(1.0, 1.4, 100.0, 100, |t| t, |t| (1.9..=3.0).contains(t));
        assert!((ft.best.unwrap().0 - 2.744).abs() < 1e-12);
        assert_eq!(ft.evaluated, 5);
    }

    #[test]
    fn golden_quadratic_and_abs() {
        let g = golden_section(|t| (t - 3.0).powi(2), 0.0, 10.0, 1e-6, 200);
        assert!((g.argmin - 3.0).abs() < 1e-6);
        let g = golden_section(|t| (t - 2.0).abs(), 0.0, 5.0, 1e-6, 200);
        assert!((g.argmin - 2.0).abs() < 1e-6);
        let g = golden_section(|t| t, 0.0, 1.0, 1e-12, 5);
        assert_eq!(g.evaluations, 5);
    }

    #[test]
    fn config_validation() {
        assert!(LineSearchConfig::default().validate(1.0).is_ok());
        let c = LineSearchConfig { epsilon: 1.0, ..Default::default() };
        assert!(c.validate(1.0).is_err());
        let c = LineSearchConfig { alpha_max: Some(0.5), ..Default::default() };
        assert!(c.validate(1.0).is_err());
        let c = LineSearchConfig { tracking_factor: 1.0, ..Default::default() };
        assert!(c.validate(1.0).is_err());
        assert!((LineSearchConfig::default().alpha_max_for(1.0) - 1.4f64.powi(18)).abs() < 1e-9);
    }
}
