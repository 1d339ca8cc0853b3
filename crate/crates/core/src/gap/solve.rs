use super::{GapOperator, MonitorLabel, Termination};
use crate::error::{Error, Result};
use crate::linesearch::{
    basic_step, check_projected, projected_step, AffineCache, LineSearchConfig,
    LineSearchOutcome, ProjectedLsState, Strategy,
};
use crate::projections::{check_dim, Point};

/// Per-iteration quantities of the (line-searched) averaged iteration.
#[derive(Debug, Clone)]
pub struct IterationState {
    pub k: usize,
    /// `x^k`
    pub x: Point,
    /// `r^k = S x^k − x^k`
    pub r: Point,
    /// `x̄^k = x^k + α r^k`
    pub x_nom: Point,
    /// `r̄^k = S x̄^k − x̄^k`
    pub r_nom: Point,
    pub residual_norm_history: Vec<f64>,
}

impl IterationState {
    /// State at iteration `k` with the nominal point filled in from `x`, `r`.
    pub fn new(op: &GapOperator, k: usize, x: Point, r: Point) -> Result<Self> {
        check_dim(op.dim(), x.len())?;
        check_dim(op.dim(), r.len())?;
        let x_nom = &x + op.config().alpha() * &r;
        let r_nom = op.residual(&x_nom)?;
        Ok(Self { k, x, r, x_nom, r_nom, residual_norm_history: Vec::new() })
    }
}

/// How the next iterate is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum Stepper {
    Nominal,
    Basic(LineSearchConfig),
    Projected(LineSearchConfig),
}

impl Stepper {
    pub fn line_search(&self) -> Option<&LineSearchConfig> {
        match self {
            Stepper::Nominal => None,
            Stepper::Basic(c) | Stepper::Projected(c) => Some(c),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub termination: Termination,
    pub max_iter: usize,
    pub stepper: Stepper,
    /// Evaluate candidates through the affine cache when the leading sets are affine.
    pub use_affine_cache: bool,
    pub record_history: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            termination: Termination::default(),
            max_iter: 10_000_000,
            stepper: Stepper::Nominal,
            use_affine_cache: true,
            record_history: true,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LineSearchStats {
    pub triggered: usize,
    pub accepted: usize,
    pub candidates_total: usize,
    pub max_candidates: usize,
    /// Projected search only: the initial reference followed by every refreshed reference.
    pub reference_history: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    /// `‖r‖` vanished without the criterion holding.
    FixedPoint,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    /// The monitored point meeting the criterion, or the least violating one seen.
    pub solution: Point,
    pub iterations: usize,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub monitor: MonitorLabel,
    pub stats: LineSearchStats,
    /// `‖r(x^k)‖` for `k = 0..=iterations` (empty unless recorded).
    pub residual_history: Vec<f64>,
    pub final_residual: f64,
    pub final_iterate: Point,
}

const ZERO_RESIDUAL: f64 = 1e-15;

impl GapOperator {
    /// Runs the averaged iteration from `x0` with the selected stepper until a
    /// monitored point satisfies the termination criterion.
    pub fn solve(&self, x0: &Point, opts: &SolveOptions) -> Result<SolveResult> {
        check_dim(self.dim(), x0.len())?;
        let alpha = self.config().alpha();
        match &opts.stepper {
            Stepper::Nominal => {}
            Stepper::Basic(c) => {
                c.validate(alpha)?;
                if c.strategy != Strategy::ForwardTrack {
                    return Err(Error::InvalidLineSearch(
                        "golden section applies to the projected line search only".into(),
                    ));
                }
            }
            Stepper::Projected(c) => {
                c.validate(alpha)?;
                check_projected(self)?;
            }
        }

        let mut cache = if opts.use_affine_cache && self.affine_prefix_len() > 0 {
            Some(AffineCache::new(self, x0, 0)?)
        } else {
            None
        };
        let residual_of = |cache: &Option<AffineCache>, x: &Point| -> Result<Point> {
            match cache {
                Some(c) => Ok(c.residual(self, x)),
                None => self.residual(x),
            }
        };

        let r0 = residual_of(&cache, x0)?;
        let mut state = IterationState {
            k: 0,
            x_nom: x0.clone(),
            r_nom: r0.clone(),
            x: x0.clone(),
            r: r0,
            residual_norm_history: Vec::new(),
        };
        let mut pls = ProjectedLsState::new(state.r.norm());
        let mut stats = LineSearchStats::default();
        if matches!(opts.stepper, Stepper::Projected(_)) {
            stats.reference_history.push(pls.reference_residual_norm);
        }
        let mut pending_refresh = false;
        let mut best: Option<(f64, Point, MonitorLabel)> = None;

        let finish = |state: IterationState,
                      stats: LineSearchStats,
                      best: (f64, Point, MonitorLabel),
                      reason: StopReason| {
            let final_residual = state.r.norm();
            SolveResult {
                converged: reason == StopReason::Converged,
                solution: best.1,
                monitor: best.2,
                iterations: state.k,
                stop_reason: reason,
                stats,
                residual_history: state.residual_norm_history,
                final_residual,
                final_iterate: state.x,
            }
        };

        loop {
            let k = state.k;
            let rn = state.r.norm();
            if opts.record_history {
                state.residual_norm_history.push(rn);
            }
            if pending_refresh {
                pls.reference_residual_norm = rn;
                pls.last_ls_iteration = Some(k - 1);
                stats.reference_history.push(rn);
                pending_refresh = false;
            }

            let first = match &cache {
                Some(c) => c.first_projection().clone(),
                None => self.set(0).project(&state.x)?,
            };
            for (label, z) in self.candidates_from_first(first) {
                let v = opts.termination.violation(self, &z);
                if v <= 0.0 {
                    return Ok(finish(state, stats, (v, z, label), StopReason::Converged));
                }
                if best.as_ref().is_none_or(|b| v < b.0) {
                    best = Some((v, z, label));
                }
            }
            let best_now = || best.clone().expect("at least one candidate per iteration");

            if rn <= ZERO_RESIDUAL * (1.0 + state.x.norm()) {
                return Ok(finish(state, stats, best_now(), StopReason::FixedPoint));
            }
            if k >= opts.max_iter {
                return Ok(finish(state, stats, best_now(), StopReason::MaxIterations));
            }

            // nominal point and its residual
            state.x_nom = &state.x + alpha * &state.r;
            state.r_nom = match cache.as_mut() {
                Some(c) => {
                    c.set_direction(self, &state.r);
                    let mut s = c.candidate_s1(alpha);
                    self.apply_from(c.prefix_len(), s.as_mut_slice());
                    s - &state.x_nom
                }
                None => self.residual(&state.x_nom)?,
            };

            let outcome: Option<LineSearchOutcome> = match &opts.stepper {
                Stepper::Nominal => None,
                Stepper::Basic(cfg) | Stepper::Projected(cfg) => {
                    if cfg.trigger_rule.fires(&state.r, &state.r_nom, cfg.trigger_tol) {
                        stats.triggered += 1;
                        let o = match &opts.stepper {
                            Stepper::Basic(_) => basic_step(self, &state, cache.as_ref(), cfg)?,
                            _ => projected_step(self, &state, &pls, cache.as_ref(), cfg)?,
                        };
                        stats.candidates_total += o.candidates_evaluated;
                        stats.max_candidates = stats.max_candidates.max(o.candidates_evaluated);
                        Some(o)
                    } else {
                        None
                    }
                }
            };

            match outcome {
                Some(o) if o.accepted => {
                    stats.accepted += 1;
                    match o.next_residual {
                        // basic: x + t r, residual already known
                        Some(r) => {
                            if let Some(c) = cache.as_mut() {
                                c.advance(o.alpha_k);
                            }
                            state.x = o.next_x;
                            state.r = r;
                        }
                        // projected: a point of C_1 off the ray
                        None => {
                            if let Some(c) = cache.as_mut() {
                                c.reset_in_first_set(self, &o.next_x);
                            }
                            state.x = o.next_x;
                            state.r = residual_of(&cache, &state.x)?;
                            pending_refresh = true;
                        }
                    }
                }
                _ => {
                    if let Some(c) = cache.as_mut() {
                        c.advance(alpha);
                    }
                    state.x = std::mem::replace(&mut state.x_nom, Point::zeros(0));
                    state.r = std::mem::replace(&mut state.r_nom, Point::zeros(0));
                }
            }
            state.k += 1;
        }
    }
}
