use crate::error::{Error, Result};
use crate::gap::{GapOperator, IterationState};
use crate::projections::Point;

/// Cached affine part of `S`.
///
/// When the leading sets `C_1 … C_n` are affine, `S_1 = P^{α_n}_{C_n} ⋯ P^{α_1}_{C_1}`
/// is affine, `S_1 x = F x + h`, and `S = S_2 S_1`. Tracking `F x^k` and `F r^k`
/// lets any number of step lengths be evaluated along `x^k + t r^k` without
/// touching an affine projection: `F x^{k+1} = F x^k + α_k F r^k`.
///
/// The same bookkeeping tracks `Π_{C_1} x^k` (used for monitoring and for the
/// projected line search).
#[derive(Debug, Clone)]
pub struct AffineCache {
    iteration: usize,
    prefix: usize,
    fx: Point,
    fr: Point,
    h: Point,
    first_x: Point,
    first_r: Point,
    direction_for: Option<usize>,
}

impl AffineCache {
    /// Builds the cache at `x` for iteration `iteration`. Needs at least one leading affine set.
    pub fn new(op: &GapOperator, x: &Point, iteration: usize) -> Result<Self> {
        let prefix = op.affine_prefix_len();
        if prefix == 0 {
            return Err(Error::InvalidLineSearch("the first set is not affine".into()));
        }
        if x.len() != op.dim() {
            return Err(Error::DimensionMismatch { expected: op.dim(), got: x.len() });
        }
        let mut h = Point::zeros(op.dim());
        for p in &op.projectors()[..prefix] {
            p.apply_in_place(h.as_mut_slice());
        }
        let mut cache = Self {
            iteration,
            prefix,
            fx: Point::zeros(0),
            fr: Point::zeros(op.dim()),
            h,
            first_x: Point::zeros(0),
            first_r: Point::zeros(op.dim()),
            direction_for: None,
        };
        cache.rebuild_at(op, x);
        Ok(cache)
    }

    fn rebuild_at(&mut self, op: &GapOperator, x: &Point) {
        let (fx, _) = self.linear_part(op, x);
        self.fx = fx;
        let mut first = x.clone();
        op.set(0).project_in_place(first.as_mut_slice());
        self.first_x = first;
    }

    /// Applies `F` to `v`; also returns the linear part of `Π_{C_1}` applied to `v`.
    fn linear_part(&self, op: &GapOperator, v: &Point) -> (Point, Point) {
        let mut out = v.clone();
        let mut first = Point::zeros(0);
        for (i, p) in op.projectors()[..self.prefix].iter().enumerate() {
            let affine = p.set().as_affine().expect("prefix sets are affine");
            let mut proj = out.clone();
            affine.project_linear_in_place(proj.as_mut_slice());
            if i == 0 {
                first = proj.clone();
            }
            let a = p.relaxation();
            out = (1.0 - a) * out + a * proj;
        }
        (out, first)
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// Number of leading affine sets folded into `F`, `h`.
    pub fn prefix_len(&self) -> usize {
        self.prefix
    }

    pub fn fx(&self) -> &Point {
        &self.fx
    }

    pub fn fr(&self) -> &Point {
        &self.fr
    }

    pub fn h(&self) -> &Point {
        &self.h
    }

    /// `Π_{C_1} x^k`
    pub fn first_projection(&self) -> &Point {
        &self.first_x
    }

    /// Linear part of `Π_{C_1}` applied to `r^k`.
    pub fn first_projection_direction(&self) -> &Point {
        &self.first_r
    }

    /// `r^k = S_2(F x^k + h) − x^k`
    pub fn residual(&self, op: &GapOperator, x: &Point) -> Point {
        let mut s = &self.fx + &self.h;
        op.apply_from(self.prefix, s.as_mut_slice());
        s - x
    }

    /// Records `F r` (and the `Π_{C_1}` direction) for the current iteration.
    pub fn set_direction(&mut self, op: &GapOperator, r: &Point) {
        let (fr, first_r) = self.linear_part(op, r);
        self.fr = fr;
        self.first_r = first_r;
        self.direction_for = Some(self.iteration);
    }

    /// `S_1(x^k + t r^k) = (F x^k + t F r^k) + h`
    pub fn candidate_s1(&self, t: f64) -> Point {
        (&self.fx + t * &self.fr) + &self.h
    }

    /// `Π_{C_1}(x^k + t r^k)`
    pub fn candidate_first_projection(&self, t: f64) -> Point {
        &self.first_x + t * &self.first_r
    }

    /// Moves to `x^{k+1} = x^k + t r^k`.
    pub fn advance(&mut self, t: f64) {
        self.fx = &self.fx + t * &self.fr;
        self.first_x = &self.first_x + t * &self.first_r;
        self.iteration += 1;
        self.direction_for = None;
    }

    /// Moves to a point `x ∈ C_1` that is not on the current ray.
    pub fn reset_in_first_set(&mut self, op: &GapOperator, x: &Point) {
        if self.prefix == 1 {
            // S_1 x = x on C_1
            self.fx = x - &self.h;
            self.first_x = x.clone();
        } else {
            self.rebuild_at(op, x);
        }
        self.iteration += 1;
        self.direction_for = None;
    }

    pub(crate) fn check_current(&self, k: usize) -> Result<()> {
        if self.iteration != k {
            return Err(Error::StaleCache { cached: self.iteration, current: k });
        }
        if self.direction_for != Some(k) {
            return Err(Error::InvalidLineSearch(format!(
                "residual direction not recorded for iteration {k}"
            )));
        }
        Ok(())
    }

    /// Residual vector `S(x + t r) − (x + t r)` evaluated through the cache.
    pub(crate) fn candidate_residual_vec(&self, op: &GapOperator, x: &Point, r: &Point, t: f64) -> (Point, Point) {
        let mut s = self.candidate_s1(t);
        op.apply_from(self.prefix, s.as_mut_slice());
        let xt = x + t * r;
        (s - &xt, xt)
    }
}

/// `‖S_2(F x + h + t F r) − (x + t r)‖₂` without any affine projection.
pub fn cached_candidate_residual(
    op: &GapOperator,
    cache: &AffineCache,
    state: &IterationState,
    alpha_k: f64,
) -> Result<f64> {
    cache.check_current(state.k)?;
    Ok(cache.candidate_residual_vec(op, &state.x, &state.r, alpha_k).0.norm())
}
