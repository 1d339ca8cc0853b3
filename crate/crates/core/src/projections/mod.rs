//! Exact Euclidean projections onto closed convex sets, and the relaxed
//! projector `(1 − a) Id + a Π` built from them.

mod affine;

pub use affine::{AffineSubspace, RANK_TOL};

use nalgebra::DVector;

use crate::error::{Error, Result};

/// A point of the ambient space.
pub type Point = DVector<f64>;

/// Componentwise bounds `lower ≤ x ≤ upper`; infinite bounds are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxSet {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxSet {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch { expected: lower.len(), got: upper.len() });
        }
        for (l, u) in lower.iter().zip(&upper) {
            if l.is_nan() || u.is_nan() || l > u || *l == f64::INFINITY || *u == f64::NEG_INFINITY {
                return Err(Error::InvalidSet(format!("empty box interval [{l}, {u}]")));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }
}

/// Euclidean ball `‖x − center‖ ≤ radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    center: Vec<f64>,
    radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidSet(format!("invalid ball radius {radius}")));
        }
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

/// Cartesian product of sets laid out contiguously.
#[derive(Debug, Clone)]
pub struct ProductSet {
    components: Vec<ConvexSet>,
    offsets: Vec<usize>,
    dim: usize,
}

impl ProductSet {
    pub fn new(components: Vec<ConvexSet>) -> Self {
        let mut offsets = Vec::with_capacity(components.len());
        let mut dim = 0;
        for c in &components {
            offsets.push(dim);
            dim += c.dim();
        }
        Self { components, offsets, dim }
    }

    pub fn components(&self) -> &[ConvexSet] {
        &self.components
    }

    /// Start index of each component.
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Componentwise projection; equivalent to projecting onto the product.
    pub fn project(&self, x: &Point) -> Result<Point> {
        check_dim(self.dim, x.len())?;
        let mut out = x.clone();
        self.project_in_place(out.as_mut_slice());
        Ok(out)
    }

    fn project_in_place(&self, v: &mut [f64]) {
        let mut rest = v;
        for c in &self.components {
            let (head, tail) = rest.split_at_mut(c.dim());
            c.project_in_place(head);
            rest = tail;
        }
    }
}

/// A nonempty closed convex set with an exact projection.
#[derive(Debug, Clone)]
pub enum ConvexSet {
    Affine(AffineSubspace),
    Nonnegative(usize),
    Box(BoxSet),
    /// `{(t, u) : ‖u‖ ≤ t}` with `t` the first coordinate.
    SecondOrderCone(usize),
    /// `{0}`
    Zero(usize),
    /// The whole space.
    Free(usize),
    Ball(Ball),
    Product(ProductSet),
}

impl From<AffineSubspace> for ConvexSet {
    fn from(a: AffineSubspace) -> Self {
        ConvexSet::Affine(a)
    }
}

impl From<ProductSet> for ConvexSet {
    fn from(p: ProductSet) -> Self {
        ConvexSet::Product(p)
    }
}

impl ConvexSet {
    pub fn product(components: Vec<ConvexSet>) -> Self {
        ConvexSet::Product(ProductSet::new(components))
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Affine(a) => a.dim(),
            ConvexSet::Nonnegative(n)
            | ConvexSet::SecondOrderCone(n)
            | ConvexSet::Zero(n)
            | ConvexSet::Free(n) => *n,
            ConvexSet::Box(b) => b.lower.len(),
            ConvexSet::Ball(b) => b.center.len(),
            ConvexSet::Product(p) => p.dim,
        }
    }

    pub fn as_affine(&self) -> Option<&AffineSubspace> {
        match self {
            ConvexSet::Affine(a) => Some(a),
            _ => None,
        }
    }

    pub fn is_affine(&self) -> bool {
        self.as_affine().is_some()
    }

    /// `argmin_{y ∈ set} ‖y − x‖₂`
    pub fn project(&self, x: &Point) -> Result<Point> {
        check_dim(self.dim(), x.len())?;
        let mut out = x.clone();
        self.project_in_place(out.as_mut_slice());
        Ok(out)
    }

    /// `‖Π x − x‖₂`
    pub fn distance(&self, x: &Point) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(self.distance_slice(x.as_slice()))
    }

    pub(crate) fn distance_slice(&self, x: &[f64]) -> f64 {
        match self {
            ConvexSet::Nonnegative(_) => x.iter().map(|v| v.min(0.0).powi(2)).sum::<f64>().sqrt(),
            _ => {
                let mut p = x.to_vec();
                self.project_in_place(&mut p);
                p.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
            }
        }
    }

    pub(crate) fn project_in_place(&self, v: &mut [f64]) {
        match self {
            ConvexSet::Affine(a) => a.project_in_place(v),
            ConvexSet::Nonnegative(_) => v.iter_mut().for_each(|x| *x = x.max(0.0)),
            ConvexSet::Box(b) => {
                for ((x, l), u) in v.iter_mut().zip(&b.lower).zip(&b.upper) {
                    *x = x.clamp(*l, *u);
                }
            }
            ConvexSet::SecondOrderCone(_) => project_soc(v),
            ConvexSet::Zero(_) => v.fill(0.0),
            ConvexSet::Free(_) => {}
            ConvexSet::Ball(b) => {
                let d = v.iter().zip(&b.center).map(|(x, c)| (x - c) * (x - c)).sum::<f64>().sqrt();
                if d > b.radius {
                    let s = b.radius / d;
                    for (x, c) in v.iter_mut().zip(&b.center) {
                        *x = c + s * (*x - c);
                    }
                }
            }
            ConvexSet::Product(p) => p.project_in_place(v),
        }
    }
}

fn project_soc(v: &mut [f64]) {
    let Some((t, u)) = v.split_first_mut() else {
        return;
    };
    let norm_u = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm_u <= *t {
        return;
    }
    if norm_u <= -*t {
        *t = 0.0;
        u.fill(0.0);
        return;
    }
    let s = 0.5 * (*t + norm_u);
    *t = s;
    let scale = s / norm_u;
    u.iter_mut().for_each(|x| *x *= scale);
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// `P^a_C = (1 − a) Id + a Π_C` with `a ∈ (0, 2]`.
#[derive(Debug, Clone)]
pub struct RelaxedProjector {
    set: ConvexSet,
    relaxation: f64,
}

impl RelaxedProjector {
    pub fn new(set: ConvexSet, relaxation: f64) -> Result<Self> {
        if !(relaxation > 0.0 && relaxation <= 2.0) {
            return Err(Error::InvalidConfig(vec![format!(
                "relaxation {relaxation} is outside (0, 2]"
            )]));
        }
        Ok(Self { set, relaxation })
    }

    pub fn set(&self) -> &ConvexSet {
        &self.set
    }

    pub fn relaxation(&self) -> f64 {
        self.relaxation
    }

    pub fn apply(&self, x: &Point) -> Result<Point> {
        check_dim(self.set.dim(), x.len())?;
        let mut out = x.clone();
        self.apply_in_place(out.as_mut_slice());
        Ok(out)
    }

    pub(crate) fn apply_in_place(&self, v: &mut [f64]) {
        let a = self.relaxation;
        if a == 1.0 {
            return self.set.project_in_place(v);
        }
        let orig = v.to_vec();
        self.set.project_in_place(v);
        for (p, x) in v.iter_mut().zip(orig) {
            *p = (1.0 - a) * x + a * *p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dvector, DMatrix};

    fn line_x1_eq_1() -> ConvexSet {
        AffineSubspace::from_dense(&DMatrix::from_row_slice(1, 2, &[1.0, 0.0]), dvector![1.0])
            .unwrap()
            .into()
    }

    #[test]
    fn orthant_projection_and_distance() {
        let s = ConvexSet::Nonnegative(2);
        assert_eq!(s.project(&dvector![-2.0, 3.0]).unwrap(), dvector![0.0, 3.0]);
        assert_eq!(s.distance(&dvector![-3.0, 4.0]).unwrap(), 3.0);
    }

    #[test]
    fn hyperplane() {
        let p = line_x1_eq_1().project(&dvector![0.0, 0.5]).unwrap();
        assert_eq!(p, dvector![1.0, 0.5]);
    }

    #[test]
    fn soc_cases() {
        let s = ConvexSet::SecondOrderCone(3);
        assert_eq!(s.project(&dvector![-2.0, 1.0, 0.0]).unwrap(), dvector![0.0, 0.0, 0.0]);
        assert_eq!(s.project(&dvector![2.0, 1.0, 0.0]).unwrap(), dvector![2.0, 1.0, 0.0]);
        // boundary case: (0, (2, 0)) -> (1, (1, 0))
        assert_eq!(s.project(&dvector![0.0, 2.0, 0.0]).unwrap(), dvector![1.0, 1.0, 0.0]);
    }

    #[test]
    fn box_distance() {
        let s = ConvexSet::Box(BoxSet::new(vec![0.0], vec![1.0]).unwrap());
        assert_eq!(s.distance(&dvector![2.5]).unwrap(), 1.5);
        assert!(BoxSet::new(vec![1.0], vec![0.0]).is_err());
    }

    #[test]
    fn ball_projection() {
        let s = ConvexSet::Ball(Ball::new(vec![0.0, 0.0], 1.0).unwrap());
        let p = s.project(&dvector![3.0, 4.0]).unwrap();
        assert!((p - dvector![0.6, 0.8]).norm() < 1e-15);
    }

    #[test]
    fn relaxed_orthant() {
        let rp = RelaxedProjector::new(ConvexSet::Nonnegative(2), 2.0).unwrap();
        assert_eq!(rp.apply(&dvector![-2.0, 3.0]).unwrap(), dvector![2.0, 3.0]);
        let rp = RelaxedProjector::new(ConvexSet::Nonnegative(2), 0.5).unwrap();
        assert_eq!(rp.apply(&dvector![-2.0, 3.0]).unwrap(), dvector![-1.0, 3.0]);
        assert!(RelaxedProjector::new(ConvexSet::Nonnegative(2), 2.5).is_err());
        assert!(RelaxedProjector::new(ConvexSet::Nonnegative(2), 0.0).is_err());
    }

    #[test]
    fn products() {
        let s = ConvexSet::product(vec![ConvexSet::Free(1), ConvexSet::Nonnegative(1)]);
        assert_eq!(s.project(&dvector![-1.0, -1.0]).unwrap(), dvector![-1.0, 0.0]);
        assert_eq!(ConvexSet::Zero(2).project(&dvector![5.0, -3.0]).unwrap(), dvector![0.0, 0.0]);
    }

    #[test]
    fn dimension_mismatch() {
        let s = ConvexSet::Nonnegative(3);
        assert!(matches!(
            s.project(&dvector![1.0]),
            Err(Error::DimensionMismatch { expected: 3, got: 1 })
        ));
        assert!(s.distance(&dvector![1.0]).is_err());
        let rp = RelaxedProjector::new(s, 1.0).unwrap();
        assert!(rp.apply(&dvector![1.0]).is_err());
    }
}
