//! Primal-dual feasibility embedding of cone programs.
//!
//! The program `min cᵀx  s.t.  Ax + s = b, s ∈ K` and its dual
//! `max −bᵀy  s.t.  Aᵀy + c = 0, y ∈ K*` are solved together by finding
//! `(x, s, y)` in the intersection of
//!
//! ```text
//! [ A  I  0  ] [x]   [b]
//! [ 0  0  −Aᵀ] [s] = [c]        and        Rⁿ × K × K*.
//! [ cᵀ 0  bᵀ ] [y]   [0]
//! ```
//!
//! The last row forces a zero duality gap, so any point in the intersection
//! is a primal-dual optimal pair when strong duality holds.

use nalgebra::DVector;
use nalgebra_sparse::{CooMatrix, CsrMatrix};

use crate::error::{Error, Result};
use crate::gap::{GapConfig, GapOperator};
use crate::projections::{AffineSubspace, ConvexSet, Point, ProductSet};

/// `min cᵀx  s.t.  Ax + s = b,  s ∈ K`.
#[derive(Debug, Clone)]
pub struct ConeProgram {
    a: CsrMatrix<f64>,
    b: DVector<f64>,
    c: DVector<f64>,
    cones: ProductSet,
}

impl ConeProgram {
    pub fn new(a: CsrMatrix<f64>, b: DVector<f64>, c: DVector<f64>, cones: ProductSet) -> Result<Self> {
        let (m, n) = (a.nrows(), a.ncols());
        if b.len() != m {
            return Err(Error::DimensionMismatch { expected: m, got: b.len() });
        }
        if c.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: c.len() });
        }
        if cones.dim() != m {
            return Err(Error::InvalidProblem(format!(
                "cone dimension {} does not match {m} constraint rows",
                cones.dim()
            )));
        }
        if a.values().iter().chain(b.iter()).chain(c.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidProblem("non-finite entry in program data".into()));
        }
        Ok(Self { a, b, c, cones })
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(
        m: usize,
        n: usize,
        triplets: &[(usize, usize, f64)],
        b: Vec<f64>,
        c: Vec<f64>,
        cones: ProductSet,
    ) -> Result<Self> {
        let mut coo = CooMatrix::new(m, n);
        for &(i, j, v) in triplets {
            if i >= m || j >= n {
                return Err(Error::InvalidProblem(format!(
                    "entry ({i}, {j}) outside a {m}x{n} matrix"
                )));
            }
            coo.push(i, j, v);
        }
        Self::new(CsrMatrix::from(&coo), DVector::from_vec(b), DVector::from_vec(c), cones)
    }

    /// Number of constraint rows.
    pub fn m(&self) -> usize {
        self.a.nrows()
    }

    /// Number of primal variables.
    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    pub fn a(&self) -> &CsrMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    pub fn cones(&self) -> &ProductSet {
        &self.cones
    }

    /// `‖Ax + s − b‖₂`
    pub fn primal_residual(&self, x: &[f64], s: &[f64]) -> f64 {
        let mut ax = &self.a * &DVector::from_column_slice(x);
        ax += DVector::from_column_slice(s);
        ax -= &self.b;
        ax.norm()
    }

    /// `‖Aᵀy + c‖₂`
    pub fn dual_residual(&self, y: &[f64]) -> f64 {
        let mut aty = self.a.transpose() * DVector::from_column_slice(y);
        aty += &self.c;
        aty.norm()
    }

    /// `cᵀx + bᵀy`, zero at a primal-dual optimum.
    pub fn gap(&self, x: &[f64], y: &[f64]) -> f64 {
        self.c.as_slice().iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
            + self.b.as_slice().iter().zip(y).map(|(a, b)| a * b).sum::<f64>()
    }
}

/// Componentwise dual cone. Boxes, balls and affine sets are not cones and are rejected.
pub fn dual_cone(k: &ProductSet) -> Result<ProductSet> {
    k.components().iter().map(dual_of).collect::<Result<Vec<_>>>().map(ProductSet::new)
}

fn dual_of(set: &ConvexSet) -> Result<ConvexSet> {
    Ok(match set {
        ConvexSet::Nonnegative(d) => ConvexSet::Nonnegative(*d),
        ConvexSet::SecondOrderCone(d) => ConvexSet::SecondOrderCone(*d),
        ConvexSet::Zero(d) => ConvexSet::Free(*d),
        ConvexSet::Free(d) => ConvexSet::Zero(*d),
        ConvexSet::Product(p) => ConvexSet::Product(dual_cone(p)?),
        ConvexSet::Box(_) => return Err(Error::UnsupportedCone("box".into())),
        ConvexSet::Ball(_) => return Err(Error::UnsupportedCone("ball".into())),
        ConvexSet::Affine(_) => return Err(Error::UnsupportedCone("affine subspace".into())),
    })
}

/// The two-set feasibility problem over `z = (x, s, y)`.
#[derive(Debug, Clone)]
pub struct EmbeddedFeasibility {
    program: ConeProgram,
    matrix: CsrMatrix<f64>,
    rhs: DVector<f64>,
    coneset: ProductSet,
}

pub fn embed(p: &ConeProgram) -> Result<EmbeddedFeasibility> {
    let (m, n) = (p.m(), p.n());
    let mut coo = CooMatrix::new(m + n + 1, n + 2 * m);
    let (xs, ss, ys) = (0, n, n + m);
    for (i, row) in p.a.row_iter().enumerate() {
        for (&j, &v) in row.col_indices().iter().zip(row.values()) {
            coo.push(i, xs + j, v);
            // −Aᵀ: entry (j, i) of Aᵀ lands in row m + j, y-column i.
            coo.push(m + j, ys + i, -v);
        }
    }
    for i in 0..m {
        coo.push(i, ss + i, 1.0);
    }
    let last = m + n;
    for (j, &v) in p.c.iter().enumerate() {
        if v != 0.0 {
            coo.push(last, xs + j, v);
        }
    }
    for (i, &v) in p.b.iter().enumerate() {
        if v != 0.0 {
            coo.push(last, ys + i, v);
        }
    }

    let mut rhs = DVector::zeros(m + n + 1);
    rhs.rows_mut(0, m).copy_from(&p.b);
    rhs.rows_mut(m, n).copy_from(&p.c);

    let coneset = ProductSet::new(vec![
        ConvexSet::Free(n),
        ConvexSet::Product(p.cones.clone()),
        ConvexSet::Product(dual_cone(&p.cones)?),
    ]);
    Ok(EmbeddedFeasibility { program: p.clone(), matrix: CsrMatrix::from(&coo), rhs, coneset })
}

/// Slices of a stacked point together with optimality diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalDualSolution {
    pub x: Point,
    pub s: Point,
    pub y: Point,
    /// `cᵀx + bᵀy`
    pub gap: f64,
    /// `‖Ax + s − b‖₂`
    pub primal_residual: f64,
    /// `‖Aᵀy + c‖₂`
    pub dual_residual: f64,
}

impl EmbeddedFeasibility {
    pub fn program(&self) -> &ConeProgram {
        &self.program
    }

    /// Block matrix, `(m+n+1) × (n+2m)`.
    pub fn matrix(&self) -> &CsrMatrix<f64> {
        &self.matrix
    }

    pub fn rhs(&self) -> &DVector<f64> {
        &self.rhs
    }

    pub fn coneset(&self) -> &ProductSet {
        &self.coneset
    }

    pub fn dim(&self) -> usize {
        self.matrix.ncols()
    }

    /// Factors the block system. Fails when it is rank deficient, e.g. for
    /// an all-zero program.
    pub fn affine(&self) -> Result<AffineSubspace> {
        AffineSubspace::new(self.matrix.clone(), self.rhs.clone())
    }

    /// `[affine, Rⁿ × K × K*]`, in the order expected by the projected line search.
    pub fn sets(&self) -> Result<Vec<ConvexSet>> {
        Ok(vec![self.affine()?.into(), self.coneset.clone().into()])
    }

    pub fn operator(&self, config: GapConfig) -> Result<GapOperator> {
        GapOperator::new(self.sets()?, config)
    }

    /// Concatenates `(x, s, y)`.
    pub fn stack(&self, x: &[f64], s: &[f64], y: &[f64]) -> Result<Point> {
        let (m, n) = (self.program.m(), self.program.n());
        for (got, want) in [(x.len(), n), (s.len(), m), (y.len(), m)] {
            if got != want {
                return Err(Error::DimensionMismatch { expected: want, got });
            }
        }
        Ok(DVector::from_iterator(self.dim(), x.iter().chain(s).chain(y).copied()))
    }

    pub fn recover(&self, z: &Point) -> Result<PrimalDualSolution> {
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: z.len() });
        }
        let (m, n) = (self.program.m(), self.program.n());
        let x = z.rows(0, n).into_owned();
        let s = z.rows(n, m).into_owned();
        let y = z.rows(n + m, m).into_owned();
        let p = &self.program;
        Ok(PrimalDualSolution {
            gap: p.gap(x.as_slice(), y.as_slice()),
            primal_residual: p.primal_residual(x.as_slice(), s.as_slice()),
            dual_residual: p.dual_residual(y.as_slice()),
            x,
            s,
            y,
        })
    }
}
