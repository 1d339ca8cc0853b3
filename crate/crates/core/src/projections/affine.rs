use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use nalgebra_sparse::{CooMatrix, CsrMatrix};

use crate::error::{Error, Result};

/// Pivot threshold (relative to ‖A‖_F) below which `A` is treated as rank deficient.
pub const RANK_TOL: f64 = 1e-12;

/// Below this relative pivot the normal equations lose too many digits and an
/// orthogonal factorization of `Aᵀ` is used instead.
const NORMAL_EQ_TOL: f64 = 1e-6;

#[derive(Debug)]
enum Factor {
    /// Cholesky factor of `A Aᵀ`.
    Normal(Cholesky<f64, Dyn>),
    /// Thin QR factors of `Aᵀ`: `Aᵀ = Q R`.
    Orthogonal { q: DMatrix<f64>, r: DMatrix<f64> },
    /// No rows: the set is the whole space.
    Empty,
}

#[derive(Debug)]
struct Inner {
    a: CsrMatrix<f64>,
    b: DVector<f64>,
    factor: Factor,
}

/// The affine subspace `{z : A z = b}`.
///
/// `A` is stored sparse and factored once at construction. Clones share the
/// factorization and the projection counter.
#[derive(Debug, Clone)]
pub struct AffineSubspace {
    inner: Arc<Inner>,
    calls: Arc<AtomicUsize>,
}

impl AffineSubspace {
    pub fn from_dense(a: &DMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        Self::new(CsrMatrix::from(a), b)
    }

    /// Builds from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: &[(usize, usize, f64)],
        b: DVector<f64>,
    ) -> Result<Self> {
        let mut coo = CooMatrix::new(rows, cols);
        for &(i, j, v) in triplets {
            if i >= rows || j >= cols {
                return Err(Error::InvalidSet(format!(
                    "triplet ({i}, {j}) outside a {rows}x{cols} matrix"
                )));
            }
            coo.push(i, j, v);
        }
        Self::new(CsrMatrix::from(&coo), b)
    }

    pub fn new(a: CsrMatrix<f64>, b: DVector<f64>) -> Result<Self> {
        if a.nrows() != b.len() {
            return Err(Error::DimensionMismatch { expected: a.nrows(), got: b.len() });
        }
        if a.values().iter().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidSet("non-finite entry in affine data".into()));
        }
        let factor = factorize(&a)?;
        Ok(Self {
            inner: Arc::new(Inner { a, b, factor }),
            calls: Arc::new(AtomicUsize::new(0)),
        })
    }

    /// Ambient dimension (number of columns of `A`).
    pub fn dim(&self) -> usize {
        self.inner.a.ncols()
    }

    pub fn rows(&self) -> usize {
        self.inner.a.nrows()
    }

    pub fn matrix(&self) -> &CsrMatrix<f64> {
        &self.inner.a
    }

    pub fn rhs(&self) -> &DVector<f64> {
        &self.inner.b
    }

    /// Whether the orthogonal factorization is in use instead of the normal equations.
    pub fn uses_orthogonal(&self) -> bool {
        matches!(self.inner.factor, Factor::Orthogonal { .. })
    }

    /// Number of projections (full or linear part) performed so far, across all clones.
    pub fn projection_count(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }

    /// `‖A x − b‖₂`, computed with a plain matrix-vector product.
    pub fn residual_norm(&self, x: &[f64]) -> f64 {
        let mut ax = vec![0.0; self.rows()];
        mul(&self.inner.a, x, &mut ax);
        ax.iter()
            .zip(self.inner.b.iter())
            .map(|(l, r)| (l - r) * (l - r))
            .sum::<f64>()
            .sqrt()
    }

    /// Projects `v` onto the subspace in place.
    pub(crate) fn project_in_place(&self, v: &mut [f64]) {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.solve(v, true);
    }

    /// Applies the linear part of the projection (projection onto the null space of `A`) in place.
    pub(crate) fn project_linear_in_place(&self, v: &mut [f64]) {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.solve(v, false);
    }

    /// Projection onto the null space of `A`, i.e. `Π(x) − Π(0)`.
    pub fn project_linear(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        let mut out = x.clone();
        self.project_linear_in_place(out.as_mut_slice());
        Ok(out)
    }

    fn solve(&self, v: &mut [f64], with_rhs: bool) {
        let a = &self.inner.a;
        let m = a.nrows();
        match &self.inner.factor {
            Factor::Empty => {}
            Factor::Normal(chol) => {
                let mut t = DVector::zeros(m);
                mul(a, v, t.as_mut_slice());
                if with_rhs {
                    t -= &self.inner.b;
                }
                chol.solve_mut(&mut t);
                mul_transpose_sub(a, t.as_slice(), v);
            }
            Factor::Orthogonal { q, r } => {
                // z = x − Q (Qᵀ x − R⁻ᵀ b)
                let x = DVector::from_column_slice(v);
                let mut w = q.tr_mul(&x);
                if with_rhs {
                    let mut t = self.inner.b.clone();
                    // R has a nonzero diagonal: the rank check passed.
                    r.tr_solve_upper_triangular_mut(&mut t);
                    w -= t;
                }
                let corr = q * w;
                v.iter_mut().zip(corr.iter()).for_each(|(z, c)| *z -= c);
            }
        }
    }
}

fn frobenius(a: &CsrMatrix<f64>) -> f64 {
    a.values().iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn factorize(a: &CsrMatrix<f64>) -> Result<Factor> {
    let (m, n) = (a.nrows(), a.ncols());
    if m == 0 {
        return Ok(Factor::Empty);
    }
    let norm = frobenius(a);
    let tol = RANK_TOL * norm.max(f64::MIN_POSITIVE);
    if m > n {
        return Err(Error::RankDeficient { pivot: 0.0, tol });
    }

    // Rank check on Aᵀ with column pivoting: |R_ii| are the pivots.
    let dense = dense_of(a);
    let qr = dense.transpose().col_piv_qr();
    let r = qr.unpack_r();
    let min_pivot = (0..m).map(|i| r[(i, i)].abs()).fold(f64::INFINITY, f64::min);
    if !(min_pivot > tol) {
        return Err(Error::RankDeficient { pivot: min_pivot, tol });
    }

    if min_pivot >= NORMAL_EQ_TOL * norm {
        let gram = &dense * dense.transpose();
        if let Some(chol) = gram.cholesky() {
            return Ok(Factor::Normal(chol));
        }
    }

    let qr = dense.transpose().qr();
    Ok(Factor::Orthogonal { q: qr.q(), r: qr.r() })
}

fn dense_of(a: &CsrMatrix<f64>) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(a.nrows(), a.ncols());
    for (i, row) in a.row_iter().enumerate() {
        for (&j, &v) in row.col_indices().iter().zip(row.values()) {
            d[(i, j)] += v;
        }
    }
    d
}

/// `out = A x`
pub(crate) fn mul(a: &CsrMatrix<f64>, x: &[f64], out: &mut [f64]) {
    for (o, row) in out.iter_mut().zip(a.row_iter()) {
        *o = row
            .col_indices()
            .iter()
            .zip(row.values())
            .map(|(&j, &v)| v * x[j])
            .sum();
    }
}

/// `out -= Aᵀ y`
fn mul_transpose_sub(a: &CsrMatrix<f64>, y: &[f64], out: &mut [f64]) {
    for (yi, row) in y.iter().zip(a.row_iter()) {
        for (&j, &v) in row.col_indices().iter().zip(row.values()) {
            out[j] -= v * yi;
        }
    }
}
