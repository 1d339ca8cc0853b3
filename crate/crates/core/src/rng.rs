//! Reproducible standard normal samples.
//!
//! The stream is fixed so that instances can be regenerated anywhere:
//!
//! 1. `ChaCha20Rng::seed_from_u64(seed)` (rand_chacha 0.3 / rand_core 0.6 seeding).
//! 2. Uniforms `u = (next_u64() >> 11) · 2⁻⁵³ ∈ [0, 1)`, drawn in pairs `(u1, u2)`.
//! 3. Box–Muller: with `ρ = sqrt(−2 ln(1 − u1))` and `θ = 2π u2`, emit
//!    `ρ cos θ` then `ρ sin θ`.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

pub struct GaussianStream {
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha20Rng::seed_from_u64(seed), spare: None }
    }

    fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform(); // (0, 1]
        let u2 = self.uniform();
        let rho = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        self.spare = Some(rho * s);
        rho * c
    }

    /// Matrix filled row by row.
    pub fn matrix(&mut self, rows: usize, cols: usize) -> DMatrix<f64> {
        DMatrix::from_row_iterator(rows, cols, (0..rows * cols).map(|_| self.next_normal()))
    }

    pub fn vector(&mut self, n: usize) -> DVector<f64> {
        DVector::from_iterator(n, (0..n).map(|_| self.next_normal()))
    }
}
