//! Seeded random fixtures.
//!
//! All randomness goes through [`rng`], a ChaCha8 stream keyed by a 64-bit
//! seed, so every randomized check is reproducible bit for bit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{invert, ComplexMatrix, C64};
use crate::tolerance::ToleranceConfig;

pub type FixtureRng = ChaCha8Rng;

pub fn rng(seed: u64) -> FixtureRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entry with real and imaginary parts uniform on `[-1, 1)`.
pub fn complex<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn vector<R: Rng>(rng: &mut R, n: usize) -> Vec<C64> {
    (0..n).map(|_| complex(rng)).collect()
}

pub fn matrix<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_vectorized(n, n, &vector(rng, n * n))
}

pub fn hermitian<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    let a = matrix(rng, n);
    (&a + &a.adjoint()).scale_real(0.5)
}

/// A diagonalizable `H = V diag(E) V⁻¹` with real, well-separated `E`.
#[derive(Debug, Clone)]
pub struct RealSpectrumHamiltonian {
    pub h: ComplexMatrix,
    /// Ascending eigenvalues.
    pub eigenvalues: Vec<f64>,
    pub v: ComplexMatrix,
}

/// Eigenvalues sit near consecutive integers (gaps at least 0.4) and `V`
/// is a bounded perturbation of the identity with 1-norm condition number
/// below 1e3, so the biorthogonal system is well conditioned.
pub fn real_spectrum_hamiltonian<R: Rng>(rng: &mut R, n: usize) -> RealSpectrumHamiltonian {
    let tol = ToleranceConfig::default();
    let center = (n as f64 - 1.0) / 2.0;
    let eigenvalues: Vec<f64> = (0..n)
        .map(|k| k as f64 - center + rng.gen_range(-0.3..0.3))
        .collect();
    let strength = 0.8 / (n as f64).sqrt();
    loop {
        let v = &ComplexMatrix::identity(n) + &matrix(rng, n).scale_real(strength);
        let Ok(vinv) = invert(&v, &tol) else { continue };
        if v.norm_1() * vinv.norm_1() > 1e3 {
            continue;
        }
        let h = &(&v * &ComplexMatrix::from_real_diag(&eigenvalues)) * &vinv;
        return RealSpectrumHamiltonian { h, eigenvalues, v };
    }
}

/// Non-Hermitian matrix with `‖H − H†‖_F >= min_skew`.
pub fn non_hermitian<R: Rng>(rng: &mut R, n: usize, min_skew: f64) -> ComplexMatrix {
    loop {
        let h = matrix(rng, n);
        if h.distance(&h.adjoint()) >= min_skew {
            return h;
        }
    }
}
