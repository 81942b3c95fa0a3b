use crate::error::Result;
use crate::tolerance::ToleranceConfig;

use super::matrix::{ComplexMatrix, C64, ZERO};
use super::svd::svd;

/// Matrix of `X ↦ A X − X B` acting on row-major vectorizations,
/// i.e. `A ⊗ 1 − 1 ⊗ Bᵀ`.
pub fn sylvester_operator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = ComplexMatrix::ensure_same_square("sylvester_operator", &[a, b])?;
    let id = ComplexMatrix::identity(n);
    Ok(&a.kron(&id) - &id.kron(&b.transpose()))
}

/// Frobenius-orthonormal basis of `{X : A X − X B = 0}`.
///
/// Singular values of the linearized map below `rank_tol · σ_max` count as
/// zero. Each basis element is rotated so that its first entry of largest
/// modulus is real and positive.
pub fn sylvester_kernel(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<Vec<ComplexMatrix>> {
    let n = ComplexMatrix::ensure_same_square("sylvester_kernel", &[a, b])?;
    a.ensure_finite("sylvester_kernel")?;
    b.ensure_finite("sylvester_kernel")?;
    let op = sylvester_operator(a, b)?;
    let dec = svd(&op);
    let smax = dec.singular_values[0];
    let cutoff = tol.rank_tol * smax;

    let mut basis = Vec::new();
    for (j, &s) in dec.singular_values.iter().enumerate() {
        if smax > 0.0 && s > cutoff {
            continue;
        }
        let mut v = dec.v.column(j);
        fix_phase(&mut v);
        basis.push(ComplexMatrix::from_vectorized(n, n, &v));
    }
    Ok(basis)
}

fn fix_phase(v: &mut [C64]) {
    let mut best = 0usize;
    let mut best_abs = -1.0;
    for (i, z) in v.iter().enumerate() {
        // small slack keeps the choice stable against rounding ties
        if z.norm() > best_abs * (1.0 + 1e-12) {
            best = i;
            best_abs = z.norm();
        }
    }
    if v[best] != ZERO {
        let phase = v[best].conj() / v[best].norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}
