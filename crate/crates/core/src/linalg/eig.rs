//! Non-Hermitian eigendecomposition.
//!
//! Householder reduction to upper Hessenberg form, single-shift complex QR
//! sweeps (Wilkinson shift, Givens rotations) down to triangular Schur form,
//! and eigenvectors of the triangular factor by back-substitution.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::tolerance::ToleranceConfig;

use super::matrix::{vec_norm, ComplexMatrix, C64, ONE, ZERO};

/// Eigenvalues and unit-norm right eigenvectors, sorted by ascending real
/// part with ties broken by ascending imaginary part.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<C64>,
    pub vectors: Vec<Vec<C64>>,
}

/// Complex Schur form `A = Z T Z^†` with `T` upper triangular.
#[derive(Debug, Clone)]
pub struct Schur {
    pub t: ComplexMatrix,
    pub z: ComplexMatrix,
}

pub fn eig_right(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<Eigen> {
    a.ensure_square("eig_right")?;
    a.ensure_finite("eig_right")?;
    let Schur { t, z } = schur(a, tol)?;
    let n = t.rows();

    let tnorm = t.frobenius_norm();
    let small = f64::EPSILON * tnorm.max(f64::MIN_POSITIVE);
    let mut pairs: Vec<(C64, Vec<C64>)> = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        let mut y = vec![ZERO; n];
        y[k] = ONE;
        for i in (0..k).rev() {
            let s: C64 = (i + 1..=k).map(|j| t[(i, j)] * y[j]).sum();
            let mut d = t[(i, i)] - lambda;
            if d.norm() < small {
                d = C64::new(small, 0.0);
            }
            y[i] = -s / d;
        }
        let mut v = z.mul_vec(&y);
        let nv = vec_norm(&v);
        for x in &mut v {
            *x /= nv;
        }
        pairs.push((lambda, v));
    }
    pairs.sort_by(|(a, _), (b, _)| eig_order(a, b));
    let (values, vectors) = pairs.into_iter().unzip();
    Ok(Eigen { values, vectors })
}

/// Eigenvalues only, in the same order as `eig_right`.
pub fn eigenvalues(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<Vec<C64>> {
    a.ensure_square("eigenvalues")?;
    a.ensure_finite("eigenvalues")?;
    let s = schur(a, tol)?;
    let mut values = s.t.diagonal();
    values.sort_by(eig_order);
    Ok(values)
}

pub(crate) fn eig_order(a: &C64, b: &C64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

pub fn schur(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<Schur> {
    let n = a.ensure_square("schur")?;
    let (mut h, mut z) = hessenberg(a);
    if n <= 1 {
        return Ok(Schur { t: h, z });
    }

    let hnorm = h.frobenius_norm();
    let eps = f64::EPSILON;
    let safe_min = f64::MIN_POSITIVE;
    let total_cap = tol.max_qr_iterations * n;
    let mut total_iters = 0usize;
    let mut iters_here = 0usize;
    let mut hi = n - 1;

    while hi > 0 {
        // locate the start of the trailing unreduced block
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if diag == 0.0 {
                diag = hnorm;
            }
            if sub <= eps * diag || sub <= safe_min {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iters_here = 0;
            continue;
        }
        if total_iters >= total_cap {
            return Err(Error::NoConvergence {
                iterations: total_iters,
            });
        }
        total_iters += 1;
        iters_here += 1;

        let shift = if iters_here.is_multiple_of(10) {
            // exceptional shift to break cycles
            h[(hi, hi)] + C64::new(0.75 * h[(hi, hi - 1)].re.abs(), 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        qr_sweep(&mut h, &mut z, lo, hi, shift);
    }

    // clean strictly-lower part left over from rounding
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = ZERO;
        }
    }
    Ok(Schur { t: h, z })
}

fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half_tr = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = (half_tr * half_tr - det).sqrt();
    let r1 = half_tr + disc;
    let r2 = half_tr - disc;
    if (r1 - d).norm() <= (r2 - d).norm() {
        r1
    } else {
        r2
    }
}

/// Rotation `G = [[c, s], [-conj(s), c]]` with `G (a, b)^T = (r, 0)^T`.
fn givens(a: C64, b: C64) -> (f64, C64) {
    if b == ZERO {
        return (1.0, ZERO);
    }
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 {
        return (0.0, b.conj() / nb);
    }
    let r = na.hypot(nb);
    (na / r, (a / na) * b.conj() / r)
}

/// One explicit-shift QR step on the active block `lo..=hi`, applied to the
/// full matrix so that `h` converges to the Schur factor.
fn qr_sweep(h: &mut ComplexMatrix, z: &mut ComplexMatrix, lo: usize, hi: usize, shift: C64) {
    let n = h.rows();
    for k in lo..=hi {
        h[(k, k)] -= shift;
    }
    let mut rotations = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in k..n {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = x * c + s * y;
            h[(k + 1, j)] = -s.conj() * x + y * c;
        }
        h[(k + 1, k)] = ZERO;
        rotations.push((k, c, s));
    }
    for &(k, c, s) in &rotations {
        let top = (k + 2).min(hi);
        for i in 0..=top {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x * c + y * s.conj();
            h[(i, k + 1)] = -x * s + y * c;
        }
        for i in 0..n {
            let x = z[(i, k)];
            let y = z[(i, k + 1)];
            z[(i, k)] = x * c + y * s.conj();
            z[(i, k + 1)] = -x * s + y * c;
        }
    }
    for k in lo..=hi {
        h[(k, k)] += shift;
    }
}

/// Householder reduction `A = Q H Q^†` with `H` upper Hessenberg.
pub fn hessenberg(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = ComplexMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let xnorm = (x[0].norm_sqr() + tail).sqrt();
        let phase = if x[0] == ZERO { ONE } else { x[0] / x[0].norm() };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vn = vec_norm(&v);
        for e in &mut v {
            *e /= vn;
        }
        // H <- P H with P = I - 2 v v^†, acting on rows k+1..n
        for j in 0..n {
            let dot: C64 = v.iter().enumerate().map(|(r, vr)| vr.conj() * h[(k + 1 + r, j)]).sum();
            for (r, vr) in v.iter().enumerate() {
                h[(k + 1 + r, j)] -= vr * dot * 2.0;
            }
        }
        // H <- H P and Q <- Q P, acting on columns k+1..n
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let dot: C64 = v.iter().enumerate().map(|(r, vr)| m[(i, k + 1 + r)] * vr).sum();
                for (r, vr) in v.iter().enumerate() {
                    m[(i, k + 1 + r)] -= dot * vr.conj() * 2.0;
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    (h, q)
}
