//! LU factorization with partial pivoting, used for inversion and for the
//! rational solve inside the matrix exponential.

use crate::error::{Error, Result};
use crate::tolerance::ToleranceConfig;

#[cfg(test)]
use super::matrix::ONE;
use super::matrix::{ComplexMatrix, C64, ZERO};

pub(crate) struct Lu {
    n: usize,
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

impl Lu {
    /// Fails only on an exactly zero pivot; conditioning is judged by callers.
    pub(crate) fn factor(a: &ComplexMatrix) -> Result<Self> {
        let n = a.ensure_square("lu")?;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pmax) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pmax == 0.0 {
                return Err(Error::Singular {
                    condition: f64::INFINITY,
                });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= factor * u;
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    /// Solves `A X = B` column by column.
    pub(crate) fn solve(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let n = self.n;
        assert_eq!(b.rows(), n);
        let mut x = ComplexMatrix::zeros(n, b.cols());
        let mut y = vec![ZERO; n];
        for col in 0..b.cols() {
            for i in 0..n {
                let mut s = b[(self.perm[i], col)];
                for (j, yj) in y.iter().enumerate().take(i) {
                    s -= self.lu[(i, j)] * yj;
                }
                y[i] = s;
            }
            for i in (0..n).rev() {
                let mut s = y[i];
                for j in i + 1..n {
                    s -= self.lu[(i, j)] * x[(j, col)];
                }
                x[(i, col)] = s / self.lu[(i, i)];
            }
        }
        x
    }
}

/// Inverse of a square matrix.
///
/// Rejects the input as singular when the 1-norm condition number
/// `‖A‖₁‖A⁻¹‖₁` exceeds `1 / rank_tol`.
pub fn invert(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let n = a.ensure_square("invert")?;
    a.ensure_finite("invert")?;
    let lu = Lu::factor(a)?;
    let inv = lu.solve(&ComplexMatrix::identity(n));
    let condition = a.norm_1() * inv.norm_1();
    if !condition.is_finite() || condition > 1.0 / tol.rank_tol {
        return Err(Error::Singular { condition });
    }
    Ok(inv)
}

/// Solves `A x = b` for a single vector, sharing `invert`'s conditioning rule.
pub fn solve_vec(a: &ComplexMatrix, b: &[C64], tol: &ToleranceConfig) -> Result<Vec<C64>> {
    let inv = invert(a, tol)?;
    Ok(inv.mul_vec(b))
}

#[cfg(test)]
fn determinant(a: &ComplexMatrix) -> C64 {
    match Lu::factor(a) {
        Err(_) => ZERO,
        Ok(lu) => {
            let mut det = ONE;
            for i in 0..lu.n {
                det *= lu.lu[(i, i)];
            }
            // parity of the permutation
            let mut seen = vec![false; lu.n];
            for start in 0..lu.n {
                if seen[start] {
                    continue;
                }
                let mut len = 0;
                let mut j = start;
                while !seen[j] {
                    seen[j] = true;
                    j = lu.perm[j];
                    len += 1;
                }
                if len % 2 == 0 {
                    det = -det;
                }
            }
            det
        }
    }
}
