//! One-sided (Hestenes) Jacobi singular value decomposition.
//!
//! Columns of `A` are rotated pairwise until mutually orthogonal; the
//! accumulated rotations form `V`, and the column norms are the singular
//! values. Small singular values come out with high relative accuracy,
//! which is what kernel extraction needs.

use super::matrix::{ComplexMatrix, C64, ZERO};

const MAX_SWEEPS: usize = 80;

#[derive(Debug, Clone)]
pub struct Svd {
    /// Singular values in descending order.
    pub singular_values: Vec<f64>,
    /// Right singular vectors; column `j` pairs with `singular_values[j]`.
    pub v: ComplexMatrix,
}

pub fn svd(a: &ComplexMatrix) -> Svd {
    let n = a.cols();
    // work column-major for locality
    let mut u: Vec<Vec<C64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut e = vec![ZERO; n];
            e[j] = C64::new(1.0, 0.0);
            e
        })
        .collect();
    let mut norms: Vec<f64> = u.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum()).collect();

    let eps = f64::EPSILON;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma: C64 = u[p].iter().zip(&u[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g <= eps * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let w = phase.conj();
                rotate(&mut u, p, q, c, s, w);
                rotate(&mut v, p, q, c, s, w);
                norms[p] = u[p].iter().map(|z| z.norm_sqr()).sum();
                norms[q] = u[q].iter().map(|z| z.norm_sqr()).sum();
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));
    let singular_values = order.iter().map(|&j| norms[j].sqrt()).collect();
    let mut vm = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            vm[(i, dst)] = v[src][i];
        }
    }
    Svd {
        singular_values,
        v: vm,
    }
}

/// `col_p <- c col_p - s w col_q`, `col_q <- s col_p + c w col_q`.
fn rotate(cols: &mut [Vec<C64>], p: usize, q: usize, c: f64, s: f64, w: C64) {
    let (left, right) = cols.split_at_mut(q);
    let cp = &mut left[p];
    let cq = &mut right[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let yw = *y * w;
        let nx = *x * c - yw * s;
        let ny = *x * s + yw * c;
        *x = nx;
        *y = ny;
    }
}
