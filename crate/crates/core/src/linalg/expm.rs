//! Matrix exponential by scaling and squaring around a degree-13 diagonal
//! Padé approximant (Higham, SIAM J. Matrix Anal. Appl. 26, 2005).
//!
//! The degree is fixed: no diagonalization is attempted, so nilpotent and
//! defective inputs are handled exactly like any other matrix.

use crate::error::Result;

use super::lu::Lu;
use super::matrix::{ComplexMatrix, C64};

const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which the unscaled degree-13 approximant meets
/// double-precision backward error.
const THETA13: f64 = 5.371_920_351_148_152;

/// `e^A` for a square, finite `A`.
pub fn mat_exp(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.ensure_square("mat_exp")?;
    a.ensure_finite("mat_exp")?;

    let norm = a.norm_1();
    if norm == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scaled = a.scale_real(0.5f64.powi(squarings));

    let b = |k: usize| C64::new(PADE13[k], 0.0);
    let id = ComplexMatrix::identity(n);
    let a2 = &scaled * &scaled;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_inner = &a6.scale(b(13)) + &(&a4.scale(b(11)) + &a2.scale(b(9)));
    let u_tail = &(&a6.scale(b(7)) + &a4.scale(b(5))) + &(&a2.scale(b(3)) + &id.scale(b(1)));
    let u = &scaled * &(&(&a6 * &u_inner) + &u_tail);

    let v_inner = &a6.scale(b(12)) + &(&a4.scale(b(10)) + &a2.scale(b(8)));
    let v_tail = &(&a6.scale(b(6)) + &a4.scale(b(4))) + &(&a2.scale(b(2)) + &id.scale(b(0)));
    let v = &(&a6 * &v_inner) + &v_tail;

    let p = &v + &u;
    let q = &v - &u;
    let mut r = Lu::factor(&q)?.solve(&p);
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(r)
}
