use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Dense complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting bad shapes and NaN/Inf.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::dim("from_vec", "matrix must have at least one row and column"));
        }
        if data.len() != rows * cols {
            return Err(Error::dim(
                "from_vec",
                format!("expected {} entries, got {}", rows * cols, data.len()),
            ));
        }
        let m = Self { rows, cols, data };
        m.ensure_finite("from_vec")?;
        Ok(m)
    }

    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != n_cols {
                return Err(Error::dim(
                    "from_rows",
                    format!("row {i} has {} entries, expected {n_cols}", r.len()),
                ));
            }
            data.extend_from_slice(r);
        }
        Self::from_vec(n_rows, n_cols, data)
    }

    /// Convenience constructor from real row-major entries.
    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_diag(&d)
    }

    /// `|u><v|`, i.e. the map `h -> <v, h> u`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        let mut m = Self::zeros(u.len(), v.len());
        for (i, ui) in u.iter().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                m[(i, j)] = ui * vj.conj();
            }
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<C64>]) -> Result<Self> {
        let n_cols = cols.len();
        let n_rows = cols.first().map(Vec::len).unwrap_or(0);
        if cols.iter().any(|c| c.len() != n_rows) {
            return Err(Error::dim("from_columns", "columns of unequal length"));
        }
        let mut m = Self::zeros(n_rows, n_cols);
        for (j, c) in cols.iter().enumerate() {
            for (i, &x) in c.iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub(crate) fn ensure_finite(&self, op: &'static str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite { op })
        }
    }

    pub(crate) fn ensure_square(&self, op: &'static str) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::dim(op, format!("expected square matrix, got {}x{}", self.rows, self.cols)))
        }
    }

    /// Checks that every operand is square with the same dimension.
    pub(crate) fn ensure_same_square(op: &'static str, ms: &[&ComplexMatrix]) -> Result<usize> {
        let n = ms[0].ensure_square(op)?;
        for m in &ms[1..] {
            if m.ensure_square(op)? != n {
                return Err(Error::dim(
                    op,
                    format!("operands have dimensions {n} and {}", m.rows),
                ));
            }
        }
        Ok(n)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        self.diagonal().into_iter().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn norm_1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius inner product `tr(self^† other)`.
    pub fn frobenius_inner(&self, other: &Self) -> C64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `A x` for a column vector.
    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols, "mul_vec: dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul: {}x{} times {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        out[(i * rhs.rows + k, j * rhs.cols + l)] = a * rhs[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// `self * rhs - rhs * self`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        &(self * rhs) - &(rhs * self)
    }

    /// `self * rhs + rhs * self`.
    pub fn anticommutator(&self, rhs: &Self) -> Self {
        &(self * rhs) + &(rhs * self)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (self - other).frobenius_norm()
    }

    /// `max |a_ij - b_ij|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other).max_abs()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.distance(&self.adjoint()) <= tol * self.frobenius_norm().max(1.0)
    }

    /// Reads a matrix from its row-major vectorization.
    pub fn from_vectorized(n_rows: usize, n_cols: usize, v: &[C64]) -> Self {
        assert_eq!(v.len(), n_rows * n_cols);
        Self {
            rows: n_rows,
            cols: n_cols,
            data: v.to_vec(),
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Mul<ComplexMatrix> for ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        self.matmul(&rhs)
    }
}

macro_rules! elementwise {
    ($tr:ident, $f:ident, $op:tt) => {
        impl<'a> $tr<&'a ComplexMatrix> for &'a ComplexMatrix {
            type Output = ComplexMatrix;

            fn $f(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                assert_eq!(
                    (self.rows, self.cols),
                    (rhs.rows, rhs.cols),
                    concat!(stringify!($f), ": shape mismatch")
                );
                ComplexMatrix {
                    rows: self.rows,
                    cols: self.cols,
                    data: self.data.iter().zip(&rhs.data).map(|(a, b)| a $op b).collect(),
                }
            }
        }

        impl $tr<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;

            fn $f(self, rhs: ComplexMatrix) -> ComplexMatrix {
                (&self).$f(&rhs)
            }
        }
    };
}

elementwise!(Add, add, +);
elementwise!(Sub, sub, -);

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>+.6e}{:>+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// `<f, g> = sum conj(f_i) g_i`, antilinear in the first slot.
pub fn inner(f: &[C64], g: &[C64]) -> C64 {
    assert_eq!(f.len(), g.len(), "inner: dimension mismatch");
    f.iter().zip(g).map(|(a, b)| a.conj() * b).sum()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_sub(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(a: &[C64], s: C64) -> Vec<C64> {
    a.iter().map(|x| x * s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn shape_validation() {
        assert!(ComplexMatrix::from_vec(2, 2, vec![ONE; 3]).is_err());
        assert!(ComplexMatrix::from_vec(0, 2, vec![]).is_err());
        let bad = ComplexMatrix::from_vec(1, 1, vec![c(f64::NAN, 0.0)]);
        assert!(matches!(bad, Err(Error::NonFinite { .. })));
        assert!(ComplexMatrix::from_rows(&[vec![ONE, ONE], vec![ONE]]).is_err());
    }

    #[test]
    fn products_and_adjoint() {
        let a = ComplexMatrix::from_rows(&[vec![c(1.0, 1.0), c(2.0, 0.0)], vec![ZERO, c(0.0, -1.0)]])
            .unwrap();
        let b = ComplexMatrix::identity(2);
        assert_eq!(&a * &b, a);
        let adj = a.adjoint();
        assert_eq!(adj[(0, 0)], c(1.0, -1.0));
        assert_eq!(adj[(1, 0)], c(2.0, 0.0));
        // (AB)^† = B^† A^†
        let b = ComplexMatrix::from_rows(&[vec![c(0.0, 2.0), c(1.0, 0.0)], vec![c(3.0, -1.0), ONE]])
            .unwrap();
        let ab = &a * &b;
        assert!(ab.adjoint().distance(&(&b.adjoint() * &adj)) < 1e-14);
    }

    #[test]
    fn outer_product_acts_as_ket_bra() {
        let u = vec![c(1.0, 0.0), c(0.0, 1.0)];
        let v = vec![c(0.0, 1.0), c(2.0, 0.0)];
        let h = vec![c(1.0, 0.0), c(1.0, 1.0)];
        let lhs = ComplexMatrix::outer(&u, &v).mul_vec(&h);
        let rhs = vec_scale(&u, inner(&v, &h));
        assert!(vec_norm(&vec_sub(&lhs, &rhs)) < 1e-14);
    }

    #[test]
    fn kron_of_identities() {
        let k = ComplexMatrix::identity(2).kron(&ComplexMatrix::identity(3));
        assert_eq!(k, ComplexMatrix::identity(6));
    }
}
