//! Double-double (about 106-bit significand) complex arithmetic, just
//! enough to sum `Σ (t^k/k!) δ_γ^k(X)` without the cancellation that plain
//! `f64` suffers once intermediate terms dwarf the result.
//!
//! Built on the error-free transformations `two_sum` (Knuth) and
//! `two_prod` (via fused multiply-add).

use super::{ComplexMatrix, C64};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    #[inline]
    fn from_f64(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    #[inline]
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    #[inline]
    fn mul_f64(self, b: f64) -> Dd {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    #[inline]
    fn div_f64(self, b: f64) -> Dd {
        let q1 = self.hi / b;
        let (p, e) = two_prod(q1, b);
        let (s, f) = two_sum(self.hi, -p);
        let q2 = (s + (f - e + self.lo)) / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }

    #[inline]
    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct DdC {
    re: Dd,
    im: Dd,
}

impl DdC {
    fn from_c64(z: C64) -> Self {
        DdC { re: Dd::from_f64(z.re), im: Dd::from_f64(z.im) }
    }

    #[inline]
    fn add(self, o: DdC) -> DdC {
        DdC { re: self.re.add(o.re), im: self.im.add(o.im) }
    }

    #[inline]
    fn mul_c64(self, z: C64) -> DdC {
        DdC {
            re: self.re.mul_f64(z.re).add(self.im.mul_f64(z.im).neg()),
            im: self.re.mul_f64(z.im).add(self.im.mul_f64(z.re)),
        }
    }

    #[inline]
    fn mul_real(self, s: f64) -> DdC {
        DdC { re: self.re.mul_f64(s), im: self.im.mul_f64(s) }
    }

    #[inline]
    fn div_real(self, s: f64) -> DdC {
        DdC { re: self.re.div_f64(s), im: self.im.div_f64(s) }
    }

    /// Multiplication by `i`.
    #[inline]
    fn times_i(self) -> DdC {
        DdC { re: self.im.neg(), im: self.re }
    }

    fn to_c64(self) -> C64 {
        C64::new(self.re.to_f64(), self.im.to_f64())
    }
}

/// `Σ_{k=0}^{k_max} t^k δ^k(X) / k!` with `δ(Y) = i(H†Y − YH)`, every
/// intermediate kept in double-double precision. `h` and `x` must be square
/// of equal size (checked by the caller).
pub(crate) fn gamma_series_sum(h: &ComplexMatrix, x: &ComplexMatrix, t: f64, k_max: usize) -> ComplexMatrix {
    let n = h.rows();
    let hd = h.adjoint();
    let mut term: Vec<DdC> = x.data().iter().map(|&z| DdC::from_c64(z)).collect();
    let mut sum = term.clone();
    let mut next = vec![DdC::default(); n * n];
    for k in 1..=k_max {
        for i in 0..n {
            for j in 0..n {
                let mut acc = DdC::default();
                // (H† Y)_{ij} − (Y H)_{ij}
                for l in 0..n {
                    acc = acc
                        .add(term[l * n + j].mul_c64(hd[(i, l)]))
                        .add(term[i * n + l].mul_c64(-h[(l, j)]));
                }
                next[i * n + j] = acc.times_i().mul_real(t).div_real(k as f64);
            }
        }
        std::mem::swap(&mut term, &mut next);
        for (s, v) in sum.iter_mut().zip(&term) {
            *s = s.add(*v);
        }
    }
    let data: Vec<C64> = sum.into_iter().map(DdC::to_c64).collect();
    ComplexMatrix::from_vectorized(n, n, &data)
}
