//! The γ-dynamics `γ^t(X) = e^{iH†t} X e^{−iHt}` generated by a
//! non-self-adjoint `H`, its generator `δ_γ(X) = i(H†X − XH)`, the ordinary
//! Heisenberg map `α^t`, and the diagnostics relating them.
//!
//! Time derivative convention: `d/dt γ^t(X) = γ^t(δ_γ(X)) = δ_γ(γ^t(X))`,
//! so in particular `d/dt γ^t(1) = γ^t(i(H† − H))`.

use serde::{Deserialize, Serialize};

use crate::biortho::MetricPair;
use crate::error::{Error, Result};
use crate::linalg::extended::gamma_series_sum;
use crate::linalg::{mat_exp, operator_norm, ComplexMatrix, I};
use crate::report::{relative, DiagnosticReport};
use crate::tolerance::ToleranceConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvolutionMethod {
    DirectExponential,
    Series,
    Ode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionResult {
    pub t: f64,
    pub evolved: ComplexMatrix,
    pub method: EvolutionMethod,
    /// Number of series terms summed (`k = 0..terms_used`).
    pub terms_used: Option<usize>,
    /// A priori bound on the neglected tail.
    pub truncation_bound: Option<f64>,
}

/// The pair `e^{iH†t}`, `e^{−iHt}`, reusable across observables.
#[derive(Debug, Clone)]
pub struct GammaPropagator {
    pub t: f64,
    left: ComplexMatrix,
    right: ComplexMatrix,
}

impl GammaPropagator {
    pub fn new(h: &ComplexMatrix, t: f64) -> Result<Self> {
        h.ensure_square("gamma_t")?;
        let left = mat_exp(&h.adjoint().scale(I * t))?;
        let right = mat_exp(&h.scale(-I * t))?;
        Ok(Self { t, left, right })
    }

    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        ComplexMatrix::ensure_same_square("gamma_t", &[&self.left, x])?;
        Ok(&(&self.left * x) * &self.right)
    }

    /// `γ^t(1)`.
    pub fn identity_image(&self) -> ComplexMatrix {
        &self.left * &self.right
    }

    /// `‖e^{iH†t}‖_F ‖e^{−iHt}‖_F`, the natural rounding scale of `apply`.
    pub fn scale(&self) -> f64 {
        self.left.frobenius_norm() * self.right.frobenius_norm()
    }
}

pub fn gamma_t(h: &ComplexMatrix, x: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    ComplexMatrix::ensure_same_square("gamma_t", &[h, x])?;
    GammaPropagator::new(h, t)?.apply(x)
}

/// `α^t(X) = e^{iGt} X e^{−iGt}`; with Hermitian `G` this is the usual
/// Heisenberg picture.
pub fn alpha_t(g: &ComplexMatrix, x: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    ComplexMatrix::ensure_same_square("alpha_t", &[g, x])?;
    let fwd = mat_exp(&g.scale(I * t))?;
    let back = mat_exp(&g.scale(-I * t))?;
    Ok(&(&fwd * x) * &back)
}

/// `γ^t(1) = e^{iH†t} e^{−iHt}`.
pub fn gamma_identity(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    Ok(GammaPropagator::new(h, t)?.identity_image())
}

pub fn delta_gamma(h: &ComplexMatrix, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    ComplexMatrix::ensure_same_square("delta_gamma", &[h, x])?;
    Ok(delta_gamma_unchecked(h, x))
}

fn delta_gamma_unchecked(h: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    let hd = h.adjoint();
    (&(&hd * x) - &(x * h)).scale(I)
}

/// `δ_G(X) = i[G, X]`.
pub fn delta_commutator(g: &ComplexMatrix, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    ComplexMatrix::ensure_same_square("delta_commutator", &[g, x])?;
    Ok(g.commutator(x).scale(I))
}

/// `δ_γ^k(X)`.
pub fn delta_gamma_power(h: &ComplexMatrix, x: &ComplexMatrix, k: usize) -> Result<ComplexMatrix> {
    let mut y = x.clone();
    for _ in 0..k {
        y = delta_gamma(h, &y)?;
    }
    Ok(y)
}

/// Smallest `K` whose tail `‖X‖ Σ_{k>K} r^k/k!` (with `r = 2‖H‖|t|`) is at
/// most `series_tol`, together with that tail.
///
/// Terms are generated in log space so large `r` cannot overflow; the sum
/// stops once the terms fall below `1e-20 · series_tol` past the peak,
/// where the remainder is dominated by a geometric series.
pub fn series_truncation(h_norm: f64, x_norm: f64, t: f64, series_tol: f64, cap: usize) -> Result<(usize, f64)> {
    let r = 2.0 * h_norm * t.abs();
    if r == 0.0 || x_norm == 0.0 {
        return Ok((0, 0.0));
    }
    let (ln_r, ln_x) = (r.ln(), x_norm.ln());
    let floor = 1e-20 * series_tol;
    let hard_limit = cap.saturating_mul(16).max(4096);
    // terms[k] = ‖X‖ r^k / k!
    let mut terms = vec![x_norm];
    let mut log_term = 0.0f64;
    loop {
        let k = terms.len();
        log_term += ln_r - (k as f64).ln();
        let term = (log_term + ln_x).exp();
        terms.push(term);
        if k as f64 > r && term < floor {
            break;
        }
        if k >= hard_limit {
            return Err(Error::Truncation { required: k, cap });
        }
    }
    let m = terms.len() - 1;
    let ratio = r / (m as f64 + 1.0);
    let mut tail = terms[m] * ratio / (1.0 - ratio);
    let mut best = None;
    for k in (0..m).rev() {
        tail += terms[k + 1];
        if tail <= series_tol {
            best = Some((k, tail));
        } else {
            break;
        }
    }
    let (k, tail) = best.ok_or(Error::Truncation { required: m, cap })?;
    if k + 1 > cap {
        return Err(Error::Truncation { required: k + 1, cap });
    }
    Ok((k, tail))
}

/// `Σ_{k=0}^{K} t^k δ_γ^k(X) / k!` with `K` from [`series_truncation`].
///
/// Terms can exceed the sum by many orders of magnitude (they peak near
/// `k ≈ 2‖H‖|t|`), so the partial sums are carried in double-double
/// precision and rounded once at the end.
pub fn gamma_series(
    h: &ComplexMatrix,
    x: &ComplexMatrix,
    t: f64,
    tol: &ToleranceConfig,
) -> Result<EvolutionResult> {
    ComplexMatrix::ensure_same_square("gamma_series", &[h, x])?;
    let (k_max, bound) = series_truncation(
        operator_norm(h),
        operator_norm(x),
        t,
        tol.series_tol,
        tol.max_series_terms,
    )?;
    Ok(EvolutionResult {
        t,
        evolved: gamma_series_sum(h, x, t, k_max),
        method: EvolutionMethod::Series,
        terms_used: Some(k_max + 1),
        truncation_bound: Some(bound),
    })
}

pub fn gamma_direct(h: &ComplexMatrix, x: &ComplexMatrix, t: f64) -> Result<EvolutionResult> {
    Ok(EvolutionResult {
        t,
        evolved: gamma_t(h, x, t)?,
        method: EvolutionMethod::DirectExponential,
        terms_used: None,
        truncation_bound: None,
    })
}

/// Classical fourth-order Runge–Kutta for `dX/dt = δ_γ(X)` with a fixed
/// step no larger than `dt`, landing exactly on `t_final`.
pub fn gamma_ode(
    h: &ComplexMatrix,
    x0: &ComplexMatrix,
    t_final: f64,
    dt: f64,
) -> Result<EvolutionResult> {
    ComplexMatrix::ensure_same_square("gamma_ode", &[h, x0])?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Contract(format!("time step must be positive, got {dt}")));
    }
    if !t_final.is_finite() {
        return Err(Error::Contract("final time must be finite".into()));
    }
    let steps = (t_final.abs() / dt).ceil() as usize;
    let mut x = x0.clone();
    if steps > 0 {
        let step = t_final / steps as f64;
        let f = |y: &ComplexMatrix| delta_gamma_unchecked(h, y);
        for _ in 0..steps {
            let k1 = f(&x);
            let k2 = f(&(&x + &k1.scale_real(step / 2.0)));
            let k3 = f(&(&x + &k2.scale_real(step / 2.0)));
            let k4 = f(&(&x + &k3.scale_real(step)));
            let incr = &(&k1 + &k2.scale_real(2.0)) + &(&k3.scale_real(2.0) + &k4);
            x = &x + &incr.scale_real(step / 6.0);
        }
    }
    Ok(EvolutionResult {
        t: t_final,
        evolved: x,
        method: EvolutionMethod::Ode,
        terms_used: None,
        truncation_bound: None,
    })
}

/// Central-difference step used by the derivative diagnostics.
pub fn fd_step(t: f64) -> f64 {
    1e-5 * t.abs().max(1.0)
}

/// `‖H − H†‖_F <= tol · max(1, ‖H‖_F)`.
pub fn is_hermitian(h: &ComplexMatrix, tol: &ToleranceConfig) -> bool {
    h.distance(&h.adjoint()) <= tol.residual_tol * h.frobenius_norm().max(1.0)
}

/// Residual of `d/dt γ^t(X) = expected` by central differences, returned as
/// `(relative residual, threshold)` where the threshold adds the
/// truncation allowance `h²/3 · ‖γ^t(δ_γ³ X)‖` to `residual_tol`.
fn derivative_check(
    h: &ComplexMatrix,
    x: &ComplexMatrix,
    t: f64,
    expected: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<(f64, f64)> {
    let step = fd_step(t);
    let plus = gamma_t(h, x, t + step)?;
    let minus = gamma_t(h, x, t - step)?;
    let fd = (&plus - &minus).scale_real(1.0 / (2.0 * step));
    let prop = GammaPropagator::new(h, t)?;
    let third = prop.apply(&delta_gamma_power(h, x, 3)?)?.frobenius_norm();
    let scale = (prop.scale() * (2.0 * h.frobenius_norm()).max(1.0) * x.frobenius_norm())
        .max(f64::MIN_POSITIVE);
    let allowance = step * step / 3.0 * third;
    Ok((
        relative(fd.distance(expected), scale),
        tol.residual_tol + allowance / scale,
    ))
}

/// The identities linking `γ^t`, `α_H^t`, `δ_γ`, `δ_H`, and (when a metric
/// is supplied) the intertwining operator `S`.
pub fn dynamics_diagnostics(
    h: &ComplexMatrix,
    metric: Option<&MetricPair>,
    x: &ComplexMatrix,
    y: &ComplexMatrix,
    t: f64,
    tol: &ToleranceConfig,
) -> Result<DiagnosticReport> {
    let n = ComplexMatrix::ensure_same_square("dynamics_diagnostics", &[h, x, y])?;
    if let Some(m) = metric {
        ComplexMatrix::ensure_same_square("dynamics_diagnostics", &[h, m.s()])?;
    }
    let thr = tol.residual_tol;
    let id = ComplexMatrix::identity(n);
    let hermitian = is_hermitian(h, tol);
    let prop = GammaPropagator::new(h, t)?;
    let g1 = prop.identity_image();
    let gx = prop.apply(x)?;
    let gy = prop.apply(y)?;
    let ax = alpha_t(h, x, t)?;
    let ay = alpha_t(h, y, t)?;
    let pscale = prop.scale();
    let (xn, yn) = (x.frobenius_norm(), y.frobenius_norm());
    let hn = h.frobenius_norm();
    let mut r = DiagnosticReport::new();

    // γ^t(1) carries the whole difference from α_H^t
    let f1 = &g1 * &ax;
    r.check(
        "γ(X) via γ(1)α_H(X)",
        relative(gx.distance(&f1), g1.frobenius_norm() * ax.frobenius_norm() + pscale * xn),
        thr,
        "γ^t(X) = γ^t(1) α_H^t(X)",
    );
    let f2 = &alpha_t(h, &x.adjoint(), t)?.adjoint() * &g1;
    r.check(
        "γ(X) via α_H(X†)†γ(1)",
        relative(gx.distance(&f2), g1.frobenius_norm() * ax.frobenius_norm() + pscale * xn),
        thr,
        "γ^t(X) = (α_H^t(X†))† γ^t(1)",
    );

    // automorphism failure
    let gxy = prop.apply(&(x * y))?;
    let product = &gx * &gy;
    let defect = gxy.distance(&product);
    let defect_scale = pscale * xn * yn + gx.frobenius_norm() * gy.frobenius_norm();
    let predicted = &(&(&g1 * &ax) * &(&id - &g1)) * &ay;
    r.check(
        "product defect factorization",
        relative((&(&gxy - &product) - &predicted).distance(&ComplexMatrix::zeros(n, n)), defect_scale
            + g1.frobenius_norm() * ax.frobenius_norm() * (1.0 + g1.frobenius_norm()) * ay.frobenius_norm()),
        thr,
        "γ^t(XY) − γ^t(X)γ^t(Y) = γ^t(1)α_H^t(X)(1 − γ^t(1))α_H^t(Y)",
    );
    let g1_dev = relative(g1.distance(&id), pscale);
    let g1_idem = relative(g1.distance(&(&g1 * &g1)), pscale * (1.0 + pscale));
    let d1 = delta_gamma_unchecked(h, &id);
    let d1_rel = relative(d1.frobenius_norm(), hn.max(1.0));
    if hermitian {
        r.check("product defect", relative(defect, defect_scale), thr, "γ^t(XY) = γ^t(X)γ^t(Y)");
        r.check("γ(1) deviation", g1_dev, thr, "γ^t(1) = 1");
        r.check("γ(1) idempotence defect", g1_idem, thr, "γ^t(1) = γ^t(1)²");
        r.check("δ_γ(1)", d1_rel, thr, "δ_γ(1) = i(H† − H) = 0");
    } else {
        r.record("product defect", relative(defect, defect_scale), thr, "γ^t(XY) ≠ γ^t(X)γ^t(Y)");
        r.record("γ(1) deviation", g1_dev, thr, "γ^t(1) ≠ 1");
        r.record("γ(1) idempotence defect", g1_idem, thr, "γ^t(1) ≠ γ^t(1)²");
        r.expect_exceeds("δ_γ(1)", d1_rel, thr, "δ_γ(1) = i(H† − H) ≠ 0");
    }

    // Leibniz defect Δ_γ(XY) = −X δ_γ(1) Y
    let dxy = delta_gamma_unchecked(h, &(x * y));
    let leibniz = &(&(&dxy - &(x * &delta_gamma_unchecked(h, y))) - &(&delta_gamma_unchecked(h, x) * y))
        + &(&(x * &d1) * y);
    r.check(
        "Leibniz defect",
        relative(leibniz.frobenius_norm(), 2.0 * hn * xn * yn),
        thr,
        "Δ_γ(XY) = −X δ_γ(1) Y",
    );

    r.check(
        "adjoint preservation",
        relative(prop.apply(&x.adjoint())?.distance(&gx.adjoint()), pscale * xn),
        thr,
        "γ^t(X†) = γ^t(X)†",
    );
    r.check(
        "δ_γ adjoint symmetry",
        relative(
            delta_gamma_unchecked(h, &x.adjoint()).distance(&delta_gamma_unchecked(h, x).adjoint()),
            2.0 * hn * xn,
        ),
        thr,
        "δ_γ(X†) = δ_γ(X)†",
    );

    // derivative identities
    let g_d1 = prop.apply(&d1)?;
    let (res, th) = derivative_check(h, &id, t, &g_d1, tol)?;
    r.check("γ(1) ODE residual", res, th, "d/dt γ^t(1) = γ^t(i(H† − H))");
    let g_dx = prop.apply(&delta_gamma_unchecked(h, x))?;
    let (res, th) = derivative_check(h, x, t, &g_dx, tol)?;
    r.check("derivative (γ∘δ_γ)", res, th, "d/dt γ^t(X) = γ^t(δ_γ(X))");
    let d_gx = delta_gamma_unchecked(h, &gx);
    let (res, th) = derivative_check(h, x, t, &d_gx, tol)?;
    r.check("derivative (δ_γ∘γ)", res, th, "d/dt γ^t(X) = δ_γ(γ^t(X))");
    r.check(
        "generator commutes with flow",
        relative(g_dx.distance(&d_gx), 2.0 * hn * pscale * xn),
        thr,
        "γ^t(δ_γ(X)) = δ_γ(γ^t(X))",
    );

    if let Some(m) = metric {
        let s = m.s();
        let si = m.s_inv();
        let sn = s.frobenius_norm();
        let sin = si.frobenius_norm();
        let a_si = alpha_t(h, si, t)?;
        let escale = sn * a_si.frobenius_norm();
        r.check(
            "γ(1) via S α_H(S⁻¹)",
            relative(g1.distance(&(s * &a_si)), escale),
            thr,
            "γ^t(1) = S α_H^t(S⁻¹)",
        );
        r.check(
            "γ(1) via α_H(S⁻¹)† S",
            relative(g1.distance(&(&a_si.adjoint() * s)), escale),
            thr,
            "γ^t(1) = α_H^t(S⁻¹)† S",
        );
        let mut lhs = x.clone();
        let mut rhs = si * x;
        for l in 1..=3usize {
            lhs = delta_gamma_unchecked(h, &lhs);
            rhs = h.commutator(&rhs).scale(I);
            let via = s * &rhs;
            let scale = sn * sin * (2.0 * hn).powi(l as i32) * xn;
            let (name, anchor) = match l {
                1 => ("δ_γ via S δ_H S⁻¹".to_string(), "δ_γ(X) = S δ_H(S⁻¹X)".to_string()),
                _ => (
                    format!("δ_γ^{l} via S δ_H^{l} S⁻¹"),
                    format!("δ_γ^{l}(X) = S δ_H^{l}(S⁻¹X)"),
                ),
            };
            r.check(&name, relative(lhs.distance(&via), scale), thr, &anchor);
        }
    }
    Ok(r)
}
