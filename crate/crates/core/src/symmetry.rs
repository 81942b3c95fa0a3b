//! γ-symmetries: operators `X` with `[H, S⁻¹X] = 0`, equivalently
//! intertwiners `H†X = XH`, equivalently constants of the γ-motion.

use serde::{Deserialize, Serialize};

use crate::biortho::{analyze_hamiltonian, BiorthogonalSystem, MetricPair};
use crate::dynamics::{delta_gamma, GammaPropagator};
use crate::error::{Error, Result};
use crate::linalg::{inner, sylvester_kernel, vec_norm, vec_sub, ComplexMatrix, C64, ONE, ZERO};
use crate::report::{relative, DiagnosticReport};
use crate::tolerance::ToleranceConfig;

pub const DEFAULT_T_SAMPLES: [f64; 4] = [0.1, 0.5, 1.0, 2.0];

/// The five equivalent characterizations of a γ-symmetry, evaluated
/// independently. All norms are Frobenius norms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport {
    /// `‖[H, S⁻¹X]‖`
    pub residual_def: f64,
    /// `‖[H†, X†S⁻¹]‖`
    pub residual_conj: f64,
    /// `‖H†X − XH‖`
    pub residual_intertwine: f64,
    /// `‖δ_γ(X)‖`
    pub residual_derivation: f64,
    /// `max_t ‖γ^t(X) − X‖` over the sampled times.
    pub residual_evolution: f64,
    /// `(1 + ‖H‖)(1 + ‖X‖)(1 + ‖S⁻¹‖)`
    pub scale: f64,
    /// `residual_tol · scale`
    pub threshold: f64,
    pub verdict: bool,
    /// False when some residuals pass and others fail.
    pub consistent: bool,
}

impl SymmetryReport {
    pub fn residuals(&self) -> [f64; 5] {
        [
            self.residual_def,
            self.residual_conj,
            self.residual_intertwine,
            self.residual_derivation,
            self.residual_evolution,
        ]
    }

    pub fn all_at_most(&self, factor: f64) -> bool {
        self.residuals().iter().all(|r| *r <= factor * self.scale)
    }

    pub fn all_exceed(&self, factor: f64) -> bool {
        self.residuals().iter().all(|r| *r > factor * self.scale)
    }

    /// One entry per characterization, each expected to agree with the
    /// overall verdict.
    pub fn to_diagnostics(&self) -> DiagnosticReport {
        const ITEMS: [(&str, &str); 5] = [
            ("commutes with H after S⁻¹", "[H, S⁻¹X] = 0"),
            ("conjugate commutation", "[H†, X†S⁻¹] = 0"),
            ("intertwines H and H†", "H†X = XH"),
            ("annihilated by δ_γ", "δ_γ(X) = 0"),
            ("constant of γ-motion", "γ^t(X) = X"),
        ];
        let mut r = DiagnosticReport::new();
        for ((name, anchor), res) in ITEMS.iter().zip(self.residuals()) {
            if self.verdict {
                r.check(name, res, self.threshold, anchor);
            } else {
                r.expect_exceeds(name, res, self.threshold, &anchor.replacen('=', "≠", 1));
            }
        }
        r.check(
            "characterizations agree",
            if self.consistent { 0.0 } else { 1.0 },
            0.0,
            "all five hold or all five fail",
        );
        r
    }
}

pub fn symmetry_report(
    h: &ComplexMatrix,
    metric: &MetricPair,
    x: &ComplexMatrix,
    t_samples: &[f64],
    tol: &ToleranceConfig,
) -> Result<SymmetryReport> {
    ComplexMatrix::ensure_same_square("symmetry_report", &[h, metric.s(), metric.s_inv(), x])?;
    if t_samples.is_empty() {
        return Err(Error::Contract("at least one time sample is required".into()));
    }
    if let Some(t) = t_samples.iter().find(|t| !t.is_finite()) {
        return Err(Error::Contract(format!("time sample {t} is not finite")));
    }
    let si = metric.s_inv();
    let hd = h.adjoint();
    let residual_def = h.commutator(&(si * x)).frobenius_norm();
    let residual_conj = hd.commutator(&(&x.adjoint() * si)).frobenius_norm();
    let residual_intertwine = (&(&hd * x) - &(x * h)).frobenius_norm();
    let residual_derivation = delta_gamma(h, x)?.frobenius_norm();
    let mut residual_evolution = 0.0f64;
    for &t in t_samples {
        let g = GammaPropagator::new(h, t)?.apply(x)?;
        residual_evolution = residual_evolution.max(g.distance(x));
    }
    let scale = (1.0 + h.frobenius_norm()) * (1.0 + x.frobenius_norm()) * (1.0 + si.frobenius_norm());
    let threshold = tol.residual_tol * scale;
    let res = [
        residual_def,
        residual_conj,
        residual_intertwine,
        residual_derivation,
        residual_evolution,
    ];
    let passing = res.iter().filter(|r| **r <= threshold).count();
    Ok(SymmetryReport {
        residual_def,
        residual_conj,
        residual_intertwine,
        residual_derivation,
        residual_evolution,
        scale,
        threshold,
        verdict: passing == res.len(),
        consistent: passing == 0 || passing == res.len(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Intertwiner {
    /// `X = Σ_k x_k |Ψ_k⟩⟨Ψ_k|`
    pub operator: ComplexMatrix,
    /// `Σ_k x_k⁻¹ |φ_k⟩⟨φ_k|`, present when every `x_k ≠ 0`.
    pub inverse: Option<ComplexMatrix>,
    pub diagnostics: DiagnosticReport,
}

pub fn build_intertwiner(
    sys: &BiorthogonalSystem,
    coeffs: &[C64],
    tol: &ToleranceConfig,
) -> Result<Intertwiner> {
    let n = sys.dimension();
    if coeffs.len() != n {
        return Err(Error::dim(
            "build_intertwiner",
            format!("{} coefficients for dimension {n}", coeffs.len()),
        ));
    }
    if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(Error::NonFinite { op: "build_intertwiner" });
    }
    let mut x = ComplexMatrix::zeros(n, n);
    for (k, c) in coeffs.iter().enumerate() {
        x = &x + &sys.psi_projector(k).scale(*c);
    }
    let inverse = if coeffs.iter().all(|c| *c != ZERO) {
        let mut inv = ComplexMatrix::zeros(n, n);
        for (k, c) in coeffs.iter().enumerate() {
            inv = &inv + &sys.phi_projector(k).scale(ONE / c);
        }
        Some(inv)
    } else {
        None
    };

    let h = &sys.hamiltonian;
    let thr = tol.residual_tol;
    let hn = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let xn = x.frobenius_norm();
    let cmax = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut r = DiagnosticReport::new();
    r.check(
        "intertwining",
        relative((&(&h.adjoint() * &x) - &(&x * h)).frobenius_norm(), hn * xn),
        thr,
        "H†X = XH",
    );
    let mut maps = 0.0f64;
    for (k, c) in coeffs.iter().enumerate() {
        let lhs = x.mul_vec(&sys.phi[k]);
        let rhs: Vec<C64> = sys.psi[k].iter().map(|z| z * c).collect();
        let s = (xn * vec_norm(&sys.phi[k])).max(cmax * vec_norm(&sys.psi[k]));
        maps = maps.max(relative(vec_norm(&vec_sub(&lhs, &rhs)), s));
    }
    r.check("maps φ_n to x_n Ψ_n", maps, thr, "X φ_n = x_n Ψ_n");
    if coeffs.iter().all(|c| c.im == 0.0) {
        r.check(
            "self-adjoint for real coefficients",
            relative(x.distance(&x.adjoint()), xn),
            thr,
            "X = X† when all x_n are real",
        );
    }
    if let Some(inv) = &inverse {
        let id = ComplexMatrix::identity(n);
        let s = xn * inv.frobenius_norm();
        r.check("explicit inverse (right)", relative((&x * inv).distance(&id), s), thr, "X X⁻¹ = 1");
        r.check("explicit inverse (left)", relative((inv * &x).distance(&id), s), thr, "X⁻¹ X = 1");
    }
    Ok(Intertwiner {
        operator: x,
        inverse,
        diagnostics: r,
    })
}

/// Basis of `{X : H†X = XH}` for an `H` accepted by
/// [`analyze_hamiltonian`].
pub fn symmetry_space(h: &ComplexMatrix, tol: &ToleranceConfig) -> Result<Vec<ComplexMatrix>> {
    analyze_hamiltonian(h, tol)?;
    sylvester_kernel(&h.adjoint(), h, tol)
}

/// Relative distance from `X` to `span{|Ψ_k⟩⟨Ψ_k|}`, using the biorthogonal
/// coefficients `x_k = ⟨φ_k, X φ_k⟩`.
pub fn psi_span_residual(sys: &BiorthogonalSystem, x: &ComplexMatrix) -> f64 {
    let n = sys.dimension();
    let mut proj = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let c = inner(&sys.phi[k], &x.mul_vec(&sys.phi[k]));
        proj = &proj + &sys.psi_projector(k).scale(c);
    }
    relative(x.distance(&proj), x.frobenius_norm())
}

/// `XY` for a γ-symmetry `X` and an operator `Y` commuting with `H`; the
/// product is again a γ-symmetry, and its report is returned for
/// confirmation.
pub fn deform_symmetry(
    h: &ComplexMatrix,
    metric: &MetricPair,
    x: &ComplexMatrix,
    y: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<(ComplexMatrix, SymmetryReport)> {
    ComplexMatrix::ensure_same_square("deform_symmetry", &[h, x, y])?;
    let xr = symmetry_report(h, metric, x, &DEFAULT_T_SAMPLES, tol)?;
    if !xr.verdict {
        let worst = xr.residuals().into_iter().fold(0.0, f64::max);
        return Err(Error::Contract(format!(
            "X is not a γ-symmetry (largest residual {worst:.3e}, threshold {:.3e})",
            xr.threshold
        )));
    }
    let comm = h.commutator(y).frobenius_norm();
    let bound = tol.residual_tol * h.frobenius_norm() * y.frobenius_norm();
    if comm > bound {
        return Err(Error::Contract(format!(
            "Y does not commute with H (‖[H,Y]‖ = {comm:.3e}, threshold {bound:.3e})"
        )));
    }
    let xy = x * y;
    let report = symmetry_report(h, metric, &xy, &DEFAULT_T_SAMPLES, tol)?;
    Ok((xy, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biortho::metric_operators;
    use crate::linalg::I;

    fn fixture() -> (BiorthogonalSystem, MetricPair, ToleranceConfig) {
        let tol = ToleranceConfig::default();
        let h = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 1.0]]).unwrap();
        let sys = analyze_hamiltonian(&h, &tol).unwrap();
        let m = metric_operators(&sys, &tol).unwrap();
        (sys, m, tol)
    }

    #[test]
    fn metric_is_symmetry_inverse_is_not() {
        let (sys, m, tol) = fixture();
        let h = &sys.hamiltonian;
        let r = symmetry_report(h, &m, m.s(), &DEFAULT_T_SAMPLES, &tol).unwrap();
        assert!(r.verdict && r.consistent, "{r:?}");
        let r = symmetry_report(h, &m, m.s_inv(), &DEFAULT_T_SAMPLES, &tol).unwrap();
        assert!(!r.verdict && r.consistent, "{r:?}");
        // oracle: [H, S⁻²] ≠ 0
        let s2 = m.s_inv() * m.s_inv();
        assert!(h.commutator(&s2).frobenius_norm() > 0.1);
    }

    #[test]
    fn identity_not_symmetry_for_non_hermitian() {
        let (sys, m, tol) = fixture();
        let h = &sys.hamiltonian;
        let r = symmetry_report(h, &m, &ComplexMatrix::identity(2), &DEFAULT_T_SAMPLES, &tol).unwrap();
        assert!(!r.verdict);
        assert!((r.residual_intertwine - h.distance(&h.adjoint())).abs() < 1e-14);
    }

    #[test]
    fn unit_coefficients_give_metric() {
        let (sys, m, tol) = fixture();
        let it = build_intertwiner(&sys, &[ONE, ONE], &tol).unwrap();
        assert!(it.operator.distance(m.s()) < 1e-12);
        assert!(it.diagnostics.all_pass(), "{}", it.diagnostics);
        assert!(it.inverse.unwrap().distance(m.s_inv()) < 1e-12);
    }

    #[test]
    fn rank_one_intertwiner() {
        let (sys, _, tol) = fixture();
        let it = build_intertwiner(&sys, &[ONE, ZERO], &tol).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[[1.0, -1.0], [-1.0, 1.0]]).unwrap();
        assert!(it.operator.max_abs_diff(&expected) < 1e-12);
        let h = &sys.hamiltonian;
        assert!((&h.adjoint() * &it.operator).frobenius_norm() < 1e-12);
        assert!((&it.operator * h).frobenius_norm() < 1e-12);
        assert!(it.inverse.is_none());
        assert!(it.diagnostics.all_pass());
    }

    #[test]
    fn complex_coefficients_not_self_adjoint() {
        let (sys, _, tol) = fixture();
        let it = build_intertwiner(&sys, &[I, C64::new(2.0, 0.0)], &tol).unwrap();
        let x = &it.operator;
        assert!(x.distance(&x.adjoint()) > 0.1);
        let h = &sys.hamiltonian;
        assert!((&(&h.adjoint() * x) - &(x * h)).frobenius_norm() < 1e-10);
        assert!(it.diagnostics.all_pass(), "{}", it.diagnostics);
    }

    #[test]
    fn coefficient_count_checked() {
        let (sys, _, tol) = fixture();
        assert!(matches!(
            build_intertwiner(&sys, &[ONE], &tol),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn space_of_diagonal() {
        let tol = ToleranceConfig::default();
        let b = symmetry_space(&ComplexMatrix::from_real_diag(&[1.0, 2.0]), &tol).unwrap();
        assert_eq!(b.len(), 2);
        for x in &b {
            assert!(x[(0, 1)].norm() < 1e-12 && x[(1, 0)].norm() < 1e-12);
        }
    }

    #[test]
    fn space_in_psi_span() {
        let (sys, _, tol) = fixture();
        let b = symmetry_space(&sys.hamiltonian, &tol).unwrap();
        assert_eq!(b.len(), 2);
        for x in &b {
            assert!(psi_span_residual(&sys, x) < 1e-9);
        }
    }

    #[test]
    fn deformation_cases() {
        let (sys, m, tol) = fixture();
        let h = &sys.hamiltonian;
        let (p, r) = deform_symmetry(h, &m, m.s(), &ComplexMatrix::identity(2), &tol).unwrap();
        assert!(p.distance(m.s()) < 1e-15 && r.verdict);
        let (p, r) = deform_symmetry(h, &m, m.s(), h, &tol).unwrap();
        assert!(p.distance(&(m.s() * h)) < 1e-15);
        assert!(r.verdict, "{r:?}");
        // X not a symmetry
        assert!(matches!(
            deform_symmetry(h, &m, &ComplexMatrix::identity(2), h, &tol),
            Err(Error::Contract(_))
        ));
        // Y not in the commutant
        let y = ComplexMatrix::from_real_rows(&[[0.0, 0.0], [1.0, 0.0]]).unwrap();
        assert!(matches!(deform_symmetry(h, &m, m.s(), &y, &tol), Err(Error::Contract(_))));
    }

    #[test]
    fn empty_samples_rejected() {
        let (sys, m, tol) = fixture();
        assert!(symmetry_report(&sys.hamiltonian, &m, m.s(), &[], &tol).is_err());
    }
}
