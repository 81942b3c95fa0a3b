//! Biorthogonal eigenstructure of a non-Hermitian Hamiltonian with real,
//! simple spectrum, and the metric operators built from it.
//!
//! Normalization: each right eigenvector `φ_k` has unit Euclidean norm and
//! its first non-negligible component real and positive; the partner `Ψ_k`
//! (an eigenvector of `H†`) absorbs the remaining scale so that
//! `⟨φ_k, Ψ_k⟩ = 1`.

use crate::error::{Error, Result};
use crate::linalg::{
    eig_right, eigenvalues, inner, operator_norm, vec_norm, vec_sub, ComplexMatrix, C64, ONE, ZERO,
};
use crate::report::{relative, DiagnosticReport};
use crate::tolerance::ToleranceConfig;

/// Components below this fraction of the largest one are skipped when
/// choosing the phase reference.
const PHASE_REFERENCE_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct BiorthogonalSystem {
    pub hamiltonian: ComplexMatrix,
    /// Strictly increasing.
    pub eigenvalues: Vec<f64>,
    pub phi: Vec<Vec<C64>>,
    pub psi: Vec<Vec<C64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricPair {
    /// `S_Ψ = Σ |Ψ_k⟩⟨Ψ_k|`, the operator written `S` elsewhere.
    pub s_psi: ComplexMatrix,
    /// `S_φ = Σ |φ_k⟩⟨φ_k| = S_Ψ⁻¹`.
    pub s_phi: ComplexMatrix,
    /// Smallest eigenvalue of `S_Ψ`.
    pub min_eigenvalue: f64,
}

impl MetricPair {
    #[inline]
    pub fn s(&self) -> &ComplexMatrix {
        &self.s_psi
    }

    #[inline]
    pub fn s_inv(&self) -> &ComplexMatrix {
        &self.s_phi
    }

    pub fn dimension(&self) -> usize {
        self.s_psi.rows()
    }

    /// The trivial metric of a Hermitian Hamiltonian.
    pub fn identity(n: usize) -> Self {
        Self {
            s_psi: ComplexMatrix::identity(n),
            s_phi: ComplexMatrix::identity(n),
            min_eigenvalue: 1.0,
        }
    }
}

impl BiorthogonalSystem {
    pub fn dimension(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `|Ψ_k⟩⟨Ψ_k|`.
    pub fn psi_projector(&self, k: usize) -> ComplexMatrix {
        ComplexMatrix::outer(&self.psi[k], &self.psi[k])
    }

    /// `|φ_k⟩⟨φ_k|`.
    pub fn phi_projector(&self, k: usize) -> ComplexMatrix {
        ComplexMatrix::outer(&self.phi[k], &self.phi[k])
    }

    fn rank_one_sum(left: &[Vec<C64>], right: &[Vec<C64>]) -> ComplexMatrix {
        let n = left[0].len();
        left.iter()
            .zip(right)
            .fold(ComplexMatrix::zeros(n, n), |acc, (u, v)| &acc + &ComplexMatrix::outer(u, v))
    }
}

pub fn analyze_hamiltonian(h: &ComplexMatrix, tol: &ToleranceConfig) -> Result<BiorthogonalSystem> {
    tol.validate()?;
    let n = h.ensure_square("analyze_hamiltonian")?;
    h.ensure_finite("analyze_hamiltonian")?;
    let scale = operator_norm(h).max(f64::MIN_POSITIVE);

    let right = eig_right(h, tol)?;
    for l in &right.values {
        if l.im.abs() > tol.reality_tol * scale {
            return Err(Error::SpectrumNotReal { re: l.re, im: l.im });
        }
    }
    let energies: Vec<f64> = right.values.iter().map(|l| l.re).collect();
    for w in energies.windows(2) {
        if w[1] - w[0] < tol.gap_tol * scale {
            return Err(Error::Degenerate { a: w[0], b: w[1] });
        }
    }

    let phi: Vec<Vec<C64>> = right.vectors.into_iter().map(fix_phase).collect();

    let left = eig_right(&h.adjoint(), tol)?;
    let min_gap = energies
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let mut psi = Vec::with_capacity(n);
    for (k, e) in energies.iter().enumerate() {
        // H† has the conjugate spectrum, which is the same real set in the same order
        let mu = left.values[k];
        if (mu - C64::new(*e, 0.0)).norm() > 0.5 * min_gap.min(scale) {
            return Err(Error::Internal(format!(
                "eigenvalue {k} of H† ({mu}) does not match E_{k} = {e}"
            )));
        }
        let w = &left.vectors[k];
        let overlap = inner(&phi[k], w);
        if overlap.norm() <= f64::EPSILON {
            return Err(Error::Internal(format!(
                "left and right eigenvectors {k} are numerically orthogonal"
            )));
        }
        let c = ONE / overlap;
        psi.push(w.iter().map(|x| x * c).collect());
    }

    Ok(BiorthogonalSystem {
        hamiltonian: h.clone(),
        eigenvalues: energies,
        phi,
        psi,
    })
}

fn fix_phase(mut v: Vec<C64>) -> Vec<C64> {
    let vmax = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(first) = v.iter().find(|z| z.norm() > PHASE_REFERENCE_FLOOR * vmax).copied() {
        let rot = first.conj() / first.norm();
        for z in &mut v {
            *z *= rot;
        }
    }
    v
}

pub fn metric_operators(sys: &BiorthogonalSystem, tol: &ToleranceConfig) -> Result<MetricPair> {
    let s_psi = BiorthogonalSystem::rank_one_sum(&sys.psi, &sys.psi);
    let s_phi = BiorthogonalSystem::rank_one_sum(&sys.phi, &sys.phi);
    let min_eigenvalue = eigenvalues(&s_psi, tol)?
        .iter()
        .map(|z| z.re)
        .fold(f64::INFINITY, f64::min);
    if min_eigenvalue.is_nan() || min_eigenvalue <= 0.0 {
        return Err(Error::Internal(format!(
            "S_Ψ is not positive definite (smallest eigenvalue {min_eigenvalue:e})"
        )));
    }
    Ok(MetricPair {
        s_psi,
        s_phi,
        min_eigenvalue,
    })
}

pub fn validate_system(
    sys: &BiorthogonalSystem,
    metric: &MetricPair,
    tol: &ToleranceConfig,
) -> DiagnosticReport {
    let h = &sys.hamiltonian;
    let hd = h.adjoint();
    let n = sys.dimension();
    let thr = tol.residual_tol;
    let hnorm = operator_norm(h);
    let id = ComplexMatrix::identity(n);
    let mut r = DiagnosticReport::new();

    let eig_res = |m: &ComplexMatrix, vs: &[Vec<C64>]| {
        vs.iter()
            .zip(&sys.eigenvalues)
            .map(|(v, &e)| {
                let lhs = m.mul_vec(v);
                let rhs: Vec<C64> = v.iter().map(|x| x * e).collect();
                relative(vec_norm(&vec_sub(&lhs, &rhs)), hnorm * vec_norm(v))
            })
            .fold(0.0, f64::max)
    };
    r.check("right eigen-equation", eig_res(h, &sys.phi), thr, "H φ_k = E_k φ_k");
    r.check("left eigen-equation", eig_res(&hd, &sys.psi), thr, "H† Ψ_k = E_k Ψ_k");

    let mut bio = 0.0f64;
    for k in 0..n {
        for l in 0..n {
            let target = if k == l { ONE } else { ZERO };
            let d = (inner(&sys.phi[k], &sys.psi[l]) - target).norm();
            let s = (vec_norm(&sys.phi[k]) * vec_norm(&sys.psi[l])).max(1.0);
            bio = bio.max(d / s);
        }
    }
    r.check("biorthonormality", bio, thr, "⟨φ_k, Ψ_l⟩ = δ_kl");

    let pair_scale: f64 = sys
        .phi
        .iter()
        .zip(&sys.psi)
        .map(|(p, q)| vec_norm(p) * vec_norm(q))
        .sum::<f64>()
        .max(1.0);
    let res1 = BiorthogonalSystem::rank_one_sum(&sys.phi, &sys.psi);
    let res2 = BiorthogonalSystem::rank_one_sum(&sys.psi, &sys.phi);
    r.check(
        "resolution of identity (φ,Ψ)",
        res1.distance(&id) / pair_scale,
        thr,
        "Σ_k |φ_k⟩⟨Ψ_k| = 1",
    );
    r.check(
        "resolution of identity (Ψ,φ)",
        res2.distance(&id) / pair_scale,
        thr,
        "Σ_k |Ψ_k⟩⟨φ_k| = 1",
    );

    let s = metric.s();
    let si = metric.s_inv();
    let sn = s.frobenius_norm();
    let sin = si.frobenius_norm();
    let hf = h.frobenius_norm();
    r.check(
        "metric intertwines H",
        relative((s * h).distance(&(&hd * s)), sn * hf),
        thr,
        "S_Ψ H = H† S_Ψ",
    );
    r.check(
        "inverse metric intertwines H†",
        relative((si * &hd).distance(&(h * si)), sin * hf),
        thr,
        "S_φ H† = H S_φ",
    );
    let map_res = |m: &ComplexMatrix, from: &[Vec<C64>], to: &[Vec<C64>]| {
        from.iter()
            .zip(to)
            .map(|(f, t)| {
                relative(
                    vec_norm(&vec_sub(&m.mul_vec(f), t)),
                    m.frobenius_norm() * vec_norm(f),
                )
            })
            .fold(0.0, f64::max)
    };
    r.check("S_Ψ maps φ to Ψ", map_res(s, &sys.phi, &sys.psi), thr, "S_Ψ φ_n = Ψ_n");
    r.check("S_φ maps Ψ to φ", map_res(si, &sys.psi, &sys.phi), thr, "S_φ Ψ_n = φ_n");
    r.check(
        "metric inverse pair",
        relative((s * si).distance(&id), sn * sin),
        thr,
        "S_Ψ S_φ = 1",
    );
    r.check(
        "S_Ψ self-adjoint",
        relative(s.distance(&s.adjoint()), sn),
        thr,
        "S_Ψ = S_Ψ†",
    );
    r.check(
        "S_φ self-adjoint",
        relative(si.distance(&si.adjoint()), sin),
        thr,
        "S_φ = S_φ†",
    );
    r.expect_exceeds(
        "S_Ψ positivity",
        metric.min_eigenvalue,
        0.0,
        "min σ(S_Ψ) > 0",
    );
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    fn close(a: &[C64], b: &[f64], eps: f64) -> bool {
        a.iter().zip(b).all(|(x, &y)| (x - C64::new(y, 0.0)).norm() <= eps)
    }

    #[test]
    fn hermitian_diagonal_gives_standard_basis() {
        let tol = ToleranceConfig::default();
        let sys = analyze_hamiltonian(&ComplexMatrix::from_real_diag(&[1.0, 2.0]), &tol).unwrap();
        assert_eq!(sys.eigenvalues, vec![1.0, 2.0]);
        assert!(close(&sys.phi[0], &[1.0, 0.0], 1e-15));
        assert!(close(&sys.phi[1], &[0.0, 1.0], 1e-15));
        assert_eq!(sys.phi, sys.psi);
        let m = metric_operators(&sys, &tol).unwrap();
        assert!(m.s_psi.distance(&ComplexMatrix::identity(2)) < 1e-15);
        assert!(m.s_phi.distance(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn two_by_two_biorthogonal_pair() {
        // hand-solved: φ_0=(1,0), φ_1=(1,1)/√2, Ψ_0=(1,-1), Ψ_1=(0,√2)
        let tol = ToleranceConfig::default();
        let sys = analyze_hamiltonian(&fixture(), &tol).unwrap();
        assert!(sys.eigenvalues[0].abs() < 1e-15);
        assert!((sys.eigenvalues[1] - 1.0).abs() < 1e-15);
        let r = 1.0 / 2f64.sqrt();
        assert!(close(&sys.phi[0], &[1.0, 0.0], 1e-14));
        assert!(close(&sys.phi[1], &[r, r], 1e-14));
        assert!(close(&sys.psi[0], &[1.0, -1.0], 1e-14));
        assert!(close(&sys.psi[1], &[0.0, 2f64.sqrt()], 1e-14));
    }

    #[test]
    fn two_by_two_metric() {
        let tol = ToleranceConfig::default();
        let sys = analyze_hamiltonian(&fixture(), &tol).unwrap();
        let m = metric_operators(&sys, &tol).unwrap();
        let s = ComplexMatrix::from_real_rows(&[[1.0, -1.0], [-1.0, 3.0]]).unwrap();
        let si = ComplexMatrix::from_real_rows(&[[1.5, 0.5], [0.5, 0.5]]).unwrap();
        assert!(m.s_psi.max_abs_diff(&s) < 1e-14);
        assert!(m.s_phi.max_abs_diff(&si) < 1e-14);
        assert!((&m.s_psi * &m.s_phi).distance(&ComplexMatrix::identity(2)) < 1e-14);
        // eigenvalues of S are 2 ∓ √2
        assert!((m.min_eigenvalue - (2.0 - 2f64.sqrt())).abs() < 1e-14);
    }

    #[test]
    fn two_by_two_validation_passes() {
        let tol = ToleranceConfig::default();
        let h = fixture();
        let sys = analyze_hamiltonian(&h, &tol).unwrap();
        let m = metric_operators(&sys, &tol).unwrap();
        let rep = validate_system(&sys, &m, &tol);
        assert!(rep.all_pass(), "{rep}");
        // both sides equal [[0,0],[0,2]]
        let lhs = &m.s_psi * &h;
        let expected = ComplexMatrix::from_real_rows(&[[0.0, 0.0], [0.0, 2.0]]).unwrap();
        assert!(lhs.max_abs_diff(&expected) < 1e-14);
        assert!((&h.adjoint() * &m.s_psi).distance(&lhs) <= 1e-9);
    }

    #[test]
    fn complex_spectrum_rejected() {
        let tol = ToleranceConfig::default();
        let h = ComplexMatrix::from_diag(&[C64::new(1.0, 0.0), C64::new(1.0, 1.0)]);
        assert!(matches!(
            analyze_hamiltonian(&h, &tol),
            Err(Error::SpectrumNotReal { .. })
        ));
    }

    #[test]
    fn degenerate_spectrum_rejected() {
        let tol = ToleranceConfig::default();
        let h = ComplexMatrix::from_real_diag(&[2.0, 2.0, 3.0]);
        assert!(matches!(analyze_hamiltonian(&h, &tol), Err(Error::Degenerate { .. })));
    }

    #[test]
    fn corrupted_partner_fails_biorthonormality() {
        let tol = ToleranceConfig::default();
        let mut sys = analyze_hamiltonian(&fixture(), &tol).unwrap();
        let m = metric_operators(&sys, &tol).unwrap();
        for x in &mut sys.psi[1] {
            *x *= 2.0;
        }
        let rep = validate_system(&sys, &m, &tol);
        assert!(!rep.get("biorthonormality").unwrap().pass);
    }

    #[test]
    fn hermitian_residuals_near_machine_epsilon() {
        let tol = ToleranceConfig::default();
        let h = ComplexMatrix::from_rows(&[
            vec![C64::new(1.0, 0.0), C64::new(0.5, 0.5)],
            vec![C64::new(0.5, -0.5), C64::new(-1.0, 0.0)],
        ])
        .unwrap();
        let sys = analyze_hamiltonian(&h, &tol).unwrap();
        let m = metric_operators(&sys, &tol).unwrap();
        let rep = validate_system(&sys, &m, &tol);
        for e in &rep.entries {
            if e.name != "S_Ψ positivity" {
                assert!(e.residual < 1e-14, "{} = {}", e.name, e.residual);
            }
        }
    }

    #[test]
    fn deterministic() {
        let tol = ToleranceConfig::default();
        let h = fixture();
        assert_eq!(
            analyze_hamiltonian(&h, &tol).unwrap(),
            analyze_hamiltonian(&h, &tol).unwrap()
        );
    }
}
