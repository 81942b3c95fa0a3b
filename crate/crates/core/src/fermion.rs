//! Two fermionic modes on ℂ⁴ with the nilpotent Hamiltonian `H = N₁a₂`.
//!
//! Jordan–Wigner realization with mode 1 first: `a₁ = σ⁻ ⊗ 1`,
//! `a₂ = σ_z ⊗ σ⁻`, where `σ⁻ = |0⟩⟨1|` and basis index `2n₁ + n₂`.
//!
//! `H` has the single eigenvalue 0 and is not diagonalizable, so the
//! biorthogonal machinery rejects it; the γ-dynamics is still defined and
//! closes on a handful of operators:
//! `γ^t(a₁) = a₁ − i t a₁a₂`, `γ^t(a₂) = a₂ + i t N₁N₂`,
//! `γ^t(a₁a₂) = a₁a₂`, `γ^t(N₁N₂) = N₁N₂`.

use crate::dynamics::{gamma_ode, GammaPropagator};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, I};
use crate::report::{relative, DiagnosticReport};
use crate::tolerance::ToleranceConfig;

/// Default step of the fourth-order integrator.
pub const DEFAULT_DT: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct FermionAlgebra {
    pub a1: ComplexMatrix,
    pub a2: ComplexMatrix,
    pub a1_dag: ComplexMatrix,
    pub a2_dag: ComplexMatrix,
    pub n1: ComplexMatrix,
    pub n2: ComplexMatrix,
    /// `N₁a₂`
    pub h: ComplexMatrix,
    /// `N₁a₂†`
    pub h_dag: ComplexMatrix,
}

impl FermionAlgebra {
    pub fn annihilator(&self, j: usize) -> Result<&ComplexMatrix> {
        match j {
            1 => Ok(&self.a1),
            2 => Ok(&self.a2),
            _ => Err(Error::Contract(format!("mode index must be 1 or 2, got {j}"))),
        }
    }

    pub fn number(&self, j: usize) -> Result<&ComplexMatrix> {
        match j {
            1 => Ok(&self.n1),
            2 => Ok(&self.n2),
            _ => Err(Error::Contract(format!("mode index must be 1 or 2, got {j}"))),
        }
    }
}

pub fn build_fermion_algebra() -> FermionAlgebra {
    let lower = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
    let sz = ComplexMatrix::from_real_diag(&[1.0, -1.0]);
    let id2 = ComplexMatrix::identity(2);
    let a1 = lower.kron(&id2);
    let a2 = sz.kron(&lower);
    let a1_dag = a1.adjoint();
    let a2_dag = a2.adjoint();
    let n1 = &a1_dag * &a1;
    let n2 = &a2_dag * &a2;
    let h = &n1 * &a2;
    let h_dag = &n1 * &a2_dag;
    FermionAlgebra {
        a1,
        a2,
        a1_dag,
        a2_dag,
        n1,
        n2,
        h,
        h_dag,
    }
}

/// Residuals of the canonical anticommutation relations and the derived
/// identities `N_j² = N_j`, `H² = 0`, `H† = N₁a₂†`. All entries are small
/// integers, so the threshold is machine epsilon.
pub fn car_residuals(alg: &FermionAlgebra) -> DiagnosticReport {
    let thr = f64::EPSILON;
    let id = ComplexMatrix::identity(4);
    let zero = ComplexMatrix::zeros(4, 4);
    let a = [(&alg.a1, &alg.a1_dag), (&alg.a2, &alg.a2_dag)];
    let mut r = DiagnosticReport::new();
    for (i, (ai, _)) in a.iter().enumerate() {
        for (j, (aj, ajd)) in a.iter().enumerate() {
            let target = if i == j { &id } else { &zero };
            r.check(
                &format!("{{a{}, a{}†}}", i + 1, j + 1),
                ai.anticommutator(ajd).distance(target),
                thr,
                &format!("{{a_{}, a_{}†}} = {}", i + 1, j + 1, if i == j { "1" } else { "0" }),
            );
            if i <= j {
                r.check(
                    &format!("{{a{}, a{}}}", i + 1, j + 1),
                    ai.anticommutator(aj).frobenius_norm(),
                    thr,
                    &format!("{{a_{}, a_{}}} = 0", i + 1, j + 1),
                );
            }
        }
    }
    for (j, nj) in [(1, &alg.n1), (2, &alg.n2)] {
        r.check(&format!("N{j} idempotent"), nj.distance(&(nj * nj)), thr, &format!("N_{j}² = N_{j}"));
    }
    r.check("H nilpotent", (&alg.h * &alg.h).frobenius_norm(), thr, "H² = 0");
    r.check("H adjoint", alg.h.adjoint().distance(&alg.h_dag), thr, "H† = N₁a₂†");
    r
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormEvolution {
    pub t: f64,
    pub a1: ComplexMatrix,
    pub a2: ComplexMatrix,
    pub a1a2: ComplexMatrix,
    pub n1n2: ComplexMatrix,
}

pub fn closed_form_gamma(alg: &FermionAlgebra, t: f64) -> ClosedFormEvolution {
    let a1a2 = &alg.a1 * &alg.a2;
    let n1n2 = &alg.n1 * &alg.n2;
    ClosedFormEvolution {
        t,
        a1: &alg.a1 + &a1a2.scale(-I * t),
        a2: &alg.a2 + &n1n2.scale(I * t),
        a1a2,
        n1n2,
    }
}

/// Fourth-order Runge–Kutta for `dX/dt = i(H†X − XH)` from `X0`.
pub fn heisenberg_ode_integrate(
    alg: &FermionAlgebra,
    x0: &ComplexMatrix,
    t_final: f64,
    dt: f64,
) -> Result<ComplexMatrix> {
    Ok(gamma_ode(&alg.h, x0, t_final, dt)?.evolved)
}

/// `‖γ^t(a₁a₂) − γ^t(a₁)γ^t(a₂)‖_F` from exact exponentials.
pub fn nonfactorization_defect(alg: &FermionAlgebra, t: f64) -> Result<f64> {
    let g = GammaPropagator::new(&alg.h, t)?;
    let lhs = g.apply(&(&alg.a1 * &alg.a2))?;
    let rhs = &g.apply(&alg.a1)? * &g.apply(&alg.a2)?;
    Ok(lhs.distance(&rhs))
}

/// `‖γ^t(N_j) − γ^t(a_j†)γ^t(a_j)‖_F`. Zero for `j = 1` at every `t`
/// (the two sides happen to coincide for this `H`), equal to `t²` for
/// `j = 2`.
pub fn number_operator_defect(alg: &FermionAlgebra, j: usize, t: f64) -> Result<f64> {
    let a = alg.annihilator(j)?;
    let g = GammaPropagator::new(&alg.h, t)?;
    let direct = g.apply(alg.number(j)?)?;
    let product = &g.apply(&a.adjoint())? * &g.apply(a)?;
    Ok(direct.distance(&product))
}

/// CAR checks, three-way agreement, and the product defects, at the
/// requested times.
pub fn model_report(
    alg: &FermionAlgebra,
    times: &[f64],
    dt: f64,
    tol: &ToleranceConfig,
) -> Result<DiagnosticReport> {
    if times.is_empty() {
        return Err(Error::Contract("at least one time is required".into()));
    }
    let thr = tol.residual_tol;
    let mut r = car_residuals(alg);
    let a1a2 = &alg.a1 * &alg.a2;
    for &t in times {
        let cf = closed_form_gamma(alg, t);
        let g = GammaPropagator::new(&alg.h, t)?;
        let tag = format!("t={t}");
        for (name, x0, closed) in [("a1", &alg.a1, &cf.a1), ("a2", &alg.a2, &cf.a2)] {
            let direct = g.apply(x0)?;
            let ode = heisenberg_ode_integrate(alg, x0, t, dt)?;
            let worst = closed.distance(&direct).max(closed.distance(&ode)).max(direct.distance(&ode));
            let anchor = if name == "a1" {
                "γ^t(a₁) = a₁ − i t a₁a₂ (closed form, exponential, RK4)"
            } else {
                "γ^t(a₂) = a₂ + i t N₁N₂ (closed form, exponential, RK4)"
            };
            r.check(&format!("γ({name}) three-way agreement [{tag}]"), worst, thr.max(1e-8), anchor);
            let adj = g.apply(&x0.adjoint())?.distance(&direct.adjoint());
            r.check(&format!("γ({name}†) from γ({name}) [{tag}]"), adj, thr, "γ^t(a_j†) = γ^t(a_j)†");
        }
        r.check(
            &format!("a1a2 stationary [{tag}]"),
            g.apply(&a1a2)?.distance(&cf.a1a2),
            thr,
            "γ^t(a₁a₂) = a₁a₂",
        );
        r.check(
            &format!("N1N2 stationary [{tag}]"),
            g.apply(&cf.n1n2)?.distance(&cf.n1n2),
            thr,
            "γ^t(N₁N₂) = N₁N₂",
        );
        let d = nonfactorization_defect(alg, t)?;
        if t == 0.0 {
            r.check(&format!("non-factorization [{tag}]"), d, thr, "γ⁰(a₁a₂) = γ⁰(a₁)γ⁰(a₂)");
        } else {
            r.expect_exceeds(&format!("non-factorization [{tag}]"), d, thr, "γ^t(a₁a₂) ≠ γ^t(a₁)γ^t(a₂)");
        }
        r.record(
            &format!("N1 product defect [{tag}]"),
            number_operator_defect(alg, 1, t)?,
            thr,
            "‖γ^t(N₁) − γ^t(a₁†)γ^t(a₁)‖",
        );
        let d2 = number_operator_defect(alg, 2, t)?;
        if t == 0.0 {
            r.check(&format!("N2 product defect [{tag}]"), d2, thr, "γ⁰(N₂) = γ⁰(a₂†)γ⁰(a₂)");
        } else {
            r.expect_exceeds(&format!("N2 product defect [{tag}]"), d2, thr, "γ^t(N₂) ≠ γ^t(a₂†)γ^t(a₂)");
        }
        let scale = (1.0 + t * t).max(1.0);
        r.check(
            &format!("N2 product defect equals t² [{tag}]"),
            relative((d2 - t * t).abs(), scale),
            thr,
            "‖γ^t(N₂) − γ^t(a₂†)γ^t(a₂)‖_F = t²",
        );
    }
    Ok(r)
}
