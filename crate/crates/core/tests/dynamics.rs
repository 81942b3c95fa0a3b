use gammadyn::biortho::{analyze_hamiltonian, metric_operators};
use gammadyn::dynamics::{
    alpha_t, delta_commutator, delta_gamma, delta_gamma_power, dynamics_diagnostics, gamma_direct, gamma_identity,
    gamma_ode, gamma_series, gamma_t, series_truncation, EvolutionMethod, GammaPropagator,
};
use gammadyn::fixtures::{self, FixtureRng};
use gammadyn::linalg::{mat_exp, operator_norm, I};
use gammadyn::{ComplexMatrix, Error, ToleranceConfig};
use proptest::prelude::*;

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

/// Either kind of generator: real spectrum or arbitrary complex.
fn some_h(rng: &mut FixtureRng, n: usize, kind: u8) -> ComplexMatrix {
    match kind % 3 {
        0 => fixtures::real_spectrum_hamiltonian(rng, n).h,
        1 => fixtures::hermitian(rng, n),
        _ => fixtures::matrix(rng, n),
    }
}

/// Fourth-order central difference of `t ↦ γ^t(X)`.
fn fd4(h: &ComplexMatrix, x: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let e = 1e-3;
    let g = |s: f64| gamma_t(h, x, t + s).unwrap();
    let num = &(&g(-2.0 * e) - &g(2.0 * e)) + &(&g(e) - &g(-e)).scale_real(8.0);
    num.scale_real(1.0 / (12.0 * e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn one_parameter_group(seed in any::<u64>(), n in 1usize..7, kind in 0u8..3, s in -1.5f64..1.5, t in -1.5f64..1.5) {
        let mut rng = fixtures::rng(seed);
        let h = some_h(&mut rng, n, kind);
        let x = fixtures::matrix(&mut rng, n);
        let composed = gamma_t(&h, &gamma_t(&h, &x, t).unwrap(), s).unwrap();
        let joint = gamma_t(&h, &x, s + t).unwrap();
        let scale = GammaPropagator::new(&h, s).unwrap().scale() * GammaPropagator::new(&h, t).unwrap().scale() * x.frobenius_norm();
        prop_assert!(composed.distance(&joint) <= 1e-12 * scale);
        prop_assert!(gamma_t(&h, &x, 0.0).unwrap().distance(&x) == 0.0);
    }

    #[test]
    fn adjoint_preserving_and_linear(seed in any::<u64>(), n in 1usize..7, kind in 0u8..3, t in -2.0f64..2.0) {
        let mut rng = fixtures::rng(seed);
        let h = some_h(&mut rng, n, kind);
        let x = fixtures::matrix(&mut rng, n);
        let y = fixtures::matrix(&mut rng, n);
        let c = fixtures::complex(&mut rng);
        let p = GammaPropagator::new(&h, t).unwrap();
        let sc = p.scale() * (x.frobenius_norm() + y.frobenius_norm());
        prop_assert!(p.apply(&x.adjoint()).unwrap().distance(&p.apply(&x).unwrap().adjoint()) <= 1e-13 * sc);
        let lin = &p.apply(&x).unwrap().scale(c) + &p.apply(&y).unwrap();
        prop_assert!(p.apply(&(&x.scale(c) + &y)).unwrap().distance(&lin) <= 1e-13 * sc * (1.0 + c.norm()));
    }

    #[test]
    fn norm_bound(seed in any::<u64>(), n in 1usize..7, kind in 0u8..3, t in -2.0f64..2.0) {
        let mut rng = fixtures::rng(seed);
        let h = some_h(&mut rng, n, kind);
        let x = fixtures::matrix(&mut rng, n);
        let lhs = operator_norm(&gamma_t(&h, &x, t).unwrap());
        let rhs = (2.0 * t.abs() * operator_norm(&h)).exp() * operator_norm(&x);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn generator_is_lipschitz(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = fixtures::rng(seed);
        let h = fixtures::matrix(&mut rng, n);
        let x = fixtures::matrix(&mut rng, n);
        let y = fixtures::matrix(&mut rng, n);
        let lhs = operator_norm(&(&delta_gamma(&h, &x).unwrap() - &delta_gamma(&h, &y).unwrap()));
        prop_assert!(lhs <= 2.0 * operator_norm(&h) * operator_norm(&(&x - &y)) * (1.0 + 1e-12));
        // explicit formula i(H†X − XH)
        let explicit = (&(&h.adjoint() * &x) - &(&x * &h)).scale(I);
        prop_assert!(delta_gamma(&h, &x).unwrap().distance(&explicit) == 0.0);
    }

    #[test]
    fn derivative_identities(seed in any::<u64>(), n in 1usize..6, kind in 0u8..3, t in -1.5f64..1.5) {
        let mut rng = fixtures::rng(seed);
        let h = some_h(&mut rng, n, kind);
        let x = fixtures::matrix(&mut rng, n);
        let fd = fd4(&h, &x, t);
        let p = GammaPropagator::new(&h, t).unwrap();
        let a = p.apply(&delta_gamma(&h, &x).unwrap()).unwrap();
        let b = delta_gamma(&h, &p.apply(&x).unwrap()).unwrap();
        let scale = p.scale() * (1.0 + operator_norm(&h)).powi(5) * x.frobenius_norm();
        prop_assert!(fd.distance(&a) <= 1e-9 * scale, "{} vs {}", fd.distance(&a), scale);
        prop_assert!(a.distance(&b) <= 1e-12 * scale);
    }

    #[test]
    fn series_and_ode_agree_with_exponential(seed in any::<u64>(), n in 1usize..6, kind in 0u8..3, t in -1.0f64..1.0) {
        let mut rng = fixtures::rng(seed);
        let h = some_h(&mut rng, n, kind);
        let h = h.scale_real(2.0 / operator_norm(&h));
        let x = fixtures::matrix(&mut rng, n);
        let direct = gamma_direct(&h, &x, t).unwrap();
        let series = gamma_series(&h, &x, t, &tol()).unwrap();
        prop_assert_eq!(series.method, EvolutionMethod::Series);
        prop_assert!(series.evolved.distance(&direct.evolved) <= 1e-11);
        prop_assert!(series.truncation_bound.unwrap() <= tol().series_tol);
        let ode = gamma_ode(&h, &x, t, 1e-3).unwrap();
        prop_assert!(ode.evolved.distance(&direct.evolved) <= 1e-9 * direct.evolved.frobenius_norm().max(1.0));
    }

    #[test]
    fn factorizations_through_heisenberg_flow(seed in any::<u64>(), n in 1usize..6, kind in 0u8..3, t in -1.5f64..1.5) {
        let mut rng = fixtures::rng(seed);
        let h = some_h(&mut rng, n, kind);
        let x = fixtures::matrix(&mut rng, n);
        let p = GammaPropagator::new(&h, t).unwrap();
        let gx = p.apply(&x).unwrap();
        let g1 = p.identity_image();
        let via_left = &g1 * &alpha_t(&h, &x, t).unwrap();
        let via_right = &alpha_t(&h, &x.adjoint(), t).unwrap().adjoint() * &g1;
        let scale = p.scale() * mat_exp(&h.scale(I * t)).unwrap().frobenius_norm().powi(2) * x.frobenius_norm();
        prop_assert!(gx.distance(&via_left) <= 1e-12 * scale);
        prop_assert!(gx.distance(&via_right) <= 1e-12 * scale);
    }

    #[test]
    fn diagnostics_pass_for_real_spectrum(seed in any::<u64>(), n in 2usize..6, t in 0.05f64..2.0) {
        let mut rng = fixtures::rng(seed);
        let h = fixtures::real_spectrum_hamiltonian(&mut rng, n).h;
        let sys = analyze_hamiltonian(&h, &tol()).unwrap();
        let m = metric_operators(&sys, &tol()).unwrap();
        let x = fixtures::matrix(&mut rng, n);
        let y = fixtures::matrix(&mut rng, n);
        let rep = dynamics_diagnostics(&h, Some(&m), &x, &y, t, &tol()).unwrap();
        prop_assert!(rep.all_pass(), "{}", rep);
        // γ^t(1) = S α_H^t(S⁻¹)
        let oracle = m.s() * &alpha_t(&h, m.s_inv(), t).unwrap();
        let g1 = gamma_identity(&h, t).unwrap();
        prop_assert!(g1.distance(&oracle) <= 1e-10 * g1.frobenius_norm() * m.s().frobenius_norm() * m.s_inv().frobenius_norm());
    }

    #[test]
    fn hermitian_generators_give_automorphisms(seed in any::<u64>(), n in 1usize..6, t in -2.0f64..2.0) {
        let mut rng = fixtures::rng(seed);
        let h = fixtures::hermitian(&mut rng, n);
        let x = fixtures::matrix(&mut rng, n);
        let y = fixtures::matrix(&mut rng, n);
        let p = GammaPropagator::new(&h, t).unwrap();
        let sc = x.frobenius_norm() * y.frobenius_norm();
        let prod = p.apply(&(&x * &y)).unwrap();
        prop_assert!(prod.distance(&(&p.apply(&x).unwrap() * &p.apply(&y).unwrap())) <= 1e-12 * sc * n as f64);
        prop_assert!(p.identity_image().distance(&ComplexMatrix::identity(n)) <= 1e-12 * n as f64);
        prop_assert!(delta_gamma(&h, &x).unwrap().distance(&delta_commutator(&h, &x).unwrap()) <= 1e-13 * x.frobenius_norm() * h.frobenius_norm());
        let diag = dynamics_diagnostics(&h, None, &x, &y, t, &tol()).unwrap();
        prop_assert!(diag.all_pass(), "{}", diag);
    }

    #[test]
    fn truncation_tail_is_tight(h_norm in 0.01f64..5.0, t in 0.01f64..2.0) {
        let (k, tail) = series_truncation(h_norm, 1.0, t, 1e-12, 400).unwrap();
        prop_assert!(tail <= 1e-12);
        // the term dropped last already exceeds the tolerance on its own when K > 0
        if k > 0 {
            let r = 2.0 * h_norm * t;
            let log_term: f64 = (1..=k).map(|j| r.ln() - (j as f64).ln()).sum();
            prop_assert!(log_term.exp() + tail > 1e-12);
        }
    }
}

#[test]
fn nilpotent_generator_has_finite_series() {
    // δ_γ³ vanishes for H = E₁₂ and the series stops exactly
    let h = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
    let x = ComplexMatrix::from_real_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
    assert_eq!(delta_gamma_power(&h, &x, 3).unwrap().frobenius_norm(), 0.0);
    let t = 0.7;
    let d1 = delta_gamma(&h, &x).unwrap();
    let d2 = delta_gamma_power(&h, &x, 2).unwrap();
    let closed = &(&x + &d1.scale_real(t)) + &d2.scale_real(t * t / 2.0);
    assert!(gamma_t(&h, &x, t).unwrap().distance(&closed) < 1e-14);
}

#[test]
fn contract_violations() {
    let h = ComplexMatrix::identity(2);
    let x = ComplexMatrix::identity(3);
    assert!(matches!(gamma_t(&h, &x, 1.0), Err(Error::Dimension { .. })));
    assert!(matches!(gamma_ode(&h, &h, 1.0, 0.0), Err(Error::Contract(_))));
    assert!(matches!(gamma_ode(&h, &h, f64::NAN, 0.1), Err(Error::Contract(_))));
    let big = ComplexMatrix::identity(2).scale_real(1e3);
    assert!(matches!(
        gamma_series(&big, &h, 10.0, &tol()),
        Err(Error::Truncation { .. })
    ));
}
