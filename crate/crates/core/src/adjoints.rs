//! The metric-weighted scalar products `⟨f,g⟩_♭ = ⟨S⁻¹f, g⟩` and
//! `⟨f,g⟩_♯ = ⟨Sf, g⟩`, their adjoints `X♭ = SX†S⁻¹`, `X♯ = S⁻¹X†S`, and
//! the eigenbases `ξ_n = SΨ_n`, `η_n = S⁻¹φ_n` of `H♭` and `(H♭)†`.

use serde::{Deserialize, Serialize};

use crate::biortho::{BiorthogonalSystem, MetricPair};
use crate::error::{Error, Result};
use crate::fixtures::{self, FixtureRng};
use crate::linalg::{inner, vec_norm, vec_sub, ComplexMatrix, C64, ONE, ZERO};
use crate::report::{relative, DiagnosticReport};
use crate::symmetry::{build_intertwiner, symmetry_report, DEFAULT_T_SAMPLES};
use crate::tolerance::ToleranceConfig;

/// Number of random vector pairs used by the sampled checks.
pub const SAMPLE_PAIRS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Flat,
    Sharp,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::Flat, Variant::Sharp];

    pub fn symbol(self) -> &'static str {
        match self {
            Variant::Flat => "♭",
            Variant::Sharp => "♯",
        }
    }

    /// The weight in `⟨f, g⟩_v = ⟨W f, g⟩`.
    fn weight(self, metric: &MetricPair) -> &ComplexMatrix {
        match self {
            Variant::Flat => metric.s_inv(),
            Variant::Sharp => metric.s(),
        }
    }
}

fn check_vec(op: &'static str, n: usize, v: &[C64]) -> Result<()> {
    if v.len() != n {
        return Err(Error::dim(op, format!("vector of length {} for dimension {n}", v.len())));
    }
    Ok(())
}

pub fn inner_product_variant(metric: &MetricPair, variant: Variant, f: &[C64], g: &[C64]) -> Result<C64> {
    let n = metric.dimension();
    check_vec("inner_product_variant", n, f)?;
    check_vec("inner_product_variant", n, g)?;
    Ok(inner(&variant.weight(metric).mul_vec(f), g))
}

pub fn adjoint_variant(metric: &MetricPair, variant: Variant, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    ComplexMatrix::ensure_same_square("adjoint_variant", &[metric.s(), x])?;
    let (s, si) = (metric.s(), metric.s_inv());
    Ok(match variant {
        Variant::Flat => &(s * &x.adjoint()) * si,
        Variant::Sharp => &(si * &x.adjoint()) * s,
    })
}

/// `‖S‖_F ‖S⁻¹‖_F`.
fn metric_condition(metric: &MetricPair) -> f64 {
    metric.s().frobenius_norm() * metric.s_inv().frobenius_norm()
}

pub fn adjoint_diagnostics(
    h: &ComplexMatrix,
    metric: &MetricPair,
    tol: &ToleranceConfig,
    seed: u64,
) -> Result<DiagnosticReport> {
    let n = ComplexMatrix::ensure_same_square("adjoint_diagnostics", &[h, metric.s(), metric.s_inv()])?;
    let thr = tol.residual_tol;
    let kappa = metric_condition(metric);
    let hn = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut r = DiagnosticReport::new();

    let h_sharp = adjoint_variant(metric, Variant::Sharp, h)?;
    let hd = h.adjoint();
    let hd_flat = adjoint_variant(metric, Variant::Flat, &hd)?;
    let r_sharp = relative(h.distance(&h_sharp), hn);
    let r_flat = relative(hd.distance(&hd_flat), hn);
    r.check("H self-adjoint under ♯", r_sharp, thr, "H = H♯");
    r.check("H† self-adjoint under ♭", r_flat, thr, "H† = (H†)♭");
    r.check(
        "the two self-adjointness forms agree",
        (r_sharp - r_flat).abs(),
        thr,
        "‖H − H♯‖ = ‖H† − (H†)♭‖",
    );

    let mut rng = fixtures::rng(seed);
    let xr = fixtures::matrix(&mut rng, n);
    for v in Variant::ALL {
        let sym = v.symbol();
        let w = v.weight(metric).frobenius_norm();
        let (mut lin, mut herm, mut pos) = (0.0f64, 0.0f64, f64::INFINITY);
        let (mut adj_h, mut adj_x) = (0.0f64, 0.0f64);
        let h_v = adjoint_variant(metric, v, h)?;
        let x_v = adjoint_variant(metric, v, &xr)?;
        for _ in 0..SAMPLE_PAIRS {
            let (f, g, k) = sample_triple(&mut rng, n);
            let a = fixtures::complex(&mut rng);
            let (nf, ng, nk) = (vec_norm(&f), vec_norm(&g), vec_norm(&k));
            let ip = |p: &[C64], q: &[C64]| inner_product_variant(metric, v, p, q);
            let comb: Vec<C64> = g.iter().zip(&k).map(|(x, y)| a * x + y).collect();
            let d = ip(&f, &comb)? - (a * ip(&f, &g)? + ip(&f, &k)?);
            lin = lin.max(relative(d.norm(), w * nf * (a.norm() * ng + nk)));
            let d = ip(&f, &g)? - ip(&g, &f)?.conj();
            herm = herm.max(relative(d.norm(), w * nf * ng));
            let ff = ip(&f, &f)?;
            pos = pos.min(ff.re / (nf * nf));
            herm = herm.max(relative(ff.im.abs(), w * nf * nf));
            for (x, xv, acc) in [(h, &h_v, &mut adj_h), (&xr, &x_v, &mut adj_x)] {
                let d = ip(&x.mul_vec(&f), &g)? - ip(&f, &xv.mul_vec(&g))?;
                let s = x.frobenius_norm() * nf * ng * kappa * w;
                *acc = acc.max(relative(d.norm(), s));
            }
        }
        r.check(
            &format!("{sym} product linear in second slot"),
            lin,
            thr,
            &format!("⟨f, αg + h⟩{sym} = α⟨f, g⟩{sym} + ⟨f, h⟩{sym}"),
        );
        r.check(
            &format!("{sym} product conjugate symmetric"),
            herm,
            thr,
            &format!("⟨f, g⟩{sym} = conj ⟨g, f⟩{sym}"),
        );
        r.expect_exceeds(
            &format!("{sym} product positivity"),
            pos,
            0.0,
            &format!("⟨f, f⟩{sym} > 0"),
        );
        r.check(
            &format!("{sym}-adjoint of H"),
            adj_h,
            thr,
            &format!("⟨Hf, g⟩{sym} = ⟨f, H{sym} g⟩{sym}"),
        );
        r.check(
            &format!("{sym}-adjoint of random X"),
            adj_x,
            thr,
            &format!("⟨Xf, g⟩{sym} = ⟨f, X{sym} g⟩{sym}"),
        );
        let back = adjoint_variant(metric, v, &x_v)?;
        r.check(
            &format!("{sym} involutive"),
            relative(back.distance(&xr), kappa * kappa * xr.frobenius_norm()),
            thr,
            &format!("(X{sym}){sym} = X"),
        );
    }
    let lhs = adjoint_variant(metric, Variant::Flat, &xr)?.adjoint();
    let rhs = adjoint_variant(metric, Variant::Sharp, &xr.adjoint())?;
    r.check(
        "♭ then † equals † then ♯",
        relative(lhs.distance(&rhs), kappa * xr.frobenius_norm()),
        thr,
        "(X♭)† = (X†)♯",
    );
    Ok(r)
}

fn sample_triple(rng: &mut FixtureRng, n: usize) -> (Vec<C64>, Vec<C64>, Vec<C64>) {
    loop {
        let f = fixtures::vector(rng, n);
        let g = fixtures::vector(rng, n);
        let k = fixtures::vector(rng, n);
        if vec_norm(&f) > 1e-3 && vec_norm(&g) > 1e-3 {
            return (f, g, k);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdjointBases {
    /// `ξ_n = SΨ_n`
    pub xi: Vec<Vec<C64>>,
    /// `η_n = S⁻¹φ_n`
    pub eta: Vec<Vec<C64>>,
}

/// `‖H♭(SX) − (SX)H‖_F` together with its scale
/// `(1 + ‖H‖)(1 + ‖X‖)(1 + ‖S‖)(1 + ‖S⁻¹‖)`.
pub fn flat_intertwining_residual(
    h: &ComplexMatrix,
    metric: &MetricPair,
    x: &ComplexMatrix,
) -> Result<(f64, f64)> {
    let h_flat = adjoint_variant(metric, Variant::Flat, h)?;
    ComplexMatrix::ensure_same_square("flat_intertwining_residual", &[h, x])?;
    let sx = metric.s() * x;
    let res = (&(&h_flat * &sx) - &(&sx * h)).frobenius_norm();
    let scale = (1.0 + h.frobenius_norm())
        * (1.0 + x.frobenius_norm())
        * (1.0 + metric.s().frobenius_norm())
        * (1.0 + metric.s_inv().frobenius_norm());
    Ok((res, scale))
}

/// The default operators for the `H♭(SX) = (SX)H` check: `S`, the rank-one
/// intertwiner with coefficients `(1, 0, …, 0)`, the identity, and a
/// seeded random matrix.
pub fn default_test_set(sys: &BiorthogonalSystem, metric: &MetricPair, seed: u64) -> Result<Vec<(String, ComplexMatrix)>> {
    let n = sys.dimension();
    let mut coeffs = vec![ZERO; n];
    coeffs[0] = ONE;
    let tol = ToleranceConfig::default();
    let rank_one = build_intertwiner(sys, &coeffs, &tol)?.operator;
    let mut rng = fixtures::rng(seed ^ 0x5eed_0005);
    Ok(vec![
        ("S".to_string(), metric.s().clone()),
        ("rank-one intertwiner".to_string(), rank_one),
        ("identity".to_string(), ComplexMatrix::identity(n)),
        ("random".to_string(), fixtures::matrix(&mut rng, n)),
    ])
}

pub fn flat_spectral_system(
    sys: &BiorthogonalSystem,
    metric: &MetricPair,
    tol: &ToleranceConfig,
    test_set: &[(String, ComplexMatrix)],
) -> Result<(AdjointBases, DiagnosticReport)> {
    let h = &sys.hamiltonian;
    ComplexMatrix::ensure_same_square("flat_spectral_system", &[h, metric.s()])?;
    let thr = tol.residual_tol;
    let (s, si) = (metric.s(), metric.s_inv());
    let xi: Vec<Vec<C64>> = sys.psi.iter().map(|p| s.mul_vec(p)).collect();
    let eta: Vec<Vec<C64>> = sys.phi.iter().map(|p| si.mul_vec(p)).collect();
    let h_flat = adjoint_variant(metric, Variant::Flat, h)?;
    let h_flat_d = h_flat.adjoint();
    let hd = h.adjoint();

    let eig = |m: &ComplexMatrix, vs: &[Vec<C64>]| {
        let mn = m.frobenius_norm().max(f64::MIN_POSITIVE);
        vs.iter()
            .zip(&sys.eigenvalues)
            .map(|(v, &e)| {
                let ev: Vec<C64> = v.iter().map(|z| z * e).collect();
                relative(vec_norm(&vec_sub(&m.mul_vec(v), &ev)), mn * vec_norm(v))
            })
            .fold(0.0, f64::max)
    };
    let mut r = DiagnosticReport::new();
    r.check("H eigenvectors φ", eig(h, &sys.phi), thr, "H φ_n = E_n φ_n");
    r.check("H† eigenvectors Ψ", eig(&hd, &sys.psi), thr, "H† Ψ_n = E_n Ψ_n");
    r.check("H♭ eigenvectors ξ", eig(&h_flat, &xi), thr, "H♭ ξ_n = E_n ξ_n");
    r.check("(H♭)† eigenvectors η", eig(&h_flat_d, &eta), thr, "(H♭)† η_n = E_n η_n");
    let mut bio = 0.0f64;
    for (k, e) in eta.iter().enumerate() {
        for (l, x) in xi.iter().enumerate() {
            let target = if k == l { ONE } else { ZERO };
            let sc = (vec_norm(e) * vec_norm(x)).max(1.0);
            bio = bio.max((inner(e, x) - target).norm() / sc);
        }
    }
    r.check("η, ξ biorthonormal", bio, thr, "⟨η_n, ξ_m⟩ = δ_nm");

    for (label, x) in test_set {
        ComplexMatrix::ensure_same_square("flat_spectral_system", &[h, x])?;
        let (res, scale) = flat_intertwining_residual(h, metric, x)?;
        let flat_ok = res <= thr * scale;
        let verdict = symmetry_report(h, metric, x, &DEFAULT_T_SAMPLES, tol)?.verdict;
        let name = format!("SX intertwines H and H♭ [{label}]");
        if flat_ok {
            r.check(&name, res / scale, thr, "H♭(SX) = (SX)H");
        } else {
            r.expect_exceeds(&name, res / scale, thr, "H♭(SX) ≠ (SX)H");
        }
        r.check(
            &format!("agrees with γ-symmetry verdict [{label}]"),
            if flat_ok == verdict { 0.0 } else { 1.0 },
            0.0,
            "H♭(SX) = (SX)H ⇔ γ^t(X) = X",
        );
    }
    Ok((AdjointBases { xi, eta }, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biortho::{analyze_hamiltonian, metric_operators};
    use crate::linalg::invert;

    fn fixture() -> (BiorthogonalSystem, MetricPair, ToleranceConfig) {
        let tol = ToleranceConfig::default();
        let h = ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 1.0]]).unwrap();
        let sys = analyze_hamiltonian(&h, &tol).unwrap();
        let m = metric_operators(&sys, &tol).unwrap();
        (sys, m, tol)
    }

    #[test]
    fn identity_metric_gives_standard_product() {
        let m = MetricPair::identity(2);
        let f = vec![C64::new(1.0, 2.0), C64::new(0.0, -1.0)];
        let g = vec![C64::new(0.5, 0.0), C64::new(3.0, 1.0)];
        for v in Variant::ALL {
            assert_eq!(inner_product_variant(&m, v, &f, &g).unwrap(), inner(&f, &g));
        }
        let x = ComplexMatrix::from_rows(&[vec![ONE, C64::new(0.0, 2.0)], vec![ZERO, -ONE]]).unwrap();
        for v in Variant::ALL {
            assert_eq!(adjoint_variant(&m, v, &x).unwrap(), x.adjoint());
        }
    }

    #[test]
    fn hand_values_on_fixture() {
        let (_, m, _) = fixture();
        let e0 = vec![ONE, ZERO];
        let sharp = inner_product_variant(&m, Variant::Sharp, &e0, &e0).unwrap();
        let flat = inner_product_variant(&m, Variant::Flat, &e0, &e0).unwrap();
        assert!((sharp - ONE).norm() < 1e-12);
        assert!((flat - C64::new(1.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn h_is_sharp_self_adjoint() {
        let (sys, m, _) = fixture();
        let h = &sys.hamiltonian;
        let hs = adjoint_variant(&m, Variant::Sharp, h).unwrap();
        assert!(h.distance(&hs) < 1e-9);
    }

    #[test]
    fn diagnostics_pass_on_fixture_and_hermitian() {
        let (sys, m, tol) = fixture();
        let r = adjoint_diagnostics(&sys.hamiltonian, &m, &tol, 42).unwrap();
        assert!(r.all_pass(), "{r}");
        let h = ComplexMatrix::from_real_rows(&[[1.0, 2.0], [2.0, -1.0]]).unwrap();
        let r = adjoint_diagnostics(&h, &MetricPair::identity(2), &tol, 42).unwrap();
        assert!(r.all_pass(), "{r}");
        assert!(r.get("H self-adjoint under ♯").unwrap().residual < 1e-15);
    }

    #[test]
    fn corrupted_metric_fails() {
        let (sys, m, tol) = fixture();
        let s = m.s() + &ComplexMatrix::from_real_rows(&[[0.0, 0.1], [0.1, 0.0]]).unwrap();
        let si = invert(&s, &tol).unwrap();
        let bad = MetricPair { s_psi: s, s_phi: si, min_eigenvalue: m.min_eigenvalue };
        let r = adjoint_diagnostics(&sys.hamiltonian, &bad, &tol, 42).unwrap();
        assert!(!r.get("H self-adjoint under ♯").unwrap().pass);
    }

    #[test]
    fn flat_system_fixture() {
        let (sys, m, tol) = fixture();
        let set = default_test_set(&sys, &m, 42).unwrap();
        let (b, r) = flat_spectral_system(&sys, &m, &tol, &set).unwrap();
        assert!(r.all_pass(), "{r}");
        // ξ_0 = S Ψ_0 by direct product
        let expected = m.s().mul_vec(&sys.psi[0]);
        assert!(vec_norm(&vec_sub(&b.xi[0], &expected)) < 1e-15);
        let h_flat = adjoint_variant(&m, Variant::Flat, &sys.hamiltonian).unwrap();
        assert!(vec_norm(&h_flat.mul_vec(&b.xi[0])) < 1e-9);
        let (res, _) = flat_intertwining_residual(&sys.hamiltonian, &m, m.s()).unwrap();
        assert!(res < 1e-12);
    }

    #[test]
    fn hermitian_bases_coincide() {
        let tol = ToleranceConfig::default();
        let h = ComplexMatrix::from_real_diag(&[1.0, 2.0, 4.0]);
        let sys = analyze_hamiltonian(&h, &tol).unwrap();
        let m = metric_operators(&sys, &tol).unwrap();
        let (b, _) = flat_spectral_system(&sys, &m, &tol, &[]).unwrap();
        for k in 0..3 {
            for v in [&b.xi[k], &b.eta[k], &sys.psi[k]] {
                assert!(vec_norm(&vec_sub(v, &sys.phi[k])) < 1e-14);
            }
        }
    }

    #[test]
    fn dimension_checks() {
        let m = MetricPair::identity(2);
        assert!(inner_product_variant(&m, Variant::Flat, &[ONE], &[ONE, ONE]).is_err());
        assert!(adjoint_variant(&m, Variant::Sharp, &ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn random_vectors_have_positive_flat_norm() {
        let (_, m, _) = fixture();
        let mut rng = fixtures::rng(9);
        for _ in 0..50 {
            let f = fixtures::vector(&mut rng, 2);
            let v = inner_product_variant(&m, Variant::Flat, &f, &f).unwrap();
            assert!(v.re > 0.0 && v.im.abs() < 1e-12);
        }
    }
}
