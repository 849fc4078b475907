mod common;

use cmdnls_core::lax::*;
use cmdnls_core::linalg::{self, CMat};
use cmdnls_core::pde::pde_rhs;
use cmdnls_core::soliton::residues_from_poles;
use cmdnls_core::{hardy, ChiralField, Error, Functionals, Quadrature, Scheme, C64, TWO_PI};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_field(g: cmdnls_core::FrequencyGrid, seed: u64) -> ChiralField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let band = g.modes() / 4;
    let coeffs = (0..g.modes())
        .map(|k| if k < band { c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * 3.0 } else { c(0.0, 0.0) })
        .collect();
    ChiralField::new(g, coeffs).unwrap()
}

#[test]
fn toeplitz_of_zero_and_of_unit_symbol() {
    let g = grid(50.0, 32);
    let q = Quadrature::new(g, Scheme::Rectangle);
    let zero = vec![c(0.0, 0.0); 32];
    assert_eq!(linalg::max_abs(&toeplitz_from_symbol(&q, &zero)), 0.0);
    let mut delta = zero.clone();
    delta[0] = c(TWO_PI / g.dxi(), 0.0);
    let t = toeplitz_from_symbol(&q, &delta);
    let diff: CMat = &t - &linalg::identity(32);
    assert!(linalg::max_abs(&diff) < 1e-14);
}

#[test]
fn toeplitz_matrices_match_fast_kernels() {
    let g = grid(40.0, 64);
    let u = random_field(g, 1);
    let f = random_field(g, 2);
    for scheme in [Scheme::Gregory, Scheme::Rectangle] {
        let q = Quadrature::new(g, scheme);
        let t = toeplitz_from_symbol(&q, u.coeffs());
        let ts = toeplitz_adjoint(&q, u.coeffs());
        let scale = f.coeffs().iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(max_diff(&linalg::matvec(&t, f.coeffs()), &q.conv(u.coeffs(), f.coeffs())) < 1e-12 * scale * 10.0);
        assert!(max_diff(&linalg::matvec(&ts, f.coeffs()), &q.corr(u.coeffs(), f.coeffs())) < 1e-12 * scale * 10.0);
    }
}

#[test]
fn toeplitz_of_ground_state_squares_it() {
    // T_R R = R² = 2/(x+i)², whose transform is −4πξe^{−ξ}.
    let g = reference_grid();
    let r = ground_state(g);
    let q = Quadrature::new(g, Scheme::Gregory);
    let t = toeplitz_from_symbol(&q, r.coeffs());
    let got = linalg::matvec(&t, r.coeffs());
    let want: Vec<C64> = g.frequencies().iter().map(|&x| c(-2.0 * TWO_PI * x * (-x).exp(), 0.0)).collect();
    assert!(max_diff(&got, &want) < 1e-8, "{:e}", max_diff(&got, &want));
}

#[test]
fn lax_matrix_of_zero_is_frequency_diagonal() {
    let g = grid(50.0, 32);
    let l = assemble_lax(&ChiralField::zero(g), Scheme::Gregory);
    let d = linalg::diag(&g.frequencies().iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>());
    let diff: CMat = &l.entries - &d;
    assert_eq!(linalg::max_abs(&diff), 0.0);
}

#[test]
fn lax_matrix_matches_operator_application() {
    let g = grid(60.0, 128);
    let u = random_field(g, 3);
    let f = random_field(g, 4);
    for scheme in [Scheme::Gregory, Scheme::Rectangle] {
        let l = assemble_lax(&u, scheme);
        let fast = Functionals::for_field(&u, scheme).apply_lax(&u, f.coeffs());
        let scale = fast.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(max_diff(&l.apply(f.coeffs()), &fast) < 1e-10 * scale);
    }
}

#[test]
fn rectangle_lax_matrix_is_hermitian() {
    let g = grid(60.0, 128);
    for seed in 0..5 {
        let l = assemble_lax(&random_field(g, seed), Scheme::Rectangle);
        assert!(l.hermitian_defect() < 1e-12);
    }
}

#[test]
fn ground_state_is_annihilated() {
    let g = reference_grid();
    let r = ground_state(g);
    let l = assemble_lax(&r, Scheme::Gregory);
    let lr = l.apply(r.coeffs());
    let n = l.quad.norm_sqr(&lr).sqrt();
    assert!(n < 1e-5, "‖L_R R‖ = {n:e}");
}

#[test]
fn ground_state_has_one_bound_state_at_zero() {
    let r = ground_state(reference_grid());
    let sys = bound_states(&assemble_lax(&r, Scheme::Gregory)).unwrap();
    assert_eq!(sys.count(), 1);
    assert!(sys.bound[0].eigenvalue.abs() < 1e-6);
    assert!((sys.bound[0].overlap - 1.0).abs() < 0.05);
}

#[test]
fn subcritical_scaling_has_no_bound_states() {
    let r = ground_state(reference_grid()).scale(c(0.9f64.sqrt(), 0.0));
    let sys = bound_states(&assemble_lax(&r, Scheme::Gregory)).unwrap();
    assert_eq!(sys.count(), 0);
}

#[test]
fn two_soliton_bound_states() {
    let u = two_soliton(reference_grid());
    let sys = bound_states(&assemble_lax(&u, Scheme::Gregory)).unwrap();
    let ev = sys.bound_eigenvalues();
    assert_eq!(ev.len(), 2, "{ev:?}");
    assert!((ev[0] + 0.5f64.sqrt()).abs() < 1e-4, "{ev:?}");
    assert!(ev[1].abs() < 1e-4, "{ev:?}");
    assert!((ev[1] - ev[0]) > 1e-8);
    assert!(TWO_PI * 2.0 <= hardy::mass(&u) * (1.0 + 1e-6));
    for b in &sys.bound {
        let s = Quadrature::shared(u.grid(), Scheme::Gregory).inner(u.coeffs(), &b.vector);
        assert!((s - c(TWO_PI.sqrt(), 0.0)).norm() < 1e-10);
    }
}

#[test]
fn refinement_reproduces_the_full_solve() {
    let u = two_soliton(reference_grid());
    let lax = assemble_lax(&u, Scheme::Gregory);
    let sys = bound_states(&lax).unwrap();
    let seeds: Vec<f64> = sys.bound_eigenvalues().iter().map(|e| e + 1e-6).collect();
    let refined = refine_bound_states(&lax, &seeds).unwrap();
    assert_eq!(refined.len(), 2);
    for (a, b) in sys.bound.iter().zip(&refined) {
        assert!((a.eigenvalue - b.eigenvalue).abs() < 1e-10, "{} {}", a.eigenvalue, b.eigenvalue);
        assert!((a.overlap - b.overlap).abs() < 1e-8);
        let d = a.vector.iter().zip(&b.vector).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(d < 1e-6, "{d:e}");
    }
    assert!(refine_bound_states(&lax, &[]).unwrap().is_empty());
}

#[test]
fn kernel_element_one_minus_theta() {
    // 1 − Q̄/Q = Σ b_j/(x − z_j) with b_j = −Q̄(z_j)/Q′(z_j).
    let g = reference_grid();
    let s = residues_from_poles(&[c(0.0, -1.0), c(0.0, -2.0)], 0, Some(0.0)).unwrap();
    let q = &s.q;
    let qbar = cmdnls_core::poly::conj(q);
    let dq = cmdnls_core::poly::derivative(q);
    let b: Vec<C64> = s
        .poles
        .iter()
        .map(|&z| -cmdnls_core::poly::eval(&qbar, z) / cmdnls_core::poly::eval(&dq, z))
        .collect();
    let f = ChiralField::from_spectrum(g, |x| {
        s.poles.iter().zip(&b).map(|(z, bj)| c(0.0, -TWO_PI) * bj * (c(0.0, -1.0) * z * x).exp()).sum()
    })
    .unwrap();
    let u = s.to_field(g).unwrap();
    let funcs = Functionals::for_field(&u, Scheme::Gregory);
    let lf = funcs.apply_lax(&u, f.coeffs());
    let ratio = funcs.quadrature().norm_sqr(&lf).sqrt() / funcs.mass(&f).sqrt();
    assert!(ratio < 1e-6, "{ratio:e}");
}

#[test]
fn hierarchy_of_ground_state() {
    let r = ground_state(grid(200.0, 1024));
    let h = conserved_hierarchy(&assemble_lax(&r, Scheme::Gregory), 4).unwrap();
    assert!(rel(h[0].re, TWO_PI) < 1e-10);
    for (k, v) in h.iter().enumerate().skip(1) {
        assert!(v.norm() < 1e-6, "I_{k} = {v}");
    }
    let zero = ChiralField::zero(grid(50.0, 32));
    let hz = conserved_hierarchy(&assemble_lax(&zero, Scheme::Gregory), 8).unwrap();
    assert!(hz.iter().all(|v| v.norm() == 0.0));
    assert!(matches!(conserved_hierarchy(&assemble_lax(&zero, Scheme::Gregory), 9), Err(Error::InvalidParameter(_))));
}

#[test]
fn hierarchy_matches_fast_application() {
    let u = two_soliton(grid(100.0, 256));
    let dense = conserved_hierarchy(&assemble_lax(&u, Scheme::Gregory), 4).unwrap();
    let fast = Functionals::for_field(&u, Scheme::Gregory).hierarchy(&u, 4);
    for (a, b) in dense.iter().zip(&fast) {
        assert!((a - b).norm() < 1e-9 * (1.0 + b.norm()));
    }
    // E = ½‖L_u u‖² and I₂ = ⟨L²u, u⟩ agree up to the factor 2 when L is symmetric.
    let e = hardy::energy(&u);
    assert!((fast[2].re - 2.0 * e).abs() < 1e-3 * (1.0 + e));
}

#[test]
fn b_operators_of_zero() {
    let g = grid(50.0, 32);
    let z = ChiralField::zero(g);
    assert_eq!(linalg::max_abs(&assemble_b(&z, Scheme::Gregory)), 0.0);
    let bt = assemble_b_tilde(&z, Scheme::Gregory);
    let want = linalg::diag(&g.frequencies().iter().map(|&x| c(0.0, -x * x)).collect::<Vec<_>>());
    let diff: CMat = &bt - &want;
    assert_eq!(linalg::max_abs(&diff), 0.0);
}

#[test]
fn b_structure() {
    let g = grid(60.0, 128);
    for seed in 0..3 {
        let u = random_field(g, 10 + seed);
        assert!(linalg::skew_defect(&assemble_b(&u, Scheme::Rectangle)) < 1e-10);
        for scheme in [Scheme::Gregory, Scheme::Rectangle] {
            let b = assemble_b(&u, scheme);
            let l = assemble_lax(&u, scheme).entries;
            let l2 = &l * &l;
            let rhs: CMat = &b - &linalg::scale(&l2, c(0.0, 1.0));
            let diff: CMat = &assemble_b_tilde(&u, scheme) - &rhs;
            assert!(linalg::max_abs(&diff) < 1e-10 * (1.0 + linalg::max_abs(&rhs)));
        }
    }
}

#[test]
fn b_tilde_generates_the_flow() {
    let u = two_soliton(reference_grid());
    let bt = assemble_b_tilde(&u, Scheme::Gregory);
    let rhs = pde_rhs(&u, Scheme::Gregory);
    assert!(max_diff(&linalg::matvec(&bt, u.coeffs()), rhs.coeffs()) < 1e-8);
}

#[test]
fn lax_residual_trivial_cases() {
    let g = grid(100.0, 128);
    let z = ChiralField::zero(g);
    assert_eq!(lax_equation_residual(&[z.clone(), z.clone(), z.clone()], 0.1, Scheme::Rectangle, None).unwrap(), 0.0);
    let r = ground_state(grid(200.0, 512));
    let res = lax_equation_residual(&[r.clone(), r.clone(), r.clone()], 0.1, Scheme::Gregory, Some(256)).unwrap();
    // dL/dt vanishes identically; [B_R, L_R] carries the same quadrature defect as rhs(R).
    assert!(res <= 1e-4, "{res:e}");
    assert_eq!(
        lax_equation_residual(&[z.clone(), z], 0.1, Scheme::Rectangle, None).unwrap_err(),
        Error::Arity { need: 3, got: 2 }
    );
}

#[test]
fn spectral_data_of_ground_state() {
    let e = spectral_data_from_potential(&ground_state(reference_grid()), Scheme::Gregory, Some(1)).unwrap();
    let d = &e.data;
    assert!((d.phi - std::f64::consts::PI).abs() < 1e-10);
    assert!((d.rho - 1.0).abs() < 1e-10);
    assert_eq!(d.lambda, vec![0.0]);
    assert!(d.gamma[0].abs() < 1e-6);
    assert!(e.imag_consistency.abs() < 1e-4);
}

#[test]
fn spectral_data_of_shifted_soliton() {
    let (x0, y) = (1.5, 0.8);
    let u = residues_from_poles(&[c(x0, -y)], 0, None).unwrap().to_field(reference_grid()).unwrap();
    let e = spectral_data_from_potential(&u, Scheme::Gregory, Some(1)).unwrap();
    assert!((e.data.rho - y).abs() < 1e-10);
    assert!((e.data.gamma[0] - x0).abs() < 1e-4, "{:?}", e.data);
    assert!(e.imag_consistency.abs() < 1e-4);
}

#[test]
fn non_solitons_are_rejected() {
    let u = ground_state(reference_grid()).scale(c(1.2, 0.0));
    assert!(matches!(spectral_data_from_potential(&u, Scheme::Gregory, None), Err(Error::NotASoliton(_))));
}

#[test]
fn spectral_data_validation() {
    assert!(SpectralData::new(0.0, 1.0, vec![0.0, -1.0], vec![0.0, 0.0]).is_ok());
    assert!(SpectralData::new(0.0, -1.0, vec![0.0], vec![0.0]).is_err());
    assert!(SpectralData::new(0.0, 1.0, vec![0.5], vec![0.0]).is_err());
    assert!(SpectralData::new(0.0, 1.0, vec![0.0, 0.0], vec![0.0, 1.0]).is_err());
    let d = SpectralData::new(7.0, 1.0, vec![0.0], vec![0.0]).unwrap();
    assert!((d.phi - (7.0 - TWO_PI)).abs() < 1e-15);
}

#[test]
fn operator_bounds_hold() {
    let r = ground_state(reference_grid());
    let b = operator_bound_checks(&r, &r, Scheme::Gregory).unwrap();
    // R saturates the Toeplitz bound: both sides equal π.
    assert!(rel(b.toeplitz_lhs, std::f64::consts::PI) < 1e-9 && rel(b.toeplitz_rhs, std::f64::consts::PI) < 1e-9, "{b:?}");
    assert!(b.hankel_lhs < b.hankel_rhs, "{b:?}");
    let z = ChiralField::zero(*r.grid());
    let b0 = operator_bound_checks(&r, &z, Scheme::Gregory).unwrap();
    assert_eq!((b0.toeplitz_lhs, b0.toeplitz_rhs, b0.hankel_lhs, b0.hankel_rhs), (0.0, 0.0, 0.0, 0.0));
    let g = grid(40.0, 128);
    let mut violations = 0;
    for seed in 0..100u64 {
        let u = random_field(g, 1000 + seed);
        let f = random_field(g, 5000 + seed);
        for scheme in [Scheme::Gregory, Scheme::Rectangle] {
            if !operator_bound_checks(&u, &f, scheme).unwrap().holds(1e-10) {
                violations += 1;
            }
        }
    }
    assert_eq!(violations, 0);
}
