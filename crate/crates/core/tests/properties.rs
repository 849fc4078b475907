mod common;

use cmdnls_core::io::fmt17;
use cmdnls_core::lax::{assemble_lax, operator_bound_checks, SpectralData};
use cmdnls_core::pde::{Method, Stepper};
use cmdnls_core::soliton::{poles_at_time, residues_from_poles};
use cmdnls_core::{hardy, ChiralField, FrequencyGrid, Quadrature, Scheme, C64, TWO_PI};
use common::*;
use proptest::prelude::*;

const K: usize = 32;

fn small_grid() -> FrequencyGrid {
    grid(30.0, K)
}

fn coeffs() -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), K).prop_map(|v| {
        // taper so that the top modes are small, as for resolved data
        v.into_iter().enumerate().map(|(k, (a, b))| c(a, b) * (-(k as f64) / 6.0).exp()).collect()
    })
}

fn field() -> impl Strategy<Value = ChiralField> {
    coeffs().prop_map(|c| ChiralField::new(small_grid(), c).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conv_matches_direct_sum(a in coeffs(), g in coeffs(), gregory in any::<bool>()) {
        let scheme = if gregory { Scheme::Gregory } else { Scheme::Rectangle };
        let q = Quadrature::new(small_grid(), scheme);
        let fast = q.conv(&a, &g);
        let sc = small_grid().dxi() / TWO_PI;
        for k in 0..K {
            let direct: C64 = (0..=k).map(|i| a[k - i] * g[i] * q.conv_weight(k, i)).sum::<C64>() * sc;
            prop_assert!((fast[k] - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn rectangle_corr_matches_direct_sum(u in coeffs(), f in coeffs()) {
        let q = Quadrature::new(small_grid(), Scheme::Rectangle);
        let fast = q.corr(&u, &f);
        let sc = small_grid().dxi() / TWO_PI;
        for s in 0..K {
            let direct: C64 = (0..K - s).map(|m| u[m].conj() * f[s + m]).sum::<C64>() * sc;
            prop_assert!((fast[s] - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn rectangle_lax_is_hermitian(u in field()) {
        prop_assert!(assemble_lax(&u, Scheme::Rectangle).hermitian_defect() < 1e-12);
    }

    #[test]
    fn operator_bounds(u in field(), f in field()) {
        prop_assert!(operator_bound_checks(&u, &f, Scheme::Rectangle).unwrap().holds(1e-12));
    }

    #[test]
    fn phase_and_boost_preserve_mass(u in field(), theta in 0.0f64..TWO_PI, steps in 0usize..4) {
        let m = hardy::mass(&u);
        prop_assert!((hardy::mass(&u.scale(C64::from_polar(1.0, theta))) - m).abs() <= 1e-12 * (1.0 + m));
        let b = u.galilean_boost(steps as f64 * small_grid().dxi()).unwrap();
        prop_assert!((hardy::mass(&b) - m).abs() <= 1e-12 * (1.0 + m));
    }

    #[test]
    fn projection_is_idempotent(u in field()) {
        let back = u.embed().project_plus();
        prop_assert!(max_diff(back.coeffs(), u.coeffs()) < 1e-12);
    }

    #[test]
    fn gauge_round_trip(u in field()) {
        let v = u.embed();
        let w = v.gauge_transform();
        prop_assert!((w.mass() - v.mass()).abs() < 1e-10 * (1.0 + v.mass()));
        let back = w.inverse_gauge_transform();
        prop_assert!(max_diff(back.coeffs(), v.coeffs()) < 1e-9);
    }

    #[test]
    fn torus_flow_is_mass_orthogonal(u in field()) {
        // Re⟨∂_t u, u⟩ = 0 exactly when T_u and T_ū are adjoint.
        let s = Stepper::new(&u, Scheme::Rectangle, Method::Ifrk4);
        let q = Quadrature::new(small_grid(), Scheme::Rectangle);
        let r = q.inner(&s.rhs(u.coeffs()), u.coeffs());
        let scale = q.norm_sqr(&s.rhs(u.coeffs())).sqrt() * q.norm_sqr(u.coeffs()).sqrt();
        prop_assert!(r.re.abs() <= 1e-12 * (1.0 + scale));
    }

    #[test]
    fn decimal_output_round_trips(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(fmt17(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn constructed_solitons_satisfy_constraints(
        pts in prop::collection::vec((-3.0f64..3.0, 0.3f64..2.0), 1..5),
        branch in 0u64..8,
        theta in 0.0f64..TWO_PI,
    ) {
        let poles: Vec<C64> = pts.iter().map(|&(x, y)| c(x, -y)).collect();
        let separated = poles.iter().enumerate().all(|(j, a)| poles[..j].iter().all(|b| (a - b).norm() > 0.3));
        prop_assume!(separated);
        match residues_from_poles(&poles, branch, Some(theta)) {
            Ok(s) => prop_assert!(s.constraint_residual() <= 1e-10, "{}", s.constraint_residual()),
            Err(e) => prop_assert!(matches!(e, cmdnls_core::Error::DegenerateConfiguration(_)), "{e}"),
        }
    }

    #[test]
    fn synthesis_poles_stay_below_axis(
        rho in 0.1f64..3.0,
        lam in prop::collection::vec(0.2f64..2.0, 0..3),
        gam in prop::collection::vec(-3.0f64..3.0, 3),
        t in -1e3f64..1e3,
    ) {
        // distinct eigenvalues: cumulative sums of positive gaps, alternating sign
        let mut lambda = vec![0.0];
        let mut acc = 0.0;
        for (j, l) in lam.iter().enumerate() {
            acc += l;
            lambda.push(if j % 2 == 0 { acc } else { -acc });
        }
        let n = lambda.len();
        let d = SpectralData::new(0.0, rho, lambda, gam[..n].to_vec()).unwrap();
        let z = poles_at_time(&d, t).unwrap();
        prop_assert!(z.iter().all(|z| z.im < 0.0));
        let trace: C64 = z.iter().sum();
        prop_assert!((trace.im + rho).abs() < 1e-8 * (1.0 + t.abs()));
    }
}
