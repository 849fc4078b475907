//! `check`: invariant suite over all modules at the configured resolution.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use cmdnls_core::lax::{assemble_lax, bound_states, OVERLAP_DELTA};
use cmdnls_core::pde::{
    centroid_track, centroid_velocity, conservation_report, evolve, pde_rhs, spectral_evolution_check, virial_check,
};
use cmdnls_core::pole_ode::integrate;
use cmdnls_core::soliton::{
    eval_soliton, growth_scan, poles_at_time, residues_at_time, residues_from_poles, two_soliton_explicit,
};
use cmdnls_core::{
    ChiralField, Error, EvolutionConfig, FrequencyGrid, Functionals, PoleState, Result, Scheme, SpectralData,
    Termination, C64, TWO_PI,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{random_spectral_data, usage, InitialConfig, Tolerances, UsageError};
use crate::report::{Check, Report};
use crate::Context;

/// Default resolution; K = 1024 resolves ‖rhs(R)‖ well below 1e−6 on L = 200.
pub const DEFAULT_LENGTH: f64 = 200.0;
pub const DEFAULT_MODES: usize = 1024;

struct Suite {
    grid: FrequencyGrid,
    scheme: Scheme,
    seed: u64,
    tol: Tolerances,
    evolution: EvolutionConfig,
}

type Group = (&'static str, fn(&Suite) -> Result<Vec<Check>>);

const GROUPS: [Group; 11] = [
    ("ground_state", ground_state),
    ("two_soliton", two_soliton),
    ("inverse_formula", inverse_formula),
    ("pole_asymptotics", pole_asymptotics),
    ("growth", growth),
    ("oracle", oracle),
    ("random_poles", random_poles),
    ("conservation", conservation),
    ("virial", virial),
    ("spectral_evolution", spectral_evolution),
    ("traveling_wave", traveling_wave),
];

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn ground_state_field(g: FrequencyGrid) -> Result<ChiralField> {
    residues_from_poles(&[c(0.0, -1.0)], 0, Some(0.0))?.to_field(g)
}

fn two_soliton_field(g: FrequencyGrid) -> Result<ChiralField> {
    residues_from_poles(&[c(0.0, -1.0), c(0.0, -2.0)], 0, Some(0.0))?.to_field(g)
}

fn two_soliton_data() -> Result<SpectralData> {
    SpectralData::new(0.0, 3.0, vec![0.0, -0.5f64.sqrt()], vec![0.0, 0.0])
}

fn ground_state(s: &Suite) -> Result<Vec<Check>> {
    let r = ground_state_field(s.grid)?;
    let funcs = Functionals::for_field(&r, s.scheme);
    let rhs = pde_rhs(&r, s.scheme);
    // R = √2/(x + i) has R̂(ξ) = −2πi√2 e^{−ξ}.
    let amp = TWO_PI * 2f64.sqrt();
    let closed = r
        .coeffs()
        .iter()
        .zip(r.frequencies())
        .map(|(v, x)| (v - c(0.0, -amp * (-x).exp())).norm())
        .fold(0.0, f64::max)
        / amp;
    Ok(vec![
        Check::at_most("ground_state.closed_form", closed, 1e-10),
        Check::at_most("ground_state.mass", rel(funcs.mass(&r), TWO_PI), 1e-10),
        Check::at_most("ground_state.energy", funcs.energy(&r).abs(), 1e-8),
        Check::at_most("ground_state.rhs_norm", funcs.mass(&rhs).sqrt(), 1e-6),
    ])
}

fn two_soliton(s: &Suite) -> Result<Vec<Check>> {
    let u = two_soliton_field(s.grid)?;
    let mass = Functionals::for_field(&u, s.scheme).mass(&u);
    let sys = bound_states(&assemble_lax(&u, s.scheme))?;
    let ev = sys.bound_eigenvalues();
    let nonzero = ev.iter().copied().fold(0.0, |a: f64, b| if b.abs() > a.abs() { b } else { a });
    let overlap = sys.bound.iter().map(|b| (b.overlap - 1.0).abs()).fold(0.0, f64::max);
    Ok(vec![
        Check::at_most("two_soliton.mass_quantization", rel(mass, 2.0 * TWO_PI), s.tol.mass_quantization),
        Check::equals("two_soliton.bound_state_count", sys.count(), 2),
        Check::at_most("two_soliton.eigenvalue", (nonzero + 0.5f64.sqrt()).abs(), 1e-3),
        Check::at_most("two_soliton.overlap", overlap, OVERLAP_DELTA),
    ])
}

fn inverse_formula(s: &Suite) -> Result<Vec<Check>> {
    let d = random_spectral_data(2, s.seed).map_err(|e| Error::InvalidParameter(e.0))?;
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed.wrapping_add(1));
    let mut worst: f64 = 0.0;
    let mut skipped = 0;
    for _ in 0..100 {
        let t = rng.gen_range(-20.0..20.0);
        let x = c(rng.gen_range(-30.0..30.0), 0.0);
        match eval_soliton(&d, t, x) {
            Ok(v) => {
                let e = two_soliton_explicit(d.gamma[0], d.gamma[1], d.rho, d.lambda[1], d.phi, t, x).value;
                worst = worst.max((v - e).norm());
            }
            Err(Error::NearSpectrum(_)) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(vec![Check::at_most("inverse_formula.explicit_vs_general", worst, 1e-10)
        .with_detail(format!("100 random points, {skipped} near the spectrum"))])
}

fn pole_asymptotics(_: &Suite) -> Result<Vec<Check>> {
    let d = SpectralData::new(0.0, 1.0, vec![0.0, 1.0], vec![0.0, 0.0])?;
    let law = |t: f64| -1.0 / (4.0 * t * t);
    Ok(vec![
        Check::at_most("pole_asymptotics.t100", rel(poles_at_time(&d, 100.0)?[1].im, law(100.0)), 0.1),
        Check::at_most("pole_asymptotics.t1000", rel(poles_at_time(&d, 1000.0)?[1].im, law(1000.0)), 0.01),
    ])
}

fn growth(s: &Suite) -> Result<Vec<Check>> {
    let ts: Vec<f64> = (0..10).map(|k| 50.0 * 10f64.powf(k as f64 / 9.0)).collect();
    let two = growth_scan(&two_soliton_data()?, &[0.5, 1.0, 2.0], &ts)?;
    let one = growth_scan(&SpectralData::new(0.0, 1.0, vec![0.0], vec![0.0])?, &[1.0], &ts)?;
    let three = random_spectral_data(3, s.seed).map_err(|e| Error::InvalidParameter(e.0))?;
    let three = growth_scan(&three, &[1.0], &ts)?;
    let mut out: Vec<Check> = two
        .fits
        .iter()
        .map(|f| Check::at_most(format!("growth.n2_s{}", f.s), (f.slope - 2.0 * f.s).abs() / (2.0 * f.s), 0.05))
        .collect();
    out.push(Check::at_most("growth.n1_s1", one.fits[0].slope.abs(), 0.05));
    out.push(Check::at_most("growth.random_n3_s1", (three.fits[0].slope - 2.0).abs(), s.tol.slope));
    Ok(out)
}

fn oracle(s: &Suite) -> Result<Vec<Check>> {
    let d = two_soliton_data()?;
    let snap = residues_at_time(&d, 0.0)?;
    let a = snap.residues.ok_or_else(|| Error::DegenerateConfiguration("collision at t = 0".into()))?;
    let times: Vec<f64> = (0..=50).map(|k| 0.1 * k as f64).collect();
    let traj = integrate(&PoleState::new(0.0, snap.poles, a)?, 5.0, &times, 1e-10)?;
    let mut worst: f64 = 0.0;
    for st in &traj.states {
        let exact = residues_at_time(&d, st.t)?;
        let Some(ea) = exact.residues else { continue };
        let mut free: Vec<usize> = (0..st.n()).collect();
        for (z, a) in exact.poles.iter().zip(&ea) {
            let pos = (0..free.len())
                .min_by(|&x, &y| (st.poles[free[x]] - z).norm().total_cmp(&(st.poles[free[y]] - z).norm()))
                .unwrap_or(0);
            let k = free.swap_remove(pos);
            worst = worst.max((st.poles[k] - z).norm()).max((st.residues[k] - a).norm());
        }
    }
    Ok(vec![
        Check::equals("oracle.completed", usize::from(traj.termination == Termination::Completed), 1),
        Check::at_most("oracle.deviation", worst, s.tol.agreement),
        Check::at_most("oracle.constraint_residual", traj.max_constraint_residual, s.tol.constraint),
    ])
}

fn random_poles(s: &Suite) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed.wrapping_add(2));
    let mut worst: f64 = 0.0;
    let mut degenerate = 0;
    for _ in 0..20 {
        let n = rng.gen_range(1..=4usize);
        let poles: Vec<C64> = (0..n).map(|_| c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..-0.2))).collect();
        let branch = rng.gen_range(0..1u64 << (n - 1));
        match residues_from_poles(&poles, branch, None) {
            Ok(r) => worst = worst.max(r.constraint_residual()),
            Err(Error::DegenerateConfiguration(_)) => degenerate += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(vec![Check::at_most("random_poles.constraint_residual", worst, 1e-10)
        .with_detail(format!("20 configurations, {degenerate} degenerate"))])
}

fn conservation(s: &Suite) -> Result<Vec<Check>> {
    let datum = InitialConfig::Gaussian { center: 1.2, width: 0.15, mass: 0.9 * TWO_PI };
    let u0 = datum.field(s.grid).map_err(|e| Error::InvalidParameter(e.0))?;
    let traj = evolve(&u0, &s.evolution)?;
    if let Some(ev) = &traj.event {
        return Ok(vec![Check::failed("conservation", ev.name())]);
    }
    let r = conservation_report(&traj)?;
    let mut out = vec![
        Check::at_most("conservation.mass", r.mass, s.tol.mass),
        Check::at_most("conservation.u_hat_0", r.u_hat_0, s.tol.u_hat_0),
        Check::at_most("conservation.momentum", r.momentum, s.tol.momentum),
        Check::at_most("conservation.energy", r.energy, s.tol.energy),
    ];
    for (k, d) in r.hierarchy.iter().enumerate().skip(1) {
        out.push(Check::at_most(format!("conservation.I{k}"), *d, s.tol.hierarchy));
    }
    Ok(out)
}

fn virial(s: &Suite) -> Result<Vec<Check>> {
    let u0 = ChiralField::from_spectrum(s.grid, |x| c(x * (-x).exp(), 0.0))?;
    let r = virial_check(&u0, &EvolutionConfig::new(1e-3, 2.0).with_quadrature(s.scheme), 20)?;
    Ok(vec![
        Check::at_most("virial.fit_residual", r.fit_residual, 1e-6),
        Check::at_most("virial.leading_coefficient", r.leading_error, 1e-4),
    ])
}

fn spectral_evolution(s: &Suite) -> Result<Vec<Check>> {
    let u0 = two_soliton_field(s.grid)?;
    let r = spectral_evolution_check(&u0, &EvolutionConfig::new(1e-3, 1.0).with_quadrature(s.scheme))?;
    Ok(vec![
        Check::at_most("spectral_evolution.gamma_law", r.gamma_law_error, 1e-3),
        Check::at_most("spectral_evolution.phi_drift", r.phi_drift, 1e-4),
        Check::at_most("spectral_evolution.rho_drift", r.rho_drift, 1e-4),
        Check::at_most("spectral_evolution.lambda_drift", r.lambda_drift, 1e-4),
    ])
}

fn traveling_wave(s: &Suite) -> Result<Vec<Check>> {
    let eta = 8.0 * s.grid.dxi();
    let u0 = ground_state_field(s.grid)?.galilean_boost(eta)?;
    let traj = evolve(&u0, &EvolutionConfig::new(1e-3, 2.0).with_stride(100).with_quadrature(s.scheme))?;
    let v = centroid_velocity(&centroid_track(&traj, s.scheme))?;
    Ok(vec![Check::at_most("traveling_wave.speed", (v - 2.0 * eta).abs(), 1e-3)])
}

fn panic_message(p: &(dyn std::any::Any + Send)) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".into())
}

pub fn run(ctx: &Context, report: &mut Report) -> std::result::Result<(), UsageError> {
    let cfg = &ctx.config;
    let grid = cfg.grid_or(DEFAULT_LENGTH, DEFAULT_MODES)?;
    let evolution = match &cfg.evolution {
        Some(_) => cfg.evolution()?,
        None => EvolutionConfig::new(1e-3, 10.0).with_stride(250).with_quadrature(cfg.quadrature),
    };
    if cfg.soliton.is_some() || cfg.initial.is_some() || cfg.scan.is_some() || cfg.track.is_some() {
        return Err(usage("check runs a fixed suite; only grid, quadrature, evolution, tolerances and seed apply"));
    }
    let suite = Suite { grid, scheme: cfg.quadrature, seed: ctx.seed, tol: cfg.tolerances.clone(), evolution };
    let results: Vec<(Vec<Check>, f64)> = GROUPS
        .par_iter()
        .map(|(name, f)| {
            let t = Instant::now();
            let checks = match catch_unwind(AssertUnwindSafe(|| f(&suite))) {
                Ok(Ok(c)) => c,
                Ok(Err(e)) => vec![Check::failed(*name, e)],
                Err(p) => vec![Check::failed(*name, format!("panicked: {}", panic_message(p.as_ref())))],
            };
            (checks, t.elapsed().as_secs_f64())
        })
        .collect();
    for ((name, _), (checks, secs)) in GROUPS.iter().zip(results) {
        report.record_time(name, secs);
        report.extend(checks);
    }
    Ok(())
}
