//! `poles`: pole/residue tracks from the inverse formula and from the pole ODE,
//! written in the same CSV schema.

use cmdnls_core::io::{pole_track_csv, PoleTrackRow};
use cmdnls_core::lax::spectral_data_from_potential;
use cmdnls_core::pole_ode::integrate;
use cmdnls_core::soliton::{residues_at_time, PoleSnapshot};
use cmdnls_core::{PoleState, SpectralData, Termination, C64};
use rayon::prelude::*;

use crate::config::{usage, SolitonSource, UsageError};
use crate::report::{Check, Report};
use crate::Context;

/// Poles ordered by (Re z, Im z) with residues permuted alike.
fn sorted(poles: &[C64], residues: Option<&[C64]>) -> (Vec<C64>, Option<Vec<C64>>) {
    let mut idx: Vec<usize> = (0..poles.len()).collect();
    idx.sort_by(|&a, &b| poles[a].re.total_cmp(&poles[b].re).then(poles[a].im.total_cmp(&poles[b].im)));
    (idx.iter().map(|&j| poles[j]).collect(), residues.map(|r| idx.iter().map(|&j| r[j]).collect()))
}

fn rows(t: f64, poles: &[C64], residues: Option<&[C64]>, collision: bool) -> Vec<PoleTrackRow> {
    let (z, a) = sorted(poles, residues);
    z.iter()
        .enumerate()
        .map(|(j, z)| PoleTrackRow { t, j: j + 1, z: *z, a: a.as_ref().map(|a| a[j]), collision })
        .collect()
}

fn spectral_data(ctx: &Context) -> Result<(SpectralData, f64), UsageError> {
    let cfg = &ctx.config;
    let sol = cfg.soliton()?;
    match sol.resolve(ctx.seed)? {
        SolitonSource::Data(d) => Ok((d, sol.t)),
        SolitonSource::Poles(s) => {
            // Both oracles need spectral data; it is extracted from the potential.
            let grid = cfg.grid()?;
            let field = s.to_field(grid).map_err(|e| usage(format!("soliton: {e}")))?;
            let ex = spectral_data_from_potential(&field, cfg.quadrature, Some(s.n()))
                .map_err(|e| usage(format!("spectral data of the pole configuration: {e}")))?;
            Ok((ex.data, 0.0))
        }
    }
}

pub fn run(ctx: &Context, report: &mut Report) -> Result<(), UsageError> {
    let cfg = &ctx.config;
    let track = cfg.track.as_ref().ok_or_else(|| usage("poles needs a track section {t_end, samples}"))?;
    if track.samples == 0 || !track.t_end.is_finite() || !(track.tol > 0.0) {
        return Err(usage("track needs samples >= 1, finite t_end and tol > 0"));
    }
    let (data, t0) = spectral_data(ctx)?;
    let times: Vec<f64> = (0..=track.samples)
        .map(|k| if k == track.samples { track.t_end } else { t0 + (track.t_end - t0) * k as f64 / track.samples as f64 })
        .collect();
    let tol = &cfg.tolerances;

    let mut factory: Vec<cmdnls_core::Result<PoleSnapshot>> = Vec::new();
    report.timed("factory", || {
        factory = times.par_iter().map(|t| residues_at_time(&data, *t)).collect();
        Vec::new()
    });
    let factory: Vec<PoleSnapshot> = match factory.into_iter().collect() {
        Ok(f) => f,
        Err(e) => {
            report.push(Check::failed("factory_track", e));
            return Ok(());
        }
    };
    let factory_rows: Vec<PoleTrackRow> =
        factory.iter().flat_map(|s| rows(s.t, &s.poles, s.residues.as_deref(), s.collision)).collect();
    report.write(&ctx.out, "poles_factory.csv", &pole_track_csv(&factory_rows))?;

    let first = &factory[0];
    let Some(a0) = first.residues.clone() else {
        report.push(Check::failed("ode_track", "poles collide at the initial time"));
        return Ok(());
    };
    let state0 = match PoleState::new(t0, first.poles.clone(), a0) {
        Ok(s) => s,
        Err(e) => {
            report.push(Check::failed("ode_track", e));
            return Ok(());
        }
    };
    let mut ode = None;
    report.timed("ode", || match integrate(&state0, track.t_end, &times, track.tol) {
        Ok(t) => {
            ode = Some(t);
            Vec::new()
        }
        Err(e) => vec![Check::failed("ode_track", e)],
    });
    let Some(traj) = ode else {
        return Ok(());
    };
    let mut ode_rows: Vec<PoleTrackRow> =
        traj.states.iter().flat_map(|s| rows(s.t, &s.poles, Some(&s.residues), false)).collect();
    if traj.termination == Termination::Collision {
        let t = traj.collision_time.unwrap_or(traj.final_time);
        ode_rows.extend(rows(t, &traj.final_state.poles, None, true));
    }
    report.write(&ctx.out, "poles_ode.csv", &pole_track_csv(&ode_rows))?;

    let mut worst: f64 = 0.0;
    let mut compared = 0;
    for (s, f) in traj.states.iter().zip(&factory) {
        let Some(fa) = &f.residues else { continue };
        // Greedy nearest matching; ordering by real part is ambiguous for aligned poles.
        let mut free: Vec<usize> = (0..s.poles.len()).collect();
        for (fz, fa) in f.poles.iter().zip(fa) {
            let Some(pos) = (0..free.len()).min_by(|&x, &y| {
                (s.poles[free[x]] - fz).norm().total_cmp(&(s.poles[free[y]] - fz).norm())
            }) else {
                break;
            };
            let k = free.swap_remove(pos);
            worst = worst.max((s.poles[k] - fz).norm()).max((s.residues[k] - fa).norm());
        }
        compared += 1;
    }
    report.push(Check::at_most("oracle_agreement", worst, tol.agreement).with_detail(format!("{compared} common times")));
    report.push(Check::at_most("constraint_residual", traj.max_constraint_residual, tol.constraint));
    match traj.termination {
        Termination::Completed => report.push(Check::equals("ode_outputs", traj.states.len(), times.len())),
        Termination::Collision => {
            report.set_event("collision");
            let t = traj.collision_time.unwrap_or(traj.final_time);
            report.push(Check::skipped("ode_outputs", format!("pole collision at t = {}", cmdnls_core::io::fmt17(t))));
        }
        other => report.push(Check::failed("ode_outputs", format!("integration stopped early: {}", other.name()))),
    }
    Ok(())
}
