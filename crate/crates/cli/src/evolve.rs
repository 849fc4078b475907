//! `evolve`: PDE trajectory, diagnostics and conservation report.

use cmdnls_core::io::{diagnostics_csv, field_csv, field_metadata, fmt17, to_json_string};
use cmdnls_core::pde::{conservation_report, evolve};
use cmdnls_core::ChiralField;

use crate::config::{usage, UsageError};
use crate::report::{Check, Report};
use crate::Context;

fn initial_field(ctx: &Context) -> Result<ChiralField, UsageError> {
    let cfg = &ctx.config;
    let grid = cfg.grid()?;
    let u0 = match (&cfg.soliton, &cfg.initial) {
        (Some(s), None) => s.resolve(ctx.seed)?.field(s.t, grid).map_err(|e| usage(format!("soliton: {e}")))?,
        (None, Some(i)) => i.field(grid)?,
        _ => return Err(usage("evolve needs exactly one of soliton, initial")),
    };
    match cfg.boost_modes {
        Some(m) => u0.galilean_boost(f64::from(m) * grid.dxi()).map_err(|e| usage(format!("boost: {e}"))),
        None => Ok(u0),
    }
}

pub fn run(ctx: &Context, report: &mut Report) -> Result<(), UsageError> {
    let cfg = &ctx.config;
    let u0 = initial_field(ctx)?;
    let evo = cfg.evolution()?;
    let mut result = None;
    report.timed("evolve", || match evolve(&u0, &evo) {
        Ok(t) => {
            result = Some(t);
            Vec::new()
        }
        Err(e) => vec![Check::failed("evolve", e)],
    });
    let Some(traj) = result else {
        return Ok(());
    };
    let meta = to_json_string(&field_metadata(u0.grid()));
    let mut times = String::from("index,t\n");
    for (j, (t, u)) in traj.times.iter().zip(&traj.snapshots).enumerate() {
        report.write(&ctx.out, &format!("snapshots/u_{j:05}.csv"), &field_csv(u))?;
        report.write(&ctx.out, &format!("snapshots/u_{j:05}.json"), &meta)?;
        times.push_str(&format!("{j},{}\n", fmt17(*t)));
    }
    report.write(&ctx.out, "snapshots/times.csv", &times)?;
    report.write(&ctx.out, "diagnostics.csv", &diagnostics_csv(&traj.diagnostics))?;
    for w in &traj.warnings {
        report.push(Check::skipped("warning", w));
    }
    if let Some(ev) = &traj.event {
        report.set_event(ev.name());
        report.push(Check::skipped("conservation", format!("{} at t = {}", ev.name(), fmt17(*traj.times.last().unwrap_or(&0.0)))));
        return Ok(());
    }
    let tol = &cfg.tolerances;
    match conservation_report(&traj) {
        Ok(r) => {
            report.push(Check::at_most("drift_mass", r.mass, tol.mass));
            report.push(Check::at_most("drift_u_hat_0", r.u_hat_0, tol.u_hat_0));
            report.push(Check::at_most("drift_momentum", r.momentum, tol.momentum));
            report.push(Check::at_most("drift_energy", r.energy, tol.energy));
            for (k, d) in r.hierarchy.iter().enumerate().skip(1) {
                report.push(Check::at_most(format!("drift_I{k}"), *d, tol.hierarchy));
            }
        }
        Err(e) => report.push(Check::skipped("conservation", e)),
    }
    Ok(())
}
