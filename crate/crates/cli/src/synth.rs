//! `synth`: field snapshot, pole track and spectrum of a multi-soliton.

use cmdnls_core::io::{field_csv, field_metadata, pole_track_csv, spectrum_json, to_json_string, PoleTrackRow};
use cmdnls_core::lax::spectral_data_from_potential;
use cmdnls_core::soliton::{residues_at_time, RationalSoliton};
use cmdnls_core::{ChiralField, Functionals, TWO_PI};

use crate::config::{SolitonSource, UsageError};
use crate::report::{Check, Report};
use crate::Context;

/// Rows of a single-time pole track; confluent poles carry no simple residue.
pub fn soliton_rows(t: f64, s: &RationalSoliton) -> Vec<PoleTrackRow> {
    let confluent = s.double_residues.iter().any(|b| b.norm() > 0.0);
    s.poles
        .iter()
        .zip(&s.residues)
        .enumerate()
        .map(|(j, (z, a))| PoleTrackRow { t, j: j + 1, z: *z, a: (!confluent).then_some(*a), collision: confluent })
        .collect()
}

pub fn run(ctx: &Context, report: &mut Report) -> Result<(), UsageError> {
    let cfg = &ctx.config;
    let grid = cfg.grid()?;
    let sol = cfg.soliton()?;
    let source = sol.resolve(ctx.seed)?;
    let (n, rows, field) = match &source {
        SolitonSource::Poles(s) => {
            let n = sol.poles.as_ref().map_or(s.n(), Vec::len);
            (n, soliton_rows(0.0, s), s.to_field(grid))
        }
        SolitonSource::Data(d) => {
            let snap = residues_at_time(d, sol.t).map_err(|e| crate::config::usage(format!("soliton at t = {}: {e}", sol.t)))?;
            let rows = snap
                .poles
                .iter()
                .enumerate()
                .map(|(j, z)| PoleTrackRow {
                    t: sol.t,
                    j: j + 1,
                    z: *z,
                    a: snap.residues.as_ref().map(|r| r[j]),
                    collision: snap.collision,
                })
                .collect();
            let field = match snap.residues {
                Some(r) => RationalSoliton::from_residues(snap.poles, r).and_then(|s| s.to_field(grid)),
                None => Err(cmdnls_core::Error::DegenerateConfiguration(format!("pole collision at t = {}", sol.t))),
            };
            (d.n(), rows, field)
        }
    };
    report.write(&ctx.out, "poles.csv", &pole_track_csv(&rows))?;
    if let SolitonSource::Poles(s) = &source {
        report.push(Check::at_most("constraint_residual", s.constraint_residual(), cfg.tolerances.constraint));
    }
    let field: ChiralField = match field {
        Ok(f) => f,
        Err(e) => {
            report.push(Check::failed("field", e));
            return Ok(());
        }
    };
    report.write(&ctx.out, "field.csv", &field_csv(&field))?;
    report.write(&ctx.out, "field.json", &to_json_string(&field_metadata(&grid)))?;
    let mass = Functionals::for_field(&field, cfg.quadrature).mass(&field);
    report.push(
        Check::at_most("mass_quantization", (mass / (TWO_PI * n as f64) - 1.0).abs(), cfg.tolerances.mass_quantization)
            .with_detail(format!("N = {n}")),
    );
    let mut extraction = None;
    report.timed("spectrum", || {
        let r = spectral_data_from_potential(&field, cfg.quadrature, None);
        let checks = match &r {
            Ok(ex) => vec![Check::equals("bound_state_count", ex.data.n(), n)],
            Err(e) => vec![Check::failed("bound_state_count", e)],
        };
        extraction = r.ok();
        checks
    });
    if let Some(ex) = extraction {
        report.write(&ctx.out, "spectrum.json", &to_json_string(&spectrum_json(&ex)))?;
    }
    Ok(())
}
