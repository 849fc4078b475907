//! `growth`: H^s norms along the exact evolution and fitted growth exponents.

use cmdnls_core::io::{growth_csv, json_array, json_number, to_json_string};
use cmdnls_core::soliton::growth_scan;
use serde_json::{Map, Value};

use crate::config::{usage, SolitonSource, UsageError};
use crate::report::{Check, Report};
use crate::Context;

pub fn run(ctx: &Context, report: &mut Report) -> Result<(), UsageError> {
    let cfg = &ctx.config;
    let SolitonSource::Data(data) = cfg.soliton()?.resolve(ctx.seed)? else {
        return Err(usage("growth needs spectral_data or random soliton data"));
    };
    let scan = cfg.scan.as_ref().ok_or_else(|| usage("growth needs a scan section {s_list, t_list}"))?;
    if scan.s_list.is_empty() {
        return Err(usage("s_list is empty"));
    }
    let mut result = None;
    report.timed("scan", || match growth_scan(&data, &scan.s_list, &scan.t_list) {
        Ok(g) => {
            result = Some(g);
            Vec::new()
        }
        Err(e) => vec![Check::failed("growth_scan", e)],
    });
    let Some(g) = result else {
        return Ok(());
    };
    let n = data.n();
    let tol = &cfg.tolerances;
    report.write(&ctx.out, "growth.csv", &growth_csv(&g.rows))?;
    let frac = g.skipped.len() as f64 / scan.t_list.len() as f64;
    report.push(Check::at_most("skipped_fraction", frac, tol.skipped_fraction));
    let mut fits = Vec::new();
    for f in &g.fits {
        // A single soliton is static; N ≥ 2 grows like t^{2s}.
        let expected = if n >= 2 { 2.0 * f.s } else { 0.0 };
        let mut m = Map::new();
        m.insert("s".into(), json_number(f.s));
        m.insert("exponent".into(), json_number(f.slope));
        m.insert("stderr".into(), json_number(f.stderr));
        m.insert("band".into(), json_array(&[f.slope - 2.0 * f.stderr, f.slope + 2.0 * f.stderr]));
        m.insert("samples".into(), Value::from(f.samples));
        m.insert("expected".into(), json_number(expected));
        fits.push(Value::Object(m));
        report.push(Check::at_most(format!("exponent_s{}", f.s), (f.slope - expected).abs(), tol.slope));
    }
    let mut doc = Map::new();
    doc.insert("N".into(), Value::from(n));
    doc.insert("fits".into(), Value::Array(fits));
    doc.insert("skipped_times".into(), json_array(&g.skipped));
    report.write(&ctx.out, "exponents.json", &to_json_string(&Value::Object(doc)))?;
    Ok(())
}
