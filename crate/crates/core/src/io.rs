//! Artifact formats: CSV for bulk data, JSON for metadata and reports.
//!
//! Every floating-point number is written with 17 significant digits so that it
//! parses back to the identical double.

use num_complex::Complex64 as C64;
use serde_json::{Map, Number, Value};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::ChiralField;
use crate::grid::FrequencyGrid;
use crate::lax::{Extraction, SpectralData};
use crate::pde::Diagnostics;
use crate::soliton::GrowthRow;

/// Scientific notation with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// JSON number carrying the 17-digit text; non-finite values become strings.
pub fn json_number(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(Number::from_str(&fmt17(x)).expect("formatted floats are valid JSON numbers"))
    } else {
        Value::String(fmt17(x))
    }
}

pub fn json_array(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| json_number(x)).collect())
}

/// Rewrites every non-integer number in a JSON tree in the 17-digit form.
pub fn normalize_numbers(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_i64() || n.is_u64() => Value::Number(n),
        Value::Number(n) => json_number(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(a) => Value::Array(a.into_iter().map(normalize_numbers).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, normalize_numbers(v))).collect()),
        other => other,
    }
}

pub fn to_json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn csv_string(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory CSV writes cannot fail");
    for r in rows {
        w.write_record(&r).expect("in-memory CSV writes cannot fail");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV flush cannot fail")).expect("CSV output is UTF-8")
}

/// Field snapshot `k,xi,re,im`, one row per stored mode.
pub fn field_csv(f: &ChiralField) -> String {
    let xi = f.frequencies();
    let rows = f.coeffs().iter().enumerate().map(|(j, c)| {
        vec![(j + f.shift()).to_string(), fmt17(xi[j]), fmt17(c.re), fmt17(c.im)]
    });
    csv_string(&["k", "xi", "re", "im"], rows)
}

pub fn field_metadata(grid: &FrequencyGrid) -> Value {
    let mut m = Map::new();
    m.insert("L".into(), json_number(grid.length()));
    m.insert("K".into(), Value::from(grid.modes()));
    m.insert("convention".into(), Value::from("integral e^{-i xi x}"));
    Value::Object(m)
}

/// Writes `<stem>.csv` and `<stem>.json` into `dir`.
pub fn write_field(dir: &Path, stem: &str, f: &ChiralField) -> Result<Vec<PathBuf>> {
    let csv = dir.join(format!("{stem}.csv"));
    let meta = dir.join(format!("{stem}.json"));
    write_text(&csv, &field_csv(f))?;
    write_text(&meta, &to_json_string(&field_metadata(f.grid())))?;
    Ok(vec![csv, meta])
}

/// One line of a pole track.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleTrackRow {
    pub t: f64,
    /// 1-based pole label.
    pub j: usize,
    pub z: C64,
    /// `None` at collisions, where residues are undefined.
    pub a: Option<C64>,
    pub collision: bool,
}

/// Pole track `t,j,re_z,im_z,re_a,im_a,collision_flag`.
pub fn pole_track_csv(rows: &[PoleTrackRow]) -> String {
    let nan = C64::new(f64::NAN, f64::NAN);
    let it = rows.iter().map(|r| {
        let a = r.a.unwrap_or(nan);
        vec![
            fmt17(r.t),
            r.j.to_string(),
            fmt17(r.z.re),
            fmt17(r.z.im),
            fmt17(a.re),
            fmt17(a.im),
            u8::from(r.collision).to_string(),
        ]
    });
    csv_string(&["t", "j", "re_z", "im_z", "re_a", "im_a", "collision_flag"], it)
}

/// Growth table `t,s,h_norm`.
pub fn growth_csv(rows: &[GrowthRow]) -> String {
    let it = rows.iter().map(|r| vec![fmt17(r.t), fmt17(r.s), fmt17(r.norm)]);
    csv_string(&["t", "s", "h_norm"], it)
}

pub const DIAGNOSTICS_HEADER: [&str; 13] = [
    "t", "mass", "momentum", "energy", "I0", "I1", "I2", "I3", "I4", "u_hat_0_re", "u_hat_0_im", "h_half", "h_one",
];

pub fn diagnostics_csv(rows: &[Diagnostics]) -> String {
    let it = rows.iter().map(|d| {
        let mut r = vec![fmt17(d.t), fmt17(d.mass), fmt17(d.momentum), fmt17(d.energy)];
        r.extend(d.hierarchy.iter().map(|&h| fmt17(h)));
        r.extend([fmt17(d.u_hat_0.re), fmt17(d.u_hat_0.im), fmt17(d.h_half), fmt17(d.h_one)]);
        r
    });
    csv_string(&DIAGNOSTICS_HEADER, it)
}

pub fn spectral_data_json(d: &SpectralData) -> Value {
    let mut m = Map::new();
    m.insert("phi".into(), json_number(d.phi));
    m.insert("rho".into(), json_number(d.rho));
    m.insert("lambda".into(), json_array(&d.lambda));
    m.insert("gamma".into(), json_array(&d.gamma));
    Value::Object(m)
}

/// Spectrum report `{mass, N, eigenvalues, overlaps, spectral_data}`.
pub fn spectrum_json(e: &Extraction) -> Value {
    let mut m = Map::new();
    m.insert("mass".into(), json_number(e.mass));
    m.insert("N".into(), Value::from(e.data.n()));
    m.insert("eigenvalues".into(), json_array(&e.system.bound_eigenvalues()));
    m.insert("overlaps".into(), json_array(&e.system.bound.iter().map(|b| b.overlap).collect::<Vec<_>>()));
    m.insert("spectral_data".into(), spectral_data_json(&e.data));
    Value::Object(m)
}

pub fn write_text(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, content).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
