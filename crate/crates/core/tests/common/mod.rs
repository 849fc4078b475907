#![allow(dead_code)]

use cmdnls_core::soliton::residues_from_poles;
use cmdnls_core::{hardy, ChiralField, FrequencyGrid, C64, TWO_PI};

pub fn grid(l: f64, k: usize) -> FrequencyGrid {
    FrequencyGrid::new(l, k).unwrap()
}

pub fn reference_grid() -> FrequencyGrid {
    grid(200.0, 512)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// R = √2/(x+i).
pub fn ground_state(g: FrequencyGrid) -> ChiralField {
    residues_from_poles(&[c(0.0, -1.0)], 0, Some(0.0)).unwrap().to_field(g).unwrap()
}

/// Two-soliton with poles −i, −2i on the branch whose nonzero eigenvalue is negative.
pub fn two_soliton(g: FrequencyGrid) -> ChiralField {
    residues_from_poles(&[c(0.0, -1.0), c(0.0, -2.0)], 0, Some(0.0)).unwrap().to_field(g).unwrap()
}

/// Gaussian spectral bump at ξ = 1.2, width 0.15, scaled to the given mass.
pub fn gaussian_datum(g: FrequencyGrid, mass: f64) -> ChiralField {
    let s = 0.15f64;
    let f = ChiralField::from_spectrum(g, |x| c((-(x - 1.2).powi(2) / (2.0 * s * s)).exp(), 0.0)).unwrap();
    let m = hardy::mass(&f);
    f.scale(c((mass / m).sqrt(), 0.0))
}

pub fn subcritical_datum(g: FrequencyGrid) -> ChiralField {
    gaussian_datum(g, 0.9 * TWO_PI)
}

/// û(ξ) = ξe^{−ξ}, i.e. u(x) = (1/2π)(1 − ix)^{−2}.
pub fn decaying_datum(g: FrequencyGrid) -> ChiralField {
    ChiralField::from_spectrum(g, |x| c(x * (-x).exp(), 0.0)).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

pub fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
