use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Uniform grid of nonnegative frequencies ξ_k = 2πk/L and the matching
/// 2K-point periodic spatial grid on [−L/2, L/2).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    #[serde(rename = "L")]
    length: f64,
    #[serde(rename = "K")]
    modes: usize,
}

impl FrequencyGrid {
    pub const MIN_MODES: usize = 8;

    pub fn new(length: f64, modes: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("domain length must be positive, got {length}")));
        }
        if modes < Self::MIN_MODES {
            return Err(Error::InvalidGrid(format!("need K >= {}, got {modes}", Self::MIN_MODES)));
        }
        Ok(Self { length, modes })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Frequency spacing Δξ = 2π/L.
    pub fn dxi(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn xi(&self, k: usize) -> f64 {
        self.dxi() * k as f64
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.modes).map(|k| self.xi(k)).collect()
    }

    pub fn points_len(&self) -> usize {
        2 * self.modes
    }

    pub fn dx(&self) -> f64 {
        self.length / self.points_len() as f64
    }

    pub fn x(&self, m: usize) -> f64 {
        -0.5 * self.length + m as f64 * self.dx()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.points_len()).map(|m| self.x(m)).collect()
    }

    /// Number of grid steps corresponding to a frequency offset, if aligned.
    pub fn aligned_steps(&self, eta: f64) -> Result<i64> {
        let s = eta / self.dxi();
        let r = s.round();
        if !s.is_finite() || (s - r).abs() > 1e-9 * (1.0 + s.abs()) {
            return Err(Error::Alignment { eta, dxi: self.dxi() });
        }
        Ok(r as i64)
    }
}
