//! JSON run configuration. Every section rejects unknown keys.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use cmdnls_core::soliton::{residues_from_poles, soliton_field, RationalSoliton};
use cmdnls_core::{ChiralField, EvolutionConfig, FrequencyGrid, Scheme, SpectralData, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Problems with the command line or the configuration (exit code 2).
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    /// Scheme of the spectral (Lax) computations; the flow uses `evolution.quadrature`.
    #[serde(default)]
    pub quadrature: Scheme,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub soliton: Option<SolitonConfig>,
    /// Non-soliton initial datum for `evolve`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialConfig>,
    /// Galilean boost of the initial datum by this many multiples of Δξ.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boost_modes: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolution: Option<EvolutionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub track: Option<TrackConfig>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "K")]
    pub modes: usize,
}

/// Exactly one of `poles`, `spectral_data` or `random` must be given.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolitonConfig {
    /// Poles as [re, im] pairs, all with im < 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poles: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub branch: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectral_data: Option<SpectralData>,
    /// Number of solitons of seeded random spectral data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<usize>,
    /// Time at which spectral data is evaluated.
    #[serde(default)]
    pub t: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub enum InitialConfig {
    /// Spectral Gaussian exp(−(ξ−center)²/2width²) scaled to `mass`.
    Gaussian { center: f64, width: f64, mass: f64 },
    /// û(ξ) = amplitude·ξ^power·e^{−rate·ξ}.
    PowerExp { amplitude: f64, power: f64, rate: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub s_list: Vec<f64>,
    pub t_list: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackConfig {
    pub t_end: f64,
    /// Number of output intervals between the soliton time and `t_end`.
    pub samples: usize,
    #[serde(default = "default_ode_tol")]
    pub tol: f64,
}

fn default_ode_tol() -> f64 {
    1e-10
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub mass_quantization: f64,
    pub constraint: f64,
    pub mass: f64,
    pub u_hat_0: f64,
    pub momentum: f64,
    pub energy: f64,
    pub hierarchy: f64,
    /// Absolute tolerance on fitted growth exponents.
    pub slope: f64,
    pub skipped_fraction: f64,
    /// Sup distance between the two pole oracles.
    pub agreement: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            mass_quantization: 1e-6,
            constraint: 1e-8,
            mass: 1e-10,
            u_hat_0: 1e-10,
            momentum: 1e-6,
            energy: 1e-6,
            hierarchy: 1e-6,
            slope: 0.1,
            skipped_fraction: 0.1,
            agreement: 1e-6,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| usage(format!("invalid config {}: {e}", path.display())))
    }

    pub fn grid(&self) -> Result<FrequencyGrid, UsageError> {
        let g = self.grid.ok_or_else(|| usage("config needs a grid {L, K}"))?;
        FrequencyGrid::new(g.length, g.modes).map_err(|e| usage(e.to_string()))
    }

    pub fn grid_or(&self, length: f64, modes: usize) -> Result<FrequencyGrid, UsageError> {
        match self.grid {
            Some(_) => self.grid(),
            None => FrequencyGrid::new(length, modes).map_err(|e| usage(e.to_string())),
        }
    }

    pub fn soliton(&self) -> Result<&SolitonConfig, UsageError> {
        self.soliton.as_ref().ok_or_else(|| usage("config needs a soliton section"))
    }

    pub fn evolution(&self) -> Result<EvolutionConfig, UsageError> {
        let e = self.evolution.clone().ok_or_else(|| usage("config needs an evolution section {dt, T}"))?;
        e.validate().map_err(|e| usage(e.to_string()))?;
        Ok(e)
    }
}

/// A soliton described either by its poles or by spectral data.
pub enum SolitonSource {
    Poles(RationalSoliton),
    Data(SpectralData),
}

impl SolitonSource {
    /// Field samples on `grid`, at time `t` for spectral data.
    pub fn field(&self, t: f64, grid: FrequencyGrid) -> cmdnls_core::Result<ChiralField> {
        match self {
            SolitonSource::Poles(s) => s.to_field(grid),
            SolitonSource::Data(d) => soliton_field(d, t, grid),
        }
    }
}

impl SolitonConfig {
    pub fn resolve(&self, seed: u64) -> Result<SolitonSource, UsageError> {
        let given = usize::from(self.poles.is_some()) + usize::from(self.spectral_data.is_some()) + usize::from(self.random.is_some());
        if given != 1 {
            return Err(usage("soliton needs exactly one of poles, spectral_data, random"));
        }
        if !self.t.is_finite() {
            return Err(usage("soliton t must be finite"));
        }
        if let Some(p) = &self.poles {
            if self.t != 0.0 {
                return Err(usage("soliton t applies to spectral data only"));
            }
            let poles: Vec<C64> = p.iter().map(|z| C64::new(z[0], z[1])).collect();
            return residues_from_poles(&poles, self.branch, self.theta)
                .map(SolitonSource::Poles)
                .map_err(|e| usage(format!("soliton poles: {e}")));
        }
        if let Some(d) = &self.spectral_data {
            d.validate().map_err(|e| usage(format!("spectral_data: {e}")))?;
            return Ok(SolitonSource::Data(d.clone()));
        }
        let n = self.random.unwrap_or(0);
        random_spectral_data(n, seed).map(SolitonSource::Data)
    }
}

/// Seeded spectral data with N solitons: ρ ∈ [0.5, 2], λ spaced at least 0.4 apart in
/// [−2, 2] (λ₁ = 0), γ ∈ [−3, 3].
pub fn random_spectral_data(n: usize, seed: u64) -> Result<SpectralData, UsageError> {
    if !(1..=8).contains(&n) {
        return Err(usage(format!("random soliton count must be in 1..=8, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phi = rng.gen_range(0.0..2.0 * PI);
    let rho = rng.gen_range(0.5..2.0);
    let mut lambda = vec![0.0];
    while lambda.len() < n {
        let l: f64 = rng.gen_range(-2.0..2.0);
        if lambda.iter().all(|m| (m - l).abs() >= 0.4) {
            lambda.push(l);
        }
    }
    let gamma = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
    SpectralData::new(phi, rho, lambda, gamma).map_err(|e| usage(e.to_string()))
}

impl InitialConfig {
    pub fn field(&self, grid: FrequencyGrid) -> Result<ChiralField, UsageError> {
        let bad = |e: cmdnls_core::Error| usage(format!("initial datum: {e}"));
        match *self {
            InitialConfig::Gaussian { center, width, mass } => {
                if !(width > 0.0 && mass > 0.0) {
                    return Err(usage("gaussian needs width > 0 and mass > 0"));
                }
                let f = ChiralField::from_spectrum(grid, |x| C64::new((-(x - center).powi(2) / (2.0 * width * width)).exp(), 0.0))
                    .map_err(bad)?;
                let m = cmdnls_core::hardy::mass(&f);
                if !(m > 0.0) {
                    return Err(usage("gaussian is not resolved on the grid"));
                }
                Ok(f.scale(C64::new((mass / m).sqrt(), 0.0)))
            }
            InitialConfig::PowerExp { amplitude, power, rate } => {
                if !(power >= 0.0 && rate > 0.0) {
                    return Err(usage("power_exp needs power >= 0 and rate > 0"));
                }
                ChiralField::from_spectrum(grid, |x| C64::new(amplitude * x.powf(power) * (-rate * x).exp(), 0.0)).map_err(bad)
            }
        }
    }
}
