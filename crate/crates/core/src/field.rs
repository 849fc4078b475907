//! Chiral (positive-frequency) and two-sided fields on a [`FrequencyGrid`].

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fft::FftPair;
use crate::grid::FrequencyGrid;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

fn check_finite(values: &[C64]) -> Result<()> {
    match values.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
        Some(i) => Err(Error::InvalidParameter(format!("coefficient {i} is not finite"))),
        None => Ok(()),
    }
}

/// Samples at x_m of the trigonometric sum (1/L) Σ c_j e^{i ξ_{j+offset} x}.
fn synthesize(grid: &FrequencyGrid, coeffs: &[C64], offset: i64) -> Vec<C64> {
    let n = grid.points_len();
    let mut buf = vec![ZERO; n];
    for (j, c) in coeffs.iter().enumerate() {
        let k = j as i64 + offset;
        let idx = k.rem_euclid(n as i64) as usize;
        buf[idx] += if k.rem_euclid(2) == 0 { *c } else { -*c };
    }
    FftPair::new(n).inverse_in_place(&mut buf);
    let s = n as f64 / grid.length();
    buf.iter_mut().for_each(|v| *v *= s);
    buf
}

/// Coefficients c_k = Δx Σ_m f(x_m) e^{−iξ_k x_m} for k = −K..K−1.
fn analyze(grid: &FrequencyGrid, samples: &[C64]) -> Vec<C64> {
    let n = grid.points_len();
    let k0 = grid.modes() as i64;
    let mut buf = samples.to_vec();
    FftPair::new(n).forward_in_place(&mut buf);
    let dx = grid.dx();
    (0..n)
        .map(|j| {
            let k = j as i64 - k0;
            let v = buf[k.rem_euclid(n as i64) as usize] * dx;
            if k.rem_euclid(2) == 0 {
                v
            } else {
                -v
            }
        })
        .collect()
}

/// A function with Fourier support in [0, ∞), stored as samples c_k ≈ f̂(ξ_{k+shift})
/// of f̂(ξ) = ∫ e^{−iξx} f(x) dx.
///
/// `shift` is an integer offset in units of Δξ produced by Galilean boosts; the
/// coefficients below the offset are implicitly zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ChiralField {
    grid: FrequencyGrid,
    shift: usize,
    coeffs: Vec<C64>,
}

impl ChiralField {
    pub fn new(grid: FrequencyGrid, coeffs: Vec<C64>) -> Result<Self> {
        Self::with_shift(grid, 0, coeffs)
    }

    pub fn with_shift(grid: FrequencyGrid, shift: usize, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != grid.modes() {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients, got {}",
                grid.modes(),
                coeffs.len()
            )));
        }
        check_finite(&coeffs)?;
        Ok(Self { grid, shift, coeffs })
    }

    pub fn zero(grid: FrequencyGrid) -> Self {
        Self { grid, shift: 0, coeffs: vec![ZERO; grid.modes()] }
    }

    /// Samples a Fourier transform f̂ on the grid frequencies.
    pub fn from_spectrum(grid: FrequencyGrid, fhat: impl Fn(f64) -> C64) -> Result<Self> {
        let coeffs = grid.frequencies().into_iter().map(fhat).collect();
        Self::new(grid, coeffs)
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    /// Same grid and shift, new coefficients.
    pub fn replace(&self, coeffs: Vec<C64>) -> Result<Self> {
        Self::with_shift(self.grid, self.shift, coeffs)
    }

    /// Frequency offset η = shift·Δξ.
    pub fn eta(&self) -> f64 {
        self.grid.xi(self.shift)
    }

    /// Frequencies carried by the stored coefficients.
    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.coeffs.len()).map(|k| self.grid.xi(k + self.shift)).collect()
    }

    /// The value f̂(0⁺) read from the ξ = 0 mode (zero when boosted).
    pub fn zero_mode(&self) -> C64 {
        if self.shift == 0 {
            self.coeffs[0]
        } else {
            ZERO
        }
    }

    /// Re-expresses the field on the unshifted grid, dropping the top `shift` modes.
    pub fn materialize(&self) -> ChiralField {
        let k = self.coeffs.len();
        let mut out = vec![ZERO; k];
        for j in self.shift.min(k)..k {
            out[j] = self.coeffs[j - self.shift];
        }
        ChiralField { grid: self.grid, shift: 0, coeffs: out }
    }

    /// Embeds into the two-sided representation (materializing any shift).
    pub fn embed(&self) -> RealLineField {
        let m = self.materialize();
        let k = self.grid.modes();
        let mut coeffs = vec![ZERO; 2 * k];
        coeffs[k..].copy_from_slice(&m.coeffs);
        RealLineField { grid: self.grid, coeffs }
    }

    /// Values f(x_m) on the 2K-point spatial grid.
    pub fn samples(&self) -> Vec<C64> {
        synthesize(&self.grid, &self.coeffs, self.shift as i64)
    }

    /// Coefficient-wise multiplication c_k ← m(ξ_k) c_k.
    pub fn fourier_multiplier(&self, symbol: impl Fn(f64) -> C64) -> Result<Self> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for (k, c) in self.coeffs.iter().enumerate() {
            let xi = self.grid.xi(k + self.shift);
            let m = symbol(xi);
            if !(m.re.is_finite() && m.im.is_finite()) {
                return Err(Error::InvalidSymbol { xi });
            }
            out.push(m * c);
        }
        self.replace(out)
    }

    /// D = −i∂_x, which coincides with |D| on chiral fields.
    pub fn derivative_d(&self) -> Self {
        let out = self.coeffs.iter().enumerate().map(|(k, c)| c * self.grid.xi(k + self.shift)).collect();
        ChiralField { grid: self.grid, shift: self.shift, coeffs: out }
    }

    /// Multiplication by e^{iηx} with η ≥ 0 a multiple of Δξ.
    pub fn galilean_boost(&self, eta: f64) -> Result<Self> {
        if eta < 0.0 {
            return Err(Error::ChiralityViolation(eta));
        }
        let steps = self.grid.aligned_steps(eta)? as usize;
        Ok(ChiralField { grid: self.grid, shift: self.shift + steps, coeffs: self.coeffs.clone() })
    }

    pub fn scale(&self, s: C64) -> Self {
        ChiralField { grid: self.grid, shift: self.shift, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid || self.shift != other.shift {
            return Err(Error::GridMismatch);
        }
        self.replace(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect())
    }
}

/// A general field on the periodic box with coefficients for k = −K..K−1
/// (index j stores mode k = j − K).
#[derive(Clone, Debug, PartialEq)]
pub struct RealLineField {
    grid: FrequencyGrid,
    coeffs: Vec<C64>,
}

impl RealLineField {
    pub fn new(grid: FrequencyGrid, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != grid.points_len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients, got {}",
                grid.points_len(),
                coeffs.len()
            )));
        }
        check_finite(&coeffs)?;
        Ok(Self { grid, coeffs })
    }

    pub fn zero(grid: FrequencyGrid) -> Self {
        Self { grid, coeffs: vec![ZERO; grid.points_len()] }
    }

    pub fn from_samples(grid: FrequencyGrid, samples: &[C64]) -> Result<Self> {
        if samples.len() != grid.points_len() {
            return Err(Error::InvalidParameter("sample count must be 2K".into()));
        }
        check_finite(samples)?;
        Ok(Self { grid, coeffs: analyze(&grid, samples) })
    }

    pub fn from_fn(grid: FrequencyGrid, f: impl Fn(f64) -> C64) -> Result<Self> {
        let s: Vec<C64> = grid.points().into_iter().map(f).collect();
        Self::from_samples(grid, &s)
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Coefficient of mode k ∈ [−K, K).
    pub fn mode(&self, k: i64) -> C64 {
        self.coeffs[(k + self.grid.modes() as i64) as usize]
    }

    /// Signed frequency of storage index j.
    pub fn xi_of_index(&self, j: usize) -> f64 {
        self.grid.dxi() * (j as f64 - self.grid.modes() as f64)
    }

    pub fn samples(&self) -> Vec<C64> {
        synthesize(&self.grid, &self.coeffs, -(self.grid.modes() as i64))
    }

    /// Π₊: restriction to k ≥ 0.
    pub fn project_plus(&self) -> ChiralField {
        let k = self.grid.modes();
        ChiralField { grid: self.grid, shift: 0, coeffs: self.coeffs[k..].to_vec() }
    }

    fn map_modes(&self, m: impl Fn(f64) -> C64) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(j, c)| c * m(self.xi_of_index(j))).collect();
        Self { grid: self.grid, coeffs }
    }

    /// H = −i sgn(D); the k = 0 mode is annihilated.
    pub fn hilbert_transform(&self) -> Self {
        self.map_modes(|xi| C64::new(0.0, -xi.signum() * f64::from(u8::from(xi != 0.0))))
    }

    /// ∂_x.
    pub fn derivative(&self) -> Self {
        self.map_modes(|xi| C64::new(0.0, xi))
    }

    /// |D|.
    pub fn abs_d(&self) -> Self {
        self.map_modes(|xi| C64::new(xi.abs(), 0.0))
    }

    /// Whether the coefficients satisfy c_{−k} = conj(c_k) (real-valued field).
    pub fn is_real(&self, tol: f64) -> bool {
        let k = self.grid.modes() as i64;
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1e-300);
        if self.mode(0).im.abs() > tol * scale || self.mode(-k).im.abs() > tol * scale {
            return false;
        }
        (1..k).all(|j| (self.mode(-j) - self.mode(j).conj()).norm() <= tol * scale)
    }

    /// ∫|f|² over the box (rectangle rule, equal in x- and ξ-space).
    pub fn mass(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() / self.grid.length()
    }

    /// Same quantity evaluated from x-samples.
    pub fn mass_from_samples(&self) -> f64 {
        self.samples().iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    /// ⟨f, g⟩ = ∫ f ḡ.
    pub fn inner(&self, other: &Self) -> C64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b.conj()).sum::<C64>() / self.grid.length()
    }

    /// e^{iηx} f for any grid-aligned η; modes pushed outside [−K, K) are dropped.
    pub fn galilean_boost(&self, eta: f64) -> Result<Self> {
        let s = self.grid.aligned_steps(eta)?;
        let n = self.coeffs.len() as i64;
        let mut out = vec![ZERO; n as usize];
        for j in 0..n {
            let t = j + s;
            if (0..n).contains(&t) {
                out[t as usize] = self.coeffs[j as usize];
            }
        }
        Ok(Self { grid: self.grid, coeffs: out })
    }

    /// θ(x_m) = ∫_{−L/2}^{x_m} |f|² by spectral antidifferentiation of the sampled density.
    pub fn cumulative_density(&self) -> Vec<f64> {
        cumulative_integral(&self.grid, &self.samples().iter().map(|v| v.norm_sqr()).collect::<Vec<_>>())
    }

    /// Gauge transform Φ(u) = u e^{−(i/2)∫_{−∞}^x |u|²}.
    pub fn gauge_transform(&self) -> Self {
        self.gauge_with_sign(-1.0)
    }

    /// Inverse gauge transform Φ⁻¹(v) = v e^{(i/2)∫_{−∞}^x |v|²}.
    pub fn inverse_gauge_transform(&self) -> Self {
        self.gauge_with_sign(1.0)
    }

    fn gauge_with_sign(&self, sign: f64) -> Self {
        let s = self.samples();
        let theta = cumulative_integral(&self.grid, &s.iter().map(|v| v.norm_sqr()).collect::<Vec<_>>());
        let v: Vec<C64> = s.iter().zip(&theta).map(|(u, t)| u * C64::from_polar(1.0, 0.5 * sign * t)).collect();
        Self { grid: self.grid, coeffs: analyze(&self.grid, &v) }
    }
}

/// Cumulative integral from −L/2 of real periodic samples: spectral antiderivative of
/// the nonzero modes plus the linear term carried by the mean. The Nyquist mode is
/// read as a cosine and integrates to zero at the nodes.
pub fn cumulative_integral(grid: &FrequencyGrid, density: &[f64]) -> Vec<f64> {
    let n = grid.points_len();
    let k = grid.modes() as i64;
    let dens: Vec<C64> = density.iter().map(|&d| C64::new(d, 0.0)).collect();
    let r = analyze(grid, &dens);
    let mut anti = vec![ZERO; n];
    let mut base = ZERO;
    for (j, rj) in r.iter().enumerate() {
        let kk = j as i64 - k;
        if kk == 0 || kk == -k {
            continue;
        }
        let a = rj / C64::new(0.0, grid.dxi() * kk as f64);
        anti[j] = a;
        base += if kk.rem_euclid(2) == 0 { a } else { -a };
    }
    let vals = synthesize(grid, &anti, -k);
    let mean = r[k as usize].re / grid.length();
    let base = base / grid.length();
    vals.iter()
        .enumerate()
        .map(|(m, v)| (v - base).re + mean * (grid.x(m) + 0.5 * grid.length()))
        .collect()
}

/// Periodic trigonometric resampling of 2K-point data onto `factor`·2K points.
pub fn upsample(grid: &FrequencyGrid, samples: &[C64], factor: usize) -> Vec<C64> {
    let n = grid.points_len();
    let m = n * factor;
    let mut buf = samples.to_vec();
    FftPair::new(n).forward_in_place(&mut buf);
    let mut big = vec![ZERO; m];
    for (j, v) in buf.iter().enumerate() {
        let k = if j < n / 2 { j as i64 } else { j as i64 - n as i64 };
        big[k.rem_euclid(m as i64) as usize] = *v;
    }
    FftPair::new(m).inverse_in_place(&mut big);
    big.iter().map(|v| v * factor as f64).collect()
}

/// 2π, spelled once.
pub const TWO_PI: f64 = 2.0 * PI;
