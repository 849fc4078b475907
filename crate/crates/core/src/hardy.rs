//! Conserved functionals and norms of chiral fields.
//!
//! The free functions use the default [`Scheme::Gregory`] quadrature; the
//! [`Functionals`] methods take an explicit one.

use num_complex::Complex64 as C64;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::{upsample, ChiralField, RealLineField};
use crate::quadrature::derivative;
use crate::spectral::{Quadrature, Scheme};

/// Finite-difference order used for ∂_ξ in spectral variances.
pub const VARIANCE_STENCIL_ORDER: usize = 12;

/// Result of the x-space variance quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Variance {
    pub value: f64,
    /// |f(±L/2)|²·L² exceeds 1e−8 times the value: the box truncates the integral.
    pub boundary_dominated: bool,
}

/// Functionals evaluated with a fixed quadrature.
#[derive(Clone, Debug)]
pub struct Functionals {
    quad: Arc<Quadrature>,
}

impl Functionals {
    pub fn new(quad: Arc<Quadrature>) -> Self {
        Self { quad }
    }

    pub fn for_field(f: &ChiralField, scheme: Scheme) -> Self {
        Self::new(Quadrature::shared(f.grid(), scheme))
    }

    pub fn quadrature(&self) -> &Quadrature {
        &self.quad
    }

    /// M = ∫|f|².
    pub fn mass(&self, f: &ChiralField) -> f64 {
        self.quad.norm_sqr(f.coeffs())
    }

    /// ⟨f, g⟩ for fields carrying the same shift.
    pub fn inner(&self, f: &ChiralField, g: &ChiralField) -> Result<C64> {
        if f.grid() != g.grid() || f.shift() != g.shift() {
            return Err(Error::GridMismatch);
        }
        Ok(self.quad.inner(f.coeffs(), g.coeffs()))
    }

    /// Π₊(|u|²) = T_ū u.
    pub fn density_plus(&self, u: &ChiralField) -> Vec<C64> {
        self.quad.corr(u.coeffs(), u.coeffs())
    }

    /// ∫|u|⁴ = 2‖Π₊|u|²‖² (|u|² is real).
    pub fn quartic(&self, u: &ChiralField) -> f64 {
        2.0 * self.quad.norm_sqr(&self.density_plus(u))
    }

    /// P = ⟨Du, u⟩ − ½∫|u|⁴.
    pub fn momentum(&self, u: &ChiralField) -> f64 {
        let xi = u.frequencies();
        let du = self.quad.inner_weighted(u.coeffs(), u.coeffs(), |k| xi[k]).re;
        du - 0.5 * self.quartic(u)
    }

    /// L_u f = D f − T_u T_ū f for f with the same shift as u.
    pub fn apply_lax(&self, u: &ChiralField, f: &[C64]) -> Vec<C64> {
        let xi = u.frequencies();
        let t = self.quad.conv(u.coeffs(), &self.quad.corr(u.coeffs(), f));
        f.iter().zip(&t).enumerate().map(|(k, (a, b))| a * xi[k] - b).collect()
    }

    /// E = ½‖∂_x u − iΠ₊(|u|²)u‖² = ½‖L_u u‖².
    pub fn energy(&self, u: &ChiralField) -> f64 {
        0.5 * self.quad.norm_sqr(&self.apply_lax(u, u.coeffs()))
    }

    /// I_k = ⟨L_u^k u, u⟩ for k = 0..=kmax by repeated application.
    pub fn hierarchy(&self, u: &ChiralField, kmax: usize) -> Vec<C64> {
        let mut v = u.coeffs().to_vec();
        let mut out = vec![self.quad.inner(&v, u.coeffs())];
        for _ in 0..kmax {
            v = self.apply_lax(u, &v);
            out.push(self.quad.inner(&v, u.coeffs()));
        }
        out
    }

    /// ‖f‖_{H^s} with ‖f‖² = (1/2π)∫(1+ξ²)^s |f̂|².
    pub fn sobolev_norm(&self, f: &ChiralField, s: f64) -> f64 {
        let xi = f.frequencies();
        self.quad.inner_weighted(f.coeffs(), f.coeffs(), |k| (1.0 + xi[k] * xi[k]).powf(s)).re.max(0.0).sqrt()
    }

    /// ∫x²|f|² = (1/2π)∫|∂_ξ f̂|², finite differences of order 12 in ξ.
    pub fn variance_spectral(&self, f: &ChiralField) -> f64 {
        let d = derivative(f.coeffs(), f.grid().dxi(), VARIANCE_STENCIL_ORDER);
        self.quad.norm_sqr(&d)
    }

    /// Fourier coefficient of |f|² at Δξ, used for translation tracking.
    pub fn density_first_mode(&self, f: &ChiralField) -> C64 {
        self.density_plus(f)[1]
    }

    /// Modulus centroid −arg(ρ̂(Δξ))/Δξ, defined modulo L.
    pub fn centroid(&self, f: &ChiralField) -> f64 {
        -self.density_first_mode(f).arg() / f.grid().dxi()
    }
}

fn default_functionals(f: &ChiralField) -> Functionals {
    Functionals::for_field(f, Scheme::Gregory)
}

pub fn mass(f: &ChiralField) -> f64 {
    default_functionals(f).mass(f)
}

pub fn momentum(f: &ChiralField) -> f64 {
    default_functionals(f).momentum(f)
}

pub fn energy(f: &ChiralField) -> f64 {
    default_functionals(f).energy(f)
}

pub fn sobolev_norm(f: &ChiralField, s: f64) -> Result<f64> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::InvalidParameter(format!("Sobolev index must be >= 0, got {s}")));
    }
    Ok(default_functionals(f).sobolev_norm(f, s))
}

/// ∫x²|f|² by x-space quadrature on the box, with a boundary-dominance flag.
pub fn variance(f: &ChiralField) -> Variance {
    let g = f.grid();
    let s = f.samples();
    let value: f64 = s.iter().enumerate().map(|(m, v)| g.x(m).powi(2) * v.norm_sqr()).sum::<f64>() * g.dx();
    let edge = s[0].norm_sqr() * g.length().powi(2);
    Variance { value, boundary_dominated: edge > 1e-8 * value }
}

pub fn project_plus(f: &RealLineField) -> ChiralField {
    f.project_plus()
}

pub fn hilbert_transform(f: &RealLineField) -> RealLineField {
    f.hilbert_transform()
}

pub fn galilean_boost(f: &ChiralField, eta: f64) -> Result<ChiralField> {
    f.galilean_boost(eta)
}

pub fn gauge_transform(f: &RealLineField) -> RealLineField {
    f.gauge_transform()
}

pub fn inverse_gauge_transform(f: &RealLineField) -> RealLineField {
    f.inverse_gauge_transform()
}

/// P of a general box field, with ∫(Du)ū summed in x-space.
pub fn momentum_x(u: &RealLineField) -> Result<f64> {
    let g = u.grid();
    let s = u.samples();
    let d = u.derivative().samples();
    let du: C64 = d.iter().zip(&s).map(|(a, b)| C64::new(0.0, -1.0) * a * b.conj()).sum::<C64>() * g.dx();
    let quartic = quartic_x(u);
    let scale = 1.0 + du.re.abs() + quartic;
    if du.im.abs() > 1e-10 * scale {
        return Err(Error::NonRealFunctional(du.im));
    }
    Ok(du.re - 0.5 * quartic)
}

/// ∫|u|⁴ on a 2× refined grid.
pub fn quartic_x(u: &RealLineField) -> f64 {
    let g = u.grid();
    let fine = upsample(g, &u.samples(), 2);
    fine.iter().map(|v| v.norm_sqr().powi(2)).sum::<f64>() * g.dx() / 2.0
}

/// Pointwise data on a `factor`-refined grid: (u, ∂_x u, |u|²).
fn refined(u: &RealLineField, factor: usize) -> (Vec<C64>, Vec<C64>, Vec<f64>) {
    let g = u.grid();
    let v = upsample(g, &u.samples(), factor);
    let dv = upsample(g, &u.derivative().samples(), factor);
    let r = v.iter().map(|c| c.norm_sqr()).collect();
    (v, dv, r)
}

/// Hilbert transform (or Π₊ when `plus`) of real fine-grid data.
fn fine_transform(len: usize, dxi: f64, data: &[f64], plus: bool) -> Vec<C64> {
    let fft = crate::fft::FftPair::new(len);
    let mut buf: Vec<C64> = data.iter().map(|&d| C64::new(d, 0.0)).collect();
    fft.forward_in_place(&mut buf);
    for (j, b) in buf.iter_mut().enumerate() {
        let k = if j < len / 2 { j as f64 } else { j as f64 - len as f64 };
        let xi = k * dxi;
        if plus {
            if xi < 0.0 {
                *b = C64::new(0.0, 0.0);
            } else if xi == 0.0 {
                // trapezoid end weight for (1/2π)∫₀^∞
                *b *= 0.5;
            }
        } else if xi == 0.0 {
            *b = C64::new(0.0, 0.0);
        } else {
            *b *= C64::new(0.0, -xi.signum());
        }
    }
    fft.inverse_in_place(&mut buf);
    buf
}

/// E(u) = ½∫|∂_x u − iΠ₊(|u|²)u|² evaluated in x-space with 3× padded products.
pub fn energy_x(u: &RealLineField) -> f64 {
    let g = u.grid();
    let f = 3;
    let (v, dv, r) = refined(u, f);
    let p = fine_transform(v.len(), g.dxi(), &r, true);
    let i = C64::new(0.0, 1.0);
    let s: f64 = (0..v.len()).map(|m| (dv[m] - i * p[m] * v[m]).norm_sqr()).sum();
    0.5 * s * g.dx() / f as f64
}

/// Ẽ(v) = ½∫|∂_x v + ½H(|v|²)v|² for the gauged field, 3× padded.
pub fn energy_gauged(v: &RealLineField) -> f64 {
    let g = v.grid();
    let f = 3;
    let (w, dw, r) = refined(v, f);
    let h = fine_transform(w.len(), g.dxi(), &r, false);
    let s: f64 = (0..w.len()).map(|m| (dw[m] + 0.5 * h[m].re * w[m]).norm_sqr()).sum();
    0.5 * s * g.dx() / f as f64
}
