//! Rational multi-solitons: construction from poles, the inverse spectral
//! formula u = √(2ρ)e^{iφ}⟨(M(t) − x)⁻¹X, Y⟩, pole/residue tracks and
//! Sobolev growth.

use faer::Mat;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::ChiralField;
use crate::grid::FrequencyGrid;
use crate::lax::{spectral_data_from_potential, SpectralData};
use crate::linalg::{self, CMat};
use crate::poly::{self, Poly};
use crate::quadrature::{integrate_adaptive, polyfit};
use crate::spectral::Scheme;

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Collision threshold δ_gap = 1e−6·(1 + max|z_j|).
pub fn collision_gap(poles: &[C64]) -> f64 {
    1e-6 * (1.0 + poles.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

pub fn min_pole_distance(poles: &[C64]) -> f64 {
    let mut m = f64::INFINITY;
    for j in 0..poles.len() {
        for k in 0..j {
            m = m.min((poles[j] - poles[k]).norm());
        }
    }
    m
}

/// max_k |Σ_j a_j ā_k/(z_j − z̄_k) − i|.
pub fn constraint_residual(poles: &[C64], residues: &[C64]) -> f64 {
    let n = poles.len();
    (0..n)
        .map(|k| {
            let s: C64 = (0..n).map(|j| residues[j] * residues[k].conj() / (poles[j] - poles[k].conj())).sum();
            (s - I).norm()
        })
        .fold(0.0, f64::max)
}

/// Potential P/Q with its partial fractions Σ_j a_j/(x − z_j) + b_j/(x − z_j)².
#[derive(Clone, Debug, PartialEq)]
pub struct RationalSoliton {
    /// Distinct poles.
    pub poles: Vec<C64>,
    /// Coefficients of 1/(x − z_j).
    pub residues: Vec<C64>,
    /// Coefficients of 1/(x − z_j)² (all zero unless poles are confluent).
    pub double_residues: Vec<C64>,
    pub p: Poly,
    pub q: Poly,
}

impl RationalSoliton {
    /// Builds the residue form from poles and residues.
    pub fn from_residues(poles: Vec<C64>, residues: Vec<C64>) -> Result<Self> {
        if poles.len() != residues.len() || poles.is_empty() {
            return Err(Error::InvalidParameter("need equally many poles and residues".into()));
        }
        if let Some(z) = poles.iter().find(|z| !(z.im < 0.0)) {
            return Err(Error::InvalidDenominator(format!("pole {z} not in the lower half-plane")));
        }
        let q = poly::from_roots(&poles);
        let mut p = vec![ZERO; poles.len()];
        for (j, a) in residues.iter().enumerate() {
            let others: Vec<C64> = poles.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, z)| *z).collect();
            let term = poly::scale(&poly::from_roots(&others), *a);
            for (i, c) in term.iter().enumerate() {
                p[i] += c;
            }
        }
        let double_residues = vec![ZERO; poles.len()];
        Ok(Self { poles, residues, double_residues, p, q })
    }

    /// Degree of Q.
    pub fn n(&self) -> usize {
        self.q.len() - 1
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.poles
            .iter()
            .zip(self.residues.iter().zip(&self.double_residues))
            .map(|(z, (a, b))| {
                let d = x - z;
                a / d + b / (d * d)
            })
            .sum()
    }

    /// f̂(ξ) = −2πi Σ a_j e^{−iz_jξ} − 2π Σ b_j ξ e^{−iz_jξ} for ξ ≥ 0.
    pub fn fourier(&self, xi: f64) -> C64 {
        self.poles
            .iter()
            .zip(self.residues.iter().zip(&self.double_residues))
            .map(|(z, (a, b))| {
                let e = (-I * z * xi).exp();
                (-2.0 * PI * I * a - 2.0 * PI * xi * b) * e
            })
            .sum()
    }

    pub fn to_field(&self, grid: FrequencyGrid) -> Result<ChiralField> {
        ChiralField::from_spectrum(grid, |xi| self.fourier(xi))
    }

    pub fn constraint_residual(&self) -> f64 {
        constraint_residual(&self.poles, &self.residues)
    }

    pub fn polynomial_residual(&self) -> Result<f64> {
        validate_multisoliton(&self.p, &self.q)
    }
}

/// F = i(Q′Q̄ − Q̄′Q), real on the real line.
fn f_poly(q: &[C64]) -> Poly {
    let dq = poly::derivative(q);
    let qb = poly::conj(q);
    let dqb = poly::conj(&dq);
    poly::scale(&poly::sub(&poly::mul(&dq, &qb), &poly::mul(&dqb, q)), I)
}

/// Relative coefficient residual of P P̄ − i(Q′Q̄ − Q̄′Q).
pub fn validate_multisoliton(p: &[C64], q: &[C64]) -> Result<f64> {
    let q = poly::trim(q, 0.0);
    let roots = poly::roots(&q)?;
    if let Some(z) = roots.iter().find(|z| z.im >= 0.0) {
        return Err(Error::InvalidDenominator(format!("Q has root {z} in the closed upper half-plane")));
    }
    if p.len() > q.len() - 1 && poly::trim(p, 0.0).len() > q.len() - 1 {
        return Err(Error::InvalidParameter("deg P must be below deg Q".into()));
    }
    let f = f_poly(&q);
    let pp = poly::mul(p, &poly::conj(p));
    let r = poly::sub(&pp, &f);
    Ok(poly::max_abs(&r) / poly::max_abs(&f).max(f64::MIN_POSITIVE))
}

/// Multi-soliton with prescribed poles.
///
/// The roots of F = i(Q′Q̄ − Q̄′Q) come in pairs (α_j, ᾱ_j); bit j of `branch`
/// selects the root in the upper (1) or lower (0) half-plane, pairs ordered by real
/// part. P = c Π(x − α_j) with |c|² the leading coefficient of F and arg c = θ. With
/// `theta = None` the phase makes the residue of the pole with smallest real part
/// real positive. Repeated poles are supported for N = 2 only.
pub fn residues_from_poles(poles: &[C64], branch: u64, theta: Option<f64>) -> Result<RationalSoliton> {
    let n = poles.len();
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one pole".into()));
    }
    if let Some(z) = poles.iter().find(|z| !(z.im < 0.0)) {
        return Err(Error::InvalidDenominator(format!("pole {z} not in the lower half-plane")));
    }
    let confluent = min_pole_distance(poles) < collision_gap(poles);
    if confluent && n != 2 {
        return Err(Error::DegenerateConfiguration("repeated poles are only supported for N = 2".into()));
    }
    let q = poly::from_roots(poles);
    let f = f_poly(&q);
    let f = poly::trim(&f, 1e-13);
    let lead = f[f.len() - 1].re;
    let scale = poly::max_abs(&f);
    let roots = poly::roots(&f)?;
    if roots.len() != 2 * (n - 1) {
        return Err(Error::DegenerateConfiguration(format!("F has degree {} instead of {}", roots.len(), 2 * (n - 1))));
    }
    let tol = 1e-9 * scale.max(1.0);
    if roots.iter().any(|r| r.im.abs() <= tol) {
        return Err(Error::DegenerateConfiguration("F has a real root".into()));
    }
    let mut upper: Vec<C64> = roots.iter().filter(|r| r.im > 0.0).copied().collect();
    if upper.len() != n - 1 {
        return Err(Error::DegenerateConfiguration("roots of F are not conjugate pairs".into()));
    }
    upper.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let alphas: Vec<C64> =
        upper.iter().enumerate().map(|(j, a)| if (branch >> j) & 1 == 1 { *a } else { a.conj() }).collect();
    let c0 = lead.abs().sqrt();
    let base = poly::scale(&poly::from_roots(&alphas), C64::new(c0, 0.0));
    let build = |phase: C64| -> Result<RationalSoliton> {
        let p = poly::scale(&base, phase);
        if confluent {
            let z = 0.5 * (poles[0] + poles[1]);
            let q = poly::from_roots(&[z, z]);
            // P/(x−z)² with P = p1 x + p0 = p1 (x − z) + P(z).
            let pz = poly::eval(&p, z);
            let p1 = if p.len() > 1 { p[1] } else { ZERO };
            return Ok(RationalSoliton { poles: vec![z], residues: vec![p1], double_residues: vec![pz], p, q });
        }
        let dq = poly::derivative(&q);
        let residues: Vec<C64> = poles.iter().map(|z| poly::eval(&p, *z) / poly::eval(&dq, *z)).collect();
        Ok(RationalSoliton {
            poles: poles.to_vec(),
            residues,
            double_residues: vec![ZERO; n],
            p,
            q: q.clone(),
        })
    };
    match theta {
        Some(t) => build(C64::from_polar(1.0, t)),
        None => {
            let s = build(C64::new(1.0, 0.0))?;
            let lead_idx = (0..s.poles.len())
                .min_by(|&a, &b| s.poles[a].re.total_cmp(&s.poles[b].re).then(s.poles[a].im.total_cmp(&s.poles[b].im)))
                .unwrap_or(0);
            let r = if s.residues[lead_idx].norm() > 0.0 { s.residues[lead_idx] } else { s.double_residues[lead_idx] };
            build(C64::from_polar(1.0, -r.arg()))
        }
    }
}

/// V, W and M(t) = 2Vt + W of the inverse formula.
#[derive(Clone, Debug)]
pub struct SynthMatrix {
    pub v: Vec<f64>,
    pub w: CMat,
    pub m: CMat,
}

impl SynthMatrix {
    /// max |[W, V] − (iI − i⟨·,X⟩X)|.
    pub fn commutator_defect(&self) -> f64 {
        let n = self.v.len();
        let vm = linalg::diag(&self.v.iter().map(|x| C64::new(*x, 0.0)).collect::<Vec<_>>());
        let c = &self.w * &vm - &vm * &self.w;
        let target = Mat::<C64>::from_fn(n, n, |i, j| if i == j { ZERO } else { -I });
        linalg::max_abs(&(c - target))
    }

    /// (M − M*)/(2i).
    pub fn imaginary_part(&self) -> CMat {
        let d = &self.m - linalg::adjoint(&self.m);
        linalg::scale(&d, C64::new(0.0, -0.5))
    }
}

pub fn synth_matrix(data: &SpectralData, t: f64) -> Result<SynthMatrix> {
    data.validate()?;
    let n = data.n();
    let lam = &data.lambda;
    let w = Mat::<C64>::from_fn(n, n, |j, k| {
        if j == k {
            C64::new(data.gamma[j], if j == 0 { -data.rho } else { 0.0 })
        } else {
            I / (lam[j] - lam[k])
        }
    });
    let m = Mat::<C64>::from_fn(n, n, |j, k| w.read(j, k) + if j == k { C64::new(2.0 * lam[j] * t, 0.0) } else { ZERO });
    Ok(SynthMatrix { v: lam.clone(), w, m })
}

fn amplitude(data: &SpectralData) -> C64 {
    C64::from_polar((2.0 * data.rho).sqrt(), data.phi)
}

/// u(t, x) = √(2ρ)e^{iφ}⟨(M(t) − xI)⁻¹X, Y⟩ by a linear solve.
pub fn eval_soliton(data: &SpectralData, t: f64, x: C64) -> Result<C64> {
    let s = synth_matrix(data, t)?;
    eval_with(&s, data, x)
}

fn eval_with(s: &SynthMatrix, data: &SpectralData, x: C64) -> Result<C64> {
    let n = data.n();
    let a = Mat::<C64>::from_fn(n, n, |i, j| s.m.read(i, j) - if i == j { x } else { ZERO });
    let y = linalg::solve(&a, &vec![C64::new(1.0, 0.0); n]).map_err(|_| Error::NearSpectrum(x.to_string()))?;
    Ok(amplitude(data) * y[0])
}

/// u(t, x_j) for many points sharing one M(t).
pub fn eval_soliton_many(data: &SpectralData, t: f64, xs: &[f64]) -> Result<Vec<C64>> {
    let s = synth_matrix(data, t)?;
    xs.iter().map(|x| eval_with(&s, data, C64::new(*x, 0.0))).collect()
}

/// Eigenvalues of M(t) sorted by real part; all must lie in the lower half-plane.
pub fn poles_at_time(data: &SpectralData, t: f64) -> Result<Vec<C64>> {
    let s = synth_matrix(data, t)?;
    let mut z = linalg::eigvals(&s.m)?;
    if let Some(bad) = z.iter().find(|z| z.im >= -1e-14) {
        return Err(Error::PositivityViolation(bad.to_string()));
    }
    z.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(z)
}

/// Poles and (unless colliding) residues at time t.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleSnapshot {
    pub t: f64,
    pub poles: Vec<C64>,
    pub residues: Option<Vec<C64>>,
    pub collision: bool,
}

/// Partial-fraction residues a_j = −√(2ρ)e^{iφ} P_{1j}(P⁻¹X)_j from M = P diag(z) P⁻¹.
pub fn residues_at_time(data: &SpectralData, t: f64) -> Result<PoleSnapshot> {
    let s = synth_matrix(data, t)?;
    let (z, p) = linalg::eig(&s.m)?;
    if let Some(bad) = z.iter().find(|z| z.im >= -1e-14) {
        return Err(Error::PositivityViolation(bad.to_string()));
    }
    let n = z.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| z[a].re.total_cmp(&z[b].re).then(z[a].im.total_cmp(&z[b].im)));
    let poles: Vec<C64> = order.iter().map(|&j| z[j]).collect();
    let collision = n > 1 && min_pole_distance(&poles) < collision_gap(&poles);
    if collision {
        return Ok(PoleSnapshot { t, poles, residues: None, collision });
    }
    let y = linalg::solve(&p, &vec![C64::new(1.0, 0.0); n])?;
    let amp = amplitude(data);
    let residues = order.iter().map(|&j| -amp * p.read(0, j) * y[j]).collect();
    Ok(PoleSnapshot { t, poles, residues: Some(residues), collision })
}

/// Value and discriminant of the explicit two-soliton
/// u = √(2ρ)e^{iφ}(γ₂ + 2λt + iλ⁻¹ − x)/((γ₁ − iρ − x)(γ₂ + 2λt − x) − λ⁻²).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoSoliton {
    pub value: C64,
    /// Δ(t) = (γ₁ − iρ − γ₂ − 2λt)² + 4λ⁻².
    pub discriminant: C64,
    /// Roots z_± of the denominator.
    pub poles: [C64; 2],
}

#[allow(clippy::too_many_arguments)]
pub fn two_soliton_explicit(gamma1: f64, gamma2: f64, rho: f64, lambda: f64, phi: f64, t: f64, x: C64) -> TwoSoliton {
    let a = C64::new(gamma1, -rho);
    let d = C64::new(gamma2 + 2.0 * lambda * t, 0.0);
    let il = 1.0 / lambda;
    let num = d + I * il - x;
    let den = (a - x) * (d - x) - il * il;
    let disc = (a - d) * (a - d) + 4.0 * il * il;
    let r = disc.sqrt();
    let amp = C64::from_polar((2.0 * rho).sqrt(), phi);
    TwoSoliton { value: amp * num / den, discriminant: disc, poles: [0.5 * (a + d + r), 0.5 * (a + d - r)] }
}

/// ∫₀^∞ (1+ξ²)^s e^{−wξ} dξ for Re w > 0, on the ray where wξ is real.
fn weighted_laplace(w: C64, s: f64) -> C64 {
    let r = w.norm();
    let rot = C64::from_polar(1.0, -w.arg());
    let rot2 = rot * rot;
    let upper = 46.0 + 6.0 * s;
    let f = |sigma: f64| {
        let tau = sigma / r;
        (C64::new(1.0, 0.0) + rot2 * tau * tau).powf(s) * (-sigma).exp()
    };
    integrate_adaptive(f, 0.0, upper, 1e-12, 0.0) * rot / r
}

/// ‖u‖_{H^s} of Σ a_j/(x − z_j) from the pairwise Laplace integrals of
/// (1/2π)∫₀^∞ ⟨ξ⟩^{2s} |Σ_j −2πi a_j e^{−iz_jξ}|² dξ.
pub fn sobolev_norm_rational(poles: &[C64], residues: &[C64], s: f64) -> f64 {
    let n = poles.len();
    let mut acc = ZERO;
    for j in 0..n {
        for k in 0..n {
            let w = I * (poles[j] - poles[k].conj());
            acc += residues[j] * residues[k].conj() * weighted_laplace(w, s);
        }
    }
    (2.0 * PI * acc.re).max(0.0).sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthRow {
    pub t: f64,
    pub s: f64,
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthFit {
    pub s: f64,
    pub slope: f64,
    /// Standard error of the slope.
    pub stderr: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthScan {
    pub rows: Vec<GrowthRow>,
    /// Times skipped because of a pole collision.
    pub skipped: Vec<f64>,
    pub fits: Vec<GrowthFit>,
}

/// H^s norms along the exact evolution and log-log slopes against t.
pub fn growth_scan(data: &SpectralData, s_list: &[f64], t_list: &[f64]) -> Result<GrowthScan> {
    if t_list.is_empty() || t_list.iter().any(|t| !(*t > 0.0)) || t_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("t_list must be positive and increasing".into()));
    }
    if s_list.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
        return Err(Error::InvalidParameter("s values must be >= 0".into()));
    }
    let snaps: Vec<PoleSnapshot> = t_list.par_iter().map(|t| residues_at_time(data, *t)).collect::<Result<_>>()?;
    let skipped: Vec<f64> = snaps.iter().filter(|p| p.collision).map(|p| p.t).collect();
    let rows: Vec<GrowthRow> = s_list
        .iter()
        .flat_map(|&s| snaps.iter().filter(|p| !p.collision).map(move |p| (s, p)))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|(s, p)| GrowthRow {
            t: p.t,
            s: *s,
            norm: sobolev_norm_rational(&p.poles, p.residues.as_deref().unwrap_or(&[]), *s),
        })
        .collect();
    let fits = s_list
        .iter()
        .map(|&s| {
            let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.s == s).map(|r| (r.t.ln(), r.norm.ln())).collect();
            fit_slope(s, &pts)
        })
        .collect();
    Ok(GrowthScan { rows, skipped, fits })
}

fn fit_slope(s: f64, pts: &[(f64, f64)]) -> GrowthFit {
    let n = pts.len();
    if n < 2 {
        return GrowthFit { s, slope: f64::NAN, stderr: f64::NAN, samples: n };
    }
    let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let c = polyfit(&x, &y, 1);
    let mean = x.iter().sum::<f64>() / n as f64;
    let sxx: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    let sse: f64 = x.iter().zip(&y).map(|(a, b)| (b - c[0] - c[1] * a).powi(2)).sum();
    let stderr = if n > 2 && sxx > 0.0 { (sse / (n - 2) as f64 / sxx).sqrt() } else { 0.0 };
    GrowthFit { s, slope: c[1], stderr, samples: n }
}

/// Samples of the exact evolution as a chiral field on `grid`.
pub fn soliton_field(data: &SpectralData, t: f64, grid: FrequencyGrid) -> Result<ChiralField> {
    let snap = residues_at_time(data, t)?;
    let res = snap.residues.ok_or_else(|| Error::DegenerateConfiguration(format!("pole collision at t = {t}")))?;
    RationalSoliton::from_residues(snap.poles, res)?.to_field(grid)
}

#[derive(Clone, Debug)]
pub struct RoundTrip {
    pub data: SpectralData,
    pub sup_error: f64,
}

/// Extracts spectral data from `u` and compares eval_soliton(t = 0) against
/// `reference` on the x-grid.
pub fn potential_roundtrip(u: &ChiralField, scheme: Scheme, reference: &dyn Fn(f64) -> C64) -> Result<RoundTrip> {
    let ex = spectral_data_from_potential(u, scheme, None)?;
    let xs = u.grid().points();
    let synth = eval_soliton_many(&ex.data, 0.0, &xs)?;
    let sup_error = xs.iter().zip(&synth).map(|(x, v)| (reference(*x) - v).norm()).fold(0.0, f64::max);
    Ok(RoundTrip { data: ex.data, sup_error })
}

/// Q(x) = det(xI − M(t)) as a polynomial.
pub fn characteristic_polynomial(data: &SpectralData, t: f64) -> Result<Poly> {
    let s = synth_matrix(data, t)?;
    Ok(poly::from_roots(&linalg::eigvals(&s.m)?))
}
