//! Lax pair (L_u, B_u, B̃_u) as dense matrices in the positive-frequency basis,
//! bound states and the spectral coordinates (φ, ρ, λ, γ).

use faer::Mat;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::ChiralField;
use crate::hardy::Functionals;
use crate::linalg::{self, CMat};
use crate::quadrature::derivative;
use crate::spectral::{Quadrature, Scheme};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Overlap tolerance δ of the bound-state test.
pub const OVERLAP_DELTA: f64 = 0.05;
/// Largest admissible energy fraction of a bound state outside |x| > L/4.
pub const LOCALIZATION_LIMIT: f64 = 0.10;
/// Bound states are orthogonal; candidates more parallel than this to an accepted one are rejected.
pub const PARALLEL_LIMIT: f64 = 0.5;
/// |λ| below which the zero eigenvalue is snapped to 0.
pub const ZERO_SNAP: f64 = 1e-6;
/// Finite-difference order for Gψ = i dψ̂/dξ.
pub const GENERATOR_STENCIL_ORDER: usize = 8;

/// Matrix of T_a: entries (Δξ/2π) v^{(k)}_i â(ξ_k − ξ_i) for i ≤ k.
pub fn toeplitz_from_symbol(quad: &Quadrature, a: &[C64]) -> CMat {
    let k = a.len();
    let s = quad.grid().dxi() / (2.0 * PI);
    Mat::from_fn(k, k, |r, c| if c <= r { a[r - c] * (s * quad.conv_weight(r, c)) } else { C64::new(0.0, 0.0) })
}

/// Matrix of T_ā: entries (Δξ/2π) w_{l−i} conj(â(ξ_l − ξ_i)) for l ≥ i.
pub fn toeplitz_adjoint(quad: &Quadrature, a: &[C64]) -> CMat {
    let k = a.len();
    let s = quad.grid().dxi() / (2.0 * PI);
    let w = quad.weights();
    Mat::from_fn(k, k, |r, c| if c >= r { a[c - r].conj() * (s * w[c - r]) } else { C64::new(0.0, 0.0) })
}

fn xi_diag(quad: &Quadrature, power: i32) -> CMat {
    let xi = quad.grid().frequencies();
    linalg::diag(&xi.iter().map(|x| C64::new(x.powi(power), 0.0)).collect::<Vec<_>>())
}

/// L_u = D − T_u T_ū together with the field and quadrature it was built from.
#[derive(Clone, Debug)]
pub struct LaxMatrix {
    pub field: ChiralField,
    pub quad: Arc<Quadrature>,
    pub entries: CMat,
}

impl LaxMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn apply(&self, f: &[C64]) -> Vec<C64> {
        linalg::matvec(&self.entries, f)
    }

    /// max |A − A*|.
    pub fn hermitian_defect(&self) -> f64 {
        linalg::hermitian_defect(&self.entries)
    }
}

/// Assembles L_u (boosted fields are materialized on the unshifted grid).
pub fn assemble_lax(u: &ChiralField, scheme: Scheme) -> LaxMatrix {
    let field = u.materialize();
    let quad = Quadrature::shared(field.grid(), scheme);
    let t = toeplitz_from_symbol(&quad, field.coeffs());
    let ts = toeplitz_adjoint(&quad, field.coeffs());
    let entries = xi_diag(&quad, 1) - &t * &ts;
    LaxMatrix { field, quad, entries }
}

fn d_x(field: &ChiralField) -> Vec<C64> {
    let xi = field.grid().frequencies();
    field.coeffs().iter().zip(&xi).map(|(c, x)| I * *x * c).collect()
}

/// B_u = T_u T_{∂ū} − T_{∂u} T_ū + i(T_u T_ū)².
pub fn assemble_b(u: &ChiralField, scheme: Scheme) -> CMat {
    let field = u.materialize();
    let quad = Quadrature::shared(field.grid(), scheme);
    let du = d_x(&field);
    let t = toeplitz_from_symbol(&quad, field.coeffs());
    let ts = toeplitz_adjoint(&quad, field.coeffs());
    let tds = toeplitz_adjoint(&quad, &du);
    let td = toeplitz_from_symbol(&quad, &du);
    let a = &t * &ts;
    let a2 = &a * &a;
    &t * &tds - &td * &ts + linalg::scale(&a2, I)
}

/// B̃_u = −iD² + 2i T_u D T_ū.
pub fn assemble_b_tilde(u: &ChiralField, scheme: Scheme) -> CMat {
    let field = u.materialize();
    let quad = Quadrature::shared(field.grid(), scheme);
    let t = toeplitz_from_symbol(&quad, field.coeffs());
    let ts = toeplitz_adjoint(&quad, field.coeffs());
    let mid = &t * &(xi_diag(&quad, 1) * &ts);
    linalg::scale(&xi_diag(&quad, 2), -I) + linalg::scale(&mid, 2.0 * I)
}

/// One eigenpair of L_u that passed the bound-state tests.
#[derive(Clone, Debug)]
pub struct BoundState {
    pub eigenvalue: f64,
    /// Imaginary part returned by the general eigensolver (discretization defect).
    pub eigenvalue_imag: f64,
    /// Eigenvector with ⟨u, ψ⟩ = √(2π).
    pub vector: Vec<C64>,
    /// |⟨u,ψ⟩|² / (2π‖ψ‖²).
    pub overlap: f64,
    /// Energy fraction of ψ in |x| > L/4.
    pub outside_fraction: f64,
}

#[derive(Clone, Debug)]
pub struct EigenSystem {
    /// Real parts of all eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Overlap ratio of each eigenpair, in the order of `eigenvalues`.
    pub overlaps: Vec<f64>,
    /// Largest |Im μ| over the spectrum.
    pub max_imag: f64,
    /// Bound states sorted by eigenvalue.
    pub bound: Vec<BoundState>,
}

impl EigenSystem {
    pub fn count(&self) -> usize {
        self.bound.len()
    }

    pub fn bound_eigenvalues(&self) -> Vec<f64> {
        self.bound.iter().map(|b| b.eigenvalue).collect()
    }
}

fn outside_fraction(field: &ChiralField) -> f64 {
    let g = field.grid();
    let s = field.samples();
    let mut total = 0.0;
    let mut out = 0.0;
    for (m, v) in s.iter().enumerate() {
        let p = v.norm_sqr();
        total += p;
        if g.x(m).abs() > 0.25 * g.length() {
            out += p;
        }
    }
    if total > 0.0 {
        out / total
    } else {
        0.0
    }
}

/// Full eigendecomposition of L_u and selection of the bound states.
///
/// An eigenpair is a bound state when |⟨u,ψ⟩|² = 2π‖ψ‖² within δ, ψ is spatially
/// localized, and ψ is not nearly parallel to a better candidate already accepted.
pub fn bound_states(lax: &LaxMatrix) -> Result<EigenSystem> {
    let (vals, vecs) = linalg::eig(&lax.entries)?;
    let quad = &lax.quad;
    let u = lax.field.coeffs();
    let n = vals.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].re.total_cmp(&vals[b].re));
    let mut overlaps = vec![0.0; n];
    let mut candidates = Vec::new();
    for j in 0..n {
        let psi = linalg::column(&vecs, j);
        let nrm = quad.norm_sqr(&psi);
        if nrm <= 0.0 {
            continue;
        }
        let ov = quad.inner(u, &psi).norm_sqr() / (2.0 * PI * nrm);
        overlaps[j] = ov;
        if (ov - 1.0).abs() <= OVERLAP_DELTA {
            candidates.push(j);
        }
    }
    candidates.sort_by(|&a, &b| (overlaps[a] - 1.0).abs().total_cmp(&(overlaps[b] - 1.0).abs()));
    let mut accepted: Vec<(Vec<C64>, BoundState)> = Vec::new();
    for j in candidates {
        let psi = linalg::column(&vecs, j);
        let unit: Vec<C64> = {
            let s = quad.norm_sqr(&psi).sqrt();
            psi.iter().map(|c| c / s).collect()
        };
        let field = lax.field.replace(unit.clone())?;
        let outside = outside_fraction(&field);
        if outside >= LOCALIZATION_LIMIT {
            continue;
        }
        if accepted.iter().any(|(p, _)| quad.inner(&unit, p).norm() > PARALLEL_LIMIT) {
            continue;
        }
        let s = quad.inner(u, &unit);
        let phase = C64::new((2.0 * PI).sqrt(), 0.0) / s.conj();
        let vector = unit.iter().map(|c| c * phase).collect();
        accepted.push((
            unit,
            BoundState {
                eigenvalue: vals[j].re,
                eigenvalue_imag: vals[j].im,
                vector,
                overlap: overlaps[j],
                outside_fraction: outside,
            },
        ));
    }
    let mut bound: Vec<BoundState> = accepted.into_iter().map(|(_, b)| b).collect();
    bound.sort_by(|a, b| a.eigenvalue.total_cmp(&b.eigenvalue));
    Ok(EigenSystem {
        eigenvalues: order.iter().map(|&j| vals[j].re).collect(),
        overlaps: order.iter().map(|&j| overlaps[j]).collect(),
        max_imag: vals.iter().map(|v| v.im.abs()).fold(0.0, f64::max),
        bound,
    })
}

/// Bound states near the given eigenvalue estimates by shifted inverse iteration.
///
/// Each seed (typically a bound eigenvalue from a coarser grid) is refined against
/// this matrix with one LU factorization; the overlap and localization are measured
/// as in [`bound_states`] but no candidate is rejected. Avoids the full dense
/// eigensolve on fine grids.
pub fn refine_bound_states(lax: &LaxMatrix, seeds: &[f64]) -> Result<Vec<BoundState>> {
    let quad = &lax.quad;
    let u = lax.field.coeffs();
    let n = lax.dim();
    let mut out = Vec::with_capacity(seeds.len());
    for &seed in seeds {
        // Offset keeps the shifted matrix invertible when the seed is already exact.
        let shift = seed + 1e-9 * seed.abs().max(1.0);
        let lu = linalg::Lu::new(&(&lax.entries - linalg::diag(&vec![C64::new(shift, 0.0); n])));
        let unit = |v: &[C64]| {
            let s = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            v.iter().map(|c| c / s).collect::<Vec<_>>()
        };
        let mut v = unit(u);
        let mut mu = C64::new(seed, 0.0);
        for _ in 0..100 {
            let w = lu.solve(&v)?;
            let nu: C64 = v.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
            let next = C64::new(shift, 0.0) + 1.0 / nu;
            v = unit(&w);
            let done = (next - mu).norm() <= 1e-13 * next.norm().max(1.0);
            mu = next;
            if done {
                break;
            }
        }
        let nrm = quad.norm_sqr(&v);
        let overlap = quad.inner(u, &v).norm_sqr() / (2.0 * PI * nrm);
        let normed: Vec<C64> = v.iter().map(|c| c / nrm.sqrt()).collect();
        let outside_fraction = outside_fraction(&lax.field.replace(normed.clone())?);
        let phase = C64::new((2.0 * PI).sqrt(), 0.0) / quad.inner(u, &normed).conj();
        out.push(BoundState {
            eigenvalue: mu.re,
            eigenvalue_imag: mu.im,
            vector: normed.iter().map(|c| c * phase).collect(),
            overlap,
            outside_fraction,
        });
    }
    Ok(out)
}

/// I_k = ⟨L^k u, u⟩ for k = 0..=kmax using the assembled matrix.
pub fn conserved_hierarchy(lax: &LaxMatrix, kmax: usize) -> Result<Vec<C64>> {
    if kmax > 8 {
        return Err(Error::InvalidParameter(format!("kmax must be <= 8, got {kmax}")));
    }
    let u = lax.field.coeffs();
    let mut v = u.to_vec();
    let mut out = vec![lax.quad.inner(&v, u)];
    for _ in 0..kmax {
        v = lax.apply(&v);
        out.push(lax.quad.inner(&v, u));
    }
    Ok(out)
}

/// max over interior snapshots of ‖(L(t+dt) − L(t−dt))/(2dt) − [B(t), L(t)]‖_max,
/// restricted to the leading `block`×`block` entries when given.
pub fn lax_equation_residual(snapshots: &[ChiralField], dt: f64, scheme: Scheme, block: Option<usize>) -> Result<f64> {
    if snapshots.len() < 3 {
        return Err(Error::Arity { need: 3, got: snapshots.len() });
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter("dt must be positive".into()));
    }
    let mats: Vec<CMat> = snapshots.iter().map(|u| assemble_lax(u, scheme).entries).collect();
    let mut worst: f64 = 0.0;
    for j in 1..snapshots.len() - 1 {
        let b = assemble_b(&snapshots[j], scheme);
        let l = &mats[j];
        let comm = &b * l - l * &b;
        let dl = linalg::scale(&(&mats[j + 1] - &mats[j - 1]), C64::new(0.5 / dt, 0.0));
        let r = dl - comm;
        let m = match block {
            Some(n) => linalg::max_abs_block(&r, n),
            None => linalg::max_abs(&r),
        };
        worst = worst.max(m);
    }
    Ok(worst)
}

/// Scattering-side coordinates Λ(u) = (φ, ρ, λ₂..λ_N, γ₁..γ_N); `lambda[0] = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralData {
    pub phi: f64,
    pub rho: f64,
    pub lambda: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl SpectralData {
    pub fn new(phi: f64, rho: f64, lambda: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        let d = Self { phi: phi.rem_euclid(2.0 * PI), rho, lambda, gamma };
        d.validate()?;
        Ok(d)
    }

    pub fn n(&self) -> usize {
        self.lambda.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.lambda.len();
        if n == 0 || self.gamma.len() != n {
            return Err(Error::InvalidParameter("lambda and gamma must be nonempty and of equal length".into()));
        }
        if !(self.rho.is_finite() && self.rho > 0.0) || !self.phi.is_finite() {
            return Err(Error::InvalidParameter(format!("need finite phi and rho > 0, got rho = {}", self.rho)));
        }
        if self.lambda[0] != 0.0 {
            return Err(Error::InvalidParameter("lambda_1 must be exactly 0".into()));
        }
        if self.lambda.iter().chain(&self.gamma).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite spectral data".into()));
        }
        for j in 0..n {
            for k in 0..j {
                if self.lambda[j] == self.lambda[k] {
                    return Err(Error::DegenerateSpectrum(format!("lambda_{} = lambda_{}", k + 1, j + 1)));
                }
            }
        }
        Ok(())
    }
}

/// By-products of the extraction, for diagnostics.
#[derive(Clone, Debug)]
pub struct Extraction {
    pub data: SpectralData,
    pub system: EigenSystem,
    /// Im⟨Gψ₁,ψ₁⟩ + ρ (zero in exact arithmetic).
    pub imag_consistency: f64,
    /// Complex ⟨Gψ_j,ψ_j⟩/‖ψ_j‖² in the order of `data.lambda`.
    pub generator_diagonal: Vec<C64>,
    pub mass: f64,
}

/// ⟨Gψ, ψ⟩/‖ψ‖² with Gψ = i dψ̂/dξ.
pub fn generator_rayleigh(quad: &Quadrature, psi: &[C64]) -> C64 {
    let d = derivative(psi, quad.grid().dxi(), GENERATOR_STENCIL_ORDER);
    let g: Vec<C64> = d.iter().map(|c| I * c).collect();
    quad.inner(&g, psi) / quad.norm_sqr(psi)
}

/// Spectral data of a multi-soliton potential.
///
/// Fails with `NotASoliton` when the mass is not 2πN for the number N of bound
/// states found, when `expected` disagrees with N, or when 0 is not an eigenvalue.
pub fn spectral_data_from_potential(u: &ChiralField, scheme: Scheme, expected: Option<usize>) -> Result<Extraction> {
    let lax = assemble_lax(u, scheme);
    let funcs = Functionals::new(lax.quad.clone());
    let mass = funcs.mass(&lax.field);
    let system = bound_states(&lax)?;
    let n = system.count();
    if let Some(e) = expected {
        if e != n {
            return Err(Error::NotASoliton(format!("expected {e} bound states, found {n}")));
        }
    }
    if n == 0 {
        return Err(Error::NotASoliton("no bound states".into()));
    }
    let quant = mass / (2.0 * PI * n as f64) - 1.0;
    if quant.abs() > 1e-4 {
        return Err(Error::NotASoliton(format!("mass/(2πN) − 1 = {quant:e} with N = {n}")));
    }
    let zero = (0..n)
        .min_by(|&a, &b| system.bound[a].eigenvalue.abs().total_cmp(&system.bound[b].eigenvalue.abs()))
        .ok_or_else(|| Error::NotASoliton("no bound states".into()))?;
    if system.bound[zero].eigenvalue.abs() > ZERO_SNAP {
        return Err(Error::NotASoliton(format!("smallest |lambda| = {:e}", system.bound[zero].eigenvalue.abs())));
    }
    let mut idx: Vec<usize> = (0..n).filter(|&j| j != zero).collect();
    idx.sort_by(|&a, &b| system.bound[a].eigenvalue.total_cmp(&system.bound[b].eigenvalue));
    idx.insert(0, zero);
    let c0 = lax.field.coeffs()[0];
    let rho = c0.norm_sqr() / (8.0 * PI * PI);
    let phi = (c0 / (2.0 * PI * I)).arg().rem_euclid(2.0 * PI);
    let mut lambda = Vec::with_capacity(n);
    let mut gamma = Vec::with_capacity(n);
    let mut diag = Vec::with_capacity(n);
    for (pos, &j) in idx.iter().enumerate() {
        let b = &system.bound[j];
        lambda.push(if pos == 0 { 0.0 } else { b.eigenvalue });
        let g = generator_rayleigh(&lax.quad, &b.vector);
        gamma.push(g.re);
        diag.push(g);
    }
    let imag_consistency = diag[0].im + rho;
    let data = SpectralData::new(phi, rho, lambda, gamma).map_err(|e| Error::NotASoliton(e.to_string()))?;
    Ok(Extraction { data, system, imag_consistency, generator_diagonal: diag, mass })
}

/// Both sides of the Toeplitz and Hankel operator inequalities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatorBounds {
    /// ‖T_ū f‖².
    pub toeplitz_lhs: f64,
    /// (1/2π)‖u‖²⟨Df, f⟩.
    pub toeplitz_rhs: f64,
    /// ‖H_u ∂_x f‖.
    pub hankel_lhs: f64,
    /// (1/√2π)‖u‖_{Ḣ^{3/2}}‖f‖.
    pub hankel_rhs: f64,
}

impl OperatorBounds {
    pub fn holds(&self, tol: f64) -> bool {
        self.toeplitz_lhs <= self.toeplitz_rhs + tol && self.hankel_lhs <= self.hankel_rhs + tol
    }
}

/// Evaluates ‖T_ū f‖² ≤ (1/2π)‖u‖²⟨Df,f⟩ and ‖H_u(∂_x f)‖ ≤ (1/√2π)‖u‖_{Ḣ^{3/2}}‖f‖,
/// with H_u g = Π₊(u ḡ).
pub fn operator_bound_checks(u: &ChiralField, f: &ChiralField, scheme: Scheme) -> Result<OperatorBounds> {
    let u = u.materialize();
    let f = f.materialize();
    if u.grid() != f.grid() {
        return Err(Error::GridMismatch);
    }
    let quad = Quadrature::shared(u.grid(), scheme);
    let xi = u.grid().frequencies();
    let tf = quad.corr(u.coeffs(), f.coeffs());
    let toeplitz_lhs = quad.norm_sqr(&tf);
    let mass_u = quad.norm_sqr(u.coeffs());
    let df = quad.inner_weighted(f.coeffs(), f.coeffs(), |k| xi[k]).re;
    let toeplitz_rhs = mass_u * df / (2.0 * PI);
    let xf: Vec<C64> = f.coeffs().iter().zip(&xi).map(|(c, x)| c * *x).collect();
    let h = quad.corr(&xf, u.coeffs());
    let hankel_lhs = quad.norm_sqr(&h).sqrt();
    let u32 = quad.inner_weighted(u.coeffs(), u.coeffs(), |k| xi[k].powi(3)).re;
    let hankel_rhs = (u32 / (2.0 * PI)).sqrt() * quad.norm_sqr(f.coeffs()).sqrt();
    Ok(OperatorBounds { toeplitz_lhs, toeplitz_rhs, hankel_lhs, hankel_rhs })
}
