//! Time integration of i∂_t u + ∂_xx u + 2D₊(|u|²)u = 0 on the chiral grid.
//!
//! The default method is integrating-factor RK4: the linear factor e^{−iξ²t} is
//! applied exactly and RK4 acts on the nonlinearity 2iD₊(|u|²)u, which is
//! evaluated with the FFT-based Toeplitz kernels of [`Quadrature`].

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fft::FftPair;
use crate::field::{ChiralField, RealLineField};
use crate::hardy::Functionals;
use crate::lax::{spectral_data_from_potential, SpectralData};
use crate::quadrature::{polyfit, polyval};
use crate::soliton::soliton_field;
use crate::spectral::{Quadrature, Scheme};

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Number of hierarchy functionals I_0..I_4 recorded per snapshot.
pub const HIERARCHY_LEN: usize = 5;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[default]
    Ifrk4,
    Rk4,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionConfig {
    pub dt: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
    #[serde(default)]
    pub method: Method,
    /// Snapshot every `stride` steps.
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default)]
    pub quadrature: Scheme,
}

fn default_stride() -> usize {
    1
}

impl EvolutionConfig {
    pub fn new(dt: f64, t_final: f64) -> Self {
        Self { dt, t_final, method: Method::Ifrk4, stride: 1, quadrature: Scheme::Gregory }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn with_quadrature(mut self, scheme: Scheme) -> Self {
        self.quadrature = scheme;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidParameter(format!("T must be positive, got {}", self.t_final)));
        }
        if self.stride == 0 {
            return Err(Error::InvalidParameter("stride must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of steps, with dt adjusted down so they tile [0, T].
    pub fn steps(&self) -> (usize, f64) {
        let n = (self.t_final / self.dt - 1e-9).ceil().max(1.0) as usize;
        (n, self.t_final / n as f64)
    }
}

/// Per-snapshot diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    pub t: f64,
    pub mass: f64,
    pub momentum: f64,
    pub energy: f64,
    /// Real parts of ⟨L_u^k u, u⟩, k = 0..4.
    pub hierarchy: [f64; HIERARCHY_LEN],
    pub u_hat_0: C64,
    pub h_half: f64,
    pub h_one: f64,
}

impl Diagnostics {
    pub fn of(funcs: &Functionals, t: f64, u: &ChiralField) -> Self {
        let h = funcs.hierarchy(u, HIERARCHY_LEN - 1);
        let mut hierarchy = [0.0; HIERARCHY_LEN];
        for (d, v) in hierarchy.iter_mut().zip(&h) {
            *d = v.re;
        }
        Self {
            t,
            mass: funcs.mass(u),
            momentum: funcs.momentum(u),
            energy: funcs.energy(u),
            hierarchy,
            u_hat_0: u.zero_mode(),
            h_half: funcs.sobolev_norm(u, 0.5),
            h_one: funcs.sobolev_norm(u, 1.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum EvolutionEvent {
    /// A coefficient became non-finite; `last_valid_time` is the last stored-good time.
    Blowup { last_valid_time: f64 },
}

impl EvolutionEvent {
    pub fn name(&self) -> &'static str {
        match self {
            EvolutionEvent::Blowup { .. } => "blowup",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub snapshots: Vec<ChiralField>,
    pub diagnostics: Vec<Diagnostics>,
    pub event: Option<EvolutionEvent>,
    pub warnings: Vec<String>,
    /// Largest |u(±L/2)| / max|u| seen at the snapshots.
    pub max_edge_ratio: f64,
}

impl Trajectory {
    pub fn last(&self) -> &ChiralField {
        self.snapshots.last().expect("trajectories hold at least the initial state")
    }
}

/// Exponential time stepper for a diagonal linear part plus a nonlinearity.
fn ifrk4_step(u: &[C64], dt: f64, lin: &[C64], n: &dyn Fn(&[C64]) -> Vec<C64>) -> Vec<C64> {
    let e2: Vec<C64> = lin.iter().map(|l| (l * (0.5 * dt)).exp()).collect();
    let len = u.len();
    let a = n(u);
    let ua: Vec<C64> = (0..len).map(|k| e2[k] * (u[k] + a[k] * (0.5 * dt))).collect();
    let b = n(&ua);
    let ub: Vec<C64> = (0..len).map(|k| e2[k] * u[k] + b[k] * (0.5 * dt)).collect();
    let c = n(&ub);
    let uc: Vec<C64> = (0..len).map(|k| e2[k] * e2[k] * u[k] + e2[k] * c[k] * dt).collect();
    let d = n(&uc);
    (0..len)
        .map(|k| {
            let e = e2[k] * e2[k];
            e * u[k] + (e * a[k] + 2.0 * e2[k] * (b[k] + c[k]) + d[k]) * (dt / 6.0)
        })
        .collect()
}

fn rk4_step(u: &[C64], dt: f64, f: &dyn Fn(&[C64]) -> Vec<C64>) -> Vec<C64> {
    let len = u.len();
    let add = |x: &[C64], k: &[C64], h: f64| -> Vec<C64> { (0..len).map(|i| x[i] + k[i] * h).collect() };
    let k1 = f(u);
    let k2 = f(&add(u, &k1, 0.5 * dt));
    let k3 = f(&add(u, &k2, 0.5 * dt));
    let k4 = f(&add(u, &k3, dt));
    (0..len).map(|i| u[i] + (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]) * (dt / 6.0)).collect()
}

/// Stepper bound to one grid, shift and quadrature.
#[derive(Clone, Debug)]
pub struct Stepper {
    quad: Arc<Quadrature>,
    shift: usize,
    method: Method,
    /// −i(ξ_k + η)².
    linear: Vec<C64>,
    xi: Vec<f64>,
}

impl Stepper {
    pub fn new(u: &ChiralField, scheme: Scheme, method: Method) -> Self {
        let quad = Quadrature::shared(u.grid(), scheme);
        let linear = u.frequencies().iter().map(|x| -I * x * x).collect();
        Self { quad, shift: u.shift(), method, linear, xi: u.grid().frequencies() }
    }

    /// 2iD₊(|u|²)u; invariant under index shifts so boosted fields need no change.
    pub fn nonlinear(&self, c: &[C64]) -> Vec<C64> {
        let rho = self.quad.corr(c, c);
        let d: Vec<C64> = rho.iter().zip(&self.xi).map(|(r, x)| r * x).collect();
        self.quad.conv(c, &d).into_iter().map(|v| 2.0 * I * v).collect()
    }

    pub fn rhs(&self, c: &[C64]) -> Vec<C64> {
        let n = self.nonlinear(c);
        c.iter().zip(&self.linear).zip(n).map(|((c, l), n)| l * c + n).collect()
    }

    pub fn step(&self, c: &[C64], dt: f64) -> Vec<C64> {
        match self.method {
            Method::Ifrk4 => ifrk4_step(c, dt, &self.linear, &|v| self.nonlinear(v)),
            Method::Rk4 => rk4_step(c, dt, &|v| self.rhs(v)),
        }
    }

    /// Advances by `duration` in equal steps no longer than `dt`.
    pub fn advance(&self, u: &ChiralField, duration: f64, dt: f64) -> Result<ChiralField> {
        if u.shift() != self.shift || u.grid() != self.quad.grid() {
            return Err(Error::GridMismatch);
        }
        if duration == 0.0 {
            return Ok(u.clone());
        }
        let n = (duration.abs() / dt - 1e-9).ceil().max(1.0) as usize;
        let h = duration / n as f64;
        let mut c = u.coeffs().to_vec();
        for _ in 0..n {
            c = self.step(&c, h);
        }
        u.replace(c)
    }
}

/// ∂_t u = i∂_xx u + 2iD₊(|u|²)u.
pub fn pde_rhs(u: &ChiralField, scheme: Scheme) -> ChiralField {
    let s = Stepper::new(u, scheme, Method::Ifrk4);
    let out = s.rhs(u.coeffs());
    u.replace(out).unwrap_or_else(|_| ChiralField::zero(*u.grid()))
}

fn edge_ratio(u: &ChiralField) -> f64 {
    let s = u.samples();
    let max = s.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    s[0].norm() / max
}

fn finite(c: &[C64]) -> bool {
    c.iter().all(|v| v.re.is_finite() && v.im.is_finite() && v.norm() < 1e150)
}

pub fn evolve(u0: &ChiralField, config: &EvolutionConfig) -> Result<Trajectory> {
    config.validate()?;
    let (steps, dt) = config.steps();
    let stepper = Stepper::new(u0, config.quadrature, config.method);
    let funcs = Functionals::new(stepper.quad.clone());
    let mut warnings = Vec::new();
    let sup = u0.samples().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let xi_max = u0.frequencies().last().copied().unwrap_or(0.0);
    if sup.powi(4) * dt > 0.1 {
        warnings.push(format!("|u|^4 dt = {:.3e} exceeds 0.1", sup.powi(4) * dt));
    }
    if sup * sup * dt * xi_max > 0.5 {
        warnings.push(format!("|u|_inf^2 dt xi_max = {:.3e} exceeds 0.5", sup * sup * dt * xi_max));
    }
    let edge0 = edge_ratio(u0);
    if edge0 > 1e-8 {
        warnings.push(format!("initial datum reaches the box edge: |u(L/2)|/max|u| = {edge0:.3e}"));
    }
    let mut times = vec![0.0];
    let mut snapshots = vec![u0.clone()];
    let mut diagnostics = vec![Diagnostics::of(&funcs, 0.0, u0)];
    let mut max_edge_ratio = edge0;
    let mut event = None;
    let mut c = u0.coeffs().to_vec();
    for n in 1..=steps {
        let next = stepper.step(&c, dt);
        if !finite(&next) {
            event = Some(EvolutionEvent::Blowup { last_valid_time: (n - 1) as f64 * dt });
            break;
        }
        c = next;
        if n % config.stride == 0 || n == steps {
            let t = n as f64 * dt;
            let u = u0.replace(c.clone())?;
            max_edge_ratio = max_edge_ratio.max(edge_ratio(&u));
            diagnostics.push(Diagnostics::of(&funcs, t, &u));
            times.push(t);
            snapshots.push(u);
        }
    }
    if max_edge_ratio > 1e-8 && edge0 <= 1e-8 {
        warnings.push(format!("solution reached the box edge: ratio {max_edge_ratio:.3e}"));
    }
    Ok(Trajectory { times, snapshots, diagnostics, event, warnings, max_edge_ratio })
}

/// Maximum relative drift of each monitored quantity along a trajectory.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConservationReport {
    pub mass: f64,
    pub momentum: f64,
    pub energy: f64,
    pub hierarchy: [f64; HIERARCHY_LEN],
    pub u_hat_0: f64,
    pub min_energy: f64,
    pub h_one_growth: f64,
}

impl ConservationReport {
    pub fn entries(&self) -> Vec<(String, f64)> {
        let mut v = vec![
            ("mass".to_string(), self.mass),
            ("momentum".to_string(), self.momentum),
            ("energy".to_string(), self.energy),
        ];
        for (k, d) in self.hierarchy.iter().enumerate() {
            v.push((format!("I{k}"), *d));
        }
        v.push(("u_hat_0".to_string(), self.u_hat_0));
        v
    }
}

/// Drifts are |q(t) − q(0)| / |q(0)|. A quantity of degree k in ∂ₓ has natural
/// size S_k = M^{1−k/2}‖u‖_{H¹}^k (a Cauchy–Schwarz bound for ⟨|D|^k u, u⟩); when
/// |q(0)| < 1e−2·S_k the quantity counts as vanishing and S_k is the denominator.
/// The zero mode is measured against 1e−10·(1 + M(0)).
pub fn conservation_report(traj: &Trajectory) -> Result<ConservationReport> {
    let d = &traj.diagnostics;
    if d.len() < 2 {
        return Err(Error::Arity { need: 2, got: d.len() });
    }
    let m0 = d[0].mass.abs();
    let h0 = d[0].h_one;
    let floor = 1e-10 * (1.0 + m0);
    let drift = |degree: i32, f: &dyn Fn(&Diagnostics) -> f64| -> f64 {
        let q0 = f(&d[0]);
        let size = m0.powf(1.0 - 0.5 * f64::from(degree)) * h0.powi(degree);
        let den = if q0.abs() >= 1e-2 * size { q0.abs() } else { size.max(floor) };
        d.iter().map(|x| (f(x) - q0).abs() / den).fold(0.0, f64::max)
    };
    let mut hierarchy = [0.0; HIERARCHY_LEN];
    for (k, h) in hierarchy.iter_mut().enumerate() {
        *h = drift(k as i32, &|x| x.hierarchy[k]);
    }
    let c0 = d[0].u_hat_0;
    let den = c0.norm().max(floor);
    Ok(ConservationReport {
        mass: drift(0, &|x| x.mass),
        momentum: drift(1, &|x| x.momentum),
        energy: drift(2, &|x| x.energy),
        hierarchy,
        u_hat_0: d.iter().map(|x| (x.u_hat_0 - c0).norm() / den).fold(0.0, f64::max),
        min_energy: d.iter().map(|x| x.energy).fold(f64::INFINITY, f64::min),
        h_one_growth: d.iter().map(|x| x.h_one).fold(0.0, f64::max) / d[0].h_one.max(1e-300),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VirialReport {
    pub energy: f64,
    pub times: Vec<f64>,
    pub variance: Vec<f64>,
    /// Least-squares coefficients of V(t) in increasing degree.
    pub fit: Vec<f64>,
    /// |c₂ − 8E₀| / 8E₀ (absolute when E₀ = 0).
    pub leading_error: f64,
    /// max_t |V(t) − fit(t)|.
    pub fit_residual: f64,
}

/// Checks V(t) = ∫x²|u(t)|² against a quadratic with leading coefficient 8E(u₀).
/// `samples` is the number of sample intervals over [0, T].
pub fn virial_check(u0: &ChiralField, config: &EvolutionConfig, samples: usize) -> Result<VirialReport> {
    config.validate()?;
    if samples < 3 {
        return Err(Error::Arity { need: 3, got: samples });
    }
    let scale = u0.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    if u0.shift() == 0 && u0.zero_mode().norm() > 1e-8 * scale {
        return Err(Error::InvalidParameter(format!(
            "infinite variance: u_hat(0+) = {:.3e} is nonzero",
            u0.zero_mode().norm()
        )));
    }
    let stepper = Stepper::new(u0, config.quadrature, config.method);
    let funcs = Functionals::new(stepper.quad.clone());
    let energy = funcs.energy(u0);
    let interval = config.t_final / samples as f64;
    let mut u = u0.clone();
    let mut times = vec![0.0];
    let mut variance = vec![funcs.variance_spectral(u0)];
    for j in 1..=samples {
        u = stepper.advance(&u, interval, config.dt)?;
        if !finite(u.coeffs()) {
            return Err(Error::NumericalBreakdown(format!("non-finite field at t = {}", j as f64 * interval)));
        }
        times.push(j as f64 * interval);
        variance.push(funcs.variance_spectral(&u));
    }
    let fit = polyfit(&times, &variance, 2);
    let fit_residual = times.iter().zip(&variance).map(|(t, v)| (v - polyval(&fit, *t)).abs()).fold(0.0, f64::max);
    let target = 8.0 * energy;
    let leading_error = if target == 0.0 { fit[2].abs() } else { (fit[2] - target).abs() / target.abs() };
    Ok(VirialReport { energy, times, variance, fit, leading_error, fit_residual })
}

/// Pseudospectral solver for i∂_t v + ∂_xx v + |D|(|v|²)v − ¼|v|⁴v = 0 on the
/// 2K-point torus, products evaluated on a 3× refined grid.
#[derive(Debug)]
pub struct GaugedSolver {
    grid: crate::grid::FrequencyGrid,
    linear: Vec<C64>,
    fine: FftPair,
    fine_xi: Vec<f64>,
}

const GAUGE_PAD: usize = 3;

impl GaugedSolver {
    pub fn new(grid: crate::grid::FrequencyGrid) -> Self {
        let n = grid.points_len();
        let linear = (0..n)
            .map(|j| {
                let xi = grid.dxi() * (j as f64 - grid.modes() as f64);
                -I * xi * xi
            })
            .collect();
        let m = GAUGE_PAD * n;
        let fine_xi = (0..m)
            .map(|j| {
                let k = if j < m / 2 { j as f64 } else { j as f64 - m as f64 };
                k * grid.dxi()
            })
            .collect();
        Self { grid, linear, fine: FftPair::new(m), fine_xi }
    }

    /// i(|D|(|v|²)v − ¼|v|⁴v) in the two-sided coefficient layout.
    pub fn nonlinear(&self, c: &[C64]) -> Vec<C64> {
        let n = c.len();
        let k = self.grid.modes() as i64;
        let m = self.fine.len();
        // Coefficient index j carries mode j − K; the fine grid stores mode q at q mod m.
        let mut v = vec![ZERO; m];
        for (j, cj) in c.iter().enumerate() {
            let q = j as i64 - k;
            v[q.rem_euclid(m as i64) as usize] = *cj;
        }
        self.fine.inverse_in_place(&mut v);
        // Inverse FFT divides by m; sample values are (m/L)·ifft because f = (1/L)Σc e^{iξx}.
        // The x-origin offset only contributes a phase per mode which the forward pass undoes.
        let amp = m as f64 / self.grid.length();
        for x in v.iter_mut() {
            *x *= amp;
        }
        let mut r: Vec<C64> = v.iter().map(|x| C64::new(x.norm_sqr(), 0.0)).collect();
        self.fine.forward_in_place(&mut r);
        for (rj, xi) in r.iter_mut().zip(&self.fine_xi) {
            *rj *= xi.abs();
        }
        self.fine.inverse_in_place(&mut r);
        let mut w: Vec<C64> = v.iter().zip(&r).map(|(x, d)| I * (d.re * x - 0.25 * x.norm_sqr().powi(2) * x)).collect();
        self.fine.forward_in_place(&mut w);
        let back = self.grid.length() / m as f64;
        (0..n)
            .map(|j| {
                let q = j as i64 - k;
                w[q.rem_euclid(m as i64) as usize] * back
            })
            .collect()
    }

    pub fn advance(&self, v: &RealLineField, duration: f64, dt: f64) -> Result<RealLineField> {
        if duration == 0.0 {
            return Ok(v.clone());
        }
        let n = (duration.abs() / dt - 1e-9).ceil().max(1.0) as usize;
        let h = duration / n as f64;
        let mut c = v.coeffs().to_vec();
        for _ in 0..n {
            c = ifrk4_step(&c, h, &self.linear, &|x| self.nonlinear(x));
        }
        RealLineField::new(self.grid, c)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GaugeReport {
    pub times: Vec<f64>,
    /// ‖Φ(u(t)) − v(t)‖_{L²} at each sample time.
    pub differences: Vec<f64>,
    pub sup_difference: f64,
    /// max_t |M(v(t)) − M(v(0))|.
    pub gauged_mass_drift: f64,
}

/// Evolves u by CM-DNLS and v = Φ(u₀) by the gauged equation and compares Φ(u(t)) with v(t).
///
/// The gauged solver is a plain torus discretization, so the chiral side always
/// uses [`Scheme::Rectangle`] (its exact torus counterpart); `config.quadrature` is ignored.
pub fn gauge_crosscheck(u0: &ChiralField, config: &EvolutionConfig, samples: usize) -> Result<GaugeReport> {
    config.validate()?;
    if samples == 0 {
        return Err(Error::Arity { need: 1, got: 0 });
    }
    let stepper = Stepper::new(u0, Scheme::Rectangle, config.method);
    let gauged = GaugedSolver::new(*u0.grid());
    let interval = config.t_final / samples as f64;
    let mut u = u0.clone();
    let mut v = u0.embed().gauge_transform();
    let m0 = v.mass();
    let mut times = vec![0.0];
    let mut differences = vec![0.0];
    let mut drift: f64 = 0.0;
    for j in 1..=samples {
        u = stepper.advance(&u, interval, config.dt)?;
        v = gauged.advance(&v, interval, config.dt)?;
        let phi = u.embed().gauge_transform();
        let diff: Vec<C64> = phi.coeffs().iter().zip(v.coeffs()).map(|(a, b)| a - b).collect();
        let d = RealLineField::new(*u0.grid(), diff)?.mass().sqrt();
        times.push(j as f64 * interval);
        differences.push(d);
        drift = drift.max((v.mass() - m0).abs());
    }
    let sup_difference = differences.iter().copied().fold(0.0, f64::max);
    Ok(GaugeReport { times, differences, sup_difference, gauged_mass_drift: drift })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralEvolutionReport {
    pub initial: SpectralData,
    pub evolved: SpectralData,
    pub t_final: f64,
    /// |φ(T) − φ(0)| modulo 2π.
    pub phi_drift: f64,
    pub rho_drift: f64,
    pub lambda_drift: f64,
    /// max_j |γ_j(T) − γ_j(0) − 2λ_j T|.
    pub gamma_law_error: f64,
    /// ‖u(T) − u_exact(T)‖_{L²} / ‖u_exact(T)‖, comparing Fourier coefficients.
    pub field_error: f64,
}

/// Evolves a soliton potential by the PDE to time T and re-extracts its spectral data.
pub fn spectral_evolution_check(u0: &ChiralField, config: &EvolutionConfig) -> Result<SpectralEvolutionReport> {
    config.validate()?;
    let start = spectral_data_from_potential(u0, config.quadrature, None)?;
    let n = start.data.n();
    let stepper = Stepper::new(u0, config.quadrature, config.method);
    let u = stepper.advance(u0, config.t_final, config.dt)?;
    let end = spectral_data_from_potential(&u, config.quadrature, Some(n))?;
    let (a, b) = (&start.data, &end.data);
    let t = config.t_final;
    let dphi = (b.phi - a.phi).rem_euclid(crate::field::TWO_PI);
    let phi_drift = dphi.min(crate::field::TWO_PI - dphi);
    let lambda_drift = a.lambda.iter().zip(&b.lambda).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let gamma_law_error = (0..n)
        .map(|j| (b.gamma[j] - a.gamma[j] - 2.0 * a.lambda[j] * t).abs())
        .fold(0.0, f64::max);
    let exact = soliton_field(a, t, *u0.grid())?;
    let funcs = Functionals::new(stepper.quad.clone());
    let field_error = funcs.mass(&u.sub(&exact)?).sqrt() / funcs.mass(&exact).sqrt();
    Ok(SpectralEvolutionReport {
        initial: a.clone(),
        evolved: b.clone(),
        t_final: t,
        phi_drift,
        rho_drift: (b.rho - a.rho).abs() / a.rho,
        lambda_drift,
        gamma_law_error,
        field_error,
    })
}

/// Unwrapped modulus centroid at the trajectory snapshots.
pub fn centroid_track(traj: &Trajectory, scheme: Scheme) -> Vec<(f64, f64)> {
    let Some(first) = traj.snapshots.first() else {
        return Vec::new();
    };
    let funcs = Functionals::new(Quadrature::shared(first.grid(), scheme));
    let period = first.grid().length();
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(traj.snapshots.len());
    for (t, u) in traj.times.iter().zip(&traj.snapshots) {
        let mut c = funcs.centroid(u);
        if let Some(&(_, prev)) = out.last() {
            c += ((prev - c) / period).round() * period;
        }
        out.push((*t, c));
    }
    out
}

/// Least-squares slope of the centroid track.
pub fn centroid_velocity(track: &[(f64, f64)]) -> Result<f64> {
    if track.len() < 2 {
        return Err(Error::Arity { need: 2, got: track.len() });
    }
    let t: Vec<f64> = track.iter().map(|p| p.0).collect();
    let c: Vec<f64> = track.iter().map(|p| p.1).collect();
    Ok(polyfit(&t, &c, 1)[1])
}
