//! Direct integration of the complexified Calogero–Moser pole/residue system
//!
//! ȧ_k = 2i Σ_{l≠k} (a_l − a_k)/(z_k − z_l)²,  a_k ż_k = −2i Σ_{l≠k} a_l/(z_k − z_l)
//!
//! with an adaptive Dormand–Prince 5(4) pair, PI step control and dense output.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::soliton::{collision_gap, constraint_residual, min_pole_distance};

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Absolute tolerance paired with the user relative tolerance.
pub const ABS_TOL: f64 = 1e-12;

/// Horizon, relative to max(1, |t|), within which a predicted collision is reported.
const COLLISION_HORIZON: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct PoleState {
    pub t: f64,
    pub poles: Vec<C64>,
    pub residues: Vec<C64>,
}

impl PoleState {
    pub fn new(t: f64, poles: Vec<C64>, residues: Vec<C64>) -> Result<Self> {
        if poles.len() != residues.len() || poles.is_empty() {
            return Err(Error::InvalidParameter("need equally many poles and residues".into()));
        }
        if let Some(z) = poles.iter().find(|z| !(z.im < 0.0)) {
            return Err(Error::PositivityViolation(z.to_string()));
        }
        Ok(Self { t, poles, residues })
    }

    pub fn n(&self) -> usize {
        self.poles.len()
    }

    pub fn constraint_residual(&self) -> f64 {
        constraint_residual(&self.poles, &self.residues)
    }

    fn pack(&self) -> Vec<C64> {
        self.residues.iter().chain(&self.poles).copied().collect()
    }

    fn unpack(t: f64, y: &[C64]) -> Self {
        let n = y.len() / 2;
        Self { t, residues: y[..n].to_vec(), poles: y[n..].to_vec() }
    }
}

/// Time derivatives (ȧ, ż).
pub fn rhs(state: &PoleState) -> Result<(Vec<C64>, Vec<C64>)> {
    let n = state.n();
    let (a, z) = (&state.residues, &state.poles);
    let mut da = vec![ZERO; n];
    let mut dz = vec![ZERO; n];
    for k in 0..n {
        if a[k].norm() < 1e-13 {
            return Err(Error::VanishingResidue { index: k + 1, modulus: a[k].norm() });
        }
        let mut sa = ZERO;
        let mut sz = ZERO;
        for l in 0..n {
            if l == k {
                continue;
            }
            let d = z[k] - z[l];
            sa += (a[l] - a[k]) / (d * d);
            sz += a[l] / d;
        }
        da[k] = 2.0 * I * sa;
        dz[k] = -2.0 * I * sz / a[k];
    }
    Ok((da, dz))
}

fn rhs_packed(t: f64, y: &[C64]) -> Result<Vec<C64>> {
    let (da, dz) = rhs(&PoleState::unpack(t, y))?;
    Ok(da.into_iter().chain(dz).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    Completed,
    /// Two poles closer than δ_gap.
    Collision,
    /// A pole within δ_gap of the real axis.
    BoundaryApproach,
}

impl Termination {
    pub fn name(&self) -> &'static str {
        match self {
            Termination::Completed => "completed",
            Termination::Collision => "collision",
            Termination::BoundaryApproach => "boundary-approach",
        }
    }
}

#[derive(Clone, Debug)]
pub struct PoleTrajectory {
    /// States at the requested output times reached before termination.
    pub states: Vec<PoleState>,
    pub termination: Termination,
    /// Time of the last accepted step.
    pub final_time: f64,
    /// Estimated collision time when a pair passes within δ_gap inside a step.
    pub collision_time: Option<f64>,
    pub final_state: PoleState,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// Largest constraint residual over all accepted steps.
    pub max_constraint_residual: f64,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn axpy(y: &[C64], h: f64, terms: &[(f64, &[C64])]) -> Vec<C64> {
    let mut out = y.to_vec();
    for (c, k) in terms {
        if *c == 0.0 {
            continue;
        }
        for (o, v) in out.iter_mut().zip(k.iter()) {
            *o += v * (h * c);
        }
    }
    out
}

/// Predicts a pair reaching separation `gap` just beyond the step [t0, t1].
///
/// Near a collision |z_j − z_k|² is close to linear in |t − t*| and the error control
/// shrinks steps geometrically, so endpoints never land within δ_gap. Each pair's
/// squared gap is modelled by the quadratic with the endpoint slopes; a collision is
/// reported when that model dips below gap² within the horizon, or when the slope
/// already changed sign inside the step with the tangent minimum below gap². The flag
/// marks the second case, where the step end lies past the collision.
fn approaching_collision(y0: &[C64], k0: &[C64], y1: &[C64], k1: &[C64], t0: f64, t1: f64, gap: f64) -> Option<(f64, bool)> {
    let n = y0.len() / 2;
    let pair = |y: &[C64], k: &[C64], j: usize, l: usize| {
        let d = y[n + j] - y[n + l];
        let dd = k[n + j] - k[n + l];
        (d.norm_sqr(), 2.0 * (d * dd.conj()).re)
    };
    let dir = (t1 - t0).signum();
    let horizon = COLLISION_HORIZON * t1.abs().max(1.0);
    let g2 = gap * gap;
    for j in 0..n {
        for l in 0..j {
            let (g0, s0) = pair(y0, k0, j, l);
            let (g1, s1) = pair(y1, k1, j, l);
            if s0 * dir < 0.0 && s1 * dir > 0.0 {
                let ts = ((g1 - s1 * t1) - (g0 - s0 * t0)) / (s0 - s1);
                if (ts - t0) * dir >= 0.0 && (t1 - ts) * dir >= 0.0 && g0 + s0 * (ts - t0) < g2 {
                    return Some((ts, true));
                }
                continue;
            }
            let sigma = s1 * dir;
            if sigma >= 0.0 {
                continue;
            }
            // g²(τ) ≈ g1 + στ + cτ² in forward time τ ≥ 0; smaller positive root of g²(τ) = gap².
            let c = (s1 - s0) / (2.0 * (t1 - t0));
            let excess = (g1 - g2).max(0.0);
            let disc = sigma * sigma - 4.0 * c * excess;
            if disc >= 0.0 {
                let tau = 2.0 * excess / (-sigma + disc.sqrt());
                if tau <= horizon {
                    return Some((t1 + dir * tau, false));
                }
            }
        }
    }
    None
}

/// Integrates from `state0.t` to `t_end` (either direction) with relative tolerance
/// `tol`, returning states at `output_times` (which must lie between the two).
pub fn integrate(state0: &PoleState, t_end: f64, output_times: &[f64], tol: f64) -> Result<PoleTrajectory> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    let t0 = state0.t;
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut outs: Vec<f64> = output_times.to_vec();
    if outs.iter().any(|t| (t - t0) * dir < -1e-14 || (t - t_end) * dir > 1e-14) {
        return Err(Error::InvalidParameter("output times outside the integration span".into()));
    }
    outs.sort_by(|a, b| (a * dir).total_cmp(&(b * dir)));
    let mut next_out = 0;
    let mut states = Vec::new();
    while next_out < outs.len() && (outs[next_out] - t0).abs() <= 1e-15 {
        states.push(PoleState { t: outs[next_out], ..state0.clone() });
        next_out += 1;
    }
    let mut t = t0;
    let mut y = state0.pack();
    let mut k1 = rhs_packed(t, &y)?;
    let span = (t_end - t0).abs();
    let mut h = dir * (1e-3 * span.max(1e-3)).min(0.1);
    let mut facold: f64 = 1e-4;
    let (mut accepted, mut rejected) = (0usize, 0usize);
    let mut max_cons = state0.constraint_residual();
    let mut termination = Termination::Completed;
    let mut collision_time = None;
    while (t_end - t) * dir > 0.0 {
        if (t + h - t_end) * dir > 0.0 {
            h = t_end - t;
        }
        if h.abs() < 1e-14 * t.abs().max(1.0) {
            return Err(Error::Stiffness(t));
        }
        let k2 = rhs_packed(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]))?;
        let k3 = rhs_packed(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = rhs_packed(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = rhs_packed(t + C5 * h, &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]))?;
        let k6 = rhs_packed(t + h, &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]))?;
        let y1 = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = rhs_packed(t + h, &y1)?;
        let mut err = 0.0;
        for i in 0..y.len() {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = ABS_TOL + tol * y[i].norm().max(y1[i].norm());
            err += (e.norm() / sc).powi(2);
        }
        let err = (err / y.len() as f64).sqrt();
        if !err.is_finite() {
            h *= 0.25;
            rejected += 1;
            continue;
        }
        let fac11 = err.powf(0.17);
        let fac = (fac11 / facold.powf(0.04) / 0.9).clamp(0.1, 5.0);
        if err <= 1.0 {
            let ydiff: Vec<C64> = y1.iter().zip(&y).map(|(a, b)| a - b).collect();
            let bspl: Vec<C64> = (0..y.len()).map(|i| h * k1[i] - ydiff[i]).collect();
            let dense = |theta: f64| -> Vec<C64> {
                (0..y.len())
                    .map(|i| {
                        let r5 = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                        let r4 = ydiff[i] - h * k7[i] - bspl[i];
                        y[i] + theta * (ydiff[i] + (1.0 - theta) * (bspl[i] + theta * (r4 + (1.0 - theta) * r5)))
                    })
                    .collect()
            };
            let t_new = t + h;
            let new_state = PoleState::unpack(t_new, &y1);
            let gap = collision_gap(&new_state.poles);
            let predicted = approaching_collision(&y, &k1, &y1, &k7, t, t_new, gap);
            if let Some((ts, true)) = predicted {
                collision_time = Some(ts);
                termination = Termination::Collision;
                break;
            }
            let collided = new_state.n() > 1 && min_pole_distance(&new_state.poles) < gap;
            if collided {
                collision_time = Some(t_new);
            } else if let Some((ts, false)) = predicted {
                collision_time = Some(ts);
            }
            let collided = collided || predicted.is_some();
            let boundary = new_state.poles.iter().any(|z| z.im > -gap);
            while next_out < outs.len() && (outs[next_out] - t_new) * dir <= 1e-14 && !collided && !boundary {
                let theta = (outs[next_out] - t) / h;
                states.push(PoleState::unpack(outs[next_out], &dense(theta.clamp(0.0, 1.0))));
                next_out += 1;
            }
            max_cons = max_cons.max(new_state.constraint_residual());
            accepted += 1;
            t = t_new;
            y = y1;
            k1 = k7;
            facold = err.max(1e-4);
            if collided || boundary {
                termination = if collided { Termination::Collision } else { Termination::BoundaryApproach };
                break;
            }
            h /= fac;
        } else {
            rejected += 1;
            h /= (fac11 / 0.9).min(5.0);
        }
    }
    Ok(PoleTrajectory {
        states,
        termination,
        final_time: t,
        collision_time,
        final_state: PoleState::unpack(t, &y),
        accepted_steps: accepted,
        rejected_steps: rejected,
        max_constraint_residual: max_cons,
    })
}

/// max_{k,t} |z̈_k − Σ_{l≠k} 8/(z_k − z_l)³| with z̈ from the five-point central
/// difference on uniformly spaced states.
pub fn acceleration_residual(states: &[PoleState]) -> Result<f64> {
    if states.len() < 5 {
        return Err(Error::Arity { need: 5, got: states.len() });
    }
    let dt = states[1].t - states[0].t;
    if states.windows(2).any(|w| ((w[1].t - w[0].t) - dt).abs() > 1e-9 * dt.abs().max(1e-300)) || dt == 0.0 {
        return Err(Error::InvalidParameter("states must be uniformly spaced".into()));
    }
    let n = states[0].n();
    let mut worst: f64 = 0.0;
    for j in 2..states.len() - 2 {
        for k in 0..n {
            let z = |i: usize| states[i].poles[k];
            let zdd = (-z(j + 2) + 16.0 * z(j + 1) - 30.0 * z(j) + 16.0 * z(j - 1) - z(j - 2)) / (12.0 * dt * dt);
            let zk = states[j].poles[k];
            let force: C64 =
                (0..n).filter(|&l| l != k).map(|l| 8.0 / (zk - states[j].poles[l]).powi(3)).sum();
            worst = worst.max((zdd - force).norm());
        }
    }
    Ok(worst)
}
