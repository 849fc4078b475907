//! Half-line quadrature for the Toeplitz kernels of the chiral representation.
//!
//! Every ξ-integral over [0, ∞) is a weighted sum over the grid. The `Gregory`
//! scheme uses endpoint-corrected weights (high order for f̂ with a jump at 0⁺),
//! `Rectangle` uses unit weights, i.e. the plain discrete Toeplitz model.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::fft::FftPair;
use crate::grid::FrequencyGrid;
use crate::quadrature::{gregory_weights, GREGORY_ORDER};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    #[default]
    Gregory,
    Rectangle,
}

#[derive(Debug)]
pub struct Quadrature {
    grid: FrequencyGrid,
    scheme: Scheme,
    /// Half-line weights w_m (ratio to Δξ).
    weights: Vec<f64>,
    /// Endpoint corrections relative to unit weight, nodes 0..=q.
    left: Vec<f64>,
    /// Full rules on [0, ξ_k] for k < q.
    small: Vec<Vec<f64>>,
    fft: FftPair,
}

type CacheKey = (u64, usize, Scheme);

fn cache() -> &'static Mutex<HashMap<CacheKey, Arc<Quadrature>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<Quadrature>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl Quadrature {
    pub fn new(grid: FrequencyGrid, scheme: Scheme) -> Self {
        let k = grid.modes();
        let q = GREGORY_ORDER;
        let (weights, left, small) = match scheme {
            Scheme::Gregory => {
                let g = gregory_weights(4 * k, q);
                let left = g[..=q].iter().map(|w| w - 1.0).collect();
                let small = (0..q).map(|n| gregory_weights(n, q)).collect();
                (g[..k].to_vec(), left, small)
            }
            Scheme::Rectangle => (vec![1.0; k], vec![0.0; q + 1], (0..q).map(|n| vec![1.0; n + 1]).collect()),
        };
        Self { grid, scheme, weights, left, small, fft: FftPair::new(2 * k) }
    }

    /// Process-wide shared instance for a grid and scheme.
    pub fn shared(grid: &FrequencyGrid, scheme: Scheme) -> Arc<Self> {
        let key = (grid.length().to_bits(), grid.modes(), scheme);
        let mut map = cache().lock().unwrap_or_else(|e| e.into_inner());
        map.entry(key).or_insert_with(|| Arc::new(Self::new(*grid, scheme))).clone()
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn scale(&self) -> f64 {
        self.grid.dxi() / (2.0 * PI)
    }

    /// Weight of node i in the rule on [0, ξ_k].
    pub fn conv_weight(&self, k: usize, i: usize) -> f64 {
        let q = self.left.len() - 1;
        if k < q {
            return self.small[k][i];
        }
        let mut w = 1.0;
        if i <= q {
            w += self.left[i];
        }
        if k - i <= q {
            w += self.left[k - i];
        }
        w
    }

    /// ⟨f, g⟩ = (1/2π) ∫₀^∞ f̂ conj(ĝ) dξ.
    pub fn inner(&self, f: &[C64], g: &[C64]) -> C64 {
        let s: C64 = self.weights.iter().zip(f.iter().zip(g)).map(|(w, (a, b))| a * b.conj() * *w).sum();
        s * self.scale()
    }

    pub fn norm_sqr(&self, f: &[C64]) -> f64 {
        self.weights.iter().zip(f).map(|(w, a)| w * a.norm_sqr()).sum::<f64>() * self.scale()
    }

    /// Weighted ⟨f, g⟩ with an extra real symbol m(k) per node.
    pub fn inner_weighted(&self, f: &[C64], g: &[C64], m: impl Fn(usize) -> f64) -> C64 {
        let s: C64 = (0..f.len()).map(|k| f[k] * g[k].conj() * (self.weights[k] * m(k))).sum();
        s * self.scale()
    }

    /// Fourier coefficients of T_ū f = Π₊(ū f):
    /// out_s = (1/2π) ∫₀^∞ conj(û(ζ)) f̂(ξ_s + ζ) dζ.
    pub fn corr(&self, u: &[C64], f: &[C64]) -> Vec<C64> {
        let k = self.grid.modes();
        let rev: Vec<C64> = u.iter().rev().map(|c| c.conj()).collect();
        let mut a = self.fft.forward_padded(&rev);
        let b = self.fft.forward_padded(f);
        a.iter_mut().zip(&b).for_each(|(x, y)| *x *= y);
        self.fft.inverse_in_place(&mut a);
        let mut out = a[k - 1..2 * k - 1].to_vec();
        for (m, d) in self.left.iter().enumerate() {
            if *d == 0.0 {
                continue;
            }
            let um = u[m].conj() * *d;
            for s in 0..k - m {
                out[s] += um * f[s + m];
            }
        }
        let sc = self.scale();
        out.iter_mut().for_each(|v| *v *= sc);
        out
    }

    /// Fourier coefficients of T_a g = Π₊(a g) for chiral a, g:
    /// out_k = (1/2π) ∫₀^{ξ_k} â(ξ_k − ζ) ĝ(ζ) dζ.
    pub fn conv(&self, a: &[C64], g: &[C64]) -> Vec<C64> {
        let k = self.grid.modes();
        let q = self.left.len() - 1;
        let mut x = self.fft.forward_padded(a);
        let y = self.fft.forward_padded(g);
        x.iter_mut().zip(&y).for_each(|(p, r)| *p *= r);
        self.fft.inverse_in_place(&mut x);
        let mut out = x[..k].to_vec();
        if self.left.iter().any(|d| *d != 0.0) {
            for kk in q..k {
                let mut acc = ZERO;
                for (j, d) in self.left.iter().enumerate() {
                    acc += (a[kk - j] * g[j] + a[j] * g[kk - j]) * *d;
                }
                out[kk] += acc;
            }
        }
        for (kk, w) in self.small.iter().enumerate() {
            out[kk] = (0..=kk).map(|i| a[kk - i] * g[i] * w[i]).sum();
        }
        let sc = self.scale();
        out.iter_mut().for_each(|v| *v *= sc);
        out
    }
}
