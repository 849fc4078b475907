//! Thin FFT helpers shared by the spectral kernels.

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Forward/inverse plans of one fixed length; the inverse is normalized.
#[derive(Clone)]
pub struct FftPair {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for FftPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FftPair").field("len", &self.len).finish()
    }
}

impl FftPair {
    pub fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { len, forward: planner.plan_fft_forward(len), inverse: planner.plan_fft_inverse(len) }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Zero-padded forward transform.
    pub fn forward_padded(&self, data: &[C64]) -> Vec<C64> {
        let mut buf = vec![C64::new(0.0, 0.0); self.len];
        buf[..data.len()].copy_from_slice(data);
        self.forward.process(&mut buf);
        buf
    }

    pub fn forward_in_place(&self, buf: &mut [C64]) {
        self.forward.process(buf);
    }

    pub fn inverse_in_place(&self, buf: &mut [C64]) {
        self.inverse.process(buf);
        let s = 1.0 / self.len as f64;
        buf.iter_mut().for_each(|v| *v *= s);
    }
}
