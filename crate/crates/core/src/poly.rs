//! Dense complex polynomials, coefficients in increasing degree.

use faer::Mat;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg;

pub type Poly = Vec<C64>;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub fn from_roots(roots: &[C64]) -> Poly {
    let mut p = vec![ONE];
    for r in roots {
        let mut next = vec![ZERO; p.len() + 1];
        for (i, c) in p.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * r;
        }
        p = next;
    }
    p
}

pub fn eval(p: &[C64], x: C64) -> C64 {
    p.iter().rev().fold(ZERO, |acc, c| acc * x + c)
}

pub fn derivative(p: &[C64]) -> Poly {
    if p.len() <= 1 {
        return vec![ZERO];
    }
    p.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect()
}

pub fn mul(a: &[C64], b: &[C64]) -> Poly {
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn sub(a: &[C64], b: &[C64]) -> Poly {
    (0..a.len().max(b.len()))
        .map(|i| a.get(i).copied().unwrap_or(ZERO) - b.get(i).copied().unwrap_or(ZERO))
        .collect()
}

/// Coefficient-wise conjugate, i.e. the polynomial x ↦ conj(p(conj x)).
pub fn conj(p: &[C64]) -> Poly {
    p.iter().map(|c| c.conj()).collect()
}

pub fn scale(p: &[C64], s: C64) -> Poly {
    p.iter().map(|c| c * s).collect()
}

/// Drops leading coefficients below `tol` times the largest one.
pub fn trim(p: &[C64], tol: f64) -> Poly {
    let m = max_abs(p);
    let mut n = p.len();
    while n > 1 && p[n - 1].norm() <= tol * m {
        n -= 1;
    }
    p[..n].to_vec()
}

pub fn max_abs(p: &[C64]) -> f64 {
    p.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Roots as eigenvalues of the companion matrix.
pub fn roots(p: &[C64]) -> Result<Vec<C64>> {
    let p = trim(p, 0.0);
    let n = p.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = p[n];
    if lead.norm() == 0.0 {
        return Err(Error::NumericalBreakdown("zero polynomial".into()));
    }
    let c = Mat::<C64>::from_fn(n, n, |i, j| {
        if i == 0 {
            -p[n - 1 - j] / lead
        } else if i == j + 1 {
            ONE
        } else {
            ZERO
        }
    });
    linalg::eigvals(&c)
}
