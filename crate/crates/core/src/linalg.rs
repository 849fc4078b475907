//! Dense complex linear algebra on top of `faer`.

use faer::prelude::SpSolver;
use faer::Mat;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type CMat = Mat<C64>;

fn all_finite(v: &[C64]) -> bool {
    v.iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

/// Eigenvalues and right eigenvectors (columns) of a general complex matrix.
pub fn eig(a: &CMat) -> Result<(Vec<C64>, CMat)> {
    let e = a.eigendecomposition::<C64>();
    let s = e.s().column_vector();
    let vals: Vec<C64> = (0..s.nrows()).map(|i| s.read(i)).collect();
    let vecs = e.u().to_owned();
    if !all_finite(&vals) {
        return Err(Error::NumericalBreakdown("eigensolver returned non-finite values".into()));
    }
    Ok((vals, vecs))
}

/// Eigenvalues of a general complex matrix.
pub fn eigvals(a: &CMat) -> Result<Vec<C64>> {
    let vals = a.eigenvalues::<C64>();
    if !all_finite(&vals) {
        return Err(Error::NumericalBreakdown("eigensolver returned non-finite values".into()));
    }
    Ok(vals)
}

/// Partial-pivoting LU factorization reusable across right-hand sides.
pub struct Lu(faer::solvers::PartialPivLu<C64>);

impl Lu {
    pub fn new(a: &CMat) -> Self {
        Self(a.partial_piv_lu())
    }

    /// Solves a x = b; fails on a non-finite result.
    pub fn solve(&self, b: &[C64]) -> Result<Vec<C64>> {
        let rhs = Mat::<C64>::from_fn(b.len(), 1, |i, _| b[i]);
        let x = self.0.solve(&rhs);
        let out: Vec<C64> = (0..b.len()).map(|i| x.read(i, 0)).collect();
        if !all_finite(&out) {
            return Err(Error::NumericalBreakdown("singular linear system".into()));
        }
        Ok(out)
    }
}

/// Solves a x = b by partial-pivoting LU; fails on a non-finite result.
pub fn solve(a: &CMat, b: &[C64]) -> Result<Vec<C64>> {
    Lu::new(a).solve(b)
}

pub fn matvec(a: &CMat, x: &[C64]) -> Vec<C64> {
    let v = Mat::<C64>::from_fn(x.len(), 1, |i, _| x[i]);
    let y = a * &v;
    (0..a.nrows()).map(|i| y.read(i, 0)).collect()
}

pub fn column(a: &CMat, j: usize) -> Vec<C64> {
    (0..a.nrows()).map(|i| a.read(i, j)).collect()
}

/// max |a_ij|.
pub fn max_abs(a: &CMat) -> f64 {
    let mut m: f64 = 0.0;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a.read(i, j).norm());
        }
    }
    m
}

/// max |a_ij| over the leading `n`×`n` block.
pub fn max_abs_block(a: &CMat, n: usize) -> f64 {
    let n = n.min(a.nrows()).min(a.ncols());
    let mut m: f64 = 0.0;
    for j in 0..n {
        for i in 0..n {
            m = m.max(a.read(i, j).norm());
        }
    }
    m
}

pub fn adjoint(a: &CMat) -> CMat {
    Mat::from_fn(a.ncols(), a.nrows(), |i, j| a.read(j, i).conj())
}

/// max |a − a*|.
pub fn hermitian_defect(a: &CMat) -> f64 {
    max_abs(&(a - adjoint(a)))
}

/// max |a + a*|.
pub fn skew_defect(a: &CMat) -> f64 {
    max_abs(&(a + adjoint(a)))
}

pub fn identity(n: usize) -> CMat {
    Mat::from_fn(n, n, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

pub fn diag(d: &[C64]) -> CMat {
    Mat::from_fn(d.len(), d.len(), |i, j| if i == j { d[i] } else { C64::new(0.0, 0.0) })
}

pub fn scale(a: &CMat, s: C64) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a.read(i, j) * s)
}
