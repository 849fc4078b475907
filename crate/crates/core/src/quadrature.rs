//! Quadrature rules and finite-difference stencils on uniform grids.

use num_complex::Complex64 as C64;

/// Gregory endpoint coefficients g_1..g_8.
const GREGORY: [f64; 8] = [
    1.0 / 12.0,
    1.0 / 24.0,
    19.0 / 720.0,
    3.0 / 160.0,
    863.0 / 60480.0,
    275.0 / 24192.0,
    33953.0 / 3628800.0,
    8183.0 / 1036800.0,
];

/// Default number of Gregory corrections used by the half-line quadrature.
pub const GREGORY_ORDER: usize = 6;

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Weights w_0..w_n with `h * sum w_j f(jh)` approximating the integral over [0, nh].
///
/// Trapezoid rule plus `q` Gregory difference corrections at both ends (exact for
/// polynomials of degree `q + 1` when `n >= q`). `n = 0` gives the single weight 0.
pub fn gregory_weights(n: usize, q: usize) -> Vec<f64> {
    if n == 0 {
        return vec![0.0];
    }
    let q = q.min(n).min(GREGORY.len());
    let mut w = vec![1.0; n + 1];
    w[0] = 0.5;
    w[n] = 0.5;
    for r in 1..=q {
        let g = GREGORY[r - 1];
        for j in 0..=r {
            let c = binomial(r, j);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            w[j] -= g * sign * c;
            w[n - j] -= g * sign * c;
        }
    }
    w
}

/// Finite-difference weights (Fornberg) for the derivative of order `m` at 0
/// given the node offsets `z`.
pub fn fd_weights(z: &[f64], m: usize) -> Vec<f64> {
    let n = z.len();
    let mut c = vec![vec![0.0; m + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = z[0];
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = z[i];
        for j in 0..i {
            let c3 = z[i] - z[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[m]).collect()
}

/// First derivative of uniformly sampled data with stencils of `order + 1` points,
/// centered in the interior and one-sided near both ends.
pub fn derivative(values: &[C64], h: f64, order: usize) -> Vec<C64> {
    let n = values.len();
    let m = (order + 1).min(n);
    let mut cache: Vec<Option<Vec<f64>>> = vec![None; m];
    let mut out = vec![C64::new(0.0, 0.0); n];
    for (i, o) in out.iter_mut().enumerate() {
        let start = i.saturating_sub(order / 2).min(n - m);
        let rel = i - start;
        let w = cache[rel].get_or_insert_with(|| {
            let z: Vec<f64> = (0..m).map(|j| j as f64 - rel as f64).collect();
            fd_weights(&z, 1)
        });
        let mut acc = C64::new(0.0, 0.0);
        for (j, wj) in w.iter().enumerate() {
            acc += values[start + j] * *wj;
        }
        *o = acc / h;
    }
    out
}

const GK_X: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const GK_WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * GK_WK[7];
    let mut g = fc * GK_WG[3];
    for i in 0..7 {
        let d = r * GK_X[i];
        let s = f(c - d) + f(c + d);
        k += s * GK_WK[i];
        if i % 2 == 1 {
            g += s * GK_WG[i / 2];
        }
    }
    (k * r, ((k - g) * r).norm())
}

/// Adaptive Gauss-Kronrod (7/15) integration of a complex integrand over [a, b].
pub fn integrate_adaptive<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> C64 {
    let mut stack = vec![(a, b, 0usize)];
    let (whole, _) = gk15(&f, a, b);
    let scale = whole.norm().max(abs_tol);
    let mut total = C64::new(0.0, 0.0);
    while let Some((lo, hi, depth)) = stack.pop() {
        let (val, err) = gk15(&f, lo, hi);
        let budget = (rel_tol * scale).max(abs_tol) * (hi - lo) / (b - a);
        if err <= budget || depth >= 40 {
            total += val;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    total
}

/// Least-squares polynomial fit; returns coefficients in increasing degree.
pub fn polyfit(t: &[f64], y: &[f64], degree: usize) -> Vec<f64> {
    use faer::prelude::SpSolverLstsq;
    let n = t.len();
    let a = faer::Mat::<f64>::from_fn(n, degree + 1, |i, j| t[i].powi(j as i32));
    let b = faer::Mat::<f64>::from_fn(n, 1, |i, _| y[i]);
    let x = a.qr().solve_lstsq(&b);
    (0..=degree).map(|j| x.read(j, 0)).collect()
}

/// Evaluates a polynomial given in increasing degree.
pub fn polyval(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}
