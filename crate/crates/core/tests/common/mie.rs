//! Textbook Mie coefficients for a homogeneous non-magnetic sphere in vacuum.
//!
//! Kept independent of the library: `ψ_n(x)` from its power series,
//! `y_n(x)` by upward recurrence from the closed forms, and the logarithmic
//! derivative `D_n(mx)` by downward recurrence.

#![allow(dead_code)]

use num_complex::Complex64;

/// `x j_n(x)` for real `x` from the power series.
fn psi(n: usize, x: f64) -> f64 {
    let mut lead = x;
    for i in 0..n {
        lead *= x / (2 * i + 3) as f64;
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        term *= -x * x / 2.0 / (k as f64 * (2 * n + 2 * k + 1) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    lead * sum
}

/// `y_0 .. y_nmax` at real `x` by upward recurrence.
fn bessel_y(nmax: usize, x: f64) -> Vec<f64> {
    let mut y = vec![-x.cos() / x, -x.cos() / (x * x) - x.sin() / x];
    for n in 1..nmax {
        let next = (2 * n + 1) as f64 / x * y[n] - y[n - 1];
        y.push(next);
    }
    y.truncate(nmax + 1);
    y
}

/// `D_n(z) = ψ_n'(z)/ψ_n(z)` for `n = 0 .. nmax` by downward recurrence.
fn log_derivative(nmax: usize, z: Complex64) -> Vec<Complex64> {
    let start = nmax.max(z.norm().ceil() as usize) + 20;
    let mut d = vec![Complex64::new(0.0, 0.0); start + 1];
    for n in (1..=start).rev() {
        let nz = n as f64 / z;
        d[n - 1] = nz - 1.0 / (d[n] + nz);
    }
    d.truncate(nmax + 1);
    d
}

/// `(a_n, b_n)` for `n = 1 ..= nmax`, size parameter `x`, relative index `m`.
pub fn mie_coefficients(x: f64, m: Complex64, nmax: usize) -> Vec<(Complex64, Complex64)> {
    let d = log_derivative(nmax, m * x);
    let y = bessel_y(nmax, x);
    let i = Complex64::new(0.0, 1.0);
    let xi = |n: usize| Complex64::new(psi(n, x), 0.0) + i * x * y[n];
    (1..=nmax)
        .map(|n| {
            let nx = n as f64 / x;
            let (p, p1) = (psi(n, x), psi(n - 1, x));
            let (s, s1) = (xi(n), xi(n - 1));
            let ta = d[n] / m + nx;
            let tb = d[n] * m + nx;
            let a = (ta * p - p1) / (ta * s - s1);
            let b = (tb * p - p1) / (tb * s - s1);
            (a, b)
        })
        .collect()
}

/// Leading small-`x` behaviour `a_1 ≈ −(2i/3) x³ (m²−1)/(m²+2)`.
pub fn a1_small_x(x: f64, m: Complex64) -> Complex64 {
    let m2 = m * m;
    Complex64::new(0.0, -2.0 / 3.0) * x.powi(3) * (m2 - 1.0) / (m2 + 2.0)
}
