//! Spherical Bessel and Hankel functions of complex argument.
//!
//! `j_l` comes from Miller's downward recurrence normalized against the
//! closed forms of `j_0`/`j_1`; `y_l`, `h_l^(1)` and `h_l^(2)` use upward
//! recurrence from their closed forms, which is the stable direction for them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);
const RESCALE: f64 = 1e200;

/// Which radial solution of the spherical Bessel equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RadialKind {
    /// `j_l`, regular at the origin.
    BesselJ,
    /// `y_l`, spherical Bessel function of the second kind.
    BesselSecond,
    /// `h_l^(1) = j_l + i y_l`, outgoing for `e^{-iωt}`.
    Hankel1,
    /// `h_l^(2) = j_l - i y_l`.
    Hankel2,
}

impl RadialKind {
    pub fn name(&self) -> &'static str {
        match self {
            RadialKind::BesselJ => "BesselJ",
            RadialKind::BesselSecond => "BesselSecond",
            RadialKind::Hankel1 => "Hankel1",
            RadialKind::Hankel2 => "Hankel2",
        }
    }

    pub fn is_regular(&self) -> bool {
        matches!(self, RadialKind::BesselJ)
    }

    /// Values `f_0 .. f_lmax` at `z`.
    pub fn values(&self, lmax: usize, z: Complex64) -> Result<Vec<Complex64>> {
        match self {
            RadialKind::BesselJ => spherical_jn_array(lmax, z),
            RadialKind::BesselSecond => spherical_yn_array(lmax, z),
            RadialKind::Hankel1 => spherical_h1_array(lmax, z),
            RadialKind::Hankel2 => spherical_h2_array(lmax, z),
        }
    }
}

fn check_finite(values: &[Complex64], kind: &'static str, z: Complex64) -> Result<()> {
    match values
        .iter()
        .position(|v| !(v.re.is_finite() && v.im.is_finite()))
    {
        Some(l) => Err(Error::Overflow { kind, l, x: z.norm() }),
        None => Ok(()),
    }
}

/// `j_0(z) .. j_lmax(z)`.
pub fn spherical_jn_array(lmax: usize, z: Complex64) -> Result<Vec<Complex64>> {
    let mut out = vec![Complex64::new(0.0, 0.0); lmax + 1];
    if z == Complex64::new(0.0, 0.0) {
        out[0] = Complex64::new(1.0, 0.0);
        return Ok(out);
    }
    let j0 = z.sin() / z;
    let j1 = z.sin() / (z * z) - z.cos() / z;
    check_finite(&[j0, j1], "BesselJ", z)?;

    let az = z.norm();
    let start = lmax.max((1.5 * az).ceil() as usize) + 30;

    // Unnormalized downward sweep; only orders <= max(lmax, 1) are stored.
    let keep = lmax.max(1);
    let mut stored = vec![Complex64::new(0.0, 0.0); keep + 1];
    let mut upper = Complex64::new(0.0, 0.0);
    let mut current = Complex64::new(1e-30, 0.0);
    for l in (0..=start).rev() {
        if l <= keep {
            stored[l] = current;
        }
        if l == 0 {
            break;
        }
        let lower = current * ((2 * l + 1) as f64) / z - upper;
        upper = current;
        current = lower;
        if current.norm() > RESCALE {
            let s = 1.0 / RESCALE;
            current *= s;
            upper *= s;
            for v in stored.iter_mut() {
                *v *= s;
            }
        }
    }

    let scale = if j0.norm() >= j1.norm() {
        j0 / stored[0]
    } else {
        j1 / stored[1]
    };
    for (o, s) in out.iter_mut().zip(stored.iter()) {
        *o = s * scale;
    }
    out[0] = j0;
    if lmax >= 1 {
        out[1] = j1;
    }
    check_finite(&out, "BesselJ", z)?;
    Ok(out)
}

fn upward(lmax: usize, z: Complex64, f0: Complex64, f1: Complex64) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(lmax + 1);
    out.push(f0);
    if lmax >= 1 {
        out.push(f1);
    }
    for l in 1..lmax {
        let next = out[l] * ((2 * l + 1) as f64) / z - out[l - 1];
        out.push(next);
    }
    out
}

fn nonzero(z: Complex64, kind: &'static str) -> Result<()> {
    if z == Complex64::new(0.0, 0.0) {
        Err(Error::SingularAtOrigin { kind })
    } else {
        Ok(())
    }
}

/// `y_0(z) .. y_lmax(z)`.
pub fn spherical_yn_array(lmax: usize, z: Complex64) -> Result<Vec<Complex64>> {
    nonzero(z, "BesselSecond")?;
    let (s, c) = (z.sin(), z.cos());
    let y0 = -c / z;
    let y1 = -c / (z * z) - s / z;
    let out = upward(lmax, z, y0, y1);
    check_finite(&out, "BesselSecond", z)?;
    Ok(out)
}

/// `h^(1)_0(z) .. h^(1)_lmax(z)`.
pub fn spherical_h1_array(lmax: usize, z: Complex64) -> Result<Vec<Complex64>> {
    nonzero(z, "Hankel1")?;
    let e = (I * z).exp();
    let h0 = -I * e / z;
    let h1 = -e * (z + I) / (z * z);
    let out = upward(lmax, z, h0, h1);
    check_finite(&out, "Hankel1", z)?;
    Ok(out)
}

/// `h^(2)_0(z) .. h^(2)_lmax(z)`.
pub fn spherical_h2_array(lmax: usize, z: Complex64) -> Result<Vec<Complex64>> {
    nonzero(z, "Hankel2")?;
    let e = (-I * z).exp();
    let h0 = I * e / z;
    let h1 = -e * (z - I) / (z * z);
    let out = upward(lmax, z, h0, h1);
    check_finite(&out, "Hankel2", z)?;
    Ok(out)
}

/// `d(z f_l(z))/dz` from neighbouring orders: `z f_{l-1} - l f_l`, or
/// `f_0 - z f_1` at `l = 0`. `values` must hold orders up to `l + 1`.
pub fn riccati_derivative(values: &[Complex64], l: usize, z: Complex64) -> Complex64 {
    if l == 0 {
        values[0] - z * values[1]
    } else {
        z * values[l - 1] - values[l] * l as f64
    }
}

/// `f_l(z)` of the given kind together with `d(z f_l(z))/dz`.
///
/// With `z = n k r` the second value equals `d(r f_l(nkr))/dr`.
pub fn spherical_radial(kind: RadialKind, l: usize, z: Complex64) -> Result<(Complex64, Complex64)> {
    let values = kind.values(l + 1, z)?;
    Ok((values[l], riccati_derivative(&values, l, z)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    const ALL: [RadialKind; 4] = [
        RadialKind::BesselJ,
        RadialKind::BesselSecond,
        RadialKind::Hankel1,
        RadialKind::Hankel2,
    ];

    #[test]
    fn j0_closed_form() {
        let (f, d) = spherical_radial(RadialKind::BesselJ, 0, c(1.0)).unwrap();
        assert!((f.re - 0.841_470_984_807_896_5).abs() < 1e-15);
        // d(x j0)/dx = cos x
        assert!((d.re - 1f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn closed_forms_order_two_and_three() {
        for &x in &[1.0f64, 2.0, 7.5, 19.0] {
            let (s, co) = (x.sin(), x.cos());
            let j2 = (3.0 / (x * x) - 1.0) * s / x - 3.0 * co / (x * x);
            let y2 = -(3.0 / (x * x) - 1.0) * co / x - 3.0 * s / (x * x);
            let j3 = (15.0 / x.powi(3) - 6.0 / x) * s / x - (15.0 / (x * x) - 1.0) * co / x;
            let j = spherical_jn_array(3, c(x)).unwrap();
            let y = spherical_yn_array(3, c(x)).unwrap();
            assert!((j[2].re - j2).abs() < 1e-14 * (1.0 + j2.abs() * 10.0), "x={x}");
            assert!((j[3].re - j3).abs() < 1e-13 * j3.abs().max(1e-3), "x={x}");
            assert!((y[2].re - y2).abs() < 1e-13 * y2.abs().max(1.0), "x={x}");
        }
    }

    #[test]
    fn small_argument_behaviour() {
        for l in 1..6 {
            let (f, _) = spherical_radial(RadialKind::BesselJ, l, c(1e-8)).unwrap();
            assert!(f.norm() < 1e-7);
        }
        let (f, d) = spherical_radial(RadialKind::BesselJ, 3, c(0.0)).unwrap();
        assert_eq!((f, d), (c(0.0), c(0.0)));
        // j_l(x) ~ x^l / (2l+1)!! for small x
        let j = spherical_jn_array(5, c(1e-3)).unwrap();
        let expected = 1e-15 / 10395.0;
        assert!((j[5].re / expected - 1.0).abs() < 1e-6);
    }

    #[test]
    fn singular_kinds_reject_origin() {
        for kind in [RadialKind::BesselSecond, RadialKind::Hankel1, RadialKind::Hankel2] {
            assert!(matches!(
                spherical_radial(kind, 1, c(0.0)),
                Err(Error::SingularAtOrigin { .. })
            ));
        }
    }

    #[test]
    fn overflow_is_signalled() {
        let err = spherical_radial(RadialKind::BesselSecond, 200, c(1e-3)).unwrap_err();
        assert!(matches!(err, Error::Overflow { .. }));
    }

    #[test]
    fn hankel_is_j_plus_i_y() {
        let z = Complex64::new(2.3, 0.4);
        let j = spherical_jn_array(8, z).unwrap();
        let y = spherical_yn_array(8, z).unwrap();
        let h1 = spherical_h1_array(8, z).unwrap();
        let h2 = spherical_h2_array(8, z).unwrap();
        for l in 0..=8 {
            let scale = h1[l].norm().max(h2[l].norm());
            assert!((h1[l] - (j[l] + I * y[l])).norm() < 1e-13 * scale);
            assert!((h2[l] - (j[l] - I * y[l])).norm() < 1e-13 * scale);
        }
    }

    #[test]
    fn recurrence_consistency() {
        for &x in &[0.5, 1.0, 5.0, 20.0] {
            for kind in ALL {
                let f = kind.values(13, c(x)).unwrap();
                for l in 1..=12 {
                    let lhs = f[l - 1] + f[l + 1];
                    let rhs = f[l] * ((2 * l + 1) as f64 / x);
                    let scale = lhs.norm().max(rhs.norm()).max(f[l - 1].norm()).max(f[l + 1].norm());
                    assert!((lhs - rhs).norm() <= 1e-10 * scale, "{kind:?} l={l} x={x}");
                }
            }
        }
    }

    #[test]
    fn wronskian() {
        // j_l y_l' - j_l' y_l = 1/x^2; with f' = (d(xf)/dx - f)/x
        let x = 2.0;
        for l in 0..=6 {
            let (j, dj) = spherical_radial(RadialKind::BesselJ, l, c(x)).unwrap();
            let (y, dy) = spherical_radial(RadialKind::BesselSecond, l, c(x)).unwrap();
            let jp = (dj - j) / x;
            let yp = (dy - y) / x;
            let w = j * yp - jp * y;
            assert!((w.re - 1.0 / (x * x)).abs() < 1e-13, "l={l}: {w}");
            assert!(w.im.abs() < 1e-15);
        }
    }

    #[test]
    fn complex_argument_wronskian() {
        let z = Complex64::new(3.0, 0.7);
        for l in 0..=10 {
            let (j, dj) = spherical_radial(RadialKind::BesselJ, l, z).unwrap();
            let (y, dy) = spherical_radial(RadialKind::BesselSecond, l, z).unwrap();
            let w = (j * (dy - y) - (dj - j) * y) / z;
            let expected = 1.0 / (z * z);
            assert!((w - expected).norm() < 1e-11 * expected.norm(), "l={l}");
        }
    }

    #[test]
    fn large_order_small_argument_is_accurate() {
        // series j_l(x) = x^l/(2l+1)!! * (1 - x^2/(2(2l+3)) + ...)
        let x = 0.5;
        let j = spherical_jn_array(20, c(x)).unwrap();
        for l in [10usize, 15, 20] {
            let mut dfact = 1.0;
            for k in (1..=(2 * l + 1)).step_by(2) {
                dfact *= k as f64;
            }
            let mut term = x.powi(l as i32) / dfact;
            let mut sum = 0.0;
            for k in 0..30 {
                sum += term;
                term *= -x * x / (2.0 * (k as f64 + 1.0) * (2.0 * (l + k) as f64 + 3.0));
            }
            assert!((j[l].re / sum - 1.0).abs() < 1e-13, "l={l}");
        }
    }

    #[test]
    fn ode_residual_finite_difference() {
        // u = r f_l(n k r) solves u'' + (n^2 k^2 - l(l+1)/r^2) u = 0
        let (n, k) = (Complex64::new(1.4, 0.05), 0.6);
        for kind in ALL {
            for l in 0..=6usize {
                let r = 2.0;
                let h = 2e-4 * r;
                let u = |rr: f64| {
                    let z = n * k * rr;
                    spherical_radial(kind, l, z).unwrap().0 * rr
                };
                let (um, u0, up) = (u(r - h), u(r), u(r + h));
                let upp = (up - u0 * 2.0 + um) / (h * h);
                let coef = n * n * k * k - (l * (l + 1)) as f64 / (r * r);
                let res = (upp + coef * u0).norm();
                let scale = ((n * n * k * k).norm() + (l * (l + 1)) as f64 / (r * r)) * u0.norm();
                assert!(res < 1e-6 * scale, "{kind:?} l={l}: {res}");
            }
        }
    }
}
