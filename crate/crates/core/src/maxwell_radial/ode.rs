//! Dormand–Prince 5(4) embedded pair for small complex linear systems.

use nalgebra::{Complex, SVector};

use crate::error::{Error, Result};

pub type CState<const N: usize> = SVector<Complex<f64>, N>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rtol: 1e-10, atol: 1e-12, max_steps: 1_000_000 }
    }
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

// fifth-order weights minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction).
pub fn integrate<const N: usize, F>(
    f: F,
    t0: f64,
    t1: f64,
    y0: CState<N>,
    tol: &Tolerances,
) -> Result<CState<N>>
where
    F: Fn(f64, &CState<N>) -> CState<N>,
{
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(y0);
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);

    // initial step from the derivative scale
    let y_scale = y.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let d_scale = k1.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut h = if d_scale > 0.0 && y_scale > 0.0 {
        (0.01 * y_scale / d_scale).min(span.abs())
    } else {
        span.abs() * 1e-3
    };
    h = h.max(span.abs() * 1e-12);

    for _ in 0..tol.max_steps {
        let remaining = (t1 - t) * dir;
        if remaining <= 0.0 {
            return Ok(y);
        }
        let step = h.min(remaining);
        let hs = step * dir;

        let k2 = f(t + C2 * hs, &(y + k1 * c(A21 * hs)));
        let k3 = f(t + C3 * hs, &(y + (k1 * c(A31) + k2 * c(A32)) * c(hs)));
        let k4 = f(t + C4 * hs, &(y + (k1 * c(A41) + k2 * c(A42) + k3 * c(A43)) * c(hs)));
        let k5 = f(
            t + C5 * hs,
            &(y + (k1 * c(A51) + k2 * c(A52) + k3 * c(A53) + k4 * c(A54)) * c(hs)),
        );
        let k6 = f(
            t + hs,
            &(y + (k1 * c(A61) + k2 * c(A62) + k3 * c(A63) + k4 * c(A64) + k5 * c(A65)) * c(hs)),
        );
        let y_new = y + (k1 * c(A71) + k3 * c(A73) + k4 * c(A74) + k5 * c(A75) + k6 * c(A76)) * c(hs);
        let k7 = f(t + hs, &y_new);
        let err = (k1 * c(E1) + k3 * c(E3) + k4 * c(E4) + k5 * c(E5) + k6 * c(E6) + k7 * c(E7)) * c(hs);

        let mut err_norm: f64 = 0.0;
        for i in 0..N {
            let sc = tol.atol + tol.rtol * y[i].norm().max(y_new[i].norm());
            err_norm = err_norm.max(err[i].norm() / sc);
        }

        if err_norm <= 1.0 {
            t += hs;
            if step >= remaining {
                t = t1;
            }
            y = y_new;
            k1 = k7;
        }
        let factor = if err_norm == 0.0 {
            5.0
        } else {
            (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = step * if err_norm <= 1.0 { factor } else { factor.min(1.0) };
        if h < 1e-14 * t.abs().max(span.abs()) {
            return Err(Error::StepUnderflow { r: t });
        }
    }
    Err(Error::TooManySteps(tol.max_steps))
}

fn c(x: f64) -> Complex<f64> {
    Complex::new(x, 0.0)
}
