//! Special functions: normalized associated Legendre functions, scalar
//! spherical harmonics with the Condon–Shortley phase, angular-momentum
//! ladder actions, and spherical Bessel/Hankel functions of complex argument.

mod bessel;

pub use bessel::{
    riccati_derivative, spherical_h1_array, spherical_h2_array, spherical_jn_array,
    spherical_radial, spherical_yn_array, RadialKind,
};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Spherical harmonic mode label `(l, m)` with `|m| <= l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawMode", into = "RawMode")]
pub struct ModeIndex {
    l: usize,
    m: i64,
}

#[derive(Serialize, Deserialize)]
struct RawMode {
    l: i64,
    m: i64,
}

impl TryFrom<RawMode> for ModeIndex {
    type Error = Error;
    fn try_from(raw: RawMode) -> Result<Self> {
        ModeIndex::from_signed(raw.l, raw.m)
    }
}

impl From<ModeIndex> for RawMode {
    fn from(mode: ModeIndex) -> Self {
        RawMode { l: mode.l as i64, m: mode.m }
    }
}

impl ModeIndex {
    pub fn new(l: usize, m: i64) -> Result<Self> {
        if m.unsigned_abs() as usize > l {
            return Err(Error::InvalidMode { l: l as i64, m });
        }
        Ok(ModeIndex { l, m })
    }

    /// Like [`ModeIndex::new`] but also rejects negative `l`.
    pub fn from_signed(l: i64, m: i64) -> Result<Self> {
        if l < 0 {
            return Err(Error::InvalidMode { l, m });
        }
        ModeIndex::new(l as usize, m)
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    /// `l(l+1)`, the eigenvalue of `L²`.
    pub fn l_squared(&self) -> f64 {
        let l = self.l as f64;
        l * (l + 1.0)
    }

    /// All modes with `l_min <= l <= l_max`, ordered by `(l, m)`.
    pub fn range(l_min: usize, l_max: usize) -> Vec<ModeIndex> {
        (l_min..=l_max)
            .flat_map(|l| (-(l as i64)..=l as i64).map(move |m| ModeIndex { l, m }))
            .collect()
    }
}

impl std::fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.l, self.m)
    }
}

/// Action of `L+` on `Y_lm`: `sqrt((l-m)(l+m+1)) Y_{l,m+1}`. At the top of
/// the ladder the coefficient is zero and no mode is returned.
pub fn ladder_plus(mode: ModeIndex) -> (f64, Option<ModeIndex>) {
    let (l, m) = (mode.l as i64, mode.m);
    if m == l {
        return (0.0, None);
    }
    let coeff = (((l - m) * (l + m + 1)) as f64).sqrt();
    (coeff, Some(ModeIndex { l: mode.l, m: m + 1 }))
}

/// Action of `L-` on `Y_lm`: `sqrt((l+m)(l-m+1)) Y_{l,m-1}`.
pub fn ladder_minus(mode: ModeIndex) -> (f64, Option<ModeIndex>) {
    let (l, m) = (mode.l as i64, mode.m);
    if m == -l {
        return (0.0, None);
    }
    let coeff = (((l + m) * (l - m + 1)) as f64).sqrt();
    (coeff, Some(ModeIndex { l: mode.l, m: m - 1 }))
}

/// Normalized associated Legendre value `Pbar_l^m(cos θ)` for `m >= 0`,
/// scaled so that `Y_lm = Pbar_l^m(cos θ) e^{imφ}` (Condon–Shortley phase
/// included). With `over_sin` the result is divided by `sin θ` analytically,
/// which is regular for `m >= 1` and exact at the poles.
///
/// Forward recurrence in `l` at fixed `m`, seeded by the closed sectoral value.
pub fn legendre_normalized(l: usize, m: usize, theta: f64, over_sin: bool) -> f64 {
    debug_assert!(m <= l);
    debug_assert!(!over_sin || m >= 1);
    let (s, x) = theta.sin_cos();

    let mut pmm = 1.0 / (4.0 * PI).sqrt();
    for k in 1..=m {
        let kf = k as f64;
        let factor = -((2.0 * kf + 1.0) / (2.0 * kf)).sqrt();
        pmm *= if over_sin && k == 1 { factor } else { factor * s };
    }
    if l == m {
        return pmm;
    }

    let mf = m as f64;
    let mut p_prev = pmm;
    let mut p_curr = (2.0 * mf + 3.0).sqrt() * x * pmm;
    for ll in (m + 2)..=l {
        let lf = ll as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let lm1 = lf - 1.0;
        let b = ((lm1 * lm1 - mf * mf) / (4.0 * lm1 * lm1 - 1.0)).sqrt();
        let next = a * (x * p_curr - b * p_prev);
        p_prev = p_curr;
        p_curr = next;
    }
    p_curr
}

/// Scalar spherical harmonic `Y_lm(θ, φ)` with Condon–Shortley phase and
/// unit norm over the sphere. Intended for `0 <= θ <= π`.
pub fn ylm(mode: ModeIndex, theta: f64, phi: f64) -> Complex64 {
    let m_abs = mode.m.unsigned_abs() as usize;
    let p = legendre_normalized(mode.l, m_abs, theta, false);
    signed_phase(mode.m, p, phi)
}

/// `Y_lm(θ, φ) / sin θ` for `m != 0`; exact at the poles. Returns zero for `m = 0`,
/// which is the value of `m Y_lm / sin θ` there.
pub fn ylm_over_sin(mode: ModeIndex, theta: f64, phi: f64) -> Complex64 {
    if mode.m == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let m_abs = mode.m.unsigned_abs() as usize;
    let p = legendre_normalized(mode.l, m_abs, theta, true);
    signed_phase(mode.m, p, phi)
}

// Y_{l,-m} = (-1)^m conj(Y_lm)
fn signed_phase(m: i64, p: f64, phi: f64) -> Complex64 {
    let m_abs = m.unsigned_abs() as f64;
    let e = Complex64::from_polar(p, m_abs * phi);
    if m >= 0 {
        e
    } else if m % 2 == 0 {
        e.conj()
    } else {
        -e.conj()
    }
}

/// `∂Y_lm/∂θ` through the ladder operators:
/// `∂/∂θ = ½ (e^{-iφ} L+ − e^{iφ} L−)`.
pub fn ylm_dtheta(mode: ModeIndex, theta: f64, phi: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    if let (c, Some(up)) = ladder_plus(mode) {
        acc += Complex64::from_polar(0.5 * c, -phi) * ylm(up, theta, phi);
    }
    if let (c, Some(down)) = ladder_minus(mode) {
        acc -= Complex64::from_polar(0.5 * c, phi) * ylm(down, theta, phi);
    }
    acc
}

/// `∂²Y_lm/∂θ²`, applying the ladder form of `∂/∂θ` twice.
pub fn ylm_dtheta2(mode: ModeIndex, theta: f64, phi: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    if let (c, Some(up)) = ladder_plus(mode) {
        acc += Complex64::from_polar(0.5 * c, -phi) * ylm_dtheta(up, theta, phi);
    }
    if let (c, Some(down)) = ladder_minus(mode) {
        acc -= Complex64::from_polar(0.5 * c, phi) * ylm_dtheta(down, theta, phi);
    }
    acc
}

/// `L_z Y_lm` evaluated as `½ [L+, L−] Y_lm`.
pub fn lz_ylm(mode: ModeIndex, theta: f64, phi: f64) -> Complex64 {
    let coeff = 0.5 * (ladder_chain(mode, true, false) - ladder_chain(mode, false, true));
    ylm(mode, theta, phi) * coeff
}

/// `L² Y_lm` evaluated as `(L_z² + ½(L+L− + L−L+)) Y_lm` with each operator
/// applied through its ladder coefficients.
pub fn l_squared_ylm(mode: ModeIndex, theta: f64, phi: f64) -> Complex64 {
    let lz = 0.5 * (ladder_chain(mode, true, false) - ladder_chain(mode, false, true));
    let coeff = lz * lz + 0.5 * (ladder_chain(mode, false, true) + ladder_chain(mode, true, false));
    ylm(mode, theta, phi) * coeff
}

/// Coefficient of `Y_lm` in `A B Y_lm` where `A`, `B` are ladder operators
/// (`true` = raising). Only the diagonal compositions are needed here.
fn ladder_chain(mode: ModeIndex, outer_plus: bool, inner_plus: bool) -> f64 {
    let inner = if inner_plus { ladder_plus(mode) } else { ladder_minus(mode) };
    match inner {
        (c, Some(shifted)) => {
            let (c2, back) = if outer_plus {
                ladder_plus(shifted)
            } else {
                ladder_minus(shifted)
            };
            debug_assert_eq!(back.map(|b| b.m), Some(mode.m));
            c * c2
        }
        _ => 0.0,
    }
}
