//! Radial side of the separated Maxwell equations.
//!
//! A partial wave `(l, m)` has fields `E = F_lm · E^l(r)`, `H = F_lm · H^l(r)`.
//! The tangential amplitudes `W = (H_θ, H_φ, E_θ, E_φ)` obey the first-order
//! system `d(rW)/dr = i k M (rW)` with
//!
//! ```text
//! M = [[0, εA], [-μA, 0]],   A = e_r^× − l(l+1)/(εμ k² r²) e_φ⊗e_θ
//! ```
//!
//! restricted to the `(e_θ, e_φ)` plane, and the radial amplitudes follow
//! algebraically from `W`. Time dependence is `e^{-iωt}`.

pub mod ode;

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{spherical_radial, RadialKind};
use crate::tensor3::CVec3;

pub use ode::Tolerances;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Isotropic medium with relative permittivity and permeability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMedium", into = "RawMedium")]
pub struct Medium {
    eps: Complex64,
    mu: Complex64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMedium {
    eps: [f64; 2],
    mu: [f64; 2],
}

impl TryFrom<RawMedium> for Medium {
    type Error = Error;
    fn try_from(raw: RawMedium) -> Result<Self> {
        Medium::new(
            Complex64::new(raw.eps[0], raw.eps[1]),
            Complex64::new(raw.mu[0], raw.mu[1]),
        )
    }
}

impl From<Medium> for RawMedium {
    fn from(m: Medium) -> Self {
        RawMedium { eps: [m.eps.re, m.eps.im], mu: [m.mu.re, m.mu.im] }
    }
}

impl Medium {
    pub fn new(eps: Complex64, mu: Complex64) -> Result<Self> {
        let ok = |z: Complex64| z.re.is_finite() && z.im.is_finite() && z != ZERO;
        if !(ok(eps) && ok(mu)) {
            return Err(Error::SingularMedium);
        }
        Ok(Medium { eps, mu })
    }

    pub fn vacuum() -> Self {
        Medium { eps: Complex64::new(1.0, 0.0), mu: Complex64::new(1.0, 0.0) }
    }

    /// Non-magnetic medium with refractive index `n` (`ε = n²`, `μ = 1`).
    pub fn from_index(n: Complex64) -> Result<Self> {
        Medium::new(n * n, Complex64::new(1.0, 0.0))
    }

    pub fn eps(&self) -> Complex64 {
        self.eps
    }

    pub fn mu(&self) -> Complex64 {
        self.mu
    }

    /// `n = sqrt(εμ)` on the branch `Im n >= 0`.
    pub fn refractive_index(&self) -> Complex64 {
        let n = (self.eps * self.mu).sqrt();
        if n.im < 0.0 || (n.im == 0.0 && n.re < 0.0) {
            -n
        } else {
            n
        }
    }

    pub fn is_lossless(&self) -> bool {
        self.eps.im == 0.0 && self.mu.im == 0.0
    }
}

/// Vacuum wavenumber `k = ω/c`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct WaveNumber(f64);

impl WaveNumber {
    pub fn new(k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidWavenumber(k));
        }
        Ok(WaveNumber(k))
    }

    pub fn get(&self) -> f64 {
        self.0
    }
}

/// Anything that assigns a medium to each radius.
pub trait MediumProfile: Sync {
    fn medium_at(&self, r: f64) -> Medium;

    /// Radii where the medium may jump; integration stops exactly there.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl MediumProfile for Medium {
    fn medium_at(&self, _r: f64) -> Medium {
        *self
    }
}

/// Smoothly varying medium given by a closure.
pub struct SmoothProfile<F>(pub F);

impl<F> MediumProfile for SmoothProfile<F>
where
    F: Fn(f64) -> Medium + Sync,
{
    fn medium_at(&self, r: f64) -> Medium {
        (self.0)(r)
    }
}

/// Piecewise-constant nested shells. Shell `i` occupies
/// `[r_out[i-1], r_out[i])` (the first starts at 0); `outer` fills the rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub struct RadialProfile {
    shells: Vec<(f64, Medium)>,
    outer: Medium,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawShell {
    r_out: f64,
    eps: [f64; 2],
    mu: [f64; 2],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    shells: Vec<RawShell>,
    outer: RawMedium,
}

impl TryFrom<RawProfile> for RadialProfile {
    type Error = Error;
    fn try_from(raw: RawProfile) -> Result<Self> {
        let shells = raw
            .shells
            .into_iter()
            .map(|s| {
                let m = Medium::try_from(RawMedium { eps: s.eps, mu: s.mu })?;
                Ok((s.r_out, m))
            })
            .collect::<Result<Vec<_>>>()?;
        RadialProfile::new(shells, Medium::try_from(raw.outer)?)
    }
}

impl From<RadialProfile> for RawProfile {
    fn from(p: RadialProfile) -> Self {
        RawProfile {
            shells: p
                .shells
                .iter()
                .map(|&(r_out, m)| {
                    let raw = RawMedium::from(m);
                    RawShell { r_out, eps: raw.eps, mu: raw.mu }
                })
                .collect(),
            outer: p.outer.into(),
        }
    }
}

impl RadialProfile {
    /// `shells` are `(r_outer, medium)` pairs with strictly increasing radii.
    pub fn new(shells: Vec<(f64, Medium)>, outer: Medium) -> Result<Self> {
        let mut prev = 0.0;
        for (i, &(r, _)) in shells.iter().enumerate() {
            if !(r.is_finite() && r > prev) {
                return Err(Error::InvalidProfile(format!(
                    "shell {i}: outer radius {r} must be finite and exceed {prev}"
                )));
            }
            prev = r;
        }
        Ok(RadialProfile { shells, outer })
    }

    pub fn homogeneous(medium: Medium) -> Self {
        RadialProfile { shells: Vec::new(), outer: medium }
    }

    /// A sphere of radius `a` embedded in `host`.
    pub fn sphere(a: f64, sphere: Medium, host: Medium) -> Result<Self> {
        RadialProfile::new(vec![(a, sphere)], host)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidProfile(e.to_string()))
    }

    pub fn shells(&self) -> &[(f64, Medium)] {
        &self.shells
    }

    pub fn outer(&self) -> Medium {
        self.outer
    }

    /// Outermost interface radius, or `None` for a homogeneous profile.
    pub fn outer_radius(&self) -> Option<f64> {
        self.shells.last().map(|s| s.0)
    }

    /// Inner and outer radius of shell `i` (`i == shells().len()` is the outer medium).
    pub fn shell_bounds(&self, i: usize) -> (f64, f64) {
        let lo = if i == 0 { 0.0 } else { self.shells[i - 1].0 };
        let hi = self.shells.get(i).map(|s| s.0).unwrap_or(f64::INFINITY);
        (lo, hi)
    }
}

impl MediumProfile for RadialProfile {
    /// Medium at `r`; an interface radius belongs to the shell outside it.
    fn medium_at(&self, r: f64) -> Medium {
        self.shells
            .iter()
            .find(|s| r < s.0)
            .map(|s| s.1)
            .unwrap_or(self.outer)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.shells.iter().map(|s| s.0).collect()
    }
}

/// Tangential amplitudes `W = (H_t, E_t)` at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TangentialState {
    /// `(H_θ, H_φ, E_θ, E_φ)`.
    pub w: [Complex64; 4],
}

impl TangentialState {
    pub const H_THETA: usize = 0;
    pub const H_PHI: usize = 1;
    pub const E_THETA: usize = 2;
    pub const E_PHI: usize = 3;

    pub fn new(h_theta: Complex64, h_phi: Complex64, e_theta: Complex64, e_phi: Complex64) -> Self {
        TangentialState { w: [h_theta, h_phi, e_theta, e_phi] }
    }

    pub fn zero() -> Self {
        TangentialState::default()
    }

    /// From tangential field vectors; their `e_r` parts are dropped.
    pub fn from_fields(h: &CVec3, e: &CVec3) -> Self {
        TangentialState::new(h.theta(), h.phi(), e.theta(), e.phi())
    }

    pub fn h_t(&self) -> CVec3 {
        CVec3::new(ZERO, self.w[0], self.w[1])
    }

    pub fn e_t(&self) -> CVec3 {
        CVec3::new(ZERO, self.w[2], self.w[3])
    }

    /// `W_θ = (H_θ, E_θ)`.
    pub fn w_theta(&self) -> [Complex64; 2] {
        [self.w[0], self.w[2]]
    }

    /// `W_φ = (H_φ, E_φ)`.
    pub fn w_phi(&self) -> [Complex64; 2] {
        [self.w[1], self.w[3]]
    }

    pub fn as_vector(&self) -> Vector4<Complex64> {
        Vector4::from_column_slice(&self.w)
    }

    pub fn from_vector(v: &Vector4<Complex64>) -> Self {
        TangentialState { w: [v[0], v[1], v[2], v[3]] }
    }

    pub fn norm(&self) -> f64 {
        self.w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveRadius(r))
    }
}

fn check_degree(l: usize) -> Result<()> {
    if l == 0 {
        Err(Error::MonopoleMode)
    } else {
        Ok(())
    }
}

/// The 2x2 tangential block `A` on `(e_θ, e_φ)`: rows/columns `(θ, φ)`.
fn a_block(l: usize, k: f64, r: f64, med: &Medium) -> Matrix2<Complex64> {
    let ll = (l * (l + 1)) as f64;
    let q = ll / (med.eps * med.mu * k * k * r * r);
    // e_r^× = e_φ⊗e_θ − e_θ⊗e_φ
    Matrix2::new(ZERO, -Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0) - q, ZERO)
}

/// System matrix `M` of `d(rW)/dr = i k M (rW)`.
pub fn system_matrix(l: usize, k: WaveNumber, r: f64, med: &Medium) -> Result<Matrix4<Complex64>> {
    check_degree(l)?;
    check_radius(r)?;
    Ok(system_matrix_unchecked(l, k.get(), r, med))
}

fn system_matrix_unchecked(l: usize, k: f64, r: f64, med: &Medium) -> Matrix4<Complex64> {
    let a = a_block(l, k, r, med);
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 2).copy_from(&(a * med.eps));
    m.fixed_view_mut::<2, 2>(2, 0).copy_from(&(a * -med.mu));
    m
}

/// Closed-form radial solutions in a homogeneous medium: `W = [[η1, η2], [ζ1, ζ2]] (c1; c2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaZeta {
    pub eta1: Matrix2<Complex64>,
    pub eta2: Matrix2<Complex64>,
    pub zeta1: Matrix2<Complex64>,
    pub zeta2: Matrix2<Complex64>,
}

impl EtaZeta {
    /// The 4x4 matrix mapping `(c1_θ, c1_φ, c2_θ, c2_φ)` to `W`.
    pub fn solution_matrix(&self) -> Matrix4<Complex64> {
        let mut s = Matrix4::zeros();
        s.fixed_view_mut::<2, 2>(0, 0).copy_from(&self.eta1);
        s.fixed_view_mut::<2, 2>(0, 2).copy_from(&self.eta2);
        s.fixed_view_mut::<2, 2>(2, 0).copy_from(&self.zeta1);
        s.fixed_view_mut::<2, 2>(2, 2).copy_from(&self.zeta2);
        s
    }

    pub fn apply(&self, c1: &Vector2<Complex64>, c2: &Vector2<Complex64>) -> TangentialState {
        let h = self.eta1 * c1 + self.eta2 * c2;
        let e = self.zeta1 * c1 + self.zeta2 * c2;
        TangentialState::new(h[0], h[1], e[0], e[1])
    }
}

/// `η = f e_θ⊗e_θ − i/(μkr) d(rf)/dr e_φ⊗e_φ`,
/// `ζ = f e_θ⊗e_φ + i/(εkr) d(rf)/dr e_φ⊗e_θ` for one radial function.
fn eta_zeta_single(
    kind: RadialKind,
    l: usize,
    k: f64,
    r: f64,
    med: &Medium,
) -> Result<(Matrix2<Complex64>, Matrix2<Complex64>)> {
    let z = med.refractive_index() * k * r;
    let (f, d_rf) = spherical_radial(kind, l, z)?;
    let eta = Matrix2::new(f, ZERO, ZERO, -I * d_rf / (med.mu * k * r));
    let zeta = Matrix2::new(ZERO, f, I * d_rf / (med.eps * k * r), ZERO);
    Ok((eta, zeta))
}

pub fn homogeneous_eta_zeta(
    l: usize,
    kind1: RadialKind,
    kind2: RadialKind,
    k: WaveNumber,
    r: f64,
    med: &Medium,
) -> Result<EtaZeta> {
    check_degree(l)?;
    check_radius(r)?;
    let (eta1, zeta1) = eta_zeta_single(kind1, l, k.get(), r, med)?;
    let (eta2, zeta2) = eta_zeta_single(kind2, l, k.get(), r, med)?;
    Ok(EtaZeta { eta1, eta2, zeta1, zeta2 })
}

/// `W_φ = i/(krεμ) [[0, −ε], [μ, 0]] d(rW_θ)/dr`, with `W_θ = (H_θ, E_θ)`
/// and `W_φ = (H_φ, E_φ)`.
pub fn wphi_from_wtheta(
    k: WaveNumber,
    r: f64,
    med: &Medium,
    d_rw_theta: [Complex64; 2],
) -> Result<[Complex64; 2]> {
    check_radius(r)?;
    let pre = I / (k.get() * r * med.eps * med.mu);
    let [dh, de] = d_rw_theta;
    Ok([pre * (-med.eps * de), pre * (med.mu * dh)])
}

/// Radial amplitudes recovered from the tangential ones:
/// `E_r = −sqrt(l(l+1))/(εkr) H_θ`, `H_r = sqrt(l(l+1))/(μkr) E_θ`.
pub fn longitudinal_components(
    l: usize,
    k: WaveNumber,
    r: f64,
    med: &Medium,
    w: &TangentialState,
) -> Result<(Complex64, Complex64)> {
    check_radius(r)?;
    let lam = ((l * (l + 1)) as f64).sqrt();
    let kr = k.get() * r;
    let e_r = -lam / (med.eps * kr) * w.w[TangentialState::H_THETA];
    let h_r = lam / (med.mu * kr) * w.w[TangentialState::E_THETA];
    Ok((e_r, h_r))
}

/// Full radial amplitude vectors `(E^l, H^l)` from `W`.
pub fn full_amplitudes(
    l: usize,
    k: WaveNumber,
    r: f64,
    med: &Medium,
    w: &TangentialState,
) -> Result<(CVec3, CVec3)> {
    let (e_r, h_r) = longitudinal_components(l, k, r, med, w)?;
    let mut e = w.e_t();
    let mut h = w.h_t();
    e[0] = e_r;
    h[0] = h_r;
    Ok((e, h))
}

/// Radial power flow through the sphere of radius `r` carried by one
/// partial wave: `½ r² Re(E_θ H_φ* − E_φ H_θ*)`.
pub fn radial_flux(r: f64, w: &TangentialState) -> f64 {
    let [h_t, h_p, e_t, e_p] = w.w;
    0.5 * r * r * (e_t * h_p.conj() - e_p * h_t.conj()).re
}

/// Integrates `d(rW)/dr = i k M(r) (rW)` from `r_from` to `r_to` through
/// `profile`, stopping at every breakpoint in between. `W` is continuous
/// across interfaces, so it is carried over unchanged.
pub fn propagate<P: MediumProfile + ?Sized>(
    l: usize,
    k: WaveNumber,
    profile: &P,
    r_from: f64,
    r_to: f64,
    w_init: &TangentialState,
) -> Result<TangentialState> {
    propagate_with(l, k, profile, r_from, r_to, w_init, &Tolerances::default())
}

pub fn propagate_with<P: MediumProfile + ?Sized>(
    l: usize,
    k: WaveNumber,
    profile: &P,
    r_from: f64,
    r_to: f64,
    w_init: &TangentialState,
    tol: &Tolerances,
) -> Result<TangentialState> {
    let t = numerical_transfer(l, k, profile, r_from, r_to, tol)?;
    Ok(TangentialState::from_vector(&(t * w_init.as_vector())))
}

/// Segment end points from `r_from` to `r_to`, split at interior breakpoints.
fn segment_stops(breakpoints: Vec<f64>, r_from: f64, r_to: f64) -> Vec<f64> {
    let (lo, hi) = if r_from <= r_to { (r_from, r_to) } else { (r_to, r_from) };
    let mut stops: Vec<f64> = breakpoints.into_iter().filter(|&b| b > lo && b < hi).collect();
    stops.push(r_to);
    stops.sort_by(|a, b| a.total_cmp(b));
    if r_to < r_from {
        stops.reverse();
    }
    stops
}

/// Transfer matrix of `W` from `r_from` to `r_to`, obtained by integrating
/// the fundamental matrix of `u = rW`. The step sequence does not depend on
/// the state it is later applied to, so `propagate` is linear to rounding.
pub fn numerical_transfer<P: MediumProfile + ?Sized>(
    l: usize,
    k: WaveNumber,
    profile: &P,
    r_from: f64,
    r_to: f64,
    tol: &Tolerances,
) -> Result<Matrix4<Complex64>> {
    check_degree(l)?;
    check_radius(r_from)?;
    check_radius(r_to)?;
    let breakpoints = profile.breakpoints();
    let piecewise = !breakpoints.is_empty();
    let kk = k.get();
    let ik = I * kk;

    let mut r = r_from;
    let mut u = ode::CState::<16>::from_column_slice(Matrix4::<Complex64>::identity().as_slice());
    u *= Complex64::new(r_from, 0.0);
    for next in segment_stops(breakpoints, r_from, r_to) {
        // sampled inside the segment so an interface radius picks the right side
        let seg_medium = profile.medium_at(0.5 * (r + next));
        let rhs = |rr: f64, y: &ode::CState<16>| {
            let med = if piecewise { seg_medium } else { profile.medium_at(rr) };
            let m = system_matrix_unchecked(l, kk, rr, &med) * ik;
            let y = Matrix4::from_column_slice(y.as_slice());
            ode::CState::<16>::from_column_slice((m * y).as_slice())
        };
        u = ode::integrate(rhs, r, next, u, tol)?;
        r = next;
    }
    let t = Matrix4::from_column_slice(u.as_slice()) / Complex64::new(r_to, 0.0);
    if t.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(t)
    } else {
        Err(Error::Overflow { kind: "radial transfer", l, x: k.get() * r_to })
    }
}

/// Exact transfer matrix `S(r_to) S(r_from)^{-1}` of `W` inside one
/// homogeneous medium, built from `j_l` and `y_l` solutions.
pub fn closed_form_transfer(
    l: usize,
    k: WaveNumber,
    med: &Medium,
    r_from: f64,
    r_to: f64,
) -> Result<Matrix4<Complex64>> {
    let kinds = (RadialKind::BesselJ, RadialKind::BesselSecond);
    let s_from = homogeneous_eta_zeta(l, kinds.0, kinds.1, k, r_from, med)?.solution_matrix();
    let s_to = homogeneous_eta_zeta(l, kinds.0, kinds.1, k, r_to, med)?.solution_matrix();
    let inv = s_from.try_inverse().ok_or_else(|| {
        Error::InvalidInput(format!("solution basis singular at r = {r_from}"))
    })?;
    Ok(s_to * inv)
}

/// Product of per-shell closed-form transfers through a piecewise-constant profile.
pub fn profile_transfer(
    l: usize,
    k: WaveNumber,
    profile: &RadialProfile,
    r_from: f64,
    r_to: f64,
) -> Result<Matrix4<Complex64>> {
    check_radius(r_from)?;
    check_radius(r_to)?;
    let mut total = Matrix4::identity();
    let mut r = r_from;
    for next in segment_stops(profile.breakpoints(), r_from, r_to) {
        let med = profile.medium_at(0.5 * (r + next));
        total = closed_form_transfer(l, k, &med, r, next)? * total;
        r = next;
    }
    Ok(total)
}

/// Relative finite-difference residual of
/// `(rW_θ)'' + (k²εμ − l(l+1)/r²)(rW_θ) = 0` for samples `f(r_0 + i h)`.
///
/// The second derivative uses the fourth-order five-point stencil, so at
/// least five samples are needed.
///
/// The residual at each interior node is divided by
/// `(|k²εμ| + l(l+1)/r²) |r f|`, the magnitude of the individual terms.
pub fn wtheta_ode_residual(
    l: usize,
    k: WaveNumber,
    med: &Medium,
    r0: f64,
    h: f64,
    samples: &[Complex64],
) -> Result<f64> {
    check_radius(r0)?;
    if samples.len() < 5 {
        return Err(Error::GridTooCoarse(format!("need at least 5 samples, got {}", samples.len())));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::GridTooCoarse(format!("step {h} must be positive")));
    }
    let kk = k.get();
    let wave = (med.eps * med.mu * kk * kk).norm();
    let ll = (l * (l + 1)) as f64;
    let resolution = h * (wave.sqrt() + ll.sqrt() / r0);
    if resolution > 0.1 {
        return Err(Error::GridTooCoarse(format!(
            "h (|nk| + sqrt(l(l+1))/r) = {resolution:.3} exceeds 0.1"
        )));
    }
    let u: Vec<Complex64> = samples
        .iter()
        .enumerate()
        .map(|(i, f)| f * (r0 + i as f64 * h))
        .collect();
    let mut worst_res: f64 = 0.0;
    let mut worst_scale: f64 = 0.0;
    for i in 2..u.len() - 2 {
        let r = r0 + i as f64 * h;
        let upp = (-u[i + 2] + u[i + 1] * 16.0 - u[i] * 30.0 + u[i - 1] * 16.0 - u[i - 2])
            / (12.0 * h * h);
        let coef = med.eps * med.mu * kk * kk - ll / (r * r);
        worst_res = worst_res.max((upp + coef * u[i]).norm());
        worst_scale = worst_scale.max((wave + ll / (r * r)) * u[i].norm());
    }
    if worst_scale == 0.0 {
        return Ok(if worst_res == 0.0 { 0.0 } else { f64::INFINITY });
    }
    Ok(worst_res / worst_scale)
}

#[cfg(test)]
mod tests;
