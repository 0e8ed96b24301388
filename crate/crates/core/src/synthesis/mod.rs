//! Field synthesis from partial waves, projection back onto partial waves,
//! multipole amplitudes, and boundary matching for spheres and layered spheres.
//!
//! A partial wave `(l, m)` contributes `E = F_lm · E^l(r)`, `H = F_lm · H^l(r)`
//! where the tangential parts of `(H^l, E^l)` are `W = [[η1, η2], [ζ1, ζ2]] (c1; c2)`
//! and the radial parts follow from [`longitudinal_components`].

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::{self, AngularPoint, QuadratureRule};
use crate::maxwell_radial::{
    full_amplitudes, homogeneous_eta_zeta, numerical_transfer, profile_transfer, EtaZeta, Medium,
    MediumProfile, RadialProfile, TangentialState, Tolerances, WaveNumber,
};
use crate::specfun::{ModeIndex, RadialKind};
use crate::tensor3::{cartesian_to_spherical, spherical_to_cartesian, CVec3, SphericalFrame};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// One `(l, m)` term: `W = η1 c1 + η2 c2` (magnetic), `ζ1 c1 + ζ2 c2` (electric).
/// `c1`, `c2` hold `(θ, φ)` components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWave", into = "RawWave")]
pub struct PartialWave {
    mode: ModeIndex,
    pub c1: [Complex64; 2],
    pub c2: [Complex64; 2],
    pub kinds: (RadialKind, RadialKind),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWave {
    l: i64,
    m: i64,
    c1: [[f64; 2]; 2],
    #[serde(default)]
    c2: [[f64; 2]; 2],
    #[serde(default = "default_kinds")]
    kinds: (RadialKind, RadialKind),
}

fn default_kinds() -> (RadialKind, RadialKind) {
    (RadialKind::BesselJ, RadialKind::Hankel1)
}

fn pair(v: [[f64; 2]; 2]) -> [Complex64; 2] {
    [Complex64::new(v[0][0], v[0][1]), Complex64::new(v[1][0], v[1][1])]
}

fn unpair(v: [Complex64; 2]) -> [[f64; 2]; 2] {
    [[v[0].re, v[0].im], [v[1].re, v[1].im]]
}

impl TryFrom<RawWave> for PartialWave {
    type Error = Error;
    fn try_from(raw: RawWave) -> Result<Self> {
        let mode = ModeIndex::from_signed(raw.l, raw.m)?;
        PartialWave::new(mode, pair(raw.c1), pair(raw.c2), raw.kinds)
    }
}

impl From<PartialWave> for RawWave {
    fn from(w: PartialWave) -> Self {
        RawWave {
            l: w.mode.l() as i64,
            m: w.mode.m(),
            c1: unpair(w.c1),
            c2: unpair(w.c2),
            kinds: w.kinds,
        }
    }
}

impl PartialWave {
    pub fn new(
        mode: ModeIndex,
        c1: [Complex64; 2],
        c2: [Complex64; 2],
        kinds: (RadialKind, RadialKind),
    ) -> Result<Self> {
        if mode.l() == 0 {
            return Err(Error::MonopoleMode);
        }
        Ok(PartialWave { mode, c1, c2, kinds })
    }

    /// Outgoing multipole wave: `c2 = 0`, `f^(1) = h^(1)`.
    pub fn multipole(mode: ModeIndex, a_e: Complex64, a_m: Complex64) -> Result<Self> {
        PartialWave::new(mode, [a_e, a_m], [ZERO; 2], (RadialKind::Hankel1, RadialKind::Hankel2))
    }

    /// Regular wave `j_l` only, e.g. an incident field.
    pub fn regular(mode: ModeIndex, c: [Complex64; 2]) -> Result<Self> {
        PartialWave::new(mode, c, [ZERO; 2], (RadialKind::BesselJ, RadialKind::Hankel1))
    }

    pub fn mode(&self) -> ModeIndex {
        self.mode
    }

    fn eta_zeta(&self, k: WaveNumber, r: f64, med: &Medium) -> Result<EtaZeta> {
        homogeneous_eta_zeta(self.mode.l(), self.kinds.0, self.kinds.1, k, r, med)
    }

    /// Tangential state `W(r)` of this wave in a homogeneous medium.
    pub fn state(&self, k: WaveNumber, r: f64, med: &Medium) -> Result<TangentialState> {
        let ez = self.eta_zeta(k, r, med)?;
        Ok(ez.apply(&Vector2::from(self.c1), &Vector2::from(self.c2)))
    }

    /// Full radial amplitudes `(E^l, H^l)` at `r`.
    pub fn amplitudes(&self, k: WaveNumber, r: f64, med: &Medium) -> Result<(CVec3, CVec3)> {
        let w = self.state(k, r, med)?;
        full_amplitudes(self.mode.l(), k, r, med, &w)
    }

    /// The same wave with both coefficient pairs multiplied by `s`.
    pub fn scaled(&self, s: Complex64) -> Self {
        PartialWave {
            c1: [self.c1[0] * s, self.c1[1] * s],
            c2: [self.c2[0] * s, self.c2[1] * s],
            ..*self
        }
    }
}

/// Field values at one point, in the local spherical frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    pub e: CVec3,
    pub h: CVec3,
}

fn check_point(r: f64, theta: f64, phi: f64) -> Result<AngularPoint> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::NonPositiveRadius(r));
    }
    AngularPoint::wrapped(theta, phi)
}

/// Sums `F_lm · (E^l, H^l)` over the given per-mode amplitudes at one direction.
fn assemble(p: AngularPoint, terms: &[(ModeIndex, CVec3, CVec3)]) -> (CVec3, CVec3) {
    let mut e = CVec3::zero();
    let mut h = CVec3::zero();
    for (mode, e_l, h_l) in terms {
        let f = harmonics::flm(*mode, p);
        e += f.apply(e_l);
        h += f.apply(h_l);
    }
    (e, h)
}

/// Fields of `waves` in a homogeneous medium at `points = (r, θ, φ)`.
/// Output order follows `points`.
pub fn synthesize(
    waves: &[PartialWave],
    k: WaveNumber,
    med: &Medium,
    points: &[(f64, f64, f64)],
) -> Result<Vec<FieldSample>> {
    points
        .par_iter()
        .map(|&(r, theta, phi)| {
            let p = check_point(r, theta, phi)?;
            let terms = waves
                .iter()
                .map(|w| {
                    let (e, h) = w.amplitudes(k, r, med)?;
                    Ok((w.mode, e, h))
                })
                .collect::<Result<Vec<_>>>()?;
            let (e, h) = assemble(p, &terms);
            Ok(FieldSample { r, theta, phi, e, h })
        })
        .collect()
}

/// A partial wave in a radially varying medium, given by its tangential
/// state at a reference radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileWave {
    pub mode: ModeIndex,
    pub r_ref: f64,
    pub w_ref: TangentialState,
}

/// Fields in a radially varying medium: each wave is propagated from its
/// reference radius to the sample radius.
pub fn synthesize_in_profile<P: MediumProfile + ?Sized>(
    waves: &[ProfileWave],
    k: WaveNumber,
    profile: &P,
    points: &[(f64, f64, f64)],
) -> Result<Vec<FieldSample>> {
    let tol = Tolerances::default();
    points
        .par_iter()
        .map(|&(r, theta, phi)| {
            let p = check_point(r, theta, phi)?;
            let med = profile.medium_at(r);
            let terms = waves
                .iter()
                .map(|w| {
                    let l = w.mode.l();
                    let t = numerical_transfer(l, k, profile, w.r_ref, r, &tol)?;
                    let state = TangentialState::from_vector(&(t * w.w_ref.as_vector()));
                    let (e, h) = full_amplitudes(l, k, r, &med, &state)?;
                    Ok((w.mode, e, h))
                })
                .collect::<Result<Vec<_>>>()?;
            let (e, h) = assemble(p, &terms);
            Ok(FieldSample { r, theta, phi, e, h })
        })
        .collect()
}

/// Relative residual of `∇×E = ikμH` and `∇×H = −ikεE` at `(r, θ, φ)`,
/// with curls from Cartesian central differences of step `1e-4 r`.
pub fn maxwell_residual(
    waves: &[PartialWave],
    k: WaveNumber,
    med: &Medium,
    point: (f64, f64, f64),
) -> Result<f64> {
    let (r, theta, phi) = point;
    check_point(r, theta, phi)?;
    let x0 = spherical_to_cartesian(r, theta, phi);
    let h = 1e-4 * r;
    let cartesian = |x: [f64; 3]| -> Result<([Complex64; 3], [Complex64; 3])> {
        let (r, t, p) = cartesian_to_spherical(x);
        let s = synthesize(waves, k, med, &[(r, t, p)])?[0];
        let frame = SphericalFrame::at(t, p);
        Ok((frame.to_cartesian(&s.e), frame.to_cartesian(&s.h)))
    };
    // grad[f][axis][component]
    let mut grad = [[[ZERO; 3]; 3]; 2];
    for axis in 0..3 {
        let (mut xp, mut xm) = (x0, x0);
        xp[axis] += h;
        xm[axis] -= h;
        let (ep, hp) = cartesian(xp)?;
        let (em, hm) = cartesian(xm)?;
        for i in 0..3 {
            grad[0][axis][i] = (ep[i] - em[i]) / (2.0 * h);
            grad[1][axis][i] = (hp[i] - hm[i]) / (2.0 * h);
        }
    }
    let curl = |g: &[[Complex64; 3]; 3]| {
        [g[1][2] - g[2][1], g[2][0] - g[0][2], g[0][1] - g[1][0]]
    };
    let (e, hf) = cartesian(x0)?;
    let ik = Complex64::new(0.0, k.get());
    let norm = |v: &[Complex64; 3]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let (curl_e, curl_h) = (curl(&grad[0]), curl(&grad[1]));
    let res_e: [Complex64; 3] = std::array::from_fn(|i| curl_e[i] - ik * med.mu() * hf[i]);
    let res_h: [Complex64; 3] = std::array::from_fn(|i| curl_h[i] + ik * med.eps() * e[i]);
    let scale_e = (k.get() * med.mu()).norm() * norm(&hf);
    let scale_h = (k.get() * med.eps()).norm() * norm(&e);
    let rel = |res: f64, scale: f64| if scale > 0.0 { res / scale } else { res };
    Ok(rel(norm(&res_e), scale_e).max(rel(norm(&res_h), scale_h)))
}

/// Projected radial amplitudes `(E^l, H^l)` of one mode at a fixed radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub mode: ModeIndex,
    pub e: CVec3,
    pub h: CVec3,
}

impl Projection {
    pub fn tangential_state(&self) -> TangentialState {
        TangentialState::from_fields(&self.h, &self.e)
    }
}

/// `∫ F†_lm (E, H) dΩ` for a field given as a function of direction, with
/// rule doubling until converged.
pub fn project<F>(field: F, mode: ModeIndex, rule: &QuadratureRule) -> Result<Projection>
where
    F: Fn(f64, f64) -> (CVec3, CVec3) + Sync,
{
    let v = harmonics::integrate_converged(rule, 6, |t, ph, out| {
        let p = AngularPoint::wrapped(t, ph).expect("quadrature node inside the sphere");
        let fd = harmonics::flm(mode, p).dagger();
        let (e, h) = field(t, ph);
        out[..3].copy_from_slice(&fd.apply(&e).0);
        out[3..].copy_from_slice(&fd.apply(&h).0);
    })?;
    Ok(Projection {
        mode,
        e: CVec3::new(v[0], v[1], v[2]),
        h: CVec3::new(v[3], v[4], v[5]),
    })
}

/// Projection of field samples taken at the nodes of `rule` in θ-major
/// order (as produced by [`QuadratureRule::nodes`]) at a common radius.
///
/// The rule must integrate products of two degree-`l` harmonics exactly,
/// i.e. at least `l + 1` polar and `2l + 1` azimuthal nodes. Content above
/// that degree in the samples aliases and cannot be detected here.
pub fn project_samples(
    samples: &[FieldSample],
    mode: ModeIndex,
    rule: &QuadratureRule,
) -> Result<Projection> {
    let nodes = rule.nodes();
    if samples.len() != nodes.len() {
        return Err(Error::InvalidInput(format!(
            "expected {} samples on the quadrature grid, got {}",
            nodes.len(),
            samples.len()
        )));
    }
    if rule.n_theta() < mode.l() + 1 || rule.n_phi() < 2 * mode.l() + 1 {
        return Err(Error::GridTooCoarse(format!(
            "{}x{} nodes cannot resolve l = {}",
            rule.n_theta(),
            rule.n_phi(),
            mode.l()
        )));
    }
    let r0 = samples[0].r;
    let mut e_terms = Vec::with_capacity(samples.len());
    let mut h_terms = Vec::with_capacity(samples.len());
    for (s, n) in samples.iter().zip(nodes.iter()) {
        let dphi = (s.phi - n.phi).rem_euclid(2.0 * std::f64::consts::PI);
        let dphi = dphi.min(2.0 * std::f64::consts::PI - dphi);
        if (s.theta - n.theta).abs() > 1e-9 || dphi > 1e-9 || (s.r - r0).abs() > 1e-12 * r0 {
            return Err(Error::InvalidInput(format!(
                "sample at (r={}, θ={}, φ={}) is not on the quadrature node (θ={}, φ={}) at r={}",
                s.r, s.theta, s.phi, n.theta, n.phi, r0
            )));
        }
        let p = AngularPoint::wrapped(n.theta, n.phi)?;
        let fd = harmonics::flm(mode, p).dagger();
        e_terms.push(fd.apply(&s.e) * n.weight);
        h_terms.push(fd.apply(&s.h) * n.weight);
    }
    Ok(Projection {
        mode,
        e: harmonics::quadrature::pairwise_sum(&e_terms),
        h: harmonics::quadrature::pairwise_sum(&h_terms),
    })
}

/// Recovers `(c1, c2)` from projected amplitudes at radius `r` by inverting
/// the solution matrix of `kinds` there.
pub fn recover_coefficients(
    projection: &Projection,
    kinds: (RadialKind, RadialKind),
    k: WaveNumber,
    r: f64,
    med: &Medium,
) -> Result<PartialWave> {
    let l = projection.mode.l();
    let s = homogeneous_eta_zeta(l, kinds.0, kinds.1, k, r, med)?.solution_matrix();
    let w = projection.tangential_state().as_vector();
    let c = s
        .lu()
        .solve(&w)
        .ok_or_else(|| Error::InvalidInput(format!("solution matrix singular at r = {r}")))?;
    PartialWave::new(projection.mode, [c[0], c[1]], [c[2], c[3]], kinds)
}

/// Electric and magnetic multipole amplitudes per mode, sorted by `(l, m)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MultipoleAmplitudes {
    entries: Vec<(ModeIndex, Complex64, Complex64)>,
}

impl MultipoleAmplitudes {
    pub fn entries(&self) -> &[(ModeIndex, Complex64, Complex64)] {
        &self.entries
    }

    pub fn a_e(&self, mode: ModeIndex) -> Option<Complex64> {
        self.lookup(mode).map(|e| e.1)
    }

    pub fn a_m(&self, mode: ModeIndex) -> Option<Complex64> {
        self.lookup(mode).map(|e| e.2)
    }

    fn lookup(&self, mode: ModeIndex) -> Option<&(ModeIndex, Complex64, Complex64)> {
        self.entries
            .binary_search_by(|e| e.0.cmp(&mode))
            .ok()
            .map(|i| &self.entries[i])
    }
}

/// `a_E = c1·e_θ`, `a_M = c1·e_φ` for outgoing waves. Repeated modes add.
pub fn multipole_amplitudes(waves: &[PartialWave]) -> Result<MultipoleAmplitudes> {
    let mut entries: Vec<(ModeIndex, Complex64, Complex64)> = Vec::new();
    for w in waves {
        let (l, m) = (w.mode.l(), w.mode.m());
        if w.kinds.0 != RadialKind::Hankel1 {
            return Err(Error::NotMultipole {
                l,
                m,
                reason: format!("first radial function is {}, not Hankel1", w.kinds.0.name()),
            });
        }
        if w.c2 != [ZERO; 2] {
            return Err(Error::NotMultipole { l, m, reason: "c2 must vanish".into() });
        }
        match entries.iter_mut().find(|e| e.0 == w.mode) {
            Some(e) => {
                e.1 += w.c1[0];
                e.2 += w.c1[1];
            }
            None => entries.push((w.mode, w.c1[0], w.c1[1])),
        }
    }
    entries.sort_by_key(|e| e.0);
    Ok(MultipoleAmplitudes { entries })
}

/// Coefficients on both sides of a matched interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereMatch {
    /// Outgoing (`h^(1)`) coefficients outside, `(θ, φ)`.
    pub scattered: [Complex64; 2],
    /// Regular (`j_l`) coefficients in the core, `(θ, φ)`.
    pub interior: [Complex64; 2],
}

impl SphereMatch {
    /// Scattered wave outside, in multipole form.
    pub fn scattered_wave(&self, mode: ModeIndex) -> Result<PartialWave> {
        PartialWave::multipole(mode, self.scattered[0], self.scattered[1])
    }

    pub fn interior_wave(&self, mode: ModeIndex) -> Result<PartialWave> {
        PartialWave::regular(mode, self.interior)
    }
}

fn incident_coefficients(incident: &PartialWave) -> Result<[Complex64; 2]> {
    if incident.kinds.0 != RadialKind::BesselJ || incident.c2 != [ZERO; 2] {
        return Err(Error::InvalidInput(
            "incident wave must be regular: kinds.0 = BesselJ and c2 = 0".into(),
        ));
    }
    Ok(incident.c1)
}

/// Rows of `W` carrying each polarization: `c·e_θ` drives `(H_θ, E_φ)`,
/// `c·e_φ` drives `(H_φ, E_θ)`.
const POLARIZATION_ROWS: [[usize; 2]; 2] = [[0, 3], [1, 2]];

fn solve_2x2(a: Matrix2<Complex64>, b: Vector2<Complex64>, l: usize) -> Result<Vector2<Complex64>> {
    let det = a.determinant();
    // Hadamard bound, insensitive to very different column scales
    let scale = a.column(0).norm() * a.column(1).norm();
    if det.norm().is_nan() || det.norm() <= 1e-14 * scale {
        return Err(Error::SingularMatch { l, det: det.norm() });
    }
    let inv = Matrix2::new(a[(1, 1)], -a[(0, 1)], -a[(1, 0)], a[(0, 0)]) / det;
    Ok(inv * b)
}

/// Homogeneous sphere of radius `a` in `host`: matches
/// `W_in(a) = W_inc(a) + W_sca(a)` with `j_l` inside and `h^(1)` scattered.
pub fn match_sphere(
    l: usize,
    k: WaveNumber,
    sphere: &Medium,
    host: &Medium,
    a: f64,
    incident: &PartialWave,
) -> Result<SphereMatch> {
    if incident.mode.l() != l {
        return Err(Error::InvalidInput(format!(
            "incident wave has l = {}, expected {l}",
            incident.mode.l()
        )));
    }
    let c_inc = incident_coefficients(incident)?;
    let inside = homogeneous_eta_zeta(l, RadialKind::BesselJ, RadialKind::Hankel1, k, a, sphere)?
        .solution_matrix();
    let outside = homogeneous_eta_zeta(l, RadialKind::BesselJ, RadialKind::Hankel1, k, a, host)?
        .solution_matrix();
    let mut scattered = [ZERO; 2];
    let mut interior = [ZERO; 2];
    for (p, rows) in POLARIZATION_ROWS.iter().enumerate() {
        // unknowns (interior, scattered); regular columns are 0..2, outgoing 2..4
        let m = Matrix2::new(
            inside[(rows[0], p)],
            -outside[(rows[0], p + 2)],
            inside[(rows[1], p)],
            -outside[(rows[1], p + 2)],
        );
        let rhs = Vector2::new(outside[(rows[0], p)], outside[(rows[1], p)]) * c_inc[p];
        let x = solve_2x2(m, rhs, l)?;
        interior[p] = x[0];
        scattered[p] = x[1];
    }
    Ok(SphereMatch { scattered, interior })
}

/// How `W` is carried through the shells of a layered sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransferMethod {
    /// Products of exact per-shell transfers.
    ClosedForm,
    /// Adaptive integration of the radial system.
    Numerical,
}

/// Layered sphere: regular solution in the innermost shell, carried to the
/// outermost interface, matched against incident plus outgoing waves in the
/// outer medium. `interior` holds the core's `j_l` coefficients.
pub fn match_layered(
    l: usize,
    k: WaveNumber,
    profile: &RadialProfile,
    incident: &PartialWave,
    method: TransferMethod,
) -> Result<SphereMatch> {
    if incident.mode.l() != l {
        return Err(Error::InvalidInput(format!(
            "incident wave has l = {}, expected {l}",
            incident.mode.l()
        )));
    }
    let c_inc = incident_coefficients(incident)?;
    let shells = profile.shells();
    let (r_core, core) = match shells.first() {
        Some(&(r, m)) => (r, m),
        None => {
            // nothing to scatter from
            return Ok(SphereMatch { scattered: [ZERO; 2], interior: c_inc });
        }
    };
    let r_out = profile.outer_radius().expect("at least one shell");
    let core_basis = homogeneous_eta_zeta(l, RadialKind::BesselJ, RadialKind::Hankel1, k, r_core, &core)?
        .solution_matrix();
    let transfer = match method {
        TransferMethod::ClosedForm => profile_transfer(l, k, profile, r_core, r_out)?,
        TransferMethod::Numerical => {
            numerical_transfer(l, k, profile, r_core, r_out, &Tolerances::default())?
        }
    };
    let inner_at_surface = transfer * core_basis;
    let outside = homogeneous_eta_zeta(l, RadialKind::BesselJ, RadialKind::Hankel1, k, r_out, &profile.outer())?
        .solution_matrix();

    // unknowns (core_θ, core_φ, sca_θ, sca_φ)
    let mut m = Matrix4::<Complex64>::zeros();
    for p in 0..2 {
        m.set_column(p, &inner_at_surface.column(p));
        m.set_column(p + 2, &(-outside.column(p + 2)));
    }
    let rhs: Vector4<Complex64> =
        outside.column(0) * c_inc[0] + outside.column(1) * c_inc[1];
    let x = m
        .lu()
        .solve(&rhs)
        .ok_or(Error::SingularMatch { l, det: 0.0 })?;
    if x.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::SingularMatch { l, det: m.determinant().norm() });
    }
    Ok(SphereMatch { scattered: [x[2], x[3]], interior: [x[0], x[1]] })
}

/// Default truncation degree for a size parameter `x = k a`:
/// `max(4, ⌈x + 4 x^{1/3} + 2⌉)`.
pub fn truncation_lmax(size_parameter: f64) -> usize {
    let x = size_parameter.max(0.0);
    let l = (x + 4.0 * x.cbrt() + 2.0).ceil() as usize;
    l.max(4)
}
