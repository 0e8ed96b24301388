//! Complex 3-vectors and 3x3 tensors over the local spherical frame.
//!
//! Components are always stored in the ordered basis `(e_r, e_theta, e_phi)`,
//! which is right-handed: `e_r x e_theta = e_phi`. A tensor entry `T[i][j]`
//! carries the row (left factor) index `i` and the column (right factor)
//! index `j`, so `(u ⊗ v)[i][j] = u_i v_j` and `T · w` is an ordinary
//! matrix-vector product.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Index of the radial component.
pub const R: usize = 0;
/// Index of the polar component.
pub const THETA: usize = 1;
/// Index of the azimuthal component.
pub const PHI: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CVec3(pub [Complex64; 3]);

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CTensor3(pub [[Complex64; 3]; 3]);

impl CVec3 {
    pub const fn new(r: Complex64, theta: Complex64, phi: Complex64) -> Self {
        CVec3([r, theta, phi])
    }

    pub fn from_real(r: f64, theta: f64, phi: f64) -> Self {
        CVec3([r.into(), theta.into(), phi.into()])
    }

    pub const fn zero() -> Self {
        CVec3([ZERO; 3])
    }

    pub const fn e_r() -> Self {
        CVec3([ONE, ZERO, ZERO])
    }

    pub const fn e_theta() -> Self {
        CVec3([ZERO, ONE, ZERO])
    }

    pub const fn e_phi() -> Self {
        CVec3([ZERO, ZERO, ONE])
    }

    pub fn r(&self) -> Complex64 {
        self.0[R]
    }

    pub fn theta(&self) -> Complex64 {
        self.0[THETA]
    }

    pub fn phi(&self) -> Complex64 {
        self.0[PHI]
    }

    /// Bilinear product `u · v` (no conjugation).
    pub fn dot(&self, other: &CVec3) -> Complex64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Hermitian product `u* · v`.
    pub fn cdot(&self, other: &CVec3) -> Complex64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn cross(&self, other: &CVec3) -> CVec3 {
        let [a0, a1, a2] = self.0;
        let [b0, b1, b2] = other.0;
        CVec3([a1 * b2 - a2 * b1, a2 * b0 - a0 * b2, a0 * b1 - a1 * b0])
    }

    pub fn conj(&self) -> CVec3 {
        CVec3(self.0.map(|c| c.conj()))
    }

    pub fn scale(&self, s: Complex64) -> CVec3 {
        CVec3(self.0.map(|c| c * s))
    }

    /// Euclidean norm `sqrt(u* · u)`.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

impl Index<usize> for CVec3 {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for CVec3 {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.0[i]
    }
}

impl Add for CVec3 {
    type Output = CVec3;
    fn add(self, rhs: CVec3) -> CVec3 {
        CVec3([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1], self.0[2] + rhs.0[2]])
    }
}

impl AddAssign for CVec3 {
    fn add_assign(&mut self, rhs: CVec3) {
        *self = *self + rhs;
    }
}

impl Sub for CVec3 {
    type Output = CVec3;
    fn sub(self, rhs: CVec3) -> CVec3 {
        CVec3([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1], self.0[2] - rhs.0[2]])
    }
}

impl Neg for CVec3 {
    type Output = CVec3;
    fn neg(self) -> CVec3 {
        CVec3(self.0.map(|c| -c))
    }
}

impl Mul<Complex64> for CVec3 {
    type Output = CVec3;
    fn mul(self, s: Complex64) -> CVec3 {
        self.scale(s)
    }
}

impl Mul<f64> for CVec3 {
    type Output = CVec3;
    fn mul(self, s: f64) -> CVec3 {
        CVec3(self.0.map(|c| c * s))
    }
}

/// `u ⊗ v`, with entries `u_i v_j`.
pub fn dyad(u: &CVec3, v: &CVec3) -> CTensor3 {
    let mut t = CTensor3::zero();
    for i in 0..3 {
        for j in 0..3 {
            t.0[i][j] = u.0[i] * v.0[j];
        }
    }
    t
}

/// Antisymmetric tensor `v^x` with `v^x · a = v x a` and `a · v^x = a x v`.
pub fn dual(v: &CVec3) -> CTensor3 {
    let [v0, v1, v2] = v.0;
    CTensor3([[ZERO, -v2, v1], [v2, ZERO, -v0], [-v1, v0, ZERO]])
}

/// Projector onto the tangential (e_theta, e_phi) plane, `1 - e_r ⊗ e_r`.
pub fn tangential_projector() -> CTensor3 {
    CTensor3::identity() - dyad(&CVec3::e_r(), &CVec3::e_r())
}

impl CTensor3 {
    pub const fn zero() -> Self {
        CTensor3([[ZERO; 3]; 3])
    }

    pub const fn identity() -> Self {
        CTensor3([[ONE, ZERO, ZERO], [ZERO, ONE, ZERO], [ZERO, ZERO, ONE]])
    }

    pub fn diag(a: Complex64, b: Complex64, c: Complex64) -> Self {
        CTensor3([[a, ZERO, ZERO], [ZERO, b, ZERO], [ZERO, ZERO, c]])
    }

    /// Tensor whose columns are the given vectors.
    pub fn from_columns(c0: &CVec3, c1: &CVec3, c2: &CVec3) -> Self {
        let mut t = CTensor3::zero();
        for i in 0..3 {
            t.0[i][0] = c0.0[i];
            t.0[i][1] = c1.0[i];
            t.0[i][2] = c2.0[i];
        }
        t
    }

    pub fn column(&self, j: usize) -> CVec3 {
        CVec3([self.0[0][j], self.0[1][j], self.0[2][j]])
    }

    pub fn row(&self, i: usize) -> CVec3 {
        CVec3(self.0[i])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1] + self.0[2][2]
    }

    /// Determinant by cofactor expansion along the first row.
    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Adjugate (transposed cofactor matrix): `adj(T) T = T adj(T) = det(T) 1`.
    pub fn adjoint(&self) -> CTensor3 {
        let m = &self.0;
        let mut a = CTensor3::zero();
        for i in 0..3 {
            for j in 0..3 {
                // cofactor C_ji lands at a[i][j]
                let (r0, r1) = others(j);
                let (c0, c1) = others(i);
                let minor = m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                a.0[i][j] = minor * sign;
            }
        }
        a
    }

    pub fn transpose(&self) -> CTensor3 {
        let mut t = CTensor3::zero();
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] = self.0[j][i];
            }
        }
        t
    }

    /// Hermitian conjugate.
    pub fn dagger(&self) -> CTensor3 {
        let mut t = CTensor3::zero();
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] = self.0[j][i].conj();
            }
        }
        t
    }

    pub fn scale(&self, s: Complex64) -> CTensor3 {
        CTensor3(self.0.map(|row| row.map(|c| c * s)))
    }

    pub fn matmul(&self, other: &CTensor3) -> CTensor3 {
        let mut t = CTensor3::zero();
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] = (0..3).map(|k| self.0[i][k] * other.0[k][j]).sum();
            }
        }
        t
    }

    /// `T · v`.
    pub fn apply(&self, v: &CVec3) -> CVec3 {
        CVec3([self.row(0).dot(v), self.row(1).dot(v), self.row(2).dot(v)])
    }

    /// `v · T`.
    pub fn left_apply(&self, v: &CVec3) -> CVec3 {
        CVec3([
            v.dot(&self.column(0)),
            v.dot(&self.column(1)),
            v.dot(&self.column(2)),
        ])
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CTensor3) -> f64 {
        (*self - *other).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Row-major flattening, `[T_rr, T_rθ, T_rφ, T_θr, ...]`.
    pub fn to_row_major(&self) -> [Complex64; 9] {
        let mut out = [ZERO; 9];
        for i in 0..3 {
            for j in 0..3 {
                out[3 * i + j] = self.0[i][j];
            }
        }
        out
    }
}

fn others(i: usize) -> (usize, usize) {
    match i {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

impl Add for CTensor3 {
    type Output = CTensor3;
    fn add(self, rhs: CTensor3) -> CTensor3 {
        let mut t = self;
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] += rhs.0[i][j];
            }
        }
        t
    }
}

impl AddAssign for CTensor3 {
    fn add_assign(&mut self, rhs: CTensor3) {
        *self = *self + rhs;
    }
}

impl Sub for CTensor3 {
    type Output = CTensor3;
    fn sub(self, rhs: CTensor3) -> CTensor3 {
        let mut t = self;
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] -= rhs.0[i][j];
            }
        }
        t
    }
}

impl Neg for CTensor3 {
    type Output = CTensor3;
    fn neg(self) -> CTensor3 {
        self.scale(-ONE)
    }
}

impl Mul for CTensor3 {
    type Output = CTensor3;
    fn mul(self, rhs: CTensor3) -> CTensor3 {
        self.matmul(&rhs)
    }
}

impl Mul<CVec3> for CTensor3 {
    type Output = CVec3;
    fn mul(self, rhs: CVec3) -> CVec3 {
        self.apply(&rhs)
    }
}

impl Mul<f64> for CTensor3 {
    type Output = CTensor3;
    fn mul(self, s: f64) -> CTensor3 {
        CTensor3(self.0.map(|row| row.map(|c| c * s)))
    }
}

impl Mul<Complex64> for CTensor3 {
    type Output = CTensor3;
    fn mul(self, s: Complex64) -> CTensor3 {
        self.scale(s)
    }
}

/// Local orthonormal frame at a direction `(theta, phi)`, expressed in
/// Cartesian coordinates. Only used to export or finite-difference fields.
#[derive(Debug, Clone, Copy)]
pub struct SphericalFrame {
    pub e_r: [f64; 3],
    pub e_theta: [f64; 3],
    pub e_phi: [f64; 3],
}

impl SphericalFrame {
    pub fn at(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        SphericalFrame {
            e_r: [st * cp, st * sp, ct],
            e_theta: [ct * cp, ct * sp, -st],
            e_phi: [-sp, cp, 0.0],
        }
    }

    /// Frame components `(v_r, v_theta, v_phi)` to Cartesian `(v_x, v_y, v_z)`.
    pub fn to_cartesian(&self, v: &CVec3) -> [Complex64; 3] {
        let mut out = [ZERO; 3];
        for (k, o) in out.iter_mut().enumerate() {
            *o = v.0[R] * self.e_r[k] + v.0[THETA] * self.e_theta[k] + v.0[PHI] * self.e_phi[k];
        }
        out
    }

    pub fn from_cartesian(&self, v: &[Complex64; 3]) -> CVec3 {
        let proj = |e: &[f64; 3]| v[0] * e[0] + v[1] * e[1] + v[2] * e[2];
        CVec3([proj(&self.e_r), proj(&self.e_theta), proj(&self.e_phi)])
    }
}

/// Spherical coordinates `(r, theta, phi)` of a Cartesian point, with phi in [0, 2π).
pub fn cartesian_to_spherical(x: [f64; 3]) -> (f64, f64, f64) {
    let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    let theta = (x[2] / r).clamp(-1.0, 1.0).acos();
    let phi = x[1].atan2(x[0]).rem_euclid(2.0 * std::f64::consts::PI);
    (r, theta, phi)
}

pub fn spherical_to_cartesian(r: f64, theta: f64, phi: f64) -> [f64; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [r * st * cp, r * st * sp, r * ct]
}
