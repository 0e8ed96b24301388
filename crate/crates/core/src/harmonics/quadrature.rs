//! Product quadrature on the unit sphere: Gauss–Legendre in `cos θ` times a
//! uniform trapezoid rule in `φ`.

use std::f64::consts::PI;
use std::ops::Add;

use crate::error::{Error, Result};

/// Change below which a doubled rule is considered converged.
pub const CONVERGENCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    /// Polar angles of the Gauss nodes, `acos(x_i)`, ascending in θ.
    theta: Vec<f64>,
    /// Gauss–Legendre weights in `cos θ`; they sum to 2.
    weights: Vec<f64>,
    n_phi: usize,
}

/// One node of the product rule with its full solid-angle weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereNode {
    pub theta: f64,
    pub phi: f64,
    pub weight: f64,
}

impl QuadratureRule {
    /// Rule with `n_theta` Gauss nodes and `n_phi` azimuthal nodes.
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta == 0 || n_phi == 0 {
            return Err(Error::InvalidInput(
                "quadrature needs at least one node in each direction".into(),
            ));
        }
        let (x, weights) = gauss_legendre(n_theta);
        // x ascending -> θ descending; flip so θ ascends.
        let theta: Vec<f64> = x.iter().rev().map(|xi| xi.acos()).collect();
        let weights = weights.into_iter().rev().collect();
        Ok(QuadratureRule { theta, weights, n_phi })
    }

    /// Default resolution for integrands built from harmonics with `l <= lmax`:
    /// `2 lmax + 2` Gauss nodes and `4 lmax + 4` azimuthal nodes.
    pub fn for_lmax(lmax: usize) -> Self {
        QuadratureRule::new(2 * lmax + 2, 4 * lmax + 4).expect("nonzero node counts")
    }

    /// The same rule with both node counts doubled.
    pub fn refined(&self) -> Self {
        QuadratureRule::new(2 * self.n_theta(), 2 * self.n_phi).expect("nonzero node counts")
    }

    pub fn n_theta(&self) -> usize {
        self.theta.len()
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn len(&self) -> usize {
        self.theta.len() * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn theta_nodes(&self) -> &[f64] {
        &self.theta
    }

    pub fn theta_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn phi_nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.n_phi;
        (0..n).map(move |j| 2.0 * PI * j as f64 / n as f64)
    }

    /// Nodes in θ-major order (θ index outer, φ index inner).
    pub fn nodes(&self) -> Vec<SphereNode> {
        let dphi = 2.0 * PI / self.n_phi as f64;
        let mut out = Vec::with_capacity(self.len());
        for (&theta, &w) in self.theta.iter().zip(self.weights.iter()) {
            for phi in self.phi_nodes() {
                out.push(SphereNode { theta, phi, weight: w * dphi });
            }
        }
        out
    }

    /// `∫ f sinθ dθ dφ` with a deterministic pairwise reduction.
    pub fn integrate<T, F>(&self, f: F) -> T
    where
        T: Copy + Default + Add<Output = T> + std::ops::Mul<f64, Output = T>,
        F: Fn(f64, f64) -> T,
    {
        let terms: Vec<T> = self
            .nodes()
            .into_iter()
            .map(|n| f(n.theta, n.phi) * n.weight)
            .collect();
        pairwise_sum(&terms)
    }
}

/// Gauss–Legendre nodes (ascending) and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let weight = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = weight;
        w[n - 1 - i] = weight;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Fixed-shape pairwise summation, independent of thread scheduling.
pub fn pairwise_sum<T>(terms: &[T]) -> T
where
    T: Copy + Default + Add<Output = T>,
{
    match terms.len() {
        0 => T::default(),
        1 => terms[0],
        n if n <= 8 => terms.iter().fold(T::default(), |a, &b| a + b),
        n => {
            let (a, b) = terms.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}
