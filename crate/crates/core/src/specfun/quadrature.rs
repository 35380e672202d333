//! Quadrature on the unit sphere and point sets on spheres.

use std::f64::consts::PI;

use crate::vec3::Vec3;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(count: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; count];
    let mut weights = vec![0.0; count];
    let n = count as f64;
    for i in 0..count.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 1..=count {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                p1 = ((2.0 * jf - 1.0) * x * p2 - (jf - 1.0) * p3) / jf;
            }
            dp = n * (x * p1 - p2) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[count - 1 - i] = x;
        weights[i] = w;
        weights[count - 1 - i] = w;
    }
    (nodes, weights)
}

/// Product rule: Gauss-Legendre in `cos θ` times the trapezoid rule in `φ`.
///
/// With design order `N` it uses `(N+1) × (2N+2)` nodes and integrates
/// `Y_n^m conj(Y_{n'}^{m'})` exactly for `n, n' <= N`. Weights sum to `4π`.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    order: usize,
    n_theta: usize,
    n_phi: usize,
    nodes: Vec<(f64, f64)>,
    weights: Vec<f64>,
}

impl SphereQuadrature {
    pub fn new(order: usize) -> Self {
        let n_theta = order + 1;
        let n_phi = 2 * order + 2;
        let (x, wx) = gauss_legendre(n_theta);
        let dphi = 2.0 * PI / n_phi as f64;
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for (xi, wi) in x.iter().zip(&wx) {
            let theta = xi.clamp(-1.0, 1.0).acos();
            for k in 0..n_phi {
                nodes.push((theta, k as f64 * dphi));
                weights.push(wi * dphi);
            }
        }
        Self { order, n_theta, n_phi, nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_theta, self.n_phi)
    }

    /// `(θ, φ)` pairs.
    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// `count` nearly uniform points on the sphere of radius `radius` (Fibonacci lattice).
pub fn fibonacci_sphere(count: usize, radius: f64) -> Vec<Vec3> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            [radius * rho * phi.cos(), radius * rho * phi.sin(), radius * z]
        })
        .collect()
}
