//! Medium parameters and modal coefficient containers on the trace sphere.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::harmonics::vector_harmonics_from_table;
use crate::specfun::{z_sequence, HarmonicIndex, HarmonicTable, SphereQuadrature};
use crate::vec3::{cinner, CVec3};

/// Homogeneous isotropic elastic medium with unit density at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Medium {
    pub lambda: f64,
    pub mu: f64,
    pub omega: f64,
    pub kappa_p: f64,
    pub kappa_s: f64,
}

impl Medium {
    pub fn new(lambda: f64, mu: f64, omega: f64) -> Result<Self> {
        if !(mu > 0.0 && lambda + mu > 0.0) {
            return Err(Error::Invalid(format!(
                "Lamé parameters need mu > 0 and lambda + mu > 0 (got lambda={lambda}, mu={mu})"
            )));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::Invalid(format!("frequency must be positive, got {omega}")));
        }
        Ok(Self { lambda, mu, omega, kappa_p: omega / (lambda + 2.0 * mu).sqrt(), kappa_s: omega / mu.sqrt() })
    }

    /// Same Lamé parameters at another frequency.
    pub fn at_frequency(&self, omega: f64) -> Result<Self> {
        Self::new(self.lambda, self.mu, omega)
    }

    /// Default modal truncation `⌈κ_s R + 4 (κ_s R)^{1/3} + 8⌉` for a sphere of radius `radius`.
    pub fn default_truncation(&self, radius: f64) -> usize {
        let x = self.kappa_s * radius;
        (x + 4.0 * x.cbrt() + 8.0).ceil() as usize
    }
}

pub type Block = [Complex64; 3];

/// Potential coefficients `(φ_n^m, ψ_{2n}^m, ψ_{3n}^m)` per flat harmonic index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialCoeffs {
    pub order: usize,
    pub blocks: Vec<Block>,
}

/// Displacement trace coefficients `(v_1, v_2, v_3)` in the `(T, V, W)` basis of `Γ_R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplacementCoeffs {
    pub radius: f64,
    pub order: usize,
    pub blocks: Vec<Block>,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Number of scalar unknowns of an outgoing expansion truncated at `order`:
/// one `φ` at `n = 0`, three per mode above.
pub fn unknown_count(order: usize) -> usize {
    3 * HarmonicIndex::count(order) - 2
}

/// Position of component `k` (0 = φ, 1 = ψ₂, 2 = ψ₃) of flat mode `j` in the unknown vector.
#[inline]
pub fn unknown_position(j: usize, k: usize) -> usize {
    if j == 0 {
        debug_assert_eq!(k, 0);
        0
    } else {
        1 + 3 * (j - 1) + k
    }
}

impl PotentialCoeffs {
    pub fn zeros(order: usize) -> Self {
        Self { order, blocks: vec![[ZERO; 3]; HarmonicIndex::count(order)] }
    }

    pub fn block(&self, idx: HarmonicIndex) -> Block {
        self.blocks[idx.flat()]
    }

    /// Flatten to the solver's unknown vector (ψ entries at `n = 0` dropped).
    pub fn to_unknowns(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(unknown_count(self.order));
        out.push(self.blocks[0][0]);
        for b in &self.blocks[1..] {
            out.extend_from_slice(b);
        }
        out
    }

    pub fn from_unknowns(order: usize, x: &[Complex64]) -> Result<Self> {
        if x.len() != unknown_count(order) {
            return Err(Error::Invalid(format!(
                "expected {} unknowns for order {order}, got {}",
                unknown_count(order),
                x.len()
            )));
        }
        let mut blocks = Vec::with_capacity(HarmonicIndex::count(order));
        blocks.push([x[0], ZERO, ZERO]);
        for chunk in x[1..].chunks_exact(3) {
            blocks.push([chunk[0], chunk[1], chunk[2]]);
        }
        Ok(Self { order, blocks })
    }

    /// Coefficients `(α_n^m, β_n^m)` of the vector potential in the `N`/`M`
    /// wave functions; zero at `n = 0`.
    pub fn wave_function_coeffs(&self, med: &Medium, radius: f64) -> Result<Vec<(Complex64, Complex64)>> {
        let hs = crate::specfun::spherical_hankel1_seq(self.order, med.kappa_s * radius)?;
        Ok(self
            .blocks
            .iter()
            .enumerate()
            .map(|(j, b)| {
                let n = HarmonicIndex::from_flat(j).n;
                if n == 0 {
                    return (ZERO, ZERO);
                }
                let nn = (n * (n + 1)) as f64;
                let alpha = Complex64::new(0.0, med.kappa_s * radius) * b[2] / (hs[n] * nn);
                let beta = b[1] / (hs[n] * nn.sqrt());
                (alpha, beta)
            })
            .collect())
    }
}

impl DisplacementCoeffs {
    pub fn zeros(radius: f64, order: usize) -> Self {
        Self { radius, order, blocks: vec![[ZERO; 3]; HarmonicIndex::count(order)] }
    }

    pub fn block(&self, idx: HarmonicIndex) -> Block {
        self.blocks[idx.flat()]
    }

    /// Coefficients of a vector field sampled at the nodes of `quad` on the
    /// sphere of radius `radius`, by quadrature against `(T, V, W)`.
    pub fn from_samples(order: usize, radius: f64, quad: &SphereQuadrature, values: &[CVec3]) -> Result<Self> {
        if values.len() != quad.len() {
            return Err(Error::Invalid(format!("{} samples for {} quadrature nodes", values.len(), quad.len())));
        }
        let mut out = Self::zeros(radius, order);
        let r2 = radius * radius;
        for ((&(t, p), &w), v) in quad.nodes().iter().zip(quad.weights()).zip(values) {
            let tab = HarmonicTable::new(order, t, p);
            for (j, b) in out.blocks.iter_mut().enumerate() {
                let h = vector_harmonics_from_table(&tab, HarmonicIndex::from_flat(j), radius);
                b[0] += cinner(v, &h.t) * (w * r2);
                b[1] += cinner(v, &h.v) * (w * r2);
                b[2] += cinner(v, &h.w) * (w * r2);
            }
        }
        Ok(out)
    }

    /// Whether only the `W` component is populated at `n = 0`.
    pub fn is_consistent(&self) -> bool {
        self.blocks.first().is_none_or(|b| b[0] == ZERO && b[1] == ZERO)
    }
}

/// `z_n(κ_p R)` and `z_n(κ_s R)` for `n <= order`.
pub(crate) fn trace_z(med: &Medium, radius: f64, order: usize) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    Ok((z_sequence(order, med.kappa_p * radius)?, z_sequence(order, med.kappa_s * radius)?))
}

/// Potential-to-displacement map for one mode.
pub fn potential_block_to_displacement(
    n: usize,
    zp: Complex64,
    zs: Complex64,
    kappa_s: f64,
    radius: f64,
    p: &Block,
) -> Block {
    if n == 0 {
        return [ZERO, ZERO, zp / radius * p[0]];
    }
    let s = ((n * (n + 1)) as f64).sqrt();
    [(p[0] * s + (zs + 1.0) * p[1]) / radius, p[2] * (kappa_s * kappa_s * radius / s), (zp * p[0] + p[1] * s) / radius]
}

/// Displacement-to-potential map for one mode (inverse of the above).
pub fn displacement_block_to_potential(
    n: usize,
    zp: Complex64,
    zs: Complex64,
    kappa_s: f64,
    radius: f64,
    v: &Block,
) -> Block {
    if n == 0 {
        return [radius * v[2] / zp, ZERO, ZERO];
    }
    let nn = (n * (n + 1)) as f64;
    let s = nn.sqrt();
    let lam = zp * (zs + 1.0) - nn;
    [
        (radius * (zs + 1.0) * v[2] - radius * s * v[0]) / lam,
        (radius * zp * v[0] - radius * s * v[2]) / lam,
        v[1] * (s / (kappa_s * kappa_s * radius)),
    ]
}

/// Displacement trace coefficients of the radiating field with potentials `p` on `Γ_R`.
pub fn potentials_to_displacement(p: &PotentialCoeffs, med: &Medium, radius: f64) -> Result<DisplacementCoeffs> {
    let (zp, zs) = trace_z(med, radius, p.order)?;
    let blocks = p
        .blocks
        .iter()
        .enumerate()
        .map(|(j, b)| {
            let n = HarmonicIndex::from_flat(j).n;
            potential_block_to_displacement(n, zp[n], zs[n], med.kappa_s, radius, b)
        })
        .collect();
    Ok(DisplacementCoeffs { radius, order: p.order, blocks })
}

/// Potentials of the radiating field whose trace on `Γ_R` is `v`.
///
/// At `n = 0` only `φ_0^0` is recoverable; any `T`/`V` data there is ignored.
pub fn displacement_to_potentials(v: &DisplacementCoeffs, med: &Medium) -> Result<PotentialCoeffs> {
    let (zp, zs) = trace_z(med, v.radius, v.order)?;
    let blocks = v
        .blocks
        .iter()
        .enumerate()
        .map(|(j, b)| {
            let n = HarmonicIndex::from_flat(j).n;
            displacement_block_to_potential(n, zp[n], zs[n], med.kappa_s, v.radius, b)
        })
        .collect();
    Ok(PotentialCoeffs { order: v.order, blocks })
}
