//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use elastiscat::forward::{incident_field, IncidentWave};
use elastiscat::modal::{DisplacementCoeffs, Medium};
use elastiscat::specfun::{spherical_hankel1, vector_harmonics, HarmonicIndex, SphereQuadrature, SphericalPoint};
use elastiscat::vec3::{cinner, CVec3, Vec3, CZERO3};
use num_complex::Complex64;

/// Projects samples of a vector field on the sphere of radius `radius`
/// (taken at the nodes of `quad`) onto the orthonormal `(T, V, W)` family.
pub fn project(order: usize, radius: f64, quad: &SphereQuadrature, f: &[CVec3]) -> DisplacementCoeffs {
    let mut out = DisplacementCoeffs::zeros(radius, order);
    for (j, b) in out.blocks.iter_mut().enumerate() {
        let idx = HarmonicIndex::from_flat(j);
        for ((&(t, p), w), v) in quad.nodes().iter().zip(quad.weights()).zip(f) {
            let h = vector_harmonics(idx, t, p, radius);
            let dw = w * radius * radius;
            b[0] += cinner(v, &h.t) * dw;
            b[1] += cinner(v, &h.v) * dw;
            b[2] += cinner(v, &h.w) * dw;
        }
    }
    out
}

pub fn rel_diff_blocks(a: &DisplacementCoeffs, b: &DisplacementCoeffs) -> f64 {
    let num: f64 = a.blocks.iter().flatten().zip(b.blocks.iter().flatten()).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.blocks.iter().flatten().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

pub fn rel_diff_fields(a: &[CVec3], b: &[CVec3]) -> f64 {
    let num: f64 = a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().flatten().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

/// Outgoing wave functions on the unit-sphere family `(T, V, W)`, radial
/// parts written out from the textbook vector wave functions
/// `L = ∇(h_n(κ_p r) Y)`, `M = ∇ × (x h_n(κ_s r) Y)`, `N = ∇ × M / κ_s`.
/// Returns the `(T, V, W)` components of `L`, `N`, `M` at radius `r`.
fn wave_components(med: &Medium, n: usize, r: f64) -> ([Complex64; 3], [Complex64; 3], [Complex64; 3]) {
    let z = Complex64::new(0.0, 0.0);
    let s = ((n * (n + 1)) as f64).sqrt();
    let (hp, dhp) = spherical_hankel1(n, med.kappa_p * r).unwrap();
    let (hs, dhs) = spherical_hankel1(n, med.kappa_s * r).unwrap();
    let ksr = med.kappa_s * r;
    let l = [hp / r * s, z, med.kappa_p * dhp];
    let nn = [(hs + ksr * dhs) / ksr * s, z, hs * (s * s) / ksr];
    let m = [z, hs * s, z];
    (l, nn, m)
}

/// Exact rigid-sphere scattering by mode-wise solves.
pub struct SphereOracle {
    pub medium: Medium,
    pub radius: f64,
    pub order: usize,
    /// `(α, β, γ)` amplitudes of `L`, `N`, `M` per flat index.
    pub amps: Vec<[Complex64; 3]>,
}

impl SphereOracle {
    pub fn new(med: &Medium, a: f64, wave: &IncidentWave, order: usize) -> Self {
        let quad = SphereQuadrature::new(order + 8);
        let inc: Vec<CVec3> = quad
            .nodes()
            .iter()
            .map(|&(t, p)| incident_field(wave, med, &SphericalPoint::new(a, t, p).to_cartesian()).0)
            .collect();
        // unit-sphere normalization of the family
        let c = project(order, 1.0, &quad, &inc);
        let mut amps = vec![[Complex64::new(0.0, 0.0); 3]; HarmonicIndex::count(order)];
        for (j, amp) in amps.iter_mut().enumerate() {
            let n = HarmonicIndex::from_flat(j).n;
            let b = c.blocks[j];
            let (l, nn, m) = wave_components(med, n, a);
            if n == 0 {
                amp[0] = -b[2] / l[2];
                continue;
            }
            // α L + β N = −(t, w) ; γ M = −v
            let det = l[0] * nn[2] - nn[0] * l[2];
            amp[0] = (-b[0] * nn[2] + nn[0] * b[2]) / det;
            amp[1] = (-l[0] * b[2] + b[0] * l[2]) / det;
            amp[2] = -b[1] / m[1];
        }
        Self { medium: *med, radius: a, order, amps }
    }

    /// Scattered displacement at `x`.
    pub fn field(&self, x: &Vec3) -> CVec3 {
        let sp = SphericalPoint::from_cartesian(x);
        let mut out = CZERO3;
        for (j, amp) in self.amps.iter().enumerate() {
            let idx = HarmonicIndex::from_flat(j);
            let (l, nn, m) = wave_components(&self.medium, idx.n, sp.r);
            let h = vector_harmonics(idx, sp.theta, sp.phi, 1.0);
            let ct = amp[0] * l[0] + amp[1] * nn[0] + amp[2] * m[0];
            let cv = amp[0] * l[1] + amp[1] * nn[1] + amp[2] * m[1];
            let cw = amp[0] * l[2] + amp[1] * nn[2] + amp[2] * m[2];
            for i in 0..3 {
                out[i] += ct * h.t[i] + cv * h.v[i] + cw * h.w[i];
            }
        }
        out
    }

    /// Trace coefficients on the sphere of radius `r` in the `(T, V, W)`
    /// family normalised on that sphere.
    pub fn trace(&self, r: f64) -> DisplacementCoeffs {
        let mut out = DisplacementCoeffs::zeros(r, self.order);
        for (j, amp) in self.amps.iter().enumerate() {
            let (l, nn, m) = wave_components(&self.medium, HarmonicIndex::from_flat(j).n, r);
            for k in 0..3 {
                // unit-sphere harmonics are r times those normalised on radius r
                out.blocks[j][k] = (amp[0] * l[k] + amp[1] * nn[k] + amp[2] * m[k]) * r;
            }
        }
        out
    }
}
