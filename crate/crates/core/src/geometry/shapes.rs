//! Preset obstacle shapes and projection of arbitrary surface maps onto the
//! coefficient representation.

use std::f64::consts::PI;

use super::surface::{CoeffIndex, Part, SurfaceParam};
use crate::specfun::{HarmonicIndex, HarmonicTable, SphereQuadrature};
use crate::vec3::Vec3;

/// Sphere of radius `r0` in the encoding used as the reconstruction start:
/// `x₁` from `Re Y_1^{±1}`, `x₂` from `Im Y_1^{±1}` and `x₃` from `Y_1^0`.
///
/// With the Condon-Shortley phase the `x₂` component comes out as
/// `−r0 sinθ sinφ`, a mirrored but otherwise exact parametrization.
pub fn sphere(order: usize, r0: f64) -> SurfaceParam {
    assert!(order >= 1, "a sphere needs harmonics of order 1");
    let c1 = (2.0 * PI / 3.0).sqrt() * r0;
    let c0 = (4.0 * PI / 3.0).sqrt() * r0;
    let mut sp = SurfaceParam::zeros(order);
    let h = |m| HarmonicIndex { n: 1, m };
    sp.set(CoeffIndex { coord: 0, part: Part::Re, harmonic: h(-1) }, c1);
    sp.set(CoeffIndex { coord: 0, part: Part::Re, harmonic: h(1) }, -c1);
    sp.set(CoeffIndex { coord: 1, part: Part::Im, harmonic: h(-1) }, c1);
    sp.set(CoeffIndex { coord: 1, part: Part::Im, harmonic: h(1) }, c1);
    sp.set(CoeffIndex { coord: 2, part: Part::Re, harmonic: h(0) }, c0);
    sp
}

/// Least-squares projection of a surface map onto harmonics up to `order`.
///
/// Uses `f_n^m = ∫ f conj(Y_n^m)` and `a = Re f_n^m`, `b = −Im f_n^m`, which
/// reproduces any map that is itself a degree-`order` series exactly.
pub fn project_map<F: Fn(f64, f64) -> Vec3>(order: usize, map: F) -> SurfaceParam {
    let quad = SphereQuadrature::new(2 * order + 16);
    let block = HarmonicIndex::count(order);
    let mut sp = SurfaceParam::zeros(order);
    let c = sp.coeffs_mut();
    for (&(th, ph), &w) in quad.nodes().iter().zip(quad.weights()) {
        let x = map(th, ph);
        let tab = HarmonicTable::new(order, th, ph);
        for j in 0..3 {
            for k in 0..block {
                let f = tab.y[k].conj() * (x[j] * w);
                c[2 * j * block + k] += f.re;
                c[(2 * j + 1) * block + k] -= f.im;
            }
        }
    }
    sp
}

/// Axis-aligned ellipsoid with semi-axes `axes`; exact for `order >= 1`.
pub fn ellipsoid(order: usize, axes: [f64; 3]) -> SurfaceParam {
    project_map(order, |th, ph| {
        let (st, ct) = th.sin_cos();
        [axes[0] * st * ph.cos(), axes[1] * st * ph.sin(), axes[2] * ct]
    })
}

/// Radially described star-shaped surface `ρ(θ, φ) e_r`.
pub fn radial_surface<F: Fn(f64, f64) -> f64>(order: usize, rho: F) -> SurfaceParam {
    project_map(order, |th, ph| {
        let (st, ct) = th.sin_cos();
        let r = rho(th, ph);
        [r * st * ph.cos(), r * st * ph.sin(), r * ct]
    })
}

/// Bean-like non-convex test obstacle, scaled by `scale`.
///
/// A square-root-free variant of the classic bean map, which stays real for
/// every parameter value. At `scale = 1` it reaches slightly beyond the unit
/// sphere.
pub fn bean_map(scale: f64) -> impl Fn(f64, f64) -> Vec3 {
    move |th, ph| {
        let (st, ct) = th.sin_cos();
        let w = (PI * ct).cos();
        [
            scale * 0.75 * (1.0 - 0.05 * w) * st * ph.cos(),
            scale * 0.75 * ((1.0 - 0.005 * w) * st * ph.sin() + 0.35 * w),
            scale * 0.75 * ct,
        ]
    }
}

pub fn bean(order: usize, scale: f64) -> SurfaceParam {
    project_map(order, bean_map(scale))
}

/// Radius of the cushion obstacle (before scaling); between `√0.75` and `√2.55`.
pub fn cushion_radius(theta: f64, phi: f64) -> f64 {
    (0.75 + 0.45 * ((2.0 * phi).cos() - 1.0) * ((4.0 * theta).cos() - 1.0)).sqrt()
}

pub fn cushion(order: usize, scale: f64) -> SurfaceParam {
    radial_surface(order, |th, ph| scale * cushion_radius(th, ph))
}
