//! Scalar and vector spherical harmonics.
//!
//! Convention: orthonormal on the unit sphere with the Condon-Shortley phase,
//! `Y_n^m(θ, φ) = P̄_n^m(cos θ) e^{imφ}` and `Y_n^{-m} = (-1)^m conj(Y_n^m)`.
//! Vector harmonics on the sphere of radius `R` follow
//! `T = ∇_Γ X / sqrt(n(n+1))`, `V = T × e_r`, `W = X e_r`, `X = Y / R`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::vec3::{axpy_rc, norm, CVec3, Vec3, CZERO3};

/// Degree/order pair `(n, m)` with `|m| <= n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HarmonicIndex {
    pub n: usize,
    pub m: i64,
}

impl HarmonicIndex {
    pub fn new(n: usize, m: i64) -> Result<Self> {
        if m.unsigned_abs() as usize > n {
            return Err(Error::Invalid(format!("|m| = {} exceeds n = {n}", m.abs())));
        }
        Ok(Self { n, m })
    }

    /// Zero-based flat position `n² + n + m`; add one for the 1-based count.
    #[inline]
    pub fn flat(self) -> usize {
        ((self.n * self.n + self.n) as i64 + self.m) as usize
    }

    pub fn from_flat(j: usize) -> Self {
        let n = (j as f64).sqrt().floor() as usize;
        // guard against rounding in the square root
        let n = if (n + 1) * (n + 1) <= j {
            n + 1
        } else if n * n > j {
            n - 1
        } else {
            n
        };
        let m = j as i64 - (n * n + n) as i64;
        Self { n, m }
    }

    /// Number of flat indices with degree `<= order`.
    #[inline]
    pub fn count(order: usize) -> usize {
        (order + 1) * (order + 1)
    }
}

/// Point in spherical coordinates, `theta` polar from +x₃, `phi` azimuth in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalPoint {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl SphericalPoint {
    pub fn new(r: f64, theta: f64, phi: f64) -> Self {
        Self { r, theta, phi }
    }

    pub fn from_cartesian(x: &Vec3) -> Self {
        let r = norm(x);
        if r == 0.0 {
            return Self { r, theta: 0.0, phi: 0.0 };
        }
        let theta = (x[2] / r).clamp(-1.0, 1.0).acos();
        let mut phi = x[1].atan2(x[0]);
        if phi < 0.0 {
            phi += 2.0 * PI;
        }
        Self { r, theta, phi }
    }

    pub fn to_cartesian(&self) -> Vec3 {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [self.r * st * cp, self.r * st * sp, self.r * ct]
    }

    /// Local orthonormal frame `(e_r, e_θ, e_φ)`.
    pub fn frame(&self) -> [Vec3; 3] {
        frame(self.theta, self.phi)
    }
}

pub fn frame(theta: f64, phi: f64) -> [Vec3; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [[st * cp, st * sp, ct], [ct * cp, ct * sp, -st], [-sp, cp, 0.0]]
}

/// Normalised associated Legendre values for `0 <= m <= n <= order` at one angle.
///
/// Stores `P̄_n^m(cos θ)`, `dP̄_n^m/dθ` and, for `m >= 1`, `P̄_n^m / sin θ`,
/// the latter computed by a recurrence that stays regular at the poles.
#[derive(Debug, Clone)]
pub struct Legendre {
    order: usize,
    p: Vec<f64>,
    dp: Vec<f64>,
    q: Vec<f64>,
}

#[inline]
fn tri(n: usize, m: usize) -> usize {
    n * (n + 1) / 2 + m
}

impl Legendre {
    pub fn new(order: usize, theta: f64) -> Self {
        let (s, x) = theta.sin_cos();
        let len = tri(order, order) + 1;
        let mut p = vec![0.0; len];
        let mut q = vec![0.0; len];
        let mut dp = vec![0.0; len];
        let mut pmm = 1.0 / (4.0 * PI).sqrt();
        for m in 0..=order {
            if m > 0 {
                let f = -((2 * m + 1) as f64 / (2 * m) as f64).sqrt();
                // Q_m^m = P̄_m^m / sin θ = f P̄_{m-1}^{m-1}
                q[tri(m, m)] = f * pmm;
                pmm *= f * s;
            }
            p[tri(m, m)] = pmm;
            if m < order {
                let c = ((2 * m + 3) as f64).sqrt() * x;
                p[tri(m + 1, m)] = c * pmm;
                q[tri(m + 1, m)] = c * q[tri(m, m)];
            }
            for n in (m + 2)..=order {
                let nf = n as f64;
                let mf = m as f64;
                let a = ((4.0 * nf * nf - 1.0) / (nf * nf - mf * mf)).sqrt();
                let b = ((2.0 * nf + 1.0) * ((nf - 1.0).powi(2) - mf * mf) / ((2.0 * nf - 3.0) * (nf * nf - mf * mf)))
                    .sqrt();
                p[tri(n, m)] = a * x * p[tri(n - 1, m)] - b * p[tri(n - 2, m)];
                q[tri(n, m)] = a * x * q[tri(n - 1, m)] - b * q[tri(n - 2, m)];
            }
        }
        for n in 0..=order {
            let nf = n as f64;
            if n >= 1 {
                dp[tri(n, 0)] = (nf * (nf + 1.0)).sqrt() * p[tri(n, 1)];
            }
            for m in 1..=n {
                let mf = m as f64;
                let lower = if n > m {
                    ((nf * nf - mf * mf) * (2.0 * nf + 1.0) / (2.0 * nf - 1.0)).sqrt() * q[tri(n - 1, m)]
                } else {
                    0.0
                };
                dp[tri(n, m)] = nf * x * q[tri(n, m)] - lower;
            }
        }
        Self { order, p, dp, q }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn p(&self, n: usize, m: usize) -> f64 {
        self.p[tri(n, m)]
    }

    #[inline]
    pub fn dp(&self, n: usize, m: usize) -> f64 {
        self.dp[tri(n, m)]
    }

    /// `P̄_n^m / sin θ`, defined for `m >= 1` (zero for `m = 0`).
    #[inline]
    pub fn p_over_sin(&self, n: usize, m: usize) -> f64 {
        self.q[tri(n, m)]
    }
}

/// All harmonics up to `order` at one direction, with the first angular
/// derivatives needed by the vector harmonics.
///
/// Entries are indexed by [`HarmonicIndex::flat`]:
/// `y = Y`, `dtheta = ∂_θ Y`, `dphi_sin = ∂_φ Y / sin θ`.
#[derive(Debug, Clone)]
pub struct HarmonicTable {
    pub order: usize,
    pub theta: f64,
    pub phi: f64,
    pub y: Vec<Complex64>,
    pub dtheta: Vec<Complex64>,
    pub dphi_sin: Vec<Complex64>,
}

impl HarmonicTable {
    pub fn new(order: usize, theta: f64, phi: f64) -> Self {
        let leg = Legendre::new(order, theta);
        let len = HarmonicIndex::count(order);
        let mut y = vec![Complex64::default(); len];
        let mut dtheta = vec![Complex64::default(); len];
        let mut dphi_sin = vec![Complex64::default(); len];
        for m in 0..=order {
            let e = Complex64::from_polar(1.0, m as f64 * phi);
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            for n in m..=order {
                let j = n * n + n + m;
                let yv = e * leg.p(n, m);
                let dt = e * leg.dp(n, m);
                let dps = e * Complex64::new(0.0, m as f64 * leg.p_over_sin(n, m));
                y[j] = yv;
                dtheta[j] = dt;
                dphi_sin[j] = dps;
                if m > 0 {
                    let jn = n * n + n - m;
                    y[jn] = yv.conj() * sign;
                    dtheta[jn] = dt.conj() * sign;
                    dphi_sin[jn] = dps.conj() * sign;
                }
            }
        }
        Self { order, theta, phi, y, dtheta, dphi_sin }
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

/// `Y_n^m(θ, φ)`.
pub fn sph_harmonic(idx: HarmonicIndex, theta: f64, phi: f64) -> Complex64 {
    let leg = Legendre::new(idx.n, theta);
    let m = idx.m.unsigned_abs() as usize;
    let v = Complex64::from_polar(leg.p(idx.n, m), m as f64 * phi);
    if idx.m >= 0 {
        v
    } else if m.is_multiple_of(2) {
        v.conj()
    } else {
        -v.conj()
    }
}

/// Values of `(T_n^m, V_n^m, W_n^m)` at one direction on the sphere of radius `R`.
#[derive(Debug, Clone, Copy)]
pub struct VectorHarmonics {
    pub t: CVec3,
    pub v: CVec3,
    pub w: CVec3,
    /// Set for `n = 0`, where `T` and `V` vanish identically.
    pub degenerate: bool,
}

pub fn vector_harmonics(idx: HarmonicIndex, theta: f64, phi: f64, radius: f64) -> VectorHarmonics {
    let table = HarmonicTable::new(idx.n, theta, phi);
    vector_harmonics_from_table(&table, idx, radius)
}

pub(crate) fn vector_harmonics_from_table(table: &HarmonicTable, idx: HarmonicIndex, radius: f64) -> VectorHarmonics {
    let [er, et, ep] = frame(table.theta, table.phi);
    let j = idx.flat();
    let mut w = CZERO3;
    axpy_rc(&mut w, &er, table.y[j] / radius);
    if idx.n == 0 {
        return VectorHarmonics { t: CZERO3, v: CZERO3, w, degenerate: true };
    }
    let c = 1.0 / (radius * ((idx.n * (idx.n + 1)) as f64).sqrt());
    let (yt, yp) = (table.dtheta[j] * c, table.dphi_sin[j] * c);
    let mut t = CZERO3;
    axpy_rc(&mut t, &et, yt);
    axpy_rc(&mut t, &ep, yp);
    let mut v = CZERO3;
    axpy_rc(&mut v, &et, yp);
    axpy_rc(&mut v, &ep, -yt);
    VectorHarmonics { t, v, w, degenerate: false }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::quadrature::SphereQuadrature;
    use crate::vec3::cinner;

    #[test]
    fn flat_index_bijection() {
        let mut expected = 0;
        for n in 0..=40usize {
            for m in -(n as i64)..=(n as i64) {
                let idx = HarmonicIndex::new(n, m).unwrap();
                assert_eq!(idx.flat(), expected);
                assert_eq!(HarmonicIndex::from_flat(expected), idx);
                expected += 1;
            }
        }
        assert_eq!(expected, HarmonicIndex::count(40));
        assert!(HarmonicIndex::new(2, 3).is_err());
    }

    #[test]
    fn low_order_closed_forms() {
        let y00 = sph_harmonic(HarmonicIndex { n: 0, m: 0 }, 0.7, 2.1);
        assert!((y00.re - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-15 && y00.im == 0.0);
        let y10 = sph_harmonic(HarmonicIndex { n: 1, m: 0 }, 0.0, 0.3);
        assert!((y10.re - (3.0 / (4.0 * PI)).sqrt()).abs() < 1e-15);
        // Y_2^1 = -sqrt(15/8π) sinθ cosθ e^{iφ}
        let (t, p) = (1.1, 0.4);
        let y21 = sph_harmonic(HarmonicIndex { n: 2, m: 1 }, t, p);
        let exact = Complex64::from_polar(-(15.0 / (8.0 * PI)).sqrt() * t.sin() * t.cos(), p);
        assert!((y21 - exact).norm() < 1e-14);
        let y2m1 = sph_harmonic(HarmonicIndex { n: 2, m: -1 }, t, p);
        assert!((y2m1 + exact.conj()).norm() < 1e-14);
    }

    #[test]
    fn theta_derivative_matches_finite_difference() {
        let h = 1e-6;
        for &theta in &[0.3, 1.2, 2.9] {
            let a = HarmonicTable::new(8, theta, 0.7);
            let plus = HarmonicTable::new(8, theta + h, 0.7);
            let minus = HarmonicTable::new(8, theta - h, 0.7);
            for j in 0..a.y.len() {
                let fd = (plus.y[j] - minus.y[j]) / (2.0 * h);
                assert!((fd - a.dtheta[j]).norm() < 1e-7, "j={j}");
                let m = HarmonicIndex::from_flat(j).m as f64;
                let dps = a.y[j] * Complex64::new(0.0, m / theta.sin());
                assert!((dps - a.dphi_sin[j]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn orthonormality_by_quadrature() {
        let quad = SphereQuadrature::new(6);
        let tables: Vec<_> = quad.nodes().iter().map(|&(t, p)| HarmonicTable::new(6, t, p)).collect();
        let len = HarmonicIndex::count(6);
        for a in 0..len {
            for b in 0..len {
                let s: Complex64 =
                    tables.iter().zip(quad.weights()).map(|(tab, w)| tab.y[a] * tab.y[b].conj() * *w).sum();
                let e = if a == b { 1.0 } else { 0.0 };
                assert!((s - e).norm() < 1e-12, "({a},{b}) -> {s}");
            }
        }
    }

    #[test]
    fn vector_harmonics_pointwise_properties() {
        let vh = vector_harmonics(HarmonicIndex { n: 0, m: 0 }, 0.4, 1.0, 2.0);
        assert!(vh.degenerate);
        let er = frame(0.4, 1.0)[0];
        for k in 0..3 {
            assert!((vh.w[k].re - er[k] / (2.0 * (4.0 * PI).sqrt())).abs() < 1e-15);
        }
        for j in 1..HarmonicIndex::count(5) {
            let idx = HarmonicIndex::from_flat(j);
            let vh = vector_harmonics(idx, 1.3, 5.0, 1.5);
            // T · V (bilinear) vanishes pointwise
            let bilinear: Complex64 = (0..3).map(|k| vh.t[k] * vh.v[k]).sum();
            assert!(bilinear.norm() < 1e-14);
            assert!(cinner(&vh.t, &vh.w).norm() < 1e-14);
        }
    }
}
