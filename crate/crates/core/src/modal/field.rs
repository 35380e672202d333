//! Pointwise evaluation of outgoing elastic waves expanded in potentials
//! normalised on `Γ_R`, including analytic displacement gradients.
//!
//! Each unknown of the potential expansion contributes a vector field
//! `a_T T + a_V V + a_W W` with radially varying coefficients built from
//! `q_n(r) = h_n(κr)/h_n(κR)` and `z_n(κr)`. Gradients are assembled from
//! the spherical partials `∂_r`, `∂_θ / r` and `∂_φ / (r sinθ)`.

use num_complex::Complex64;

use super::coeffs::{unknown_count, unknown_position, Medium, PotentialCoeffs};
use crate::error::{Error, Result};
use crate::specfun::{frame, HarmonicTable, RadialTable, SphericalPoint};
use crate::vec3::{CVec3, Vec3, CZERO3};

pub type CMat3 = [[Complex64; 3]; 3];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
/// Angles closer than this to a pole are nudged so `1/sinθ` stays finite.
const POLE_EPS: f64 = 1e-9;

/// What to compute alongside the values.
#[derive(Debug, Clone, Copy)]
pub enum Derivative<'a> {
    None,
    /// `(d · ∇) v` for the given direction.
    Directional(&'a Vec3),
    /// Full gradient `G[i][j] = ∂v_i / ∂x_j`.
    Full,
}

/// Outgoing basis of a fixed medium, reference radius and truncation.
#[derive(Debug, Clone)]
pub struct RadiatingBasis {
    medium: Medium,
    radius: f64,
    order: usize,
    radial_p: RadialTable,
    radial_s: RadialTable,
}

/// A displacement sample and (optionally) its gradient.
#[derive(Debug, Clone, Copy)]
pub struct FieldSample {
    pub value: CVec3,
    pub gradient: Option<CMat3>,
    /// The point lies strictly inside `Γ_R`, where the series is only an
    /// extrapolation of the exterior field.
    pub inside_reference: bool,
}

impl RadiatingBasis {
    pub fn new(medium: &Medium, radius: f64, order: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Invalid(format!("reference radius must be positive, got {radius}")));
        }
        Ok(Self {
            medium: *medium,
            radius,
            order,
            radial_p: RadialTable::new(medium.kappa_p, radius, order)?,
            radial_s: RadialTable::new(medium.kappa_s, radius, order)?,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn medium(&self) -> &Medium {
        &self.medium
    }

    pub fn unknowns(&self) -> usize {
        unknown_count(self.order)
    }

    /// Fields of every basis unknown at `x`.
    ///
    /// `values[u]` receives the displacement of unknown `u`; `derivs[u]`, when
    /// given, receives the requested derivative (directional vector in
    /// `derivs[u][0]`, or the full gradient).
    pub fn eval_into(
        &self,
        x: &Vec3,
        values: &mut [CVec3],
        mut derivs: Option<&mut [CMat3]>,
        mode: Derivative<'_>,
    ) -> Result<()> {
        let nu = self.unknowns();
        assert!(values.len() >= nu);
        if let Some(d) = derivs.as_deref() {
            assert!(d.len() >= nu);
        }
        let sp = SphericalPoint::from_cartesian(x);
        let r = sp.r;
        if !(r > 0.0) {
            return Err(Error::Domain("cannot evaluate a radiating field at the origin".into()));
        }
        let theta = sp.theta.clamp(POLE_EPS, std::f64::consts::PI - POLE_EPS);
        let phi = sp.phi;
        let [er, et, ep] = frame(theta, phi);
        let (st, ct) = theta.sin_cos();
        let cot = ct / st;
        let tab = HarmonicTable::new(self.order, theta, phi);
        let rp = self.radial_p.eval(r)?;
        let rs = self.radial_s.eval(r)?;
        let tp2 = (self.medium.kappa_p * r).powi(2);
        let ts2 = (self.medium.kappa_s * r).powi(2);
        let ks2r = self.medium.kappa_s * self.medium.kappa_s * self.radius;
        let big_r = self.radius;
        let want = !matches!(mode, Derivative::None) && derivs.is_some();

        // weights turning spherical partials into the requested derivative
        let (wr, wt, wp) = match mode {
            Derivative::Directional(d) => {
                let d = *d;
                (crate::vec3::dot(&d, &er), crate::vec3::dot(&d, &et) / r, crate::vec3::dot(&d, &ep) / r)
            }
            _ => (0.0, 0.0, 0.0),
        };

        let to_cart = |c: [Complex64; 3]| -> CVec3 {
            let mut out = CZERO3;
            for i in 0..3 {
                out[i] = c[0] * er[i] + c[1] * et[i] + c[2] * ep[i];
            }
            out
        };

        let mut emit = |u: usize, val: [Complex64; 3], dr: [Complex64; 3], dt: [Complex64; 3], dps: [Complex64; 3]| {
            values[u] = to_cart(val);
            if !want {
                return;
            }
            let d = &mut derivs.as_deref_mut().unwrap()[u];
            match mode {
                Derivative::Directional(_) => {
                    let mut c = [ZERO; 3];
                    for k in 0..3 {
                        c[k] = dr[k] * wr + dt[k] * wt + dps[k] * wp;
                    }
                    d[0] = to_cart(c);
                }
                Derivative::Full => {
                    let gr = to_cart(dr);
                    let gt = to_cart(dt);
                    let gp = to_cart(dps);
                    for i in 0..3 {
                        for j in 0..3 {
                            d[i][j] = gr[i] * er[j] + (gt[i] * et[j] + gp[i] * ep[j]) / r;
                        }
                    }
                }
                Derivative::None => {}
            }
        };

        for j in 0..tab.len() {
            let idx = crate::specfun::HarmonicIndex::from_flat(j);
            let n = idx.n;
            let mf = idx.m as f64;
            let im = Complex64::new(0.0, mf);
            let nn = (n * (n + 1)) as f64;
            let y = tab.y[j];
            let yt = tab.dtheta[j];
            let yps = tab.dphi_sin[j];
            let (qp, zp) = (rp.q[n], rp.z[n]);
            let (qs, zs) = (rs.q[n], rs.z[n]);

            // components in (e_r, e_θ, e_φ); W pieces share a 1/R factor
            let w_val = [y / big_r, ZERO, ZERO];
            let w_dt = [yt / big_r, y / big_r, ZERO];
            let w_dps = [yps / big_r, ZERO, y / big_r];

            if n == 0 {
                let aw = qp * zp / r;
                let aw_r = qp * (nn - 2.0 * zp - tp2) / (r * r);
                emit(
                    unknown_position(0, 0),
                    scale3(&w_val, aw),
                    scale3(&w_val, aw_r),
                    scale3(&w_dt, aw),
                    scale3(&w_dps, aw),
                );
                continue;
            }

            let s = nn.sqrt();
            let c = 1.0 / (big_r * s);
            let ytt = -cot * yt + (mf * mf / (st * st) - nn) * y;
            let ytps = im * yt / st - cot * yps;

            let t_val = [ZERO, yt * c, yps * c];
            let t_dt = [-yt * c, ytt * c, ytps * c];
            let t_dps = [-yps * c, (im * yt / st - cot * yps) * c, (cot * yt + im * yps / st) * c];

            let v_val = [ZERO, yps * c, -yt * c];
            let v_dt = [-yps * c, ytps * c, -ytt * c];
            let v_dps = [yt * c, (cot * yt + im * yps / st) * c, (-im * yt / st + cot * yps) * c];

            let combine = |at: Complex64,
                           av: Complex64,
                           aw: Complex64,
                           t: &[Complex64; 3],
                           v: &[Complex64; 3],
                           w: &[Complex64; 3]| {
                let mut out = [ZERO; 3];
                for k in 0..3 {
                    out[k] = at * t[k] + av * v[k] + aw * w[k];
                }
                out
            };

            // φ
            let at = qp * (s / r);
            let aw = qp * zp / r;
            let at_r = qp * (zp - 1.0) * (s / (r * r));
            let aw_r = qp * (nn - 2.0 * zp - tp2) / (r * r);
            emit(
                unknown_position(j, 0),
                combine(at, ZERO, aw, &t_val, &v_val, &w_val),
                combine(at_r, ZERO, aw_r, &t_val, &v_val, &w_val),
                combine(at, ZERO, aw, &t_dt, &v_dt, &w_dt),
                combine(at, ZERO, aw, &t_dps, &v_dps, &w_dps),
            );

            // ψ₂
            let at = qs * (zs + 1.0) / r;
            let aw = qs * (s / r);
            let at_r = qs * (nn - ts2 - 1.0 - zs) / (r * r);
            let aw_r = qs * (zs - 1.0) * (s / (r * r));
            emit(
                unknown_position(j, 1),
                combine(at, ZERO, aw, &t_val, &v_val, &w_val),
                combine(at_r, ZERO, aw_r, &t_val, &v_val, &w_val),
                combine(at, ZERO, aw, &t_dt, &v_dt, &w_dt),
                combine(at, ZERO, aw, &t_dps, &v_dps, &w_dps),
            );

            // ψ₃
            let av = qs * (ks2r / s);
            let av_r = qs * zs * (ks2r / (s * r));
            emit(
                unknown_position(j, 2),
                combine(ZERO, av, ZERO, &t_val, &v_val, &w_val),
                combine(ZERO, av_r, ZERO, &t_val, &v_val, &w_val),
                combine(ZERO, av, ZERO, &t_dt, &v_dt, &w_dt),
                combine(ZERO, av, ZERO, &t_dps, &v_dps, &w_dps),
            );
        }
        Ok(())
    }

    /// Field of a full potential expansion at `x`.
    pub fn eval_field(&self, p: &PotentialCoeffs, x: &Vec3, with_gradient: bool) -> Result<FieldSample> {
        if p.order != self.order {
            return Err(Error::Invalid(format!(
                "potential order {} does not match basis order {}",
                p.order, self.order
            )));
        }
        let nu = self.unknowns();
        let coeffs = p.to_unknowns();
        let mut vals = vec![CZERO3; nu];
        let mut grads = if with_gradient { vec![[CZERO3; 3]; nu] } else { Vec::new() };
        let mode = if with_gradient { Derivative::Full } else { Derivative::None };
        self.eval_into(x, &mut vals, with_gradient.then_some(grads.as_mut_slice()), mode)?;
        let mut value = CZERO3;
        let mut gradient = [CZERO3; 3];
        for (u, c) in coeffs.iter().enumerate() {
            if *c == ZERO {
                continue;
            }
            for i in 0..3 {
                value[i] += vals[u][i] * c;
                if with_gradient {
                    for k in 0..3 {
                        gradient[i][k] += grads[u][i][k] * c;
                    }
                }
            }
        }
        Ok(FieldSample {
            value,
            gradient: with_gradient.then_some(gradient),
            inside_reference: crate::vec3::norm(x) < self.radius * (1.0 - 1e-12),
        })
    }

    /// Scalar potential `φ(x)` and its radial derivative.
    pub fn scalar_potential(&self, p: &PotentialCoeffs, x: &Vec3) -> Result<(Complex64, Complex64)> {
        let sp = SphericalPoint::from_cartesian(x);
        let tab = HarmonicTable::new(p.order.min(self.order), sp.theta, sp.phi);
        let rv = self.radial_p.eval(sp.r)?;
        let mut phi = ZERO;
        let mut dphi = ZERO;
        for j in 0..tab.len() {
            let n = crate::specfun::HarmonicIndex::from_flat(j).n;
            let term = rv.q[n] * p.blocks[j][0] * tab.y[j] / self.radius;
            phi += term;
            dphi += term * rv.z[n] / sp.r;
        }
        Ok((phi, dphi))
    }

    /// Vector potential `ψ(x)` in Cartesian components.
    pub fn vector_potential(&self, p: &PotentialCoeffs, x: &Vec3) -> Result<CVec3> {
        let sp = SphericalPoint::from_cartesian(x);
        let theta = sp.theta.clamp(POLE_EPS, std::f64::consts::PI - POLE_EPS);
        let [er, et, ep] = frame(theta, sp.phi);
        let tab = HarmonicTable::new(p.order.min(self.order), theta, sp.phi);
        let rv = self.radial_s.eval(sp.r)?;
        let (r, big_r) = (sp.r, self.radius);
        let mut sph = [ZERO; 3];
        for j in 1..tab.len() {
            let n = crate::specfun::HarmonicIndex::from_flat(j).n;
            let s = ((n * (n + 1)) as f64).sqrt();
            let (q, z) = (rv.q[n], rv.z[n]);
            let b = p.blocks[j];
            let at = q * (z + 1.0) * b[2] * (big_r / (r * s));
            let av = q * b[1];
            let aw = q * b[2] * (big_r / r);
            let c = 1.0 / (big_r * s);
            let (yt, yps) = (tab.dtheta[j], tab.dphi_sin[j]);
            sph[0] += aw * tab.y[j] / big_r;
            sph[1] += (at * yt + av * yps) * c;
            sph[2] += (at * yps - av * yt) * c;
        }
        let mut out = CZERO3;
        for i in 0..3 {
            out[i] = sph[0] * er[i] + sph[1] * et[i] + sph[2] * ep[i];
        }
        Ok(out)
    }
}

#[inline]
fn scale3(v: &[Complex64; 3], a: Complex64) -> [Complex64; 3] {
    [v[0] * a, v[1] * a, v[2] * a]
}

/// Displacement (and gradient) of the radiating field with potentials `p` at `x`.
pub fn eval_radiating_field(
    p: &PotentialCoeffs,
    med: &Medium,
    radius: f64,
    x: &Vec3,
    with_gradient: bool,
) -> Result<FieldSample> {
    RadiatingBasis::new(med, radius, p.order)?.eval_field(p, x, with_gradient)
}

/// Boundary operator `ℬu = μ ∂_r u + (λ+μ)(∇·u) e_r` from a gradient, at a point `x`.
pub fn radial_traction(med: &Medium, x: &Vec3, grad: &CMat3) -> CVec3 {
    let er = crate::vec3::scale(x, 1.0 / crate::vec3::norm(x));
    let div = grad[0][0] + grad[1][1] + grad[2][2];
    let mut out = CZERO3;
    for i in 0..3 {
        let dr: Complex64 = (0..3).map(|k| grad[i][k] * er[k]).sum();
        out[i] = dr * med.mu + div * (med.lambda + med.mu) * er[i];
    }
    out
}

/// Traction `μ ∂_ν u + (λ+μ)(∇·u) ν` for a unit normal `nu`.
pub fn generalized_traction(med: &Medium, nu: &Vec3, grad: &CMat3) -> CVec3 {
    let div = grad[0][0] + grad[1][1] + grad[2][2];
    let mut out = CZERO3;
    for i in 0..3 {
        let dn: Complex64 = (0..3).map(|k| grad[i][k] * nu[k]).sum();
        out[i] = dn * med.mu + div * (med.lambda + med.mu) * nu[i];
    }
    out
}
