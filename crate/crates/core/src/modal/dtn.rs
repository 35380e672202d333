//! Dirichlet-to-Neumann blocks and the transparent boundary operators on `Γ_R`.
//!
//! `G_n` and `M_n` are stored exactly as displayed in the literature. Their row
//! (and for `M_n` also column) order is `(V, T, W)`: the first row of `G_n`
//! only couples `ψ₃` and produces the `V` component of `ℬv`, and `M_n[0][0]`
//! maps `v_V` to `b_V`. [`apply_t`] and [`boundary_operator_from_potentials`]
//! handle the permutation and work in the `(T, V, W)` basis throughout.

use num_complex::Complex64;

use super::coeffs::{displacement_block_to_potential, trace_z, Block, DisplacementCoeffs, Medium, PotentialCoeffs};
use crate::error::{Error, Result};
use crate::specfun::HarmonicIndex;

pub type Mat3 = [[Complex64; 3]; 3];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `Λ_n = z_n(κ_p R)(1 + z_n(κ_s R)) − n(n+1)`.
pub fn lambda_n(med: &Medium, radius: f64, n: usize) -> Result<Complex64> {
    let (zp, zs) = trace_z(med, radius, n)?;
    Ok(lambda_from_z(n, zp[n], zs[n]))
}

#[inline]
fn lambda_from_z(n: usize, zp: Complex64, zs: Complex64) -> Complex64 {
    zp * (zs + 1.0) - (n * (n + 1)) as f64
}

fn g_from_z(med: &Medium, radius: f64, n: usize, zp: Complex64, zs: Complex64) -> Mat3 {
    let nn = (n * (n + 1)) as f64;
    let s = nn.sqrt();
    let (mu, lam) = (med.mu, med.lambda);
    let kp2 = (med.kappa_p * radius).powi(2);
    let ks2 = (med.kappa_s * radius).powi(2);
    let g13 = zs * (mu * ks2 / s);
    let g21 = (zp - 1.0) * (mu * s);
    let g22 = (-zs + (nn - ks2 - 1.0)) * mu;
    let g31 = (-zp * 2.0 + (nn - kp2)) * mu - (lam + mu) * kp2;
    let g32 = (zs - 1.0) * (mu * s);
    [[ZERO, ZERO, g13], [g21, g22, ZERO], [g31, g32, ZERO]]
}

fn m_from_z(med: &Medium, radius: f64, n: usize, zp: Complex64, zs: Complex64) -> Mat3 {
    let nn = (n * (n + 1)) as f64;
    let s = nn.sqrt();
    let mr = med.mu / radius;
    let pr = (med.lambda + 2.0 * med.mu) / radius;
    let kp2 = (med.kappa_p * radius).powi(2);
    let ks2 = (med.kappa_s * radius).powi(2);
    let lam = lambda_from_z(n, zp, zs);
    let m11 = zs * mr;
    let m22 = -(zp * ks2 / lam + 1.0) * mr;
    let m23 = (Complex64::new(1.0, 0.0) + ks2 / lam) * (s * mr);
    let m32 = (kp2 / lam * pr + mr) * s;
    let m33 = -(zs + 1.0) * kp2 / lam * pr - 2.0 * mr;
    [[m11, ZERO, ZERO], [ZERO, m22, m23], [ZERO, m32, m33]]
}

/// `G_n` for `n >= 1`; rows ordered `(V, T, W)`, columns `(φ, ψ₂, ψ₃)`.
pub fn dtn_matrix_g(med: &Medium, radius: f64, n: usize) -> Result<Mat3> {
    if n == 0 {
        return Err(Error::DegenerateMode("G_0 only acts on the scalar potential; use dtn_g_scalar_n0".into()));
    }
    let (zp, zs) = trace_z(med, radius, n)?;
    Ok(g_from_z(med, radius, n, zp[n], zs[n]))
}

/// The single meaningful entry `G_31` of the `n = 0` block.
pub fn dtn_g_scalar_n0(med: &Medium, radius: f64) -> Result<Complex64> {
    let (zp, zs) = trace_z(med, radius, 0)?;
    Ok(g_from_z(med, radius, 0, zp[0], zs[0])[2][0])
}

/// `M_n`; rows and columns ordered `(V, T, W)`. At `n = 0` only `M_33` is used.
pub fn dtn_matrix_m(med: &Medium, radius: f64, n: usize) -> Result<Mat3> {
    let (zp, zs) = trace_z(med, radius, n)?;
    Ok(m_from_z(med, radius, n, zp[n], zs[n]))
}

/// `M̂_n = −(M_n + M_n^*)/2`.
pub fn hermitian_part_neg(m: &Mat3) -> Mat3 {
    let mut out = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = -(m[i][j] + m[j][i].conj()) * 0.5;
        }
    }
    out
}

/// Tabulated `Λ_n`, `G_n`, `M_n` for `n <= order`.
#[derive(Debug, Clone)]
pub struct DtnBlocks {
    pub medium: Medium,
    pub radius: f64,
    pub order: usize,
    pub zp: Vec<Complex64>,
    pub zs: Vec<Complex64>,
    pub lambda: Vec<Complex64>,
    /// `None` at `n = 0`.
    pub g: Vec<Option<Mat3>>,
    pub m: Vec<Mat3>,
}

impl DtnBlocks {
    pub fn new(med: &Medium, radius: f64, order: usize) -> Result<Self> {
        let (zp, zs) = trace_z(med, radius, order)?;
        let lambda = (0..=order).map(|n| lambda_from_z(n, zp[n], zs[n])).collect();
        let g = (0..=order).map(|n| (n > 0).then(|| g_from_z(med, radius, n, zp[n], zs[n]))).collect();
        let m = (0..=order).map(|n| m_from_z(med, radius, n, zp[n], zs[n])).collect();
        Ok(Self { medium: *med, radius, order, zp, zs, lambda, g, m })
    }

    /// `b = M_n v` with `v`, `b` in `(T, V, W)` order.
    pub fn traction_block(&self, n: usize, v: &Block) -> Block {
        let m = &self.m[n];
        if n == 0 {
            return [ZERO, ZERO, m[2][2] * v[2]];
        }
        let (vt, vv, vw) = (v[0], v[1], v[2]);
        [m[1][1] * vt + m[1][2] * vw, m[0][0] * vv, m[2][1] * vt + m[2][2] * vw]
    }

    /// `(1/R²) G_n (φ, ψ₂, ψ₃)` in `(T, V, W)` order.
    pub fn traction_from_potential_block(&self, n: usize, p: &Block) -> Block {
        let r2 = self.radius * self.radius;
        match &self.g[n] {
            None => {
                let g31 = g_from_z(&self.medium, self.radius, 0, self.zp[0], self.zs[0])[2][0];
                [ZERO, ZERO, g31 * p[0] / r2]
            }
            Some(g) => {
                let row = |i: usize| (g[i][0] * p[0] + g[i][1] * p[1] + g[i][2] * p[2]) / r2;
                [row(1), row(0), row(2)]
            }
        }
    }

    /// Potential block recovered from a displacement block.
    pub fn potential_block(&self, n: usize, v: &Block) -> Block {
        displacement_block_to_potential(n, self.zp[n], self.zs[n], self.medium.kappa_s, self.radius, v)
    }
}

/// `𝒯v`: the transparent boundary operator applied to a displacement trace.
pub fn apply_t(v: &DisplacementCoeffs, med: &Medium) -> Result<DisplacementCoeffs> {
    let tab = DtnBlocks::new(med, v.radius, v.order)?;
    let blocks =
        v.blocks.iter().enumerate().map(|(j, b)| tab.traction_block(HarmonicIndex::from_flat(j).n, b)).collect();
    Ok(DisplacementCoeffs { radius: v.radius, order: v.order, blocks })
}

/// `ℬv` of the radiating field with potentials `p`, from the modal series.
pub fn boundary_operator_from_potentials(p: &PotentialCoeffs, med: &Medium, radius: f64) -> Result<DisplacementCoeffs> {
    let tab = DtnBlocks::new(med, radius, p.order)?;
    let blocks = p
        .blocks
        .iter()
        .enumerate()
        .map(|(j, b)| tab.traction_from_potential_block(HarmonicIndex::from_flat(j).n, b))
        .collect();
    Ok(DisplacementCoeffs { radius, order: p.order, blocks })
}

/// `𝒯₁`: scalar DtN map, `(𝒯₁φ)_n^m = z_n(κ_p R) φ_n^m / R`.
///
/// `phi` holds the `X_n^m` coefficients by flat index.
pub fn apply_t1(phi: &[Complex64], med: &Medium, radius: f64) -> Result<Vec<Complex64>> {
    let order = order_of(phi.len())?;
    let zp = crate::specfun::z_sequence(order, med.kappa_p * radius)?;
    Ok(phi.iter().enumerate().map(|(j, c)| zp[HarmonicIndex::from_flat(j).n] * c / radius).collect())
}

/// `𝒯₂` on a tangential trace given by `(T, V)` coefficients per flat index.
///
/// Entries at `n = 0` must vanish (there is no tangential field there); they
/// are passed through as zero.
pub fn apply_t2(tangential: &[[Complex64; 2]], med: &Medium, radius: f64) -> Result<Vec<[Complex64; 2]>> {
    let order = order_of(tangential.len())?;
    let zs = crate::specfun::z_sequence(order, med.kappa_s * radius)?;
    let ik = Complex64::new(0.0, med.kappa_s * radius);
    tangential
        .iter()
        .enumerate()
        .map(|(j, u)| {
            let n = HarmonicIndex::from_flat(j).n;
            if n == 0 {
                return Ok([ZERO, ZERO]);
            }
            let d = zs[n] + 1.0;
            if d.norm() == 0.0 {
                return Err(Error::Domain(format!("1 + z_{n}(κ_s R) vanished")));
            }
            Ok([ik / d * u[0], d / ik * u[1]])
        })
        .collect()
}

fn order_of(len: usize) -> Result<usize> {
    let n = (len as f64).sqrt().round() as usize;
    if n == 0 || n * n != len {
        return Err(Error::Invalid(format!("coefficient length {len} is not (N+1)^2 for any order N")));
    }
    Ok(n - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modal::coeffs::potentials_to_displacement;

    fn med() -> Medium {
        Medium::new(2.0, 1.0, 2.0).unwrap()
    }

    #[test]
    fn lambda_zero_closed_form() {
        for &(om, r) in &[(2.0, 1.0), (0.7, 2.3), (5.0, 0.4)] {
            let m = Medium::new(2.0, 1.0, om).unwrap();
            let l0 = lambda_n(&m, r, 0).unwrap();
            let (a, b) = (m.kappa_p * r, m.kappa_s * r);
            let exact = Complex64::new(-a * b, -b);
            assert!((l0 - exact).norm() < 1e-13);
        }
    }

    #[test]
    fn g_sparsity_and_formulas() {
        let m = med();
        let g = dtn_matrix_g(&m, 1.0, 1).unwrap();
        for (i, j) in [(0, 0), (0, 1), (1, 2), (2, 2)] {
            assert_eq!(g[i][j], ZERO);
        }
        // independent re-evaluation for n = 1
        let zp = crate::specfun::z_log_derivative(1, 1.0).unwrap();
        let zs = crate::specfun::z_log_derivative(1, 2.0).unwrap();
        let s = 2f64.sqrt();
        assert!((g[0][2] - 4.0 * zs / s).norm() < 1e-13);
        assert!((g[1][0] - s * (zp - 1.0)).norm() < 1e-13);
        assert!((g[1][1] - (2.0 - 4.0 - 1.0 - zs)).norm() < 1e-13);
        assert!((g[2][0] - ((2.0 - 1.0 - 2.0 * zp) - 3.0)).norm() < 1e-13);
        assert!((g[2][1] - s * (zs - 1.0)).norm() < 1e-13);
        assert!(dtn_matrix_g(&m, 1.0, 0).is_err());
    }

    #[test]
    fn m_factorises_through_potentials() {
        let m = med();
        let tab = DtnBlocks::new(&m, 1.0, 30).unwrap();
        let v: Block = [Complex64::new(0.3, 0.1), Complex64::new(-1.0, 0.4), Complex64::new(0.2, -0.7)];
        for n in 1..=30 {
            let direct = tab.traction_block(n, &v);
            let p = tab.potential_block(n, &v);
            let via_g = tab.traction_from_potential_block(n, &p);
            for k in 0..3 {
                assert!((direct[k] - via_g[k]).norm() <= 1e-10 * (1.0 + direct[k].norm()), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn apply_t_matches_boe2_series() {
        let m = med();
        let mut p = PotentialCoeffs::zeros(4);
        for (j, b) in p.blocks.iter_mut().enumerate() {
            b[0] = Complex64::new(1.0 / (1.0 + j as f64), 0.5);
            if j > 0 {
                b[1] = Complex64::new(-0.2, 0.1 * j as f64);
                b[2] = Complex64::new(0.3, -0.4);
            }
        }
        let v = potentials_to_displacement(&p, &m, 1.0).unwrap();
        let tv = apply_t(&v, &m).unwrap();
        let bv = boundary_operator_from_potentials(&p, &m, 1.0).unwrap();
        for (a, b) in tv.blocks.iter().zip(&bv.blocks) {
            for k in 0..3 {
                assert!((a[k] - b[k]).norm() <= 1e-10 * (1.0 + b[k].norm()));
            }
        }
    }

    #[test]
    fn t1_and_t2_zero_and_constant_mode() {
        let m = med();
        let z = apply_t1(&[ZERO; 9], &m, 1.0).unwrap();
        assert!(z.iter().all(|c| *c == ZERO));
        let one = apply_t1(&[Complex64::new(1.0, 0.0)], &m, 1.0).unwrap();
        assert!((one[0] - Complex64::new(-1.0, m.kappa_p)).norm() < 1e-14);
        let z2 = apply_t2(&[[ZERO; 2]; 4], &m, 1.0).unwrap();
        assert!(z2.iter().flatten().all(|c| *c == ZERO));
        assert!(apply_t1(&[ZERO; 5], &m, 1.0).is_err());
    }
}
