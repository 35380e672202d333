//! Spherical Hankel functions of the first kind and the logarithmic derivative
//! `z_n(t) = t h_n'(t) / h_n(t)`.
//!
//! Values are produced by upward recurrence, which is stable for `h_n^{(1)}`
//! because the Neumann part dominates once `n > t`. Quantities that only need
//! ratios (`z_n`, radial field factors) are computed from the ratio
//! `rho_n = h_n / h_{n-1}` so that very high orders never overflow.

use num_complex::Complex64;

use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn check_arg(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("spherical Hankel argument must be positive and finite, got {t}")))
    }
}

/// `h_0^{(1)}(t) = -i e^{it} / t`.
#[inline]
fn h0(t: f64) -> Complex64 {
    -I * Complex64::from_polar(1.0, t) / t
}

/// Returns `h_n^{(1)}(t)` and its derivative with respect to `t`.
pub fn spherical_hankel1(n: usize, t: f64) -> Result<(Complex64, Complex64)> {
    let seq = spherical_hankel1_seq(n + 1, t)?;
    let h = seq[n];
    // h_n' = h_{n-1} - (n+1)/t h_n, with h_{-1} = e^{it}/t for n = 0
    let prev = if n == 0 { Complex64::from_polar(1.0, t) / t } else { seq[n - 1] };
    Ok((h, prev - h * ((n + 1) as f64 / t)))
}

/// `h_0^{(1)}(t), …, h_nmax^{(1)}(t)` by upward recurrence.
pub fn spherical_hankel1_seq(nmax: usize, t: f64) -> Result<Vec<Complex64>> {
    check_arg(t)?;
    let mut out = Vec::with_capacity(nmax + 1);
    let e = Complex64::from_polar(1.0, t);
    out.push(-I * e / t);
    if nmax >= 1 {
        out.push(-e * Complex64::new(t, 1.0) / (t * t));
    }
    for n in 1..nmax {
        let next = out[n] * ((2 * n + 1) as f64 / t) - out[n - 1];
        out.push(next);
    }
    Ok(out)
}

/// Ratios `rho_n = h_n(t) / h_{n-1}(t)` for `n = 1..=nmax` (index 0 unused, set to 1).
fn hankel_ratios(nmax: usize, t: f64) -> Vec<Complex64> {
    let mut rho = Vec::with_capacity(nmax + 1);
    rho.push(Complex64::new(1.0, 0.0));
    if nmax >= 1 {
        rho.push(Complex64::new(1.0 / t, -1.0));
    }
    for n in 1..nmax {
        let next = Complex64::new((2 * n + 1) as f64 / t, 0.0) - rho[n].inv();
        rho.push(next);
    }
    rho
}

/// Logarithmic derivative `z_n(t) = t h_n^{(1)'}(t) / h_n^{(1)}(t)`.
pub fn z_log_derivative(n: usize, t: f64) -> Result<Complex64> {
    Ok(z_sequence(n, t)?[n])
}

/// `z_0(t), …, z_nmax(t)`, via `z_n = t h_{n-1}/h_n - (n+1)`.
pub fn z_sequence(nmax: usize, t: f64) -> Result<Vec<Complex64>> {
    check_arg(t)?;
    let rho = hankel_ratios(nmax, t);
    let mut z = Vec::with_capacity(nmax + 1);
    z.push(Complex64::new(-1.0, t));
    for (n, r) in rho.iter().enumerate().skip(1) {
        z.push(t / r - (n + 1) as f64);
    }
    Ok(z)
}

/// Radial factors of outgoing waves normalised on a reference sphere.
///
/// For a wavenumber `kappa` and reference radius `r_ref` this evaluates, for
/// every order `n <= nmax`, the ratio `q_n(r) = h_n(kappa r) / h_n(kappa r_ref)`
/// together with `z_n(kappa r)`. The reference ratios are tabulated once.
#[derive(Debug, Clone)]
pub struct RadialTable {
    kappa: f64,
    r_ref: f64,
    nmax: usize,
    rho_ref: Vec<Complex64>,
}

/// Radial factors at one radius.
#[derive(Debug, Clone)]
pub struct RadialValues {
    pub q: Vec<Complex64>,
    pub z: Vec<Complex64>,
}

impl RadialTable {
    pub fn new(kappa: f64, r_ref: f64, nmax: usize) -> Result<Self> {
        check_arg(kappa * r_ref)?;
        Ok(Self { kappa, r_ref, nmax, rho_ref: hankel_ratios(nmax, kappa * r_ref) })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn nmax(&self) -> usize {
        self.nmax
    }

    /// Values of `q_n(r)` and `z_n(kappa r)` for all `n <= nmax`.
    pub fn eval(&self, r: f64) -> Result<RadialValues> {
        let t = self.kappa * r;
        check_arg(t)?;
        let t_ref = self.kappa * self.r_ref;
        let rho = hankel_ratios(self.nmax, t);
        let mut q = Vec::with_capacity(self.nmax + 1);
        let mut z = Vec::with_capacity(self.nmax + 1);
        q.push(h0(t) / h0(t_ref));
        z.push(Complex64::new(-1.0, t));
        for n in 1..=self.nmax {
            q.push(q[n - 1] * rho[n] / self.rho_ref[n]);
            z.push(t / rho[n] - (n + 1) as f64);
        }
        Ok(RadialValues { q, z })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1e-300)
    }

    #[test]
    fn closed_forms_low_order() {
        let (h, _) = spherical_hankel1(0, 1.0).unwrap();
        assert!(close(h, Complex64::new(1f64.sin(), -1f64.cos()), 1e-14));
        let (h, _) = spherical_hankel1(0, std::f64::consts::PI).unwrap();
        assert!(close(h, Complex64::new(0.0, 1.0 / std::f64::consts::PI), 1e-14));
        for &t in &[0.3, 1.0, 2.5, 11.0] {
            let e = Complex64::from_polar(1.0, t);
            let (h1, dh1) = spherical_hankel1(1, t).unwrap();
            let exact = -e * Complex64::new(t, 1.0) / (t * t);
            assert!(close(h1, exact, 1e-13));
            // d/dt of -e^{it}(t+i)/t^2 = e^{it}(-i t^2 + 2 i ... ) evaluated by hand:
            // derivative = -e^{it}[ i(t+i)/t^2 + 1/t^2 - 2(t+i)/t^3 ]
            let exact_d = -e
                * (I * Complex64::new(t, 1.0) / (t * t) + 1.0 / (t * t) - Complex64::new(t, 1.0) * 2.0 / (t * t * t));
            assert!(close(dh1, exact_d, 1e-13));
        }
    }

    #[test]
    fn z0_closed_form() {
        for &t in &[0.1, 0.5, 1.0, 7.0, 30.0] {
            let z = z_log_derivative(0, t).unwrap();
            assert!((z - Complex64::new(-1.0, t)).norm() < 1e-14);
        }
    }

    #[test]
    fn z_matches_direct_quotient_moderate_orders() {
        for &t in &[0.7, 3.0, 12.0] {
            for n in 0..15 {
                let (h, dh) = spherical_hankel1(n, t).unwrap();
                let direct = dh * t / h;
                let z = z_log_derivative(n, t).unwrap();
                assert!(close(z, direct, 1e-10), "n={n} t={t}: {z} vs {direct}");
            }
        }
    }

    #[test]
    fn non_positive_argument_rejected() {
        assert!(spherical_hankel1(2, 0.0).is_err());
        assert!(z_log_derivative(2, -1.0).is_err());
        assert!(RadialTable::new(1.0, 0.0, 3).is_err());
    }

    #[test]
    fn radial_ratio_is_one_at_reference() {
        let table = RadialTable::new(2.0, 1.3, 25).unwrap();
        let vals = table.eval(1.3).unwrap();
        for q in &vals.q {
            assert!((q - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
        let vals = table.eval(0.9).unwrap();
        for n in 0..=10 {
            let a = spherical_hankel1(n, 1.8).unwrap().0;
            let b = spherical_hankel1(n, 2.6).unwrap().0;
            assert!(close(vals.q[n], a / b, 1e-11));
        }
    }
}
