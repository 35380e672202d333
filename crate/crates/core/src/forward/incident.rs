//! Plane incident waves.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modal::{CMat3, Medium};
use crate::vec3::{dot, norm, CVec3, Vec3, CZERO3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveKind {
    Compressional,
    Shear,
}

/// `d e^{iκ_p x·d}` (compressional) or `d⊥ e^{iκ_s x·d}` (shear).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncidentWave {
    pub kind: WaveKind,
    pub direction: Vec3,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polarization: Option<Vec3>,
}

const UNIT_TOL: f64 = 1e-12;

impl IncidentWave {
    pub fn compressional(direction: Vec3) -> Result<Self> {
        let w = Self { kind: WaveKind::Compressional, direction, polarization: None };
        w.validate()?;
        Ok(w)
    }

    pub fn shear(direction: Vec3, polarization: Vec3) -> Result<Self> {
        let w = Self { kind: WaveKind::Shear, direction, polarization: Some(polarization) };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if (norm(&self.direction) - 1.0).abs() > UNIT_TOL {
            return Err(Error::Invalid(format!("incident direction {:?} is not a unit vector", self.direction)));
        }
        match (self.kind, self.polarization) {
            (WaveKind::Compressional, _) => Ok(()),
            (WaveKind::Shear, None) => Err(Error::Invalid("shear wave needs a polarization".into())),
            (WaveKind::Shear, Some(p)) => {
                if (norm(&p) - 1.0).abs() > UNIT_TOL || dot(&p, &self.direction).abs() > UNIT_TOL {
                    Err(Error::Invalid(format!(
                        "shear polarization {p:?} must be a unit vector orthogonal to the direction"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }

    fn amplitude_and_wavenumber(&self, med: &Medium) -> (Vec3, f64) {
        match self.kind {
            WaveKind::Compressional => (self.direction, med.kappa_p),
            WaveKind::Shear => (self.polarization.unwrap_or([0.0; 3]), med.kappa_s),
        }
    }
}

/// Incident displacement and its gradient `G[i][j] = ∂u_i/∂x_j` at `x`.
pub fn incident_field(w: &IncidentWave, med: &Medium, x: &Vec3) -> (CVec3, CMat3) {
    let (a, k) = w.amplitude_and_wavenumber(med);
    let e = Complex64::from_polar(1.0, k * dot(x, &w.direction));
    let mut u = CZERO3;
    let mut g = [CZERO3; 3];
    for i in 0..3 {
        u[i] = e * a[i];
        for j in 0..3 {
            g[i][j] = Complex64::new(0.0, k * w.direction[j]) * u[i];
        }
    }
    (u, g)
}

/// Unit vectors pointing to the origin from the face centres of a cube.
pub fn cube_face_directions() -> Vec<Vec3> {
    vec![[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0], [0.0, 0.0, 1.0]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(IncidentWave::compressional([0.0, 2.0, 0.0]).is_err());
        assert!(IncidentWave::shear([0.0, 1.0, 0.0], [0.0, 1.0, 0.0]).is_err());
        assert!(IncidentWave::shear([0.0, 1.0, 0.0], [1.0, 0.0, 0.0]).is_ok());
    }

    #[test]
    fn zero_phase_and_unimodular() {
        let med = Medium::new(2.0, 1.0, 2.0).unwrap();
        let w = IncidentWave::compressional([0.0, 1.0, 0.0]).unwrap();
        let (u, _) = incident_field(&w, &med, &[0.4, 0.0, -0.3]);
        assert!((u[1] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let (u, _) = incident_field(&w, &med, &[0.4, 0.7, -0.3]);
        let n: f64 = u.iter().map(|c| c.norm_sqr()).sum();
        assert!((n - 1.0).abs() < 1e-14);
    }
}
