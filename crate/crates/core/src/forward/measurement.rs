//! Displacement measurements on `Γ_R`, the scattering operator and the noise model.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::incident::{incident_field, IncidentWave};
use super::solver::{BoundarySystem, MeasurementOperator, SolverOptions};
use crate::error::{Error, Result};
use crate::geometry::SurfaceParam;
use crate::modal::Medium;
use crate::vec3::{norm, CVec3, Vec3};

/// Total displacement sampled at points of the measurement sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    pub radius: f64,
    pub medium: Medium,
    pub incident: IncidentWave,
    pub points: Vec<Vec3>,
    pub u: Vec<CVec3>,
    pub delta: f64,
    pub seed: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct MeasurementFile {
    schema: u32,
    #[serde(rename = "R")]
    radius: f64,
    omega: f64,
    lambda: f64,
    mu: f64,
    incident: IncidentWave,
    points: Vec<Vec3>,
    u: Vec<[[f64; 2]; 3]>,
    delta: f64,
    seed: Option<u64>,
}

impl Serialize for MeasurementSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MeasurementFile {
            schema: 1,
            radius: self.radius,
            omega: self.medium.omega,
            lambda: self.medium.lambda,
            mu: self.medium.mu,
            incident: self.incident,
            points: self.points.clone(),
            u: self.u.iter().map(|v| v.map(|c| [c.re, c.im])).collect(),
            delta: self.delta,
            seed: self.seed,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MeasurementSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let f = MeasurementFile::deserialize(d)?;
        if f.schema != 1 {
            return Err(D::Error::custom(format!("unsupported measurement schema {}", f.schema)));
        }
        let medium = Medium::new(f.lambda, f.mu, f.omega).map_err(D::Error::custom)?;
        let ms = MeasurementSet {
            radius: f.radius,
            medium,
            incident: f.incident,
            points: f.points,
            u: f.u.iter().map(|v| v.map(|[re, im]| Complex64::new(re, im))).collect(),
            delta: f.delta,
            seed: f.seed,
        };
        ms.validate().map_err(D::Error::custom)?;
        Ok(ms)
    }
}

impl MeasurementSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::Invalid("measurement set has no points".into()));
        }
        if self.points.len() != self.u.len() {
            return Err(Error::Invalid(format!(
                "{} points but {} displacement samples",
                self.points.len(),
                self.u.len()
            )));
        }
        if let Some(p) = self.points.iter().find(|p| (norm(p) - self.radius).abs() > 1e-9 * self.radius) {
            return Err(Error::Invalid(format!("point {p:?} is not on the sphere of radius {}", self.radius)));
        }
        self.incident.validate()
    }
}

/// Total field `u^inc + v` at `points` scattered by the rigid obstacle `sp`.
pub fn scattering_operator(
    sp: &SurfaceParam,
    wave: &IncidentWave,
    med: &Medium,
    radius: f64,
    points: &[Vec3],
    opts: &SolverOptions,
) -> Result<MeasurementSet> {
    let sys = BoundarySystem::new(sp, med, radius, opts)?;
    let meas = MeasurementOperator::new(sys.basis(), points)?;
    measure_with(&sys, &meas, wave, med, radius)
}

/// Scattering operator on a prepared system and measurement operator.
pub fn measure_with(
    sys: &BoundarySystem,
    meas: &MeasurementOperator,
    wave: &IncidentWave,
    med: &Medium,
    radius: f64,
) -> Result<MeasurementSet> {
    let data: Vec<CVec3> = sys.sample().points.iter().map(|x| incident_field(wave, med, x).0.map(|c| -c)).collect();
    let sol = sys.solve(&data)?;
    let x = faer::Mat::from_fn(sol.potentials.to_unknowns().len(), 1, {
        let c = sol.potentials.to_unknowns();
        move |r, _| c[r]
    });
    let v = meas.apply(x.as_ref());
    let u = meas
        .points
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let ui = incident_field(wave, med, p).0;
            [ui[0] + v[(3 * k, 0)], ui[1] + v[(3 * k + 1, 0)], ui[2] + v[(3 * k + 2, 0)]]
        })
        .collect();
    Ok(MeasurementSet { radius, medium: *med, incident: *wave, points: meas.points.clone(), u, delta: 0.0, seed: None })
}

/// Multiplies every complex component by `1 + δ·rand`, `rand ~ U[−1, 1]`.
pub fn add_noise(ms: &MeasurementSet, delta: f64, seed: u64) -> Result<MeasurementSet> {
    if !(delta >= 0.0) {
        return Err(Error::Invalid(format!("noise level must be non-negative, got {delta}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ms.clone();
    for v in &mut out.u {
        for c in v.iter_mut() {
            let r: f64 = rng.gen_range(-1.0..=1.0);
            *c *= 1.0 + delta * r;
        }
    }
    out.delta = delta;
    out.seed = Some(seed);
    Ok(out)
}
