//! Surfaces `r(θ, φ)` whose Cartesian components are real spherical-harmonic series.
//!
//! Each component is `r_j = Σ a_{jn}^m Re Y_n^m + b_{jn}^m Im Y_n^m` over all
//! `|m| <= n <= N`. The coefficient vector is laid out in six blocks
//! `(a₁, b₁, a₂, b₂, a₃, b₃)` of length `(N+1)²`, each ordered by the flat
//! harmonic index. Indices in this API are 0-based.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{HarmonicIndex, HarmonicTable, SphereQuadrature};
use crate::vec3::{add, cross, dot, norm, scale, sub, Vec3};

/// Real or imaginary part of a harmonic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Part {
    Re,
    Im,
}

/// Decoded position in the coefficient vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoeffIndex {
    /// Cartesian component, 0..3.
    pub coord: usize,
    pub part: Part,
    pub harmonic: HarmonicIndex,
}

impl CoeffIndex {
    pub fn encode(&self, order: usize) -> usize {
        let block = HarmonicIndex::count(order);
        let b = 2 * self.coord + usize::from(self.part == Part::Im);
        b * block + self.harmonic.flat()
    }

    pub fn decode(i: usize, order: usize) -> Result<Self> {
        let block = HarmonicIndex::count(order);
        if i >= 6 * block {
            return Err(Error::IndexOutOfRange { index: i, len: 6 * block });
        }
        let b = i / block;
        Ok(Self {
            coord: b / 2,
            part: if b.is_multiple_of(2) { Part::Re } else { Part::Im },
            harmonic: HarmonicIndex::from_flat(i % block),
        })
    }
}

/// Coefficient vector of a parametrized closed surface.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceParam {
    order: usize,
    coeffs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SurfaceParamFile {
    schema: u32,
    #[serde(rename = "N")]
    order: usize,
    #[serde(rename = "C")]
    coeffs: Vec<f64>,
}

impl Serialize for SurfaceParam {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SurfaceParamFile { schema: 1, order: self.order, coeffs: self.coeffs.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SurfaceParam {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let f = SurfaceParamFile::deserialize(d)?;
        if f.schema != 1 {
            return Err(serde::de::Error::custom(format!("unsupported surface schema {}", f.schema)));
        }
        SurfaceParam::new(f.order, f.coeffs).map_err(serde::de::Error::custom)
    }
}

/// Point, tangents and unit outward normal of a surface at one parameter value.
#[derive(Debug, Clone, Copy)]
pub struct SurfacePoint {
    pub point: Vec3,
    pub d_theta: Vec3,
    pub d_phi: Vec3,
    pub normal: Vec3,
    /// `|∂_θ r × ∂_φ r|`.
    pub jacobian: f64,
}

impl SurfaceParam {
    pub fn new(order: usize, coeffs: Vec<f64>) -> Result<Self> {
        let want = Self::len_for(order);
        if coeffs.len() != want {
            return Err(Error::Invalid(format!(
                "surface of order {order} needs {want} coefficients, got {}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Invalid("surface coefficients must be finite".into()));
        }
        Ok(Self { order, coeffs })
    }

    pub fn zeros(order: usize) -> Self {
        Self { order, coeffs: vec![0.0; Self::len_for(order)] }
    }

    pub fn len_for(order: usize) -> usize {
        6 * HarmonicIndex::count(order)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn get(&self, ix: CoeffIndex) -> f64 {
        self.coeffs[ix.encode(self.order)]
    }

    pub fn set(&mut self, ix: CoeffIndex, value: f64) {
        let i = ix.encode(self.order);
        self.coeffs[i] = value;
    }

    /// Same surface described at a different truncation order. Raising the
    /// order zero-pads; lowering it drops the higher harmonics.
    pub fn with_order(&self, order: usize) -> Self {
        let mut out = Self::zeros(order);
        let keep = HarmonicIndex::count(order.min(self.order));
        let (src, dst) = (HarmonicIndex::count(self.order), HarmonicIndex::count(order));
        for b in 0..6 {
            out.coeffs[b * dst..b * dst + keep].copy_from_slice(&self.coeffs[b * src..b * src + keep]);
        }
        out
    }

    /// Evaluates the surface map and its first derivatives.
    ///
    /// The normal is oriented by `orientation` (`+1` keeps `∂_θ r × ∂_φ r`).
    pub fn eval_with_table(&self, tab: &HarmonicTable, orientation: f64) -> Result<SurfacePoint> {
        let block = HarmonicIndex::count(self.order);
        let st = tab.theta.sin();
        let mut p = [0.0; 3];
        let mut dt = [0.0; 3];
        let mut dp = [0.0; 3];
        let n = block.min(tab.len());
        for j in 0..3 {
            let a = &self.coeffs[2 * j * block..2 * j * block + n];
            let b = &self.coeffs[(2 * j + 1) * block..(2 * j + 1) * block + n];
            for k in 0..n {
                let (y, yt, yp) = (tab.y[k], tab.dtheta[k], tab.dphi_sin[k] * st);
                p[j] += a[k] * y.re + b[k] * y.im;
                dt[j] += a[k] * yt.re + b[k] * yt.im;
                dp[j] += a[k] * yp.re + b[k] * yp.im;
            }
        }
        let c = cross(&dt, &dp);
        let jac = norm(&c);
        if !(jac > 1e-14 * (1.0 + norm(&p)).powi(2)) {
            return Err(Error::Geometry(format!("degenerate tangents at θ={:.6}, φ={:.6}", tab.theta, tab.phi)));
        }
        Ok(SurfacePoint { point: p, d_theta: dt, d_phi: dp, normal: scale(&c, orientation / jac), jacobian: jac })
    }

    /// `∮ r · (∂_θ r × ∂_φ r) dθ dφ`, three times the signed volume. The
    /// integrand has degree `3N`, so the rule is exact.
    fn triple_volume(&self) -> Result<f64> {
        let q = SphereQuadrature::new((3 * self.order).div_ceil(2) + 1);
        let mut vol = 0.0;
        for (&(th, ph), &w) in q.nodes().iter().zip(q.weights()) {
            let tab = HarmonicTable::new(self.order, th, ph);
            let sp = self.eval_with_table(&tab, 1.0)?;
            vol += dot(&sp.point, &cross(&sp.d_theta, &sp.d_phi)) * w / th.sin();
        }
        Ok(vol)
    }

    /// Orientation sign making `∂_θ r × ∂_φ r` point outward, from the sign of
    /// the enclosed signed volume.
    pub fn orientation(&self) -> Result<f64> {
        let vol = self.triple_volume()?;
        if vol.abs() < 1e-14 {
            return Err(Error::Geometry("surface encloses no volume".into()));
        }
        Ok(vol.signum())
    }

    /// Volume enclosed by the surface.
    pub fn volume(&self) -> Result<f64> {
        Ok((self.triple_volume()? / 3.0).abs())
    }
}

/// Point, tangents and outward normal at `(θ, φ)`.
pub fn eval_surface(sp: &SurfaceParam, theta: f64, phi: f64) -> Result<SurfacePoint> {
    let tab = HarmonicTable::new(sp.order, theta, phi);
    sp.eval_with_table(&tab, sp.orientation()?)
}

/// Normal speed `q_i = ν_j · {Re|Im} Y_n^m` of coefficient `i` (0-based).
pub fn perturbation_q(i: usize, sp: &SurfaceParam, theta: f64, phi: f64, normal: &Vec3) -> Result<f64> {
    let ix = CoeffIndex::decode(i, sp.order)?;
    let y = crate::specfun::sph_harmonic(ix.harmonic, theta, phi);
    let part = match ix.part {
        Part::Re => y.re,
        Part::Im => y.im,
    };
    Ok(normal[ix.coord] * part)
}

/// Quadrature sample of a boundary surface.
#[derive(Debug, Clone)]
pub struct BoundarySample {
    pub points: Vec<Vec3>,
    pub normals: Vec<Vec3>,
    pub weights: Vec<f64>,
    pub params: Vec<(f64, f64)>,
    /// Harmonic table of each node, reused for the normal speeds.
    pub(crate) tables: Vec<HarmonicTable>,
    pub order: usize,
}

impl BoundarySample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn area(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Normal speeds of every coefficient at every node: `q[node][i]`.
    pub fn normal_speeds(&self, sp: &SurfaceParam) -> Vec<Vec<f64>> {
        let block = HarmonicIndex::count(sp.order);
        self.tables
            .iter()
            .zip(&self.normals)
            .map(|(tab, nu)| {
                let mut q = vec![0.0; 6 * block];
                for j in 0..3 {
                    for k in 0..block.min(tab.len()) {
                        q[2 * j * block + k] = nu[j] * tab.y[k].re;
                        q[(2 * j + 1) * block + k] = nu[j] * tab.y[k].im;
                    }
                }
                q
            })
            .collect()
    }
}

/// Samples `sp` on a product Gauss grid exact for harmonic products up to `order`.
///
/// Fails if the tangents degenerate or the surface is not star-shaped with
/// respect to its area centroid (a cheap self-intersection screen).
pub fn sample_boundary(sp: &SurfaceParam, order: usize) -> Result<BoundarySample> {
    let quad = SphereQuadrature::new(order.max(sp.order));
    let orient = sp.orientation()?;
    let len = quad.len();
    let mut out = BoundarySample {
        points: Vec::with_capacity(len),
        normals: Vec::with_capacity(len),
        weights: Vec::with_capacity(len),
        params: Vec::with_capacity(len),
        tables: Vec::with_capacity(len),
        order: quad.order(),
    };
    for (&(th, ph), &w) in quad.nodes().iter().zip(quad.weights()) {
        let tab = HarmonicTable::new(sp.order, th, ph);
        let s = sp.eval_with_table(&tab, orient)?;
        out.points.push(s.point);
        out.normals.push(s.normal);
        out.weights.push(w * s.jacobian / th.sin());
        out.params.push((th, ph));
        out.tables.push(tab);
    }
    let area = out.area();
    let mut centroid = [0.0; 3];
    for (p, w) in out.points.iter().zip(&out.weights) {
        centroid = add(&centroid, &scale(p, w / area));
    }
    for (p, nu) in out.points.iter().zip(&out.normals) {
        if dot(nu, &sub(p, &centroid)) <= 0.0 {
            return Err(Error::Geometry(format!("surface is not star-shaped about its centroid near {p:?}")));
        }
    }
    Ok(out)
}
