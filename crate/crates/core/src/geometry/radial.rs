//! Radial distance of a star-shaped parametrized surface along arbitrary rays
//! from the origin, and planar cross sections built from it.

use std::f64::consts::PI;
use std::io::Write;

use super::surface::SurfaceParam;
use crate::error::{Error, Result};
use crate::specfun::HarmonicTable;
use crate::vec3::{dot, norm, scale, sub, Vec3};

/// Ray caster: coarse nearest-direction search refined by Gauss-Newton.
#[derive(Debug, Clone)]
pub struct RayCaster<'a> {
    sp: &'a SurfaceParam,
    grid: Vec<(f64, f64, Vec3)>,
}

impl<'a> RayCaster<'a> {
    pub fn new(sp: &'a SurfaceParam) -> Self {
        let nt = 24 + 4 * sp.order();
        let np = 2 * nt;
        let mut grid = Vec::with_capacity(nt * np);
        for i in 0..nt {
            let th = (i as f64 + 0.5) * PI / nt as f64;
            for j in 0..np {
                let ph = (j as f64 + 0.5) * 2.0 * PI / np as f64;
                let tab = HarmonicTable::new(sp.order(), th, ph);
                if let Ok(s) = sp.eval_with_table(&tab, 1.0) {
                    let r = norm(&s.point);
                    if r > 0.0 {
                        grid.push((th, ph, scale(&s.point, 1.0 / r)));
                    }
                }
            }
        }
        Self { sp, grid }
    }

    /// Distance from the origin to the surface along the unit direction `d`.
    pub fn radius(&self, d: &Vec3) -> Result<f64> {
        let d = scale(d, 1.0 / norm(d));
        let &(mut th, mut ph, _) = self
            .grid
            .iter()
            .max_by(|a, b| dot(&a.2, &d).total_cmp(&dot(&b.2, &d)))
            .ok_or_else(|| Error::Geometry("empty ray-casting grid".into()))?;
        let perp = |v: &Vec3| sub(v, &scale(&d, dot(v, &d)));
        let mut damping = 1e-12;
        for _ in 0..60 {
            let tab = HarmonicTable::new(self.sp.order(), th, ph);
            let s = self.sp.eval_with_table(&tab, 1.0)?;
            let f = perp(&s.point);
            let fn2 = dot(&f, &f);
            if fn2.sqrt() < 1e-14 * (1.0 + norm(&s.point)) {
                break;
            }
            let (jt, jp) = (perp(&s.d_theta), perp(&s.d_phi));
            let (a, b, c) = (dot(&jt, &jt), dot(&jt, &jp), dot(&jp, &jp));
            let (g1, g2) = (dot(&jt, &f), dot(&jp, &f));
            let scale_d = damping * (a + c);
            let (a, c) = (a + scale_d, c + scale_d);
            let det = a * c - b * b;
            if det.abs() < 1e-300 {
                damping *= 10.0;
                continue;
            }
            let dth = -(c * g1 - b * g2) / det;
            let dph = -(a * g2 - b * g1) / det;
            let (nth, nph) = (th + dth, ph + dph);
            if !(0.0..=PI).contains(&nth) {
                damping *= 10.0;
                continue;
            }
            let tab2 = HarmonicTable::new(self.sp.order(), nth, nph);
            match self.sp.eval_with_table(&tab2, 1.0) {
                Ok(s2) if dot(&perp(&s2.point), &perp(&s2.point)) < fn2 => {
                    th = nth;
                    ph = nph;
                    damping = (damping * 0.1).max(1e-14);
                }
                _ => damping *= 10.0,
            }
        }
        let tab = HarmonicTable::new(self.sp.order(), th, ph);
        let p = self.sp.eval_with_table(&tab, 1.0)?.point;
        let r = dot(&p, &d);
        if norm(&perp(&p)) > 1e-9 * (1.0 + r.abs()) || r <= 0.0 {
            return Err(Error::Geometry(format!("ray along {d:?} does not meet the surface cleanly")));
        }
        Ok(r)
    }
}

/// One sampled point of a planar cross section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionPoint {
    /// Plane `x_{axis} = 0`, axis in 0..3.
    pub axis: usize,
    pub angle: f64,
    pub u: f64,
    pub v: f64,
}

/// Cross sections along the planes `x₁ = 0`, `x₂ = 0`, `x₃ = 0`, each with
/// `count` equally spaced rays. In-plane coordinates follow the cyclic
/// order of the remaining axes.
pub fn cross_sections(sp: &SurfaceParam, count: usize) -> Result<Vec<SectionPoint>> {
    let caster = RayCaster::new(sp);
    let mut out = Vec::with_capacity(3 * count);
    for axis in 0..3 {
        let (iu, iv) = ((axis + 1) % 3, (axis + 2) % 3);
        for k in 0..count {
            let angle = 2.0 * PI * k as f64 / count as f64;
            let mut d = [0.0; 3];
            d[iu] = angle.cos();
            d[iv] = angle.sin();
            let r = caster.radius(&d)?;
            out.push(SectionPoint { axis, angle, u: r * d[iu], v: r * d[iv] });
        }
    }
    Ok(out)
}

/// Writes cross sections as CSV with columns `plane,angle,u,v`.
pub fn write_cross_sections<W: Write>(points: &[SectionPoint], mut w: W) -> Result<()> {
    writeln!(w, "plane,angle,u,v")?;
    for p in points {
        writeln!(w, "x{}=0,{:.12e},{:.12e},{:.12e}", p.axis + 1, p.angle, p.u, p.v)?;
    }
    Ok(())
}
