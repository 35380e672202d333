//! `jacobian-dump`: the shape Jacobian at one surface, frequency and incident wave.

use std::path::Path;

use anyhow::{Context, Result};
use elastiscat::derivative::evaluate;
use elastiscat::forward::{BoundarySystem, MeasurementOperator, SolverOptions};
use elastiscat::geometry::{CoeffIndex, Part, SurfaceParam};
use elastiscat::specfun::fibonacci_sphere;
use elastiscat::vec3::Vec3;
use serde::Serialize;

use crate::args::{self, incident};
use crate::config::{Command, JacobianConfig, RunConfig};

#[derive(Serialize)]
struct Coefficient {
    index: usize,
    coord: usize,
    part: &'static str,
    n: usize,
    m: i64,
}

#[derive(Serialize)]
struct JacobianFile {
    schema: u32,
    omega: f64,
    surface: SurfaceParam,
    solver_order: usize,
    boundary_residual: f64,
    points: Vec<Vec3>,
    coefficients: Vec<Coefficient>,
    /// Per coefficient: `[re, im]` of `u′` at each point, components interleaved.
    columns: Vec<Vec<[f64; 2]>>,
}

pub fn run(cfg: JacobianConfig, out: &Path) -> Result<()> {
    let surface = args::parse_surface(&cfg.surface, cfg.shape_order)?;
    let wave = incident(cfg.wave, cfg.direction)?;
    let med = cfg.medium.at(cfg.omega)?;
    args::prepare_out_dir(out)?;
    let points = fibonacci_sphere(cfg.points, cfg.radius);
    let opts = SolverOptions { order: cfg.solver_order, ..Default::default() };
    let sys = BoundarySystem::new(&surface, &med, cfg.radius, &opts).context("setting up the forward solve")?;
    let meas = MeasurementOperator::new(sys.basis(), &points)?;
    let ev = evaluate(&surface, &sys, &meas, &wave, &med, true)?;
    let jac = ev.jacobian.expect("requested");
    let order = surface.order();
    let coefficients = (0..jac.coeffs())
        .map(|i| {
            let ix = CoeffIndex::decode(i, order)?;
            Ok(Coefficient {
                index: i,
                coord: ix.coord,
                part: if ix.part == Part::Re { "re" } else { "im" },
                n: ix.harmonic.n,
                m: ix.harmonic.m,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let columns = (0..jac.coeffs()).map(|i| jac.column(i).iter().flatten().map(|c| [c.re, c.im]).collect()).collect();
    let file = JacobianFile {
        schema: 1,
        omega: cfg.omega,
        solver_order: sys.order(),
        boundary_residual: ev.relative_residual,
        surface,
        points,
        coefficients,
        columns,
    };
    args::write_json(&out.join("jacobian.json"), &file)?;
    eprintln!(
        "jacobian-dump: {} points x {} coefficients, boundary residual {:.2e}",
        cfg.points,
        jac.coeffs(),
        ev.relative_residual
    );
    RunConfig::new(Command::JacobianDump(cfg)).write(out)
}
