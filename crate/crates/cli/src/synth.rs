//! `synth`: measurement files for a known obstacle.

use std::path::Path;

use anyhow::{bail, Context, Result};
use elastiscat::forward::{add_noise, measure_with, BoundarySystem, MeasurementOperator, SolverOptions};
use elastiscat::specfun::fibonacci_sphere;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::args::{self, incident};
use crate::config::{Command, RunConfig, SynthConfig};

pub fn run(mut cfg: SynthConfig, out: &Path) -> Result<()> {
    if !(cfg.noise >= 0.0) {
        bail!("noise level must be non-negative, got {}", cfg.noise);
    }
    if cfg.points == 0 {
        bail!("need at least one measurement point");
    }
    if !(cfg.radius > 0.0) {
        bail!("measurement radius must be positive, got {}", cfg.radius);
    }
    let surface = args::parse_surface(&cfg.surface, cfg.shape_order)?;
    let waves = cfg.directions.iter().map(|d| incident(cfg.wave, *d)).collect::<Result<Vec<_>>>()?;
    args::prepare_out_dir(out)?;
    let points = fibonacci_sphere(cfg.points, cfg.radius);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let opts = SolverOptions { order: cfg.solver_order, ..Default::default() };
    cfg.files.clear();
    for (i, &omega) in cfg.freqs.iter().enumerate() {
        let med = cfg.medium.at(omega)?;
        let sys = BoundarySystem::new(&surface, &med, cfg.radius, &opts)
            .with_context(|| format!("setting up the forward solve at ω = {omega}"))?;
        let meas = MeasurementOperator::new(sys.basis(), &points)?;
        for (j, wave) in waves.iter().enumerate() {
            let file_seed = rng.next_u64();
            let clean = measure_with(&sys, &meas, wave, &med, cfg.radius)
                .with_context(|| format!("forward solve at ω = {omega}, direction {:?}", wave.direction))?;
            let ms = if cfg.noise > 0.0 { add_noise(&clean, cfg.noise, file_seed)? } else { clean };
            let name = format!("data_f{i:02}_d{j:02}.json");
            args::write_json(&out.join(&name), &ms)?;
            cfg.files.push(name);
        }
        eprintln!("synth: ω = {omega}: {} direction(s), truncation {}", waves.len(), sys.order());
    }
    args::write_json(&out.join("truth.json"), &surface)?;
    RunConfig::new(Command::Synth(cfg)).write(out)
}
