//! `invert`: frequency-continuation reconstruction from measurement files.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use anyhow::{bail, Context, Result};
use elastiscat::forward::MeasurementSet;
use elastiscat::geometry::{cross_sections, write_cross_sections, SurfaceParam};
use elastiscat::inverse::{continuation_run, surface_error, FrequencySchedule, InversionState};
use elastiscat::Error;
use serde::Serialize;

use crate::args;
use crate::config::{Command, InvertConfig, RunConfig};

#[derive(Serialize)]
struct StageSummary {
    stage: usize,
    omega: f64,
    order: usize,
    objective: f64,
    error: Option<f64>,
}

#[derive(Serialize)]
struct Summary {
    schema: u32,
    completed: bool,
    abort_reason: Option<String>,
    iterations: usize,
    final_error: Option<f64>,
    stages: Vec<StageSummary>,
}

fn load(cfg: &InvertConfig) -> Result<Vec<MeasurementSet>> {
    cfg.data
        .iter()
        .map(|p| {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing measurement file {}", p.display()))
        })
        .collect()
}

fn write_sections(sp: &SurfaceParam, count: usize, path: &Path) -> Result<()> {
    let pts = cross_sections(sp, count)?;
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write_cross_sections(&pts, BufWriter::new(f))?;
    Ok(())
}

fn write_outputs(
    state: &InversionState,
    cfg: &InvertConfig,
    truth: Option<&SurfaceParam>,
    out: &Path,
    abort: Option<String>,
) -> Result<()> {
    let err = |sp: &SurfaceParam| truth.map(|t| surface_error(sp, t)).transpose();
    let mut stages = Vec::new();
    for s in &state.snapshots {
        args::write_json(&out.join(format!("stage_{:02}.json", s.stage)), &s.surface)?;
        write_sections(&s.surface, cfg.sections, &out.join(format!("sections_stage_{:02}.csv", s.stage)))?;
        stages.push(StageSummary {
            stage: s.stage,
            omega: s.omega,
            order: s.surface.order(),
            objective: s.objective,
            error: err(&s.surface)?,
        });
    }
    args::write_json(&out.join("final.json"), &state.surface)?;
    write_sections(&state.surface, cfg.sections, &out.join("sections_final.csv"))?;
    std::fs::write(out.join("history.csv"), state.history_csv())?;
    let summary = Summary {
        schema: 1,
        completed: abort.is_none(),
        abort_reason: abort,
        iterations: state.history.len(),
        final_error: err(&state.surface)?,
        stages,
    };
    args::write_json(&out.join("summary.json"), &summary)
}

/// Returns `false` if the run was aborted (partial results are still written).
pub fn run(mut cfg: InvertConfig, out: &Path) -> Result<bool> {
    let data = load(&cfg)?;
    let truth = cfg.truth.as_deref().map(|t| args::parse_surface(t, 8)).transpose()?;
    let mut available: Vec<f64> = data.iter().map(|s| s.medium.omega).collect();
    available.sort_by(f64::total_cmp);
    available.dedup();
    let freqs = cfg.freqs.clone().unwrap_or(available.clone());
    if let Some(w) = freqs.iter().find(|w| !available.contains(w)) {
        bail!("no measurements at frequency {w}; the data cover {available:?}");
    }
    cfg.freqs = Some(freqs.clone());
    let schedule = FrequencySchedule::new(&freqs, cfg.inversion.iterations, cfg.inversion.step)?;
    // validates the bundle (radius, Lamé parameters, points) before any solve
    elastiscat::derivative::DataBundle::new(data.clone(), &cfg.inversion.solver_options())?;
    args::prepare_out_dir(out)?;
    RunConfig::new(Command::Invert(cfg.clone())).write(out)?;
    eprintln!(
        "invert: {} measurement set(s), stages at ω = {:?}, {} iterations each",
        data.len(),
        freqs,
        cfg.inversion.iterations
    );
    let (state, abort) = match continuation_run(&data, &schedule, &cfg.inversion) {
        Ok(s) => (s, None),
        Err(Error::Aborted { stage, reason, partial }) => {
            eprintln!("invert: stage {stage} aborted: {reason}");
            (*partial, Some(format!("stage {stage}: {reason}")))
        }
        Err(e) => return Err(e.into()),
    };
    let completed = abort.is_none();
    write_outputs(&state, &cfg, truth.as_ref(), out, abort)?;
    if let Some(t) = &truth {
        eprintln!("invert: relative radial error {:.4}", surface_error(&state.surface, t)?);
    }
    Ok(completed)
}
