//! Run configurations, recorded as `run.json` next to every command's output.

use std::path::{Path, PathBuf};

use anyhow::{bail, Result};
use elastiscat::inverse::{DirectionMode, InversionConfig, LineSearch, StepRule};
use elastiscat::modal::Medium;
use elastiscat::vec3::Vec3;
use serde::{Deserialize, Serialize};

use crate::args::{self, WaveArg};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lame {
    pub lambda: f64,
    pub mu: f64,
}

impl Lame {
    pub fn parse(s: &str) -> Result<Self> {
        let (lambda, mu) = args::parse_medium(s)?;
        Ok(Self { lambda, mu })
    }

    pub fn at(&self, omega: f64) -> Result<Medium> {
        Ok(Medium::new(self.lambda, self.mu, omega)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub surface: String,
    pub shape_order: usize,
    pub medium: Lame,
    pub radius: f64,
    pub freqs: Vec<f64>,
    pub directions: Vec<Vec3>,
    pub wave: WaveArg,
    pub points: usize,
    pub noise: f64,
    pub seed: u64,
    pub solver_order: Option<usize>,
    /// Files written, in `(frequency, direction)` order.
    pub files: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvertConfig {
    pub data: Vec<PathBuf>,
    /// `None`: every frequency found in the data.
    pub freqs: Option<Vec<f64>>,
    pub inversion: InversionConfig,
    pub truth: Option<String>,
    pub sections: usize,
}

impl InvertConfig {
    #[allow(clippy::too_many_arguments)]
    pub fn from_args(
        data: Vec<PathBuf>,
        freqs: Option<Vec<f64>>,
        iterations: usize,
        step: f64,
        initial_radius: f64,
        order: Option<usize>,
        sequential: bool,
        backtracking: bool,
        truth: Option<String>,
        sections: usize,
    ) -> Result<Self> {
        if !(step > 0.0) {
            bail!("step constant must be positive, got {step}");
        }
        if !(initial_radius > 0.0) {
            bail!("initial radius must be positive, got {initial_radius}");
        }
        if sections < 4 {
            bail!("need at least 4 samples per cross section");
        }
        let inversion = InversionConfig {
            iterations,
            step: StepRule::InverseOrder { c: step },
            initial_radius,
            line_search: if backtracking { LineSearch::Backtracking } else { LineSearch::Fixed },
            directions: if sequential { DirectionMode::Sequential } else { DirectionMode::Joint },
            solver_order: order,
            ..Default::default()
        };
        Ok(Self { data: args::expand_data_paths(&data)?, freqs, inversion, truth, sections })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub medium: Lame,
    pub radius: f64,
    pub freqs: Vec<f64>,
    pub max_order: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobianConfig {
    pub surface: String,
    pub shape_order: usize,
    pub medium: Lame,
    pub radius: f64,
    pub omega: f64,
    pub direction: Vec3,
    pub wave: WaveArg,
    pub points: usize,
    pub solver_order: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    Synth(SynthConfig),
    Invert(InvertConfig),
    Check(CheckConfig),
    JacobianDump(JacobianConfig),
}

/// Everything needed to repeat a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub schema: u32,
    pub version: String,
    #[serde(flatten)]
    pub command: Command,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self { schema: 1, version: env!("CARGO_PKG_VERSION").to_string(), command }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        args::write_json(&dir.join("run.json"), self)
    }
}
