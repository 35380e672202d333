//! Frequency-continuation shape reconstruction.
//!
//! Starting from a small sphere, each frequency stage runs a fixed number of
//! gradient steps on the misfit of the data at that frequency, with surface
//! harmonics up to `k = ⌊ω⌋`. The result warm-starts the next, higher
//! frequency, where the coefficient set grows with `k`.

use serde::{Deserialize, Serialize};

use crate::derivative::DataBundle;
use crate::error::{Error, Result};
use crate::forward::{MeasurementSet, SolverOptions};
use crate::geometry::{RayCaster, SurfaceParam};
use crate::specfun::SphereQuadrature;

/// Step size per stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepRule {
    /// `τ = c / max(k, 1)`.
    InverseOrder {
        c: f64,
    },
    Fixed {
        tau: f64,
    },
}

impl Default for StepRule {
    fn default() -> Self {
        StepRule::InverseOrder { c: 0.005 }
    }
}

impl StepRule {
    pub fn tau(&self, order: usize) -> f64 {
        match *self {
            StepRule::InverseOrder { c } => c / order.max(1) as f64,
            StepRule::Fixed { tau } => tau,
        }
    }
}

/// How a trial step is accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineSearch {
    /// Plain fixed-step descent; a step is only retried if the forward solve fails.
    #[default]
    Fixed,
    /// Halve the step until the Armijo condition holds.
    Backtracking,
}

/// How measurement sets with several incident directions enter a stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirectionMode {
    /// One objective summed over all directions.
    #[default]
    Joint,
    /// `L` iterations per direction, sweeping the directions in order.
    Sequential,
}

/// One frequency of the schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stage {
    pub omega: f64,
    pub order: usize,
    pub iterations: usize,
    pub tau: f64,
}

/// Increasing frequencies with their surface order, iteration count and step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencySchedule {
    pub stages: Vec<Stage>,
}

impl FrequencySchedule {
    /// Stage orders are `max(⌊ω⌋, 1)`: a closed surface needs degree-one harmonics.
    pub fn new(frequencies: &[f64], iterations: usize, step: StepRule) -> Result<Self> {
        if frequencies.is_empty() {
            return Err(Error::Invalid("frequency schedule is empty".into()));
        }
        if frequencies.iter().any(|w| !(*w > 0.0)) || frequencies.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::Invalid(format!(
                "frequencies must be positive and strictly increasing: {frequencies:?}"
            )));
        }
        Ok(Self {
            stages: frequencies
                .iter()
                .map(|&omega| {
                    let order = (omega.floor() as usize).max(1);
                    Stage { omega, order, iterations, tau: step.tau(order) }
                })
                .collect(),
        })
    }

    /// `a, a+step, …` up to `b` (inclusive, with a small tolerance).
    pub fn range(a: f64, b: f64, step: f64) -> Result<Vec<f64>> {
        if !(step > 0.0) || b < a {
            return Err(Error::Invalid(format!("bad frequency range {a}:{b}:{step}")));
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| a + i as f64 * step).collect())
    }
}

/// Reconstruction settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InversionConfig {
    pub iterations: usize,
    pub step: StepRule,
    pub initial_radius: f64,
    pub line_search: LineSearch,
    pub directions: DirectionMode,
    /// Step halvings allowed before a stage is abandoned.
    pub max_halvings: usize,
    /// Modal truncation used while inverting (`None`: frequency default).
    pub solver_order: Option<usize>,
    pub quad_order: Option<usize>,
    /// Largest boundary residual accepted from a forward solve.
    pub residual_tol: f64,
}

impl Default for InversionConfig {
    fn default() -> Self {
        Self {
            iterations: 100,
            step: StepRule::default(),
            initial_radius: 0.5,
            line_search: LineSearch::Fixed,
            directions: DirectionMode::Joint,
            max_halvings: 12,
            solver_order: None,
            quad_order: None,
            residual_tol: SolverOptions::default().residual_tol,
        }
    }
}

impl InversionConfig {
    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            order: self.solver_order,
            quad_order: self.quad_order,
            residual_tol: self.residual_tol,
            ..Default::default()
        }
    }
}

/// One accepted descent step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub stage: usize,
    pub iteration: usize,
    pub omega: f64,
    /// Objective before the step.
    pub objective: f64,
    pub gradient_norm: f64,
    pub step: f64,
}

/// Surface at the end of a stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageSnapshot {
    pub stage: usize,
    pub omega: f64,
    pub surface: SurfaceParam,
    pub objective: f64,
}

/// Current reconstruction with its full history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InversionState {
    pub surface: SurfaceParam,
    pub history: Vec<HistoryEntry>,
    pub snapshots: Vec<StageSnapshot>,
}

impl InversionState {
    pub fn new(surface: SurfaceParam) -> Self {
        Self { surface, history: Vec::new(), snapshots: Vec::new() }
    }

    /// Objective history as CSV: `stage,iteration,omega,objective,gradient_norm,step`.
    pub fn history_csv(&self) -> String {
        let mut out = String::from("stage,iteration,omega,objective,gradient_norm,step\n");
        for h in &self.history {
            out.push_str(&format!(
                "{},{},{},{:.17e},{:.17e},{:.17e}\n",
                h.stage, h.iteration, h.omega, h.objective, h.gradient_norm, h.step
            ));
        }
        out
    }
}

/// Sphere of radius `r0` encoded with harmonics up to `order` (at least 1).
pub fn initial_guess(r0: f64, order: usize) -> Result<SurfaceParam> {
    if !(r0 > 0.0) {
        return Err(Error::Invalid(format!("initial radius must be positive, got {r0}")));
    }
    Ok(crate::geometry::sphere(order.max(1), r0))
}

/// Runs the iterations of one stage against `data` (all at the stage
/// frequency) and returns the objective at the final iterate.
pub fn descent_stage(
    state: &mut InversionState,
    index: usize,
    stage: &Stage,
    data: &DataBundle,
    cfg: &InversionConfig,
) -> Result<f64> {
    if state.surface.order() != stage.order {
        state.surface = state.surface.with_order(stage.order);
    }
    let mut current = data.objective_and_gradient(&state.surface).map_err(|e| Error::Aborted {
        stage: index,
        reason: format!("forward solve failed at the stage start: {e}"),
        partial: Box::new(state.clone()),
    })?;
    for it in 0..stage.iterations {
        let (f, ref g) = current;
        let gnorm2: f64 = g.iter().map(|x| x * x).sum();
        if gnorm2 == 0.0 {
            state.history.push(HistoryEntry {
                stage: index,
                iteration: it,
                omega: stage.omega,
                objective: f,
                gradient_norm: 0.0,
                step: 0.0,
            });
            continue;
        }
        let mut tau = stage.tau;
        let mut accepted = None;
        let mut last_failure = String::from("sufficient decrease never reached");
        for _ in 0..=cfg.max_halvings {
            let mut trial = state.surface.clone();
            for (c, gi) in trial.coeffs_mut().iter_mut().zip(g) {
                *c -= tau * gi;
            }
            match data.objective_and_gradient(&trial) {
                Ok(next) => {
                    let ok = match cfg.line_search {
                        LineSearch::Fixed => true,
                        LineSearch::Backtracking => next.0 <= f - 1e-4 * tau * gnorm2,
                    };
                    if ok {
                        accepted = Some((trial, next, tau));
                        break;
                    }
                }
                Err(e) => last_failure = e.to_string(),
            }
            tau *= 0.5;
        }
        let Some((trial, next, tau)) = accepted else {
            return Err(Error::Aborted {
                stage: index,
                reason: format!(
                    "no acceptable step at iteration {it} after {} halvings: {last_failure}",
                    cfg.max_halvings
                ),
                partial: Box::new(state.clone()),
            });
        };
        state.history.push(HistoryEntry {
            stage: index,
            iteration: it,
            omega: stage.omega,
            objective: f,
            gradient_norm: gnorm2.sqrt(),
            step: tau,
        });
        state.surface = trial;
        current = next;
    }
    Ok(current.0)
}

/// Full continuation: initial sphere, then one stage per scheduled frequency.
pub fn continuation_run(
    data: &[MeasurementSet],
    schedule: &FrequencySchedule,
    cfg: &InversionConfig,
) -> Result<InversionState> {
    let opts = cfg.solver_options();
    let bundle = DataBundle::new(data.to_vec(), &opts)?;
    let available = bundle.frequencies();
    for st in &schedule.stages {
        if !available.contains(&st.omega) {
            return Err(Error::Invalid(format!("no measurements at scheduled frequency {}", st.omega)));
        }
    }
    let first = schedule.stages[0].order;
    let mut state = InversionState::new(initial_guess(cfg.initial_radius, first)?);
    for (i, st) in schedule.stages.iter().enumerate() {
        let at_freq = bundle.subset(|s| s.medium.omega == st.omega)?;
        let objective = match cfg.directions {
            DirectionMode::Joint => descent_stage(&mut state, i, st, &at_freq, cfg)?,
            DirectionMode::Sequential => {
                let mut last = f64::NAN;
                for target in at_freq.sets() {
                    let single = at_freq.subset(|s| s == target)?;
                    last = descent_stage(&mut state, i, st, &single, cfg)?;
                }
                last
            }
        };
        state.snapshots.push(StageSnapshot { stage: i, omega: st.omega, surface: state.surface.clone(), objective });
    }
    Ok(state)
}

/// Relative radial error `‖ρ_rec − ρ_true‖ / ‖ρ_true‖` in `L²(S²)`.
///
/// Radial distances are measured from the origin, so both surfaces must be
/// star-shaped about it. The normalization uses the second argument, which
/// makes the measure asymmetric: spheres of radius 0.55 and 0.5 give 0.1 one
/// way round and 1/11 the other.
pub fn surface_error(reconstruction: &SurfaceParam, truth: &SurfaceParam) -> Result<f64> {
    let order = 2 * reconstruction.order().max(truth.order()) + 12;
    let quad = SphereQuadrature::new(order);
    let (rc, tc) = (RayCaster::new(reconstruction), RayCaster::new(truth));
    let mut num = 0.0;
    let mut den = 0.0;
    for (&(th, ph), &w) in quad.nodes().iter().zip(quad.weights()) {
        let d = crate::specfun::SphericalPoint::new(1.0, th, ph).to_cartesian();
        let a = rc.radius(&d)?;
        let b = tc.radius(&d)?;
        num += w * (a - b) * (a - b);
        den += w * b * b;
    }
    Ok((num / den).sqrt())
}
