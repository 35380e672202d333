//! Forward scattering by a rigid obstacle: incident plane waves, the
//! boundary-matching solver and the scattering operator on `Γ_R`.

pub mod incident;
pub mod measurement;
pub mod solver;

pub use incident::{cube_face_directions, incident_field, IncidentWave, WaveKind};
pub use measurement::{add_noise, measure_with, scattering_operator, MeasurementSet};
pub use solver::{solve_exterior_dirichlet, BoundarySystem, MeasurementOperator, ScatteredSolution, SolverOptions};
