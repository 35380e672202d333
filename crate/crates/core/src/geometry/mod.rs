//! Parametrized obstacle surfaces: evaluation, outward normals, coefficient
//! perturbations, boundary sampling and preset shapes.

pub mod radial;
pub mod shapes;
pub mod surface;

pub use radial::{cross_sections, write_cross_sections, RayCaster, SectionPoint};
pub use shapes::{bean, cushion, ellipsoid, project_map, radial_surface, sphere};
pub use surface::{
    eval_surface, perturbation_q, sample_boundary, BoundarySample, CoeffIndex, Part, SurfaceParam, SurfacePoint,
};
