//! Special functions: spherical Hankel functions, spherical harmonics and sphere quadrature.

pub mod bessel;
pub mod harmonics;
pub mod quadrature;

pub use bessel::{spherical_hankel1, spherical_hankel1_seq, z_log_derivative, z_sequence, RadialTable};
pub use harmonics::{
    frame, sph_harmonic, vector_harmonics, HarmonicIndex, HarmonicTable, Legendre, SphericalPoint, VectorHarmonics,
};
pub use quadrature::{fibonacci_sphere, gauss_legendre, SphereQuadrature};
