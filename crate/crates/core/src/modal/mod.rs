//! Modal description of radiating elastic fields outside a sphere `Γ_R`:
//! Helmholtz potentials, displacement traces, the DtN blocks and the
//! transparent boundary operator.

pub mod coeffs;
pub mod dtn;
pub mod field;

pub use coeffs::{
    displacement_block_to_potential, displacement_to_potentials, potential_block_to_displacement,
    potentials_to_displacement, unknown_count, unknown_position, Block, DisplacementCoeffs, Medium, PotentialCoeffs,
};
pub use dtn::{
    apply_t, apply_t1, apply_t2, boundary_operator_from_potentials, dtn_g_scalar_n0, dtn_matrix_g, dtn_matrix_m,
    hermitian_part_neg, lambda_n, DtnBlocks, Mat3,
};
pub use field::{
    eval_radiating_field, generalized_traction, radial_traction, CMat3, Derivative, FieldSample, RadiatingBasis,
};

use crate::error::Result;

/// Smallest eigenvalue of `M̂_n = −(M_n + M_n^*)/2` for each `n <= order`.
///
/// `M̂_n` splits into a scalar `V` block and a Hermitian `2×2` `(T, W)` block,
/// so the eigenvalues are available in closed form. At `n = 0` only the `W`
/// entry is meaningful.
pub fn min_eigen_neg_hermitian_part(med: &Medium, radius: f64, order: usize) -> Result<Vec<f64>> {
    let tab = DtnBlocks::new(med, radius, order)?;
    Ok((0..=order)
        .map(|n| {
            let h = hermitian_part_neg(&tab.m[n]);
            if n == 0 {
                return h[2][2].re;
            }
            let (a, d, b) = (h[1][1].re, h[2][2].re, h[1][2]);
            let mid = 0.5 * (a + d);
            let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
            h[0][0].re.min(mid - rad)
        })
        .collect())
}

/// First order from which every `M̂_n` up to `order` is positive definite.
pub fn positive_definite_onset(med: &Medium, radius: f64, order: usize) -> Result<Option<usize>> {
    let eig = min_eigen_neg_hermitian_part(med, radius, order)?;
    let mut onset = None;
    for (n, e) in eig.iter().enumerate().rev() {
        if *e > 0.0 {
            onset = Some(n);
        } else {
            break;
        }
    }
    Ok(onset)
}
