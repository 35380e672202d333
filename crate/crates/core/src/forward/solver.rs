//! Least-squares boundary matching for the exterior rigid (Dirichlet) problem.
//!
//! The scattered field is expanded in outgoing wave functions normalised on
//! `Γ_R` and fitted to Dirichlet data at the nodes of a boundary quadrature,
//! rows weighted by the square root of the surface weights. Columns are
//! equilibrated and the system is solved by a truncated SVD, which is kept so
//! that any number of further right-hand sides reuse the factorization.

use faer::{Mat, MatRef};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{sample_boundary, BoundarySample, SurfaceParam};
use crate::modal::{Derivative, FieldSample, Medium, PotentialCoeffs, RadiatingBasis};
use crate::vec3::{norm, CVec3, Vec3, CZERO3};

/// Solver knobs; `None` selects the defaults derived from the medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Modal truncation `N`.
    pub order: Option<usize>,
    /// Order of the boundary quadrature. Defaults to `2N`: off the sphere the
    /// high-order wave functions vary faster along the boundary than their
    /// degree suggests, and a quadrature of order `N` aliases them.
    pub quad_order: Option<usize>,
    /// Singular values below `rcond · σ_max` are discarded.
    pub rcond: f64,
    /// Largest accepted relative boundary residual.
    pub residual_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { order: None, quad_order: None, rcond: 1e-12, residual_tol: 1e-2 }
    }
}

impl SolverOptions {
    pub fn resolved_order(&self, med: &Medium, radius: f64) -> usize {
        self.order.unwrap_or_else(|| med.default_truncation(radius))
    }
}

/// Factorized boundary system for one surface and one frequency.
#[derive(Debug, Clone)]
pub struct BoundarySystem {
    basis: RadiatingBasis,
    sample: BoundarySample,
    sqrt_w: Vec<f64>,
    col_scale: Vec<f64>,
    u: Mat<Complex64>,
    s: Vec<f64>,
    v: Mat<Complex64>,
    rank: usize,
    condition: f64,
    opts: SolverOptions,
}

/// Outgoing-wave solution of an exterior Dirichlet problem.
#[derive(Debug, Clone)]
pub struct ScatteredSolution {
    pub potentials: PotentialCoeffs,
    pub order: usize,
    /// Weighted RMS of `u_fit − data` over the boundary.
    pub residual_rms: f64,
    /// Weighted residual norm relative to the data norm.
    pub relative_residual: f64,
    /// `σ_max / σ_min` of the equilibrated system.
    pub condition: f64,
    /// Number of singular values kept.
    pub rank: usize,
    basis: RadiatingBasis,
}

impl ScatteredSolution {
    pub fn basis(&self) -> &RadiatingBasis {
        &self.basis
    }

    pub fn field(&self, x: &Vec3, with_gradient: bool) -> Result<FieldSample> {
        self.basis.eval_field(&self.potentials, x, with_gradient)
    }
}

impl BoundarySystem {
    pub fn new(sp: &SurfaceParam, med: &Medium, radius: f64, opts: &SolverOptions) -> Result<Self> {
        let order = opts.resolved_order(med, radius);
        let quad = opts.quad_order.unwrap_or(2 * order);
        let sample = sample_boundary(sp, quad)?;
        Self::from_sample(sample, med, radius, order, opts)
    }

    pub fn from_sample(
        sample: BoundarySample,
        med: &Medium,
        radius: f64,
        order: usize,
        opts: &SolverOptions,
    ) -> Result<Self> {
        if let Some(p) = sample.points.iter().find(|p| norm(p) >= radius) {
            return Err(Error::Geometry(format!(
                "obstacle reaches {p:?}, outside the measurement sphere of radius {radius}"
            )));
        }
        let basis = RadiatingBasis::new(med, radius, order)?;
        let nu = basis.unknowns();
        let rows = 3 * sample.len();
        if rows < nu {
            return Err(Error::Invalid(format!(
                "boundary quadrature gives {rows} equations for {nu} unknowns; raise the quadrature order"
            )));
        }
        let sqrt_w: Vec<f64> = sample.weights.iter().map(|w| w.sqrt()).collect();
        let mut a = Mat::<Complex64>::zeros(rows, nu);
        let mut vals = vec![CZERO3; nu];
        for (p, x) in sample.points.iter().enumerate() {
            basis.eval_into(x, &mut vals, None, Derivative::None)?;
            for (col, v) in vals.iter().enumerate() {
                for i in 0..3 {
                    a[(3 * p + i, col)] = v[i] * sqrt_w[p];
                }
            }
        }
        let mut col_scale = vec![0.0; nu];
        for (col, cs) in col_scale.iter_mut().enumerate() {
            let n2: f64 = (0..rows).map(|r| a[(r, col)].norm_sqr()).sum();
            *cs = if n2 > 0.0 { 1.0 / n2.sqrt() } else { 1.0 };
            for r in 0..rows {
                a[(r, col)] *= *cs;
            }
        }
        let svd = a.thin_svd().map_err(|e| Error::LinearAlgebra(format!("SVD did not converge: {e:?}")))?;
        let s: Vec<f64> = (0..nu).map(|k| svd.S().column_vector()[k].re).collect();
        let smax = s.first().copied().unwrap_or(0.0);
        let rank = s.iter().take_while(|&&x| x > opts.rcond * smax).count();
        if rank == 0 {
            return Err(Error::IllConditioned { condition: f64::INFINITY });
        }
        let condition = smax / s[nu - 1].max(f64::MIN_POSITIVE);
        Ok(Self {
            basis,
            sample,
            sqrt_w,
            col_scale,
            u: svd.U().to_owned(),
            s,
            v: svd.V().to_owned(),
            rank,
            condition,
            opts: *opts,
        })
    }

    pub fn sample(&self) -> &BoundarySample {
        &self.sample
    }

    pub fn basis(&self) -> &RadiatingBasis {
        &self.basis
    }

    pub fn order(&self) -> usize {
        self.basis.order()
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Whether singular values were discarded by the regularization.
    pub fn is_truncated(&self) -> bool {
        self.rank < self.s.len()
    }

    /// Weighted right-hand-side matrix (`3P × cols`) from nodal data columns.
    pub fn weighted_rhs(&self, data: &[Vec<CVec3>]) -> Mat<Complex64> {
        let rows = 3 * self.sample.len();
        Mat::from_fn(rows, data.len(), |r, c| data[c][r / 3][r % 3] * self.sqrt_w[r / 3])
    }

    /// Unknown vectors for a block of weighted right-hand sides, together with
    /// the residual norms `‖b − A x‖` of each column.
    pub fn solve_weighted(&self, b: MatRef<'_, Complex64>) -> (Mat<Complex64>, Vec<f64>) {
        let ur = self.u.as_ref().subcols(0, self.rank);
        let mut y = ur.adjoint() * b;
        let proj = ur * &y;
        let resid = (0..b.ncols())
            .map(|c| (0..b.nrows()).map(|r| (b[(r, c)] - proj[(r, c)]).norm_sqr()).sum::<f64>().sqrt())
            .collect();
        for k in 0..self.rank {
            let inv = 1.0 / self.s[k];
            for c in 0..y.ncols() {
                y[(k, c)] *= inv;
            }
        }
        let mut x = self.v.as_ref().subcols(0, self.rank) * &y;
        for (r, cs) in self.col_scale.iter().enumerate() {
            for c in 0..x.ncols() {
                x[(r, c)] *= *cs;
            }
        }
        (x, resid)
    }

    /// Solves for Dirichlet data given at the boundary nodes.
    pub fn solve(&self, data: &[CVec3]) -> Result<ScatteredSolution> {
        if data.len() != self.sample.len() {
            return Err(Error::Invalid(format!(
                "expected data at {} boundary nodes, got {}",
                self.sample.len(),
                data.len()
            )));
        }
        let b = self.weighted_rhs(&[data.to_vec()]);
        let (x, resid) = self.solve_weighted(b.as_ref());
        let bnorm = (0..b.nrows()).map(|r| b[(r, 0)].norm_sqr()).sum::<f64>().sqrt();
        let relative = if bnorm > 0.0 { resid[0] / bnorm } else { 0.0 };
        if relative > self.opts.residual_tol {
            return Err(Error::NonConvergence { residual: relative, tolerance: self.opts.residual_tol });
        }
        let coeffs: Vec<Complex64> = (0..x.nrows()).map(|r| x[(r, 0)]).collect();
        Ok(ScatteredSolution {
            potentials: PotentialCoeffs::from_unknowns(self.order(), &coeffs)?,
            order: self.order(),
            residual_rms: resid[0] / self.sample.area().sqrt(),
            relative_residual: relative,
            condition: self.condition,
            rank: self.rank,
            basis: self.basis.clone(),
        })
    }
}

/// Fits outgoing waves to the Dirichlet data `data(x)` on the surface `sp`.
pub fn solve_exterior_dirichlet<F: Fn(&Vec3) -> CVec3>(
    sp: &SurfaceParam,
    data: F,
    med: &Medium,
    radius: f64,
    opts: &SolverOptions,
) -> Result<ScatteredSolution> {
    let sys = BoundarySystem::new(sp, med, radius, opts)?;
    let values: Vec<CVec3> = sys.sample().points.iter().map(&data).collect();
    sys.solve(&values)
}

/// Dense evaluation of the basis at fixed points: `3K × unknowns`.
#[derive(Debug, Clone)]
pub struct MeasurementOperator {
    pub points: Vec<Vec3>,
    matrix: Mat<Complex64>,
}

impl MeasurementOperator {
    pub fn new(basis: &RadiatingBasis, points: &[Vec3]) -> Result<Self> {
        let nu = basis.unknowns();
        let mut m = Mat::<Complex64>::zeros(3 * points.len(), nu);
        let mut vals = vec![CZERO3; nu];
        for (k, x) in points.iter().enumerate() {
            basis.eval_into(x, &mut vals, None, Derivative::None)?;
            for (col, v) in vals.iter().enumerate() {
                for i in 0..3 {
                    m[(3 * k + i, col)] = v[i];
                }
            }
        }
        Ok(Self { points: points.to_vec(), matrix: m })
    }

    pub fn matrix(&self) -> MatRef<'_, Complex64> {
        self.matrix.as_ref()
    }

    /// Field values at the points for each column of unknowns.
    pub fn apply(&self, x: MatRef<'_, Complex64>) -> Mat<Complex64> {
        self.matrix.as_ref() * x
    }
}
