//! Shape derivatives of the scattering operator and the misfit gradient.
//!
//! Perturbing coefficient `c_i` moves the boundary with normal speed `q_i`;
//! the derivative field solves the same exterior problem with Dirichlet data
//! `−q_i ∂_ν u`. All columns share the factorized boundary system of the
//! current surface, so a Jacobian costs one factorization plus one block
//! solve.

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forward::{
    incident_field, BoundarySystem, IncidentWave, MeasurementOperator, MeasurementSet, SolverOptions,
};
use crate::geometry::{BoundarySample, SurfaceParam};
use crate::modal::{CMat3, Derivative, Medium, PotentialCoeffs, RadiatingBasis};
use crate::vec3::{CVec3, CZERO3};

/// `∂F_k/∂c_i` for every measurement point `k` and coefficient `i`, stored
/// as a `3K × 6(N+1)²` matrix (rows ordered point-major, then component).
#[derive(Debug, Clone)]
pub struct ShapeJacobian {
    pub matrix: Mat<Complex64>,
}

impl ShapeJacobian {
    pub fn points(&self) -> usize {
        self.matrix.nrows() / 3
    }

    pub fn coeffs(&self) -> usize {
        self.matrix.ncols()
    }

    /// Column `i` as one 3-vector per measurement point.
    pub fn column(&self, i: usize) -> Vec<CVec3> {
        (0..self.points())
            .map(|k| [self.matrix[(3 * k, i)], self.matrix[(3 * k + 1, i)], self.matrix[(3 * k + 2, i)]])
            .collect()
    }
}

/// `(ν·∇) u` of the total field `u = u^inc + v` at every boundary node, where
/// `v` has unknown vector `coeffs` in `basis`.
pub fn normal_derivative_total_field(
    basis: &RadiatingBasis,
    coeffs: &[Complex64],
    wave: &IncidentWave,
    med: &Medium,
    sample: &BoundarySample,
) -> Result<Vec<CVec3>> {
    let nu = basis.unknowns();
    if coeffs.len() != nu {
        return Err(Error::Invalid(format!("expected {nu} coefficients, got {}", coeffs.len())));
    }
    let mut vals = vec![CZERO3; nu];
    let mut d: Vec<CMat3> = vec![[CZERO3; 3]; nu];
    sample
        .points
        .iter()
        .zip(&sample.normals)
        .map(|(x, n)| {
            basis.eval_into(x, &mut vals, Some(&mut d), Derivative::Directional(n))?;
            let (_, g) = incident_field(wave, med, x);
            let mut out = [0, 1, 2].map(|i| (0..3).map(|j| g[i][j] * n[j]).sum::<Complex64>());
            for (c, dv) in coeffs.iter().zip(&d) {
                for i in 0..3 {
                    out[i] += dv[0][i] * c;
                }
            }
            Ok(out)
        })
        .collect()
}

/// Forward prediction and, optionally, its shape Jacobian for one incident wave.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub predicted: Vec<CVec3>,
    pub jacobian: Option<ShapeJacobian>,
    pub relative_residual: f64,
}

/// Evaluates the scattering operator at the measurement points and, if
/// requested, every domain derivative `u′_i` there.
pub fn evaluate(
    sp: &SurfaceParam,
    sys: &BoundarySystem,
    meas: &MeasurementOperator,
    wave: &IncidentWave,
    med: &Medium,
    with_jacobian: bool,
) -> Result<Evaluation> {
    let sample = sys.sample();
    let data: Vec<CVec3> = sample.points.iter().map(|x| incident_field(wave, med, x).0.map(|c| -c)).collect();
    let sol = sys.solve(&data)?;
    let coeffs = sol.potentials.to_unknowns();
    let x = Mat::from_fn(coeffs.len(), 1, |r, _| coeffs[r]);
    let v = meas.apply(x.as_ref());
    let predicted = meas
        .points
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let ui = incident_field(wave, med, p).0;
            [0, 1, 2].map(|i| ui[i] + v[(3 * k + i, 0)])
        })
        .collect();
    let jacobian = if with_jacobian {
        let dudn = normal_derivative_total_field(sys.basis(), &coeffs, wave, med, sample)?;
        Some(jacobian_from_normal_derivative(sp, sys, meas, &dudn))
    } else {
        None
    };
    Ok(Evaluation { predicted, jacobian, relative_residual: sol.relative_residual })
}

/// Solves for all `u′_i` at once from `∂_ν u` at the boundary nodes.
pub fn jacobian_from_normal_derivative(
    sp: &SurfaceParam,
    sys: &BoundarySystem,
    meas: &MeasurementOperator,
    dudn: &[CVec3],
) -> ShapeJacobian {
    let sample = sys.sample();
    let q = sample.normal_speeds(sp);
    let ncoef = SurfaceParam::len_for(sp.order());
    let sqrt_w: Vec<f64> = sample.weights.iter().map(|w| w.sqrt()).collect();
    let b = Mat::from_fn(3 * sample.len(), ncoef, |r, i| {
        let p = r / 3;
        -dudn[p][r % 3] * (q[p][i] * sqrt_w[p])
    });
    let (x, _) = sys.solve_weighted(b.as_ref());
    ShapeJacobian { matrix: meas.apply(x.as_ref()) }
}

/// Potentials of the derivative field for the perturbation direction `dir`
/// in coefficient space, i.e. boundary speed `Σ dir_i q_i`.
pub fn directional_derivative(
    sp: &SurfaceParam,
    sys: &BoundarySystem,
    dudn: &[CVec3],
    dir: &[f64],
) -> Result<PotentialCoeffs> {
    let ncoef = SurfaceParam::len_for(sp.order());
    if dir.len() != ncoef {
        return Err(Error::Invalid(format!("expected a direction of length {ncoef}, got {}", dir.len())));
    }
    let sample = sys.sample();
    if dudn.len() != sample.len() {
        return Err(Error::Invalid(format!("expected {} normal derivatives, got {}", sample.len(), dudn.len())));
    }
    let q = sample.normal_speeds(sp);
    let sqrt_w: Vec<f64> = sample.weights.iter().map(|w| w.sqrt()).collect();
    let b = Mat::from_fn(3 * sample.len(), 1, |r, _| {
        let p = r / 3;
        let speed: f64 = q[p].iter().zip(dir).map(|(a, b)| a * b).sum();
        -dudn[p][r % 3] * (speed * sqrt_w[p])
    });
    let (x, _) = sys.solve_weighted(b.as_ref());
    let coeffs: Vec<Complex64> = (0..x.nrows()).map(|r| x[(r, 0)]).collect();
    PotentialCoeffs::from_unknowns(sys.order(), &coeffs)
}

/// Domain derivative `u′_i` at the measurement points for a single coefficient.
pub fn domain_derivative(
    sp: &SurfaceParam,
    wave: &IncidentWave,
    med: &Medium,
    radius: f64,
    i: usize,
    points: &[crate::vec3::Vec3],
    opts: &SolverOptions,
) -> Result<Vec<CVec3>> {
    if i >= SurfaceParam::len_for(sp.order()) {
        return Err(Error::IndexOutOfRange { index: i, len: SurfaceParam::len_for(sp.order()) });
    }
    let sys = BoundarySystem::new(sp, med, radius, opts)?;
    let meas = MeasurementOperator::new(sys.basis(), points)?;
    let ev = evaluate(sp, &sys, &meas, wave, med, true)?;
    Ok(ev.jacobian.expect("requested").column(i))
}

/// Measurement sets sharing one frequency, hence one boundary system per surface.
#[derive(Debug, Clone)]
struct FrequencyGroup {
    medium: Medium,
    members: Vec<usize>,
    operators: Vec<MeasurementOperator>,
}

/// A bundle of measurement sets prepared for repeated misfit evaluations.
///
/// Measurement operators depend only on the frequency and the points, so they
/// are built once; each evaluation factorizes one boundary system per
/// distinct frequency.
#[derive(Debug, Clone)]
pub struct DataBundle {
    sets: Vec<MeasurementSet>,
    groups: Vec<FrequencyGroup>,
    radius: f64,
    opts: SolverOptions,
}

impl DataBundle {
    pub fn new(sets: Vec<MeasurementSet>, opts: &SolverOptions) -> Result<Self> {
        let first = sets.first().ok_or_else(|| Error::Invalid("empty data bundle".into()))?;
        let radius = first.radius;
        for s in &sets {
            s.validate()?;
            if s.radius != radius || s.medium.lambda != first.medium.lambda || s.medium.mu != first.medium.mu {
                return Err(Error::Invalid(
                    "measurement sets disagree on the sphere radius or the Lamé parameters".into(),
                ));
            }
        }
        let mut groups: Vec<FrequencyGroup> = Vec::new();
        for (idx, s) in sets.iter().enumerate() {
            let pos = groups.iter().position(|g| g.medium.omega == s.medium.omega);
            let g = match pos {
                Some(p) => &mut groups[p],
                None => {
                    groups.push(FrequencyGroup { medium: s.medium, members: Vec::new(), operators: Vec::new() });
                    groups.last_mut().unwrap()
                }
            };
            let order = opts.resolved_order(&g.medium, radius);
            let basis = RadiatingBasis::new(&g.medium, radius, order)?;
            g.operators.push(MeasurementOperator::new(&basis, &s.points)?);
            g.members.push(idx);
        }
        Ok(Self { sets, groups, radius, opts: *opts })
    }

    pub fn sets(&self) -> &[MeasurementSet] {
        &self.sets
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.groups.iter().map(|g| g.medium.omega).collect()
    }

    /// Restriction to the sets selected by `keep`.
    pub fn subset<F: Fn(&MeasurementSet) -> bool>(&self, keep: F) -> Result<Self> {
        let sets: Vec<MeasurementSet> = self.sets.iter().filter(|s| keep(s)).cloned().collect();
        Self::new(sets, &self.opts)
    }

    fn run(&self, sp: &SurfaceParam, with_gradient: bool) -> Result<(f64, Vec<f64>)> {
        let ncoef = SurfaceParam::len_for(sp.order());
        let mut f = 0.0;
        let mut grad = vec![0.0; if with_gradient { ncoef } else { 0 }];
        for g in &self.groups {
            let sys = BoundarySystem::new(sp, &g.medium, self.radius, &self.opts)?;
            for (&idx, meas) in g.members.iter().zip(&g.operators) {
                let set = &self.sets[idx];
                let ev = evaluate(sp, &sys, meas, &set.incident, &g.medium, with_gradient)?;
                let resid: Vec<CVec3> =
                    ev.predicted.iter().zip(&set.u).map(|(p, u)| [0, 1, 2].map(|i| p[i] - u[i])).collect();
                f += 0.5 * resid.iter().flatten().map(|c| c.norm_sqr()).sum::<f64>();
                if let Some(jac) = &ev.jacobian {
                    for (i, gi) in grad.iter_mut().enumerate() {
                        let mut acc = 0.0;
                        for (k, r) in resid.iter().enumerate() {
                            for j in 0..3 {
                                acc += (jac.matrix[(3 * k + j, i)] * r[j].conj()).re;
                            }
                        }
                        *gi += acc;
                    }
                }
            }
        }
        if !f.is_finite() {
            return Err(Error::Invalid("objective is not finite".into()));
        }
        Ok((f, grad))
    }

    /// `f(C) = ½ Σ |F(C) − U|²` over every set in the bundle.
    pub fn objective(&self, sp: &SurfaceParam) -> Result<f64> {
        Ok(self.run(sp, false)?.0)
    }

    /// Misfit and its gradient `∂f/∂c_i = Re Σ u′_i · conj(F − U)`.
    pub fn objective_and_gradient(&self, sp: &SurfaceParam) -> Result<(f64, Vec<f64>)> {
        self.run(sp, true)
    }

    /// Shape Jacobian of set `idx` at the surface `sp`.
    pub fn jacobian(&self, sp: &SurfaceParam, idx: usize) -> Result<ShapeJacobian> {
        let set = self.sets.get(idx).ok_or(Error::IndexOutOfRange { index: idx, len: self.sets.len() })?;
        let g = self.groups.iter().find(|g| g.members.contains(&idx)).expect("every set is grouped");
        let pos = g.members.iter().position(|&m| m == idx).unwrap();
        let sys = BoundarySystem::new(sp, &g.medium, self.radius, &self.opts)?;
        let ev = evaluate(sp, &sys, &g.operators[pos], &set.incident, &g.medium, true)?;
        Ok(ev.jacobian.expect("requested"))
    }
}

/// One-shot misfit and gradient for a list of measurement sets.
pub fn objective_and_gradient(
    sp: &SurfaceParam,
    data: &[MeasurementSet],
    opts: &SolverOptions,
) -> Result<(f64, Vec<f64>)> {
    DataBundle::new(data.to_vec(), opts)?.objective_and_gradient(sp)
}
