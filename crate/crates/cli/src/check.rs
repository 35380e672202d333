//! `check`: numerical self-checks of the modal layer and the shape gradient.

use std::path::Path;

use anyhow::Result;
use elastiscat::derivative::DataBundle;
use elastiscat::forward::{scattering_operator, IncidentWave, SolverOptions};
use elastiscat::geometry::{ellipsoid, sphere};
use elastiscat::modal::{
    apply_t, apply_t1, apply_t2, boundary_operator_from_potentials, displacement_block_to_potential, lambda_n,
    positive_definite_onset, potential_block_to_displacement, potentials_to_displacement, radial_traction,
    DisplacementCoeffs, PotentialCoeffs, RadiatingBasis,
};
use elastiscat::specfun::{fibonacci_sphere, z_sequence, HarmonicIndex, SphereQuadrature, SphericalPoint};
use elastiscat::vec3::CVec3;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::args;
use crate::config::{CheckConfig, Command, RunConfig};

#[derive(Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Serialize)]
struct Report {
    schema: u32,
    pass: bool,
    config: CheckConfig,
    checks: Vec<CheckResult>,
}

fn result(name: impl Into<String>, measured: f64, tolerance: f64, detail: String) -> CheckResult {
    CheckResult { name: name.into(), pass: measured <= tolerance, measured, tolerance, detail }
}

fn cplx(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn rel_blocks(a: &DisplacementCoeffs, b: &DisplacementCoeffs) -> f64 {
    let num: f64 = a.blocks.iter().flatten().zip(b.blocks.iter().flatten()).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.blocks.iter().flatten().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

fn z_checks(cfg: &CheckConfig, out: &mut Vec<CheckResult>) -> Result<()> {
    let mut args: Vec<f64> = vec![0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 30.0];
    for &w in &cfg.freqs {
        let med = cfg.medium.at(w)?;
        args.extend([med.kappa_p * cfg.radius, med.kappa_s * cfg.radius]);
    }
    let mut violations = 0usize;
    let mut z0: f64 = 0.0;
    for &t in &args {
        let z = z_sequence(60, t)?;
        for (n, zn) in z.iter().enumerate() {
            if !(zn.re >= -(n as f64 + 1.0) && zn.re <= -1.0 && zn.im > 0.0 && zn.im <= t) {
                violations += 1;
            }
        }
        z0 = z0.max((z[0] - Complex64::new(-1.0, t)).norm());
    }
    out.push(result("z_bounds", violations as f64, 0.0, format!("n <= 60 at {} arguments", args.len())));
    out.push(result("z0_closed_form", z0, 1e-13, "max |z_0(t) - (-1 + i t)|".into()));
    Ok(())
}

fn modal_checks(cfg: &CheckConfig, rng: &mut ChaCha8Rng, out: &mut Vec<CheckResult>) -> Result<()> {
    for &w in &cfg.freqs {
        let med = cfg.medium.at(w)?;
        let r = cfg.radius;
        let onset = positive_definite_onset(&med, r, cfg.max_order)?;
        out.push(CheckResult {
            name: format!("dtn_definiteness[w={w}]"),
            pass: onset.is_some(),
            measured: onset.map_or(f64::NAN, |n| n as f64),
            tolerance: cfg.max_order as f64,
            detail: format!("first N0 with -Re M_n positive definite for N0 <= n <= {}", cfg.max_order),
        });

        let lam_ok = (0..=30).try_fold(true, |ok, n| Ok::<_, anyhow::Error>(ok && lambda_n(&med, r, n)?.im < 0.0))?;
        out.push(CheckResult {
            name: format!("lambda_imaginary_part[w={w}]"),
            pass: lam_ok,
            measured: if lam_ok { 0.0 } else { 1.0 },
            tolerance: 0.0,
            detail: "Im Lambda_n < 0 for n <= 30".into(),
        });

        let zp = z_sequence(30, med.kappa_p * r)?;
        let zs = z_sequence(30, med.kappa_s * r)?;
        let mut worst: f64 = 0.0;
        for _ in 0..300 {
            let n = rng.gen_range(0..=30usize);
            let mut v = [cplx(rng), cplx(rng), cplx(rng)];
            if n == 0 {
                v[0] = Complex64::new(0.0, 0.0);
                v[1] = Complex64::new(0.0, 0.0);
            }
            let p = displacement_block_to_potential(n, zp[n], zs[n], med.kappa_s, r, &v);
            let back = potential_block_to_displacement(n, zp[n], zs[n], med.kappa_s, r, &p);
            let size = v.iter().fold(0.0f64, |m, c| m.max(c.norm()));
            let err = back.iter().zip(&v).fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
            worst = worst.max(err / size);
        }
        out.push(result(format!("modal_round_trip[w={w}]"), worst, 1e-11, "300 random blocks, n <= 30".into()));

        let order = 8;
        let mut pot = PotentialCoeffs::zeros(order);
        for (j, b) in pot.blocks.iter_mut().enumerate() {
            let n = HarmonicIndex::from_flat(j).n;
            for (k, c) in b.iter_mut().enumerate() {
                if n > 0 || k == 0 {
                    *c = cplx(rng) * 0.7f64.powi(n as i32);
                }
            }
        }
        let via_t = apply_t(&potentials_to_displacement(&pot, &med, r)?, &med)?;
        let series = boundary_operator_from_potentials(&pot, &med, r)?;
        let basis = RadiatingBasis::new(&med, r, order)?;
        let quad = SphereQuadrature::new(2 * order + 2);
        let tractions = quad
            .nodes()
            .iter()
            .map(|&(t, ph)| {
                let x = SphericalPoint::new(r, t, ph).to_cartesian();
                let g = basis.eval_field(&pot, &x, true)?.gradient.expect("requested");
                Ok(radial_traction(&med, &x, &g))
            })
            .collect::<Result<Vec<CVec3>>>()?;
        let spatial = DisplacementCoeffs::from_samples(order, r, &quad, &tractions)?;
        let e = rel_blocks(&series, &via_t).max(rel_blocks(&spatial, &via_t));
        out.push(result(
            format!("transparent_boundary_condition[w={w}]"),
            e,
            1e-8,
            "series and sampled traction against the DtN map".into(),
        ));
    }

    let mut bad = 0usize;
    for _ in 0..200 {
        let w = cfg.freqs[rng.gen_range(0..cfg.freqs.len())];
        let med = cfg.medium.at(w)?;
        let len = HarmonicIndex::count(rng.gen_range(0..12));
        let u: Vec<Complex64> = (0..len).map(|_| cplx(rng)).collect();
        let ip: Complex64 = apply_t1(&u, &med, cfg.radius)?.iter().zip(&u).map(|(a, b)| a * b.conj()).sum();
        bad += usize::from(!(ip.re <= 0.0 && ip.im >= 0.0));
        let mut tw: Vec<[Complex64; 2]> = (0..len).map(|_| [cplx(rng), cplx(rng)]).collect();
        tw[0] = [Complex64::new(0.0, 0.0); 2];
        let ip: Complex64 = apply_t2(&tw, &med, cfg.radius)?
            .iter()
            .zip(&tw)
            .map(|(a, b)| a[0] * b[0].conj() + a[1] * b[1].conj())
            .sum();
        bad += usize::from(ip.re < 0.0);
    }
    out.push(result("dtn_sign_conditions", bad as f64, 0.0, "violations over 2 x 200 random traces".into()));
    Ok(())
}

fn gradient_check(cfg: &CheckConfig, out: &mut Vec<CheckResult>) -> Result<()> {
    let w = cfg.freqs[0];
    let med = cfg.medium.at(w)?;
    let r = cfg.radius;
    let opts = SolverOptions { order: Some(8), ..Default::default() };
    let points = fibonacci_sphere(30, r);
    let wave = IncidentWave::compressional([0.0, 1.0, 0.0])?;
    let data = scattering_operator(&ellipsoid(1, [0.55 * r, 0.6 * r, 0.65 * r]), &wave, &med, r, &points, &opts)?;
    let bundle = DataBundle::new(vec![data], &opts)?;
    let sp = sphere(1, 0.6 * r);
    let (_, g) = bundle.objective_and_gradient(&sp)?;
    let h = 1e-6 * r;
    let mut num = 0.0;
    for (i, gi) in g.iter().enumerate() {
        let at = |s: f64| {
            let mut c = sp.clone();
            c.coeffs_mut()[i] += s;
            bundle.objective(&c)
        };
        let fd = (at(h)? - at(-h)?) / (2.0 * h);
        num += (fd - gi) * (fd - gi);
    }
    let den: f64 = g.iter().map(|x| x * x).sum();
    out.push(result(
        "gradient_central_differences",
        (num / den).sqrt(),
        1e-4,
        format!("relative l2 difference at w={w}, sphere against ellipsoid data"),
    ));
    Ok(())
}

/// Returns whether every check passed.
pub fn run(cfg: CheckConfig, out_dir: Option<&Path>) -> Result<bool> {
    if let Some(dir) = out_dir {
        args::prepare_out_dir(dir)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut checks = Vec::new();
    z_checks(&cfg, &mut checks)?;
    modal_checks(&cfg, &mut rng, &mut checks)?;
    gradient_check(&cfg, &mut checks)?;
    let pass = checks.iter().all(|c| c.pass);
    for c in &checks {
        eprintln!(
            "{:<40} {}  measured {:.3e}  tolerance {:.1e}",
            c.name,
            if c.pass { "ok  " } else { "FAIL" },
            c.measured,
            c.tolerance
        );
    }
    let report = Report { schema: 1, pass, config: cfg.clone(), checks };
    println!("{}", serde_json::to_string_pretty(&report)?);
    if let Some(dir) = out_dir {
        args::write_json(&dir.join("check.json"), &report)?;
        RunConfig::new(Command::Check(cfg)).write(dir)?;
    }
    Ok(pass)
}
