use elastiscat::forward::{cube_face_directions, scattering_operator, IncidentWave, MeasurementSet, SolverOptions};
use elastiscat::geometry::{ellipsoid, sphere, SurfaceParam};
use elastiscat::inverse::{
    continuation_run, initial_guess, surface_error, DirectionMode, FrequencySchedule, InversionConfig, LineSearch,
    StepRule,
};
use elastiscat::modal::Medium;
use elastiscat::specfun::fibonacci_sphere;
use elastiscat::Error;

fn synth(truth: &SurfaceParam, freqs: &[f64], waves: &[IncidentWave], order: usize) -> Vec<MeasurementSet> {
    let points = fibonacci_sphere(60, 1.0);
    let opts = SolverOptions { order: Some(order), ..Default::default() };
    let mut out = Vec::new();
    for &w in freqs {
        let med = Medium::new(2.0, 1.0, w).unwrap();
        for wave in waves {
            out.push(scattering_operator(truth, wave, &med, 1.0, &points, &opts).unwrap());
        }
    }
    out
}

fn p_wave() -> IncidentWave {
    IncidentWave::compressional([0.0, 1.0, 0.0]).unwrap()
}

fn config(order: usize) -> InversionConfig {
    InversionConfig { solver_order: Some(order), ..Default::default() }
}

#[test]
fn stationary_point_is_left_alone() {
    let data = synth(&sphere(1, 0.5), &[1.0], &[p_wave()], 8);
    let schedule = FrequencySchedule::new(&[1.0], 5, StepRule::default()).unwrap();
    let state = continuation_run(&data, &schedule, &config(8)).unwrap();
    let start = initial_guess(0.5, 1).unwrap();
    for (a, b) in state.surface.coeffs().iter().zip(start.coeffs()) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
    assert!(state.history.iter().all(|h| h.objective < 1e-20));
}

#[test]
fn sphere_is_recovered_in_one_stage() {
    let truth = sphere(1, 0.6);
    let waves: Vec<IncidentWave> =
        cube_face_directions().into_iter().map(|d| IncidentWave::compressional(d).unwrap()).collect();
    let data = synth(&truth, &[1.0], &waves, 8);
    let schedule = FrequencySchedule::new(&[1.0], 100, StepRule::default()).unwrap();
    let state = continuation_run(&data, &schedule, &config(8)).unwrap();
    let f: Vec<f64> = state.history.iter().map(|h| h.objective).collect();
    assert!(f[..10].windows(2).all(|p| p[1] <= p[0]), "{:?}", &f[..10]);
    let err = surface_error(&state.surface, &truth).unwrap();
    assert!(err < 0.01, "relative error {err}");
    assert!(surface_error(&initial_guess(0.5, 1).unwrap(), &truth).unwrap() > 0.1);
}

#[test]
fn stages_grow_the_coefficient_set() {
    let freqs = [1.0, 2.0, 3.0];
    let data = synth(&ellipsoid(2, [0.55, 0.6, 0.65]), &freqs, &[p_wave()], 8);
    let schedule = FrequencySchedule::new(&freqs, 2, StepRule::default()).unwrap();
    let state = continuation_run(&data, &schedule, &config(8)).unwrap();
    assert_eq!(state.snapshots.len(), 3);
    for (snap, k) in state.snapshots.iter().zip([1usize, 2, 3]) {
        assert_eq!(snap.surface.order(), k);
        assert_eq!(snap.surface.coeffs().len(), 6 * (k + 1) * (k + 1));
    }
    assert_eq!(state.history.len(), 6);
    let csv = state.history_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("stage,iteration,omega,objective,gradient_norm,step"));
    assert_eq!(lines.count(), 6);
    // steps follow τ = c / k
    let taus: Vec<f64> = schedule.stages.iter().map(|s| s.tau).collect();
    assert_eq!(taus, vec![0.005, 0.0025, 0.005 / 3.0]);
}

#[test]
fn runs_are_deterministic() {
    let data = synth(&ellipsoid(1, [0.55, 0.6, 0.65]), &[1.0, 2.0], &[p_wave()], 8);
    let schedule = FrequencySchedule::new(&[1.0, 2.0], 3, StepRule::default()).unwrap();
    let a = continuation_run(&data, &schedule, &config(8)).unwrap();
    let b = continuation_run(&data, &schedule, &config(8)).unwrap();
    assert_eq!(a, b);
    assert_eq!(serde_json::to_string(&a.surface).unwrap(), serde_json::to_string(&b.surface).unwrap());
}

#[test]
fn sequential_directions_and_backtracking() {
    let waves = [p_wave(), IncidentWave::compressional([1.0, 0.0, 0.0]).unwrap()];
    let data = synth(&sphere(1, 0.6), &[1.0], &waves, 8);
    let schedule = FrequencySchedule::new(&[1.0], 4, StepRule::Fixed { tau: 0.05 }).unwrap();
    let cfg =
        InversionConfig { directions: DirectionMode::Sequential, line_search: LineSearch::Backtracking, ..config(8) };
    let state = continuation_run(&data, &schedule, &cfg).unwrap();
    assert_eq!(state.history.len(), 8);
    assert_eq!(state.snapshots.len(), 1);
    // each accepted step satisfies sufficient decrease, so within a sweep f falls
    for sweep in state.history.chunks(4) {
        assert!(sweep.windows(2).all(|p| p[1].objective < p[0].objective));
    }
}

#[test]
fn failures_carry_the_partial_state() {
    let data = synth(&sphere(1, 0.6), &[1.0], &[p_wave()], 8);
    let schedule = FrequencySchedule::new(&[1.0], 3, StepRule::default()).unwrap();
    let cfg = InversionConfig { residual_tol: 1e-30, ..config(8) };
    match continuation_run(&data, &schedule, &cfg) {
        Err(Error::Aborted { stage, partial, .. }) => {
            assert_eq!(stage, 0);
            assert_eq!(partial.surface, initial_guess(0.5, 1).unwrap());
        }
        other => panic!("expected an abort, got {other:?}"),
    }
    let missing = FrequencySchedule::new(&[1.0, 2.0], 3, StepRule::default()).unwrap();
    assert!(matches!(continuation_run(&data, &missing, &config(8)), Err(Error::Invalid(_))));
}

#[test]
fn schedule_construction() {
    assert_eq!(FrequencySchedule::range(1.0, 3.0, 1.0).unwrap(), vec![1.0, 2.0, 3.0]);
    assert_eq!(FrequencySchedule::range(0.5, 1.6, 0.5).unwrap(), vec![0.5, 1.0, 1.5]);
    assert!(FrequencySchedule::range(1.0, 0.5, 1.0).is_err());
    let s = FrequencySchedule::new(&[0.5, 1.5, 2.5], 10, StepRule::default()).unwrap();
    let orders: Vec<usize> = s.stages.iter().map(|st| st.order).collect();
    assert_eq!(orders, vec![1, 1, 2]);
    assert!(FrequencySchedule::new(&[2.0, 1.0], 10, StepRule::default()).is_err());
    assert!(FrequencySchedule::new(&[], 10, StepRule::default()).is_err());
    let cfg: InversionConfig = serde_json::from_str(r#"{"iterations": 7}"#).unwrap();
    assert_eq!(cfg.iterations, 7);
    assert_eq!(cfg.initial_radius, 0.5);
}
