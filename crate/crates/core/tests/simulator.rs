use spineviz_core::dataset::{validate_dataset, Attribute};
use spineviz_core::par::Exec;
use spineviz_core::sim::{
    degeneration_sweep, run, step, weight_above, ForceKey, Loads, Scenario, SimState, SpineModel,
};
use spineviz_core::Vec3;

fn last_value(ds: &spineviz_core::dataset::SimulationDataset, attr: Attribute, id: &str) -> f64 {
    let m = ds.matrix(attr).unwrap();
    m.get(m.rows() - 1, m.column(id).unwrap()).unwrap()
}

#[test]
fn static_gravity_matches_chain_equilibrium() {
    let model = SpineModel::bundled();
    let scenario = Scenario::bundled_static();
    let ds = run(&model, &scenario).unwrap();
    // C1 (head + 0.25 kg) and C2 rest on the C2C3 disc
    let oracle = (4.0 + 2.0 * 0.25) * 9.81;
    assert!((oracle - 44.145_f64).abs() < 1e-9);
    assert!((weight_above(&model, 1, scenario.gravity()).norm() - oracle).abs() < 1e-9);
    let f = last_value(&ds, Attribute::ForceMagnitude, "C2C3");
    assert!((f - oracle).abs() / oracle < 0.02, "C2C3 carries {f} N, oracle {oracle} N");
    // every lower disc carries its share too
    for (i, disc) in ["C2C3", "C3C4", "C4C5", "C5C6", "C6C7", "C7Th1", "Th1Th2", "Th2Th3"].iter().enumerate() {
        let w = weight_above(&model, i + 1, scenario.gravity()).norm();
        let f = last_value(&ds, Attribute::ForceMagnitude, disc);
        assert!((f - w).abs() / w < 0.02, "{disc}: {f} vs {w}");
    }
    // no facet contact in the upright static pose
    let m = ds.matrix(Attribute::ForceMagnitude).unwrap();
    for c in m.columns().iter().filter(|c| c.contains("facet")) {
        assert_eq!(last_value(&ds, Attribute::ForceMagnitude, c), 0.0, "{c}");
    }
}

#[test]
fn simulated_dataset_is_clean() {
    let ds = run(&SpineModel::bundled(), &Scenario::bundled_lateral_bend()).unwrap();
    let report = validate_dataset(&ds);
    assert!(report.is_clean(), "{report}");
    assert_eq!(ds.times().len(), 501);
}

#[test]
fn lateral_bend_loads_the_bending_side() {
    let model = SpineModel::bundled();
    let scenario = Scenario::bundled_lateral_bend();
    let ds = run(&model, &scenario).unwrap();
    let m = ds.matrix(Attribute::ForceMagnitude).unwrap();
    let dt = ds.manifest.dt;
    let integral = |id: &str| m.series_by_id(id).unwrap().iter().flatten().sum::<f64>() * dt;
    // the head is pushed toward the patient's left (-x)
    let k = ds.kinematics.as_ref().unwrap();
    let peak = k.times().iter().position(|&t| t >= 3.0).unwrap();
    let c1 = k.pose(peak, "C1").unwrap();
    let c1_pos = c1.rotation * Vec3::new(0.0, 153.0, 0.0) + c1.translation;
    assert!(c1_pos.x < -1.0, "head did not bend left: {c1_pos:?}");
    for pair in ["C2C3", "C3C4", "C4C5", "C5C6", "C6C7", "C7Th1", "Th1Th2", "Th2Th3"] {
        let l = integral(&format!("{pair}_facetL"));
        let r = integral(&format!("{pair}_facetR"));
        println!("{pair}: left {l:.3} N·s, right {r:.3} N·s");
        assert!(l > r, "{pair}: left {l} <= right {r}");
    }
}

#[test]
fn degeneration_never_reduces_peak_deformation() {
    let model = SpineModel::bundled();
    let sweep = degeneration_sweep(&model, &Scenario::bundled_lateral_bend(), Exec::default()).unwrap();
    let peaks: Vec<f64> = sweep
        .iter()
        .map(|ds| ds.matrix(Attribute::Deformation).unwrap().max_value().unwrap())
        .collect();
    println!("peak deformation by degree: {peaks:?}");
    assert!(peaks.windows(2).all(|w| w[1] >= w[0]), "{peaks:?}");
}

#[test]
fn sweep_is_identical_sequential_and_parallel() {
    let model = SpineModel::bundled();
    let mut s = Scenario::bundled_lateral_bend();
    s.duration = 1.0;
    let a = degeneration_sweep(&model, &s, Exec::Sequential).unwrap();
    let b = degeneration_sweep(&model, &s, Exec::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn runs_are_bit_identical() {
    let model = SpineModel::bundled();
    let s = Scenario::bundled_lateral_bend();
    let a = run(&model, &s).unwrap();
    let b = run(&model, &s).unwrap();
    for attr in Attribute::ALL {
        assert_eq!(a.matrix(attr).unwrap().to_csv(), b.matrix(attr).unwrap().to_csv());
    }
    assert_eq!(a, b);
}

#[test]
fn kinetic_energy_settles_under_constant_load() {
    let model = SpineModel::bundled();
    let mut s = Scenario::bundled_static();
    s.duration = 20.0;
    s.force = vec![ForceKey { t: 0.0, f: [-8.0, 0.0, 3.0] }];
    let mut state = SimState::rest(&model);
    let mut peak: f64 = 0.0;
    let steps = (s.duration / s.step).round() as usize;
    for i in 0..steps {
        let loads = Loads { gravity: s.gravity(), head_force: s.external_force(i as f64 * s.step) };
        state = step(&model, &state, &loads, s.step).unwrap();
        peak = peak.max(state.kinetic_energy(&model));
    }
    let end = state.kinetic_energy(&model);
    println!("peak {peak:e}, final {end:e}");
    assert!(peak > 0.0 && end < 1e-6 * peak, "peak {peak:e}, final {end:e}");
}
