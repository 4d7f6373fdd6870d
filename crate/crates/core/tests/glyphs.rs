use std::sync::OnceLock;

use spineviz_core::dataset::{Attribute, SimulationDataset};
use spineviz_core::glyphs::{glyphs_at, scrub, GlyphConfig, FORCE_EPSILON};
use spineviz_core::par::Exec;
use spineviz_core::sim::{run, Scenario, SpineModel};

fn lateral() -> &'static SimulationDataset {
    static DS: OnceLock<SimulationDataset> = OnceLock::new();
    DS.get_or_init(|| run(&SpineModel::bundled(), &Scenario::bundled_lateral_bend()).unwrap())
}

#[test]
fn full_scrub_glyphs_are_orthogonal_and_uniform() {
    let ds = lateral();
    let config = GlyphConfig::for_dataset(ds, 0.6).unwrap();
    let all = scrub(ds, &config, Exec::default()).unwrap();
    let forces = ds.matrix(Attribute::ForceVector).unwrap();
    let mut visible = 0;
    let mut hidden_zero = 0;
    for (tick, glyphs) in all.iter().enumerate() {
        assert_eq!(glyphs.len(), 8);
        for g in glyphs {
            let f = forces.get_vector(tick, forces.column(&g.disc).unwrap()).unwrap();
            if f.norm() < FORCE_EPSILON {
                assert!(!g.visible && g.arrow.is_none() && g.plane.is_none() && g.isolines.is_none());
                hidden_zero += 1;
                continue;
            }
            assert!(g.visible);
            visible += 1;
            let a = g.arrow.unwrap();
            let p = g.plane.unwrap();
            assert!(p.normal.cross(&a.direction()).norm() < 1e-9);
            assert!(p.normal.dot(&p.u).abs() < 1e-9 && p.normal.dot(&p.v).abs() < 1e-9);
            assert!((a.length() - config.arrow_length).abs() < 1e-9);
        }
    }
    assert!(visible > 3000, "{visible}");
    assert!(hidden_zero >= 8, "tick 0 is load free");
}

#[test]
fn sequential_and_parallel_scrubs_agree() {
    let ds = lateral();
    let config = GlyphConfig::for_dataset(ds, 0.5).unwrap();
    let a = scrub(ds, &config, Exec::Sequential).unwrap();
    let b = scrub(ds, &config, Exec::default()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn lateral_load_tilts_glyphs_and_sweeps_on_release() {
    let ds = lateral();
    let config = GlyphConfig::for_dataset(ds, 0.6).unwrap();
    // mid hold: force tilted toward the bending side
    let hold = glyphs_at(ds, 200, &config, Exec::Sequential).unwrap();
    let g = hold.iter().find(|g| g.disc == "C4C5").unwrap();
    assert!(g.shear_angle.unwrap() > 1.0);
    assert!(g.trajectory.as_ref().unwrap().quads.len() == 50);
}

#[test]
fn collapsed_spine_hides_arrows_but_keeps_isolines() {
    let ds = lateral();
    let config = GlyphConfig::for_dataset(ds, 0.0).unwrap();
    let glyphs = glyphs_at(ds, 150, &config, Exec::Sequential).unwrap();
    assert!(glyphs.iter().all(|g| !g.visible && g.arrow.is_none() && g.isolines.is_some()));
}
