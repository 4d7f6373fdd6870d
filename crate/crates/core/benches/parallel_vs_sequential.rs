use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spineviz_core::glyphs::{scrub, GlyphConfig};
use spineviz_core::layout::{layout_charts, StructureGroup, ViewConfig};
use spineviz_core::par::Exec;
use spineviz_core::sim::{degeneration_sweep, run, Scenario, SpineModel};

fn strategies() -> Vec<(&'static str, Exec)> {
    let mut s = vec![("sequential", Exec::Sequential)];
    #[cfg(feature = "parallel")]
    s.push(("parallel", Exec::Parallel));
    s
}

fn sweep(c: &mut Criterion) {
    let model = SpineModel::bundled();
    let mut scenario = Scenario::bundled_lateral_bend();
    scenario.duration = 1.0;
    let mut group = c.benchmark_group("degeneration_sweep");
    group.sample_size(10).measurement_time(Duration::from_secs(10));
    for (name, exec) in strategies() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| degeneration_sweep(&model, &scenario, exec).unwrap())
        });
    }
    group.finish();
}

fn glyph_scrub(c: &mut Criterion) {
    let mut scenario = Scenario::bundled_lateral_bend();
    scenario.duration = 1.0;
    let ds = run(&SpineModel::bundled(), &scenario).unwrap();
    let config = GlyphConfig::for_dataset(&ds, 0.5).unwrap();
    let mut group = c.benchmark_group("glyph_scrub");
    group.sample_size(10);
    for (name, exec) in strategies() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| scrub(&ds, &config, exec).unwrap()));
    }
    group.finish();
}

/// Several views of one dataset laid out side by side.
fn concurrent_layouts(c: &mut Criterion) {
    let ds = run(&SpineModel::bundled(), &Scenario::bundled_lateral_bend()).unwrap();
    let configs: Vec<ViewConfig> = (0..16)
        .map(|i| ViewConfig {
            t: i as f64 * 0.3,
            spacing: i as f64 / 16.0,
            group: if i % 2 == 0 { StructureGroup::Discs } else { StructureGroup::Facets },
            ..Default::default()
        })
        .collect();
    let mut group = c.benchmark_group("layout_views");
    for (name, exec) in strategies() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| exec.map(&configs, |cfg| layout_charts(&ds, &[], cfg).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, sweep, glyph_scrub, concurrent_layouts);
criterion_main!(benches);
