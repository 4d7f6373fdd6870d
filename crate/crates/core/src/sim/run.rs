use std::collections::BTreeMap;

use super::integrator::{joint_readings, step, Loads, SimState};
use super::meshgen::{disc_mesh, vertebra_mesh};
use super::{apply_degeneration, Scenario, SpineModel};
use crate::dataset::{
    assemble, expand_span, Attribute, DatasetManifest, KinematicsTrack, Pose, SimulationDataset, StructureKind,
    StructureRef, ValueMatrix,
};
use crate::par::Exec;
use crate::{Error, Result, Vec3};

/// Registry entries (discs, then left/right facets per joint) of a model.
pub fn model_structures(model: &SpineModel) -> Vec<StructureRef> {
    let mut out = Vec::new();
    for j in &model.joints {
        if j.disc {
            out.push(StructureRef::joint(j.id(), StructureKind::Disc, &j.cranial, &j.caudal));
        }
        if j.facets.is_some() {
            let [l, r] = j.facet_ids();
            out.push(StructureRef::joint(l, StructureKind::FacetLeft, &j.cranial, &j.caudal));
            out.push(StructureRef::joint(r, StructureKind::FacetRight, &j.cranial, &j.caudal));
        }
    }
    out
}

fn model_span(model: &SpineModel) -> Result<String> {
    let first = &model.bodies[0].id;
    let last = &model.bodies[model.bodies.len() - 1].id;
    let span = format!("{first}..{last}");
    let ids: Vec<&String> = model.bodies.iter().map(|b| &b.id).collect();
    match expand_span(&span) {
        Ok(v) if v.iter().collect::<Vec<_>>() == ids => Ok(span),
        _ => Err(Error::Parameter(format!(
            "body ids must be consecutive vertebra names (got span {span} with {} bodies)",
            ids.len()
        ))),
    }
}

/// Simulates a scenario and returns the result as a dataset.
///
/// Rows are written every `scenario.tick` starting at t = 0. Disc columns
/// carry the force exerted by the cranial vertebra on the disc (vector and
/// magnitude) and the translational joint displacement; facet columns carry
/// contact force magnitudes.
pub fn run(model: &SpineModel, scenario: &Scenario) -> Result<SimulationDataset> {
    model.validate()?;
    scenario.validate()?;
    let model = apply_degeneration(model, &scenario.degrees(model)?)?;
    let span = model_span(&model)?;
    let structures = model_structures(&model);

    let disc_idx: Vec<usize> = (0..model.joints.len()).filter(|&i| model.joints[i].disc).collect();
    let facet_idx: Vec<usize> = (0..model.joints.len()).filter(|&i| model.joints[i].facets.is_some()).collect();

    let ticks = (scenario.duration / scenario.tick + 1e-9).floor() as usize + 1;
    let per_tick = scenario.steps_per_tick();
    let gravity = scenario.gravity();

    let mut times = Vec::with_capacity(ticks);
    let mut vec_rows = Vec::with_capacity(ticks);
    let mut mag_rows = Vec::with_capacity(ticks);
    let mut def_rows = Vec::with_capacity(ticks);
    let mut poses = Vec::with_capacity(ticks * model.bodies.len());

    let mut state = SimState::rest(&model);
    for tick in 0..ticks {
        let t = tick as f64 * scenario.tick;
        let readings = joint_readings(&model, &state);
        times.push(t);
        vec_rows.push(disc_idx.iter().map(|&i| Some(readings[i].force)).collect::<Vec<_>>());
        let mut mags: Vec<Option<f64>> = disc_idx.iter().map(|&i| Some(readings[i].force.norm())).collect();
        for &i in &facet_idx {
            mags.push(Some(readings[i].facet_left));
            mags.push(Some(readings[i].facet_right));
        }
        mag_rows.push(mags);
        def_rows.push(disc_idx.iter().map(|&i| Some(readings[i].deformation)).collect::<Vec<_>>());
        for (s, b) in state.bodies.iter().zip(&model.bodies) {
            let rotation = s.orientation * b.rest_orientation().inverse();
            poses.push(Pose {
                rotation,
                translation: s.position - rotation * b.rest_position(),
            });
        }

        if tick + 1 == ticks {
            break;
        }
        for k in 0..per_tick {
            let now = t + k as f64 * scenario.step;
            let loads = Loads {
                gravity,
                head_force: scenario.external_force(now),
            };
            state = step(&model, &state, &loads, scenario.step)?;
        }
        // keep the clock on the tick grid
        state.time = (tick + 1) as f64 * scenario.tick;
    }

    let disc_ids: Vec<String> = disc_idx.iter().map(|&i| model.joints[i].id()).collect();
    let mut mag_ids = disc_ids.clone();
    for &i in &facet_idx {
        mag_ids.extend(model.joints[i].facet_ids());
    }

    let matrices = vec![
        ValueMatrix::from_vector_rows(times.clone(), disc_ids.clone(), &vec_rows)?,
        ValueMatrix::from_rows(Attribute::ForceMagnitude, times.clone(), mag_ids, &mag_rows)?,
        ValueMatrix::from_rows(Attribute::Deformation, times.clone(), disc_ids, &def_rows)?,
    ];
    let vertebrae: Vec<String> = model.bodies.iter().map(|b| b.id.clone()).collect();
    let kinematics = KinematicsTrack::new(times, vertebrae, poses)?;

    let mut meshes: Vec<_> = model.bodies.iter().map(|b| vertebra_mesh(&b.id, b.rest_position())).collect();
    for &i in &disc_idx {
        let j = &model.joints[i];
        let a = model.bodies[model.body_index(&j.cranial).unwrap()].rest_position();
        let b = model.bodies[model.body_index(&j.caudal).unwrap()].rest_position();
        meshes.push(disc_mesh(&j.id(), a, b));
    }

    let manifest = DatasetManifest {
        id: scenario.name.clone(),
        span,
        dt: scenario.tick,
        matrices: BTreeMap::new(),
        kinematics: None,
        meshes: BTreeMap::new(),
        compare: None,
        structures,
    };
    assemble(manifest, matrices, Some(kinematics), meshes)
}

/// Runs independent scenarios, in parallel when available. Results keep
/// the input order.
pub fn run_many(model: &SpineModel, scenarios: &[Scenario], exec: Exec) -> Vec<Result<SimulationDataset>> {
    exec.map(scenarios, |s| run(model, s))
}

/// Degrees 1..=5 applied uniformly to every disc under one scenario.
pub fn degeneration_sweep(model: &SpineModel, scenario: &Scenario, exec: Exec) -> Result<Vec<SimulationDataset>> {
    let scenarios: Vec<Scenario> = (1..=5).map(|d| scenario.with_uniform_degeneration(d)).collect();
    run_many(model, &scenarios, exec).into_iter().collect()
}

/// Force on the topmost body's centre of mass, helpful for oracles: the
/// static load carried by the joint below body `index` is the weight of all
/// bodies above and including it.
pub fn weight_above(model: &SpineModel, index: usize, gravity: Vec3) -> Vec3 {
    model.bodies[..=index].iter().map(|b| b.mass).sum::<f64>() * gravity / 1000.0
}
