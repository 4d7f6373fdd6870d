use nalgebra::UnitQuaternion;

use super::SpineModel;
use crate::{Error, Result, Vec3};

/// Force in N times this factor over mass in kg gives mm/s².
const MM_PER_M: f64 = 1000.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BodyState {
    /// mm
    pub position: Vec3,
    pub orientation: UnitQuaternion<f64>,
    /// mm/s
    pub velocity: Vec3,
    /// rad/s, world frame
    pub angular_velocity: Vec3,
}

impl BodyState {
    fn is_finite(&self) -> bool {
        let q = self.orientation.quaternion();
        self.position.iter().chain(self.velocity.iter()).chain(self.angular_velocity.iter()).all(|v| v.is_finite())
            && q.coords.iter().all(|v| v.is_finite())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimState {
    /// s
    pub time: f64,
    pub bodies: Vec<BodyState>,
}

impl SimState {
    /// All bodies at their rest pose, at rest.
    pub fn rest(model: &SpineModel) -> Self {
        SimState {
            time: 0.0,
            bodies: model
                .bodies
                .iter()
                .map(|b| BodyState {
                    position: b.rest_position(),
                    orientation: b.rest_orientation(),
                    velocity: Vec3::zeros(),
                    angular_velocity: Vec3::zeros(),
                })
                .collect(),
        }
    }

    /// Kinetic energy in N·mm (mJ).
    pub fn kinetic_energy(&self, model: &SpineModel) -> f64 {
        self.bodies
            .iter()
            .zip(&model.bodies)
            .map(|(s, b)| 0.5 * (b.mass * s.velocity.norm_squared() + b.inertia * s.angular_velocity.norm_squared()) / MM_PER_M)
            .sum()
    }
}

/// Gravity and the external head force acting during a step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Loads {
    /// mm/s²
    pub gravity: Vec3,
    /// N, applied at the head point of the topmost body
    pub head_force: Vec3,
}

impl Loads {
    pub fn none() -> Self {
        Loads {
            gravity: Vec3::zeros(),
            head_force: Vec3::zeros(),
        }
    }
}

/// Per-joint quantities at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JointReading {
    /// Force exerted by the cranial body on the joint, N, world frame.
    pub force: Vec3,
    /// Norm of the translational joint displacement, mm.
    pub deformation: f64,
    /// Contact force magnitudes of the left and right facet, N.
    pub facet_left: f64,
    pub facet_right: f64,
    /// Contact gaps, mm (negative under compression).
    pub gap_left: f64,
    pub gap_right: f64,
}

/// Unit vector toward the patient's left.
fn left() -> Vec3 {
    -Vec3::x()
}

struct Accum {
    force: Vec<Vec3>,
    torque: Vec<Vec3>,
}

/// Evaluates every joint and, when `accum` is given, accumulates the
/// resulting forces (N) and torques (N·mm) on the bodies.
fn evaluate(model: &SpineModel, state: &SimState, mut accum: Option<&mut Accum>) -> Vec<JointReading> {
    let pairs = model.joint_bodies();
    let deviation: Vec<UnitQuaternion<f64>> = state
        .bodies
        .iter()
        .zip(&model.bodies)
        .map(|(s, b)| s.orientation * b.rest_orientation().inverse())
        .collect();
    let mut out = Vec::with_capacity(model.joints.len());
    for (joint, &(a, b)) in model.joints.iter().zip(&pairs) {
        let (sa, sb) = (&state.bodies[a], &state.bodies[b]);
        let (ra, rb) = (model.bodies[a].rest_position(), model.bodies[b].rest_position());

        let d = (sa.position - sb.position) - (ra - rb);
        let v = sa.velocity - sb.velocity;
        let k = Vec3::from(joint.stiffness);
        let c = Vec3::from(joint.damping);
        let on_joint = k.component_mul(&d) + c.component_mul(&v);

        let rel = deviation[a] * deviation[b].inverse();
        let torsion = -rel.scaled_axis() * joint.rotational_stiffness
            - (sa.angular_velocity - sb.angular_velocity) * joint.rotational_damping;

        let mut reading = JointReading {
            force: on_joint,
            deformation: d.norm(),
            facet_left: 0.0,
            facet_right: 0.0,
            gap_left: f64::INFINITY,
            gap_right: f64::INFINITY,
        };

        if let Some(acc) = accum.as_deref_mut() {
            acc.force[a] -= on_joint;
            acc.force[b] += on_joint;
            acc.torque[a] += torsion;
            acc.torque[b] -= torsion;
        }

        if let Some(f) = &joint.facets {
            let centre = (ra + rb) * 0.5;
            let normal = deviation[b] * Vec3::y();
            for (side, sign) in [(0, 1.0), (1, -1.0)] {
                let rest_point = centre + left() * (sign * f.offset);
                let arm_a = deviation[a] * (rest_point - ra);
                let arm_b = deviation[b] * (rest_point - rb);
                let pa = sa.position + arm_a;
                let pb = sb.position + arm_b;
                let gap = (pa - pb).dot(&normal) + f.clearance;
                let magnitude = if gap < 0.0 { -gap * f.stiffness } else { 0.0 };
                if side == 0 {
                    reading.facet_left = magnitude;
                    reading.gap_left = gap;
                } else {
                    reading.facet_right = magnitude;
                    reading.gap_right = gap;
                }
                if magnitude > 0.0 {
                    if let Some(acc) = accum.as_deref_mut() {
                        let push = normal * magnitude;
                        acc.force[a] += push;
                        acc.torque[a] += arm_a.cross(&push);
                        acc.force[b] -= push;
                        acc.torque[b] -= arm_b.cross(&push);
                    }
                }
            }
        }
        out.push(reading);
    }
    out
}

/// Joint forces, deformations and facet loads for a state.
pub fn joint_readings(model: &SpineModel, state: &SimState) -> Vec<JointReading> {
    evaluate(model, state, None)
}

/// Advances the state by `dt` with semi-implicit Euler: velocities are
/// updated from the current forces first, then positions and orientations
/// from the new velocities.
pub fn step(model: &SpineModel, state: &SimState, loads: &Loads, dt: f64) -> Result<SimState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Parameter(format!("step size must be positive, got {dt}")));
    }
    let n = model.bodies.len();
    let mut acc = Accum {
        force: vec![Vec3::zeros(); n],
        torque: vec![Vec3::zeros(); n],
    };
    evaluate(model, state, Some(&mut acc));

    if loads.head_force != Vec3::zeros() {
        let top = &state.bodies[0];
        let deviation = top.orientation * model.bodies[0].rest_orientation().inverse();
        let arm = deviation * Vec3::from(model.head_offset);
        acc.force[0] += loads.head_force;
        acc.torque[0] += arm.cross(&loads.head_force);
    }

    let time = state.time + dt;
    let mut bodies = state.bodies.clone();
    for (i, (s, b)) in bodies.iter_mut().zip(&model.bodies).enumerate() {
        if b.fixed {
            continue;
        }
        s.velocity += (acc.force[i] * (MM_PER_M / b.mass) + loads.gravity) * dt;
        s.angular_velocity += acc.torque[i] * (MM_PER_M / b.inertia * dt);
        s.position += s.velocity * dt;
        let spin = UnitQuaternion::from_scaled_axis(s.angular_velocity * dt);
        let mut q = spin * s.orientation;
        q.renormalize();
        s.orientation = q;
        if !s.is_finite() {
            return Err(Error::Divergence {
                body: b.id.clone(),
                time,
            });
        }
    }
    Ok(SimState { time, bodies })
}
