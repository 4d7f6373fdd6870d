//! Toy multibody spine simulator.
//!
//! Rigid vertebrae are connected by translational and torsional
//! spring-dampers; adjacent pairs also carry two unilateral facet contacts.
//! The model is integrated with semi-implicit Euler at a fine internal step
//! and sampled at the scenario tick into a [`SimulationDataset`]. It is a
//! stand-in for a validated biomechanical simulator and every bundled
//! parameter value is synthetic.
//!
//! [`SimulationDataset`]: crate::dataset::SimulationDataset

mod integrator;
pub mod meshgen;
mod model;
mod run;
mod scenario;

pub use integrator::{joint_readings, step, BodyState, JointReading, Loads, SimState};
pub use model::{apply_degeneration, degeneration_factor, Body, FacetContacts, Joint, SpineModel, BUNDLED_MODEL};
pub use run::{degeneration_sweep, model_structures, run, run_many, weight_above};
pub use scenario::{ForceKey, Scenario, BUNDLED_LATERAL_BEND, BUNDLED_STATIC, DEFAULT_STEP};
