use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::SpineModel;
use crate::{Error, Result, Vec3};

pub const BUNDLED_STATIC: &str = include_str!("../../data/static_scenario.toml");
pub const BUNDLED_LATERAL_BEND: &str = include_str!("../../data/lateral_bend_scenario.toml");

/// Internal integration step used when a scenario does not set one.
pub const DEFAULT_STEP: f64 = 1e-3;

/// One keyframe of the external head force.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForceKey {
    /// s
    pub t: f64,
    /// N, world frame
    pub f: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_name")]
    pub name: String,
    /// s
    pub duration: f64,
    /// Output tick interval, s.
    #[serde(default = "default_tick")]
    pub tick: f64,
    /// Internal integration step, s.
    #[serde(default = "default_step")]
    pub step: f64,
    /// mm/s²
    pub gravity: [f64; 3],
    /// Piecewise-linear external force on the topmost body. Held constant
    /// outside the keyframe range; zero when empty.
    #[serde(default)]
    pub force: Vec<ForceKey>,
    #[serde(default = "default_degree")]
    pub default_degeneration: u8,
    /// Per-disc degeneration degree (1..=5) overriding the default.
    #[serde(default)]
    pub degeneration: BTreeMap<String, u8>,
}

fn default_name() -> String {
    "simulation".into()
}
fn default_tick() -> f64 {
    0.01
}
fn default_step() -> f64 {
    DEFAULT_STEP
}
fn default_degree() -> u8 {
    1
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let s: Scenario = toml::from_str(text).map_err(|e| Error::Parameter(format!("scenario: {e}")))?;
        s.validate()?;
        Ok(s)
    }

    pub fn bundled_static() -> Self {
        Self::parse(BUNDLED_STATIC).expect("bundled scenario is valid")
    }

    pub fn bundled_lateral_bend() -> Self {
        Self::parse(BUNDLED_LATERAL_BEND).expect("bundled scenario is valid")
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serialises")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Parameter(format!("scenario `{}`: {m}", self.name)));
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return bad("duration must be positive");
        }
        if !(self.step > 0.0 && self.tick > 0.0) {
            return bad("tick and step must be positive");
        }
        let ratio = self.tick / self.step;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) || ratio.round() < 1.0 {
            return bad("tick must be an integer multiple of step");
        }
        if self.force.windows(2).any(|w| w[1].t <= w[0].t) {
            return bad("force keyframes must have increasing times");
        }
        if self.gravity.iter().chain(self.force.iter().flat_map(|k| k.f.iter())).any(|v| !v.is_finite()) {
            return bad("non-finite load");
        }
        Ok(())
    }

    /// Internal steps per output tick.
    pub fn steps_per_tick(&self) -> usize {
        (self.tick / self.step).round() as usize
    }

    pub fn gravity(&self) -> Vec3 {
        Vec3::from(self.gravity)
    }

    pub fn external_force(&self, t: f64) -> Vec3 {
        let keys = self.force.as_slice();
        match keys {
            [] => Vec3::zeros(),
            [first, ..] if t <= first.t => Vec3::from(first.f),
            [.., last] if t >= last.t => Vec3::from(last.f),
            _ => {
                let i = keys.partition_point(|k| k.t <= t);
                let (a, b) = (&keys[i - 1], &keys[i]);
                let u = (t - a.t) / (b.t - a.t);
                Vec3::from(a.f) * (1.0 - u) + Vec3::from(b.f) * u
            }
        }
    }

    /// Degeneration degree of every disc of `model`.
    pub fn degrees(&self, model: &SpineModel) -> Result<BTreeMap<String, u8>> {
        let mut out: BTreeMap<String, u8> = model
            .disc_joints()
            .map(|j| (j.id(), self.default_degeneration))
            .collect();
        for (disc, &d) in &self.degeneration {
            match out.get_mut(disc) {
                Some(slot) => *slot = d,
                None => return Err(Error::Parameter(format!("scenario names unknown disc `{disc}`"))),
            }
        }
        Ok(out)
    }

    /// Same scenario with every disc at degree `d`.
    pub fn with_uniform_degeneration(&self, d: u8) -> Scenario {
        Scenario {
            name: format!("{}_d{d}", self.name),
            default_degeneration: d,
            degeneration: BTreeMap::new(),
            ..self.clone()
        }
    }
}
