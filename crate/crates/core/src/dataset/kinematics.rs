use std::collections::HashMap;
use std::fmt::Write as _;

use nalgebra::{Quaternion, UnitQuaternion};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec3};

/// Rigid transform of a vertebra mesh at one tick: a mesh vertex `v` in rest
/// coordinates moves to `rotation * v + translation`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub rotation: UnitQuaternion<f64>,
    pub translation: Vec3,
}

impl Pose {
    pub fn identity() -> Self {
        Pose {
            rotation: UnitQuaternion::identity(),
            translation: Vec3::zeros(),
        }
    }

    /// Quaternion as `[w, x, y, z]`.
    pub fn rotation_wxyz(&self) -> [f64; 4] {
        let q = self.rotation.quaternion();
        [q.w, q.i, q.j, q.k]
    }
}

const FIELDS: [&str; 7] = ["qw", "qx", "qy", "qz", "tx", "ty", "tz"];

/// Per-tick poses of every vertebra.
#[derive(Clone, Debug, PartialEq)]
pub struct KinematicsTrack {
    times: Vec<f64>,
    vertebrae: Vec<String>,
    index: HashMap<String, usize>,
    poses: Vec<Pose>,
}

impl KinematicsTrack {
    /// `poses` is row-major: one row per tick, one pose per vertebra.
    pub fn new(times: Vec<f64>, vertebrae: Vec<String>, poses: Vec<Pose>) -> Result<Self> {
        if poses.len() != times.len() * vertebrae.len() {
            return Err(Error::format(None, "kinematics pose count does not match ticks"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::format(None, "non-monotonic kinematics time"));
        }
        let index = vertebrae
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        Ok(KinematicsTrack {
            times,
            vertebrae,
            index,
            poses,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn vertebrae(&self) -> &[String] {
        &self.vertebrae
    }

    pub fn pose(&self, tick: usize, vertebra: &str) -> Option<&Pose> {
        let v = *self.index.get(vertebra)?;
        self.poses.get(tick * self.vertebrae.len() + v)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("time");
        for v in &self.vertebrae {
            for f in FIELDS {
                write!(out, ",{v}.{f}").unwrap();
            }
        }
        out.push('\n');
        let n = self.vertebrae.len();
        for (r, t) in self.times.iter().enumerate() {
            write!(out, "{t:?}").unwrap();
            for p in &self.poses[r * n..(r + 1) * n] {
                let q = p.rotation_wxyz();
                let t = p.translation;
                for v in [q[0], q[1], q[2], q[3], t.x, t.y, t.z] {
                    write!(out, ",{v:?}").unwrap();
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Parses a kinematics CSV with header
/// `time,<v>.qw,<v>.qx,<v>.qy,<v>.qz,<v>.tx,<v>.ty,<v>.tz,...`.
///
/// Rotations are renormalised on load unless already unit within 1e-12; a stored quaternion whose norm is off
/// by more than 1e-3 is rejected as corrupt.
pub fn parse_kinematics_csv(text: &str) -> Result<KinematicsTrack> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::format(None, "empty kinematics file"))?;
    let cells: Vec<&str> = header.split(',').map(str::trim).collect();
    if cells.first().copied() != Some("time") || (cells.len() - 1) % FIELDS.len() != 0 {
        return Err(Error::format(1, "kinematics header must be `time` plus 7 columns per vertebra"));
    }
    let mut vertebrae = Vec::new();
    for chunk in cells[1..].chunks(FIELDS.len()) {
        let base = chunk[0]
            .strip_suffix(".qw")
            .ok_or_else(|| Error::format(1, format!("expected `<id>.qw`, got `{}`", chunk[0])))?;
        for (c, f) in chunk.iter().zip(FIELDS) {
            if c.strip_suffix(f).and_then(|s| s.strip_suffix('.')) != Some(base) {
                return Err(Error::format(1, format!("expected `{base}.{f}`, got `{c}`")));
            }
        }
        vertebrae.push(base.to_string());
    }

    let mut times = Vec::new();
    let mut poses = Vec::new();
    for (line, row) in lines {
        let vals: Vec<f64> = row
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::format(line, format!("invalid number `{}`", c.trim())))
            })
            .collect::<Result<_>>()?;
        if vals.len() != cells.len() {
            return Err(Error::format(line, "ragged kinematics row"));
        }
        if let Some(&prev) = times.last() {
            if vals[0] <= prev {
                return Err(Error::format(line, "non-monotonic time"));
            }
        }
        times.push(vals[0]);
        for p in vals[1..].chunks(FIELDS.len()) {
            let q = Quaternion::new(p[0], p[1], p[2], p[3]);
            if (q.norm() - 1.0).abs() > 1e-3 {
                return Err(Error::format(line, format!("rotation norm {} is not 1", q.norm())));
            }
            // already-unit rotations are kept bit-exact
            let rotation = if (q.norm() - 1.0).abs() <= 1e-12 {
                UnitQuaternion::new_unchecked(q)
            } else {
                UnitQuaternion::from_quaternion(q)
            };
            poses.push(Pose {
                rotation,
                translation: Vec3::new(p[4], p[5], p[6]),
            });
        }
    }
    KinematicsTrack::new(times, vertebrae, poses)
}
