use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, Vec3};

/// Largest tolerated entry of `φᵀφ − I` before a rotation is rejected.
pub const ORTHONORMAL_TOLERANCE: f64 = 1e-6;

/// A force expressed both globally and in the frame of a rotated body.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalForce {
    pub global: Vec3,
    pub rotation: Matrix3<f64>,
    pub local: Vec3,
}

impl LocalForce {
    pub fn new(global: Vec3, rotation: Matrix3<f64>) -> Result<Self> {
        Ok(LocalForce {
            global,
            rotation,
            local: to_local_force(global, &rotation)?,
        })
    }
}

fn check_rotation(phi: &Matrix3<f64>) -> Result<()> {
    let deviation = (phi.transpose() * phi - Matrix3::identity()).abs().max();
    let det = phi.determinant();
    if !(deviation <= ORTHONORMAL_TOLERANCE) || (det - 1.0).abs() > ORTHONORMAL_TOLERANCE {
        return Err(Error::Frame {
            deviation: deviation.max((det - 1.0).abs()),
        });
    }
    Ok(())
}

/// Undoes a body rotation on a global force: returns `φᵀ f`.
pub fn to_local_force(f: Vec3, phi: &Matrix3<f64>) -> Result<Vec3> {
    check_rotation(phi)?;
    Ok(phi.tr_mul(&f))
}

/// Two unit vectors spanning the plane orthogonal to the unit vector `n`.
pub fn orthonormal_basis(n: &Vec3) -> (Vec3, Vec3) {
    // helper axis least aligned with n
    let a = n.abs();
    let helper = if a.x <= a.y && a.x <= a.z {
        Vec3::x()
    } else if a.y <= a.z {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let u = (helper - n * n.dot(&helper)).normalize();
    let v = n.cross(&u);
    (u, v)
}
