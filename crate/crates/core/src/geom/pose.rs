use nalgebra::{Matrix3, Matrix4, Quaternion, Rotation3, UnitQuaternion, Vector3};

use super::GeomError;

/// Tolerance on `R·Rᵀ = I` and `det(R) = 1` for poses built from matrices.
pub const ORTHONORMAL_TOLERANCE: f64 = 1e-9;

/// Rigid transform in the camera-from-world convention: a world point `X`
/// maps to camera coordinates `R·X + t`.
///
/// The rotation is stored as a unit quaternion so that poses read from text
/// files survive a save/load cycle bit for bit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    rotation: UnitQuaternion<f64>,
    translation: Vector3<f64>,
}

impl Pose {
    pub fn identity() -> Self {
        Self {
            rotation: UnitQuaternion::identity(),
            translation: Vector3::zeros(),
        }
    }

    /// Builds a pose from a rotation matrix, rejecting matrices that are not
    /// proper rotations.
    pub fn from_matrix(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self, GeomError> {
        let ortho = (rotation * rotation.transpose() - Matrix3::identity()).abs().max();
        let det = rotation.determinant();
        if !ortho.is_finite() || ortho > ORTHONORMAL_TOLERANCE || (det - 1.0).abs() > ORTHONORMAL_TOLERANCE {
            return Err(GeomError::NotARotation { orthogonality: ortho, determinant: det });
        }
        if !translation.iter().all(|v| v.is_finite()) {
            return Err(GeomError::NonFinite);
        }
        let rot = Rotation3::from_matrix_unchecked(rotation);
        Ok(Self {
            rotation: UnitQuaternion::from_rotation_matrix(&rot),
            translation,
        })
    }

    /// Builds a pose from quaternion components (`w` last), normalizing them.
    ///
    /// Components that are already unit length to within a few ulps are kept
    /// verbatim so that repeated load/save cycles are lossless.
    pub fn from_quaternion(qx: f64, qy: f64, qz: f64, qw: f64, translation: Vector3<f64>) -> Result<Self, GeomError> {
        let q = Quaternion::new(qw, qx, qy, qz);
        let norm = q.norm();
        if !norm.is_finite() || norm < 1e-12 || !translation.iter().all(|v| v.is_finite()) {
            return Err(GeomError::NonFinite);
        }
        let rotation = if (norm - 1.0).abs() <= 4.0 * f64::EPSILON {
            UnitQuaternion::new_unchecked(q)
        } else {
            UnitQuaternion::from_quaternion(q)
        };
        Ok(Self { rotation, translation })
    }

    pub fn from_parts(rotation: UnitQuaternion<f64>, translation: Vector3<f64>) -> Self {
        Self { rotation, translation }
    }

    /// Camera-from-world pose of a camera sitting at `center` with the given
    /// world-from-camera orientation.
    pub fn from_center(world_from_camera: UnitQuaternion<f64>, center: Vector3<f64>) -> Self {
        let rotation = world_from_camera.inverse();
        Self {
            rotation,
            translation: -(rotation * center),
        }
    }

    pub fn quaternion(&self) -> &UnitQuaternion<f64> {
        &self.rotation
    }

    pub fn rotation(&self) -> Matrix3<f64> {
        self.rotation.to_rotation_matrix().into_inner()
    }

    pub fn translation(&self) -> &Vector3<f64> {
        &self.translation
    }

    /// Camera center in world coordinates (`-Rᵀ·t`).
    pub fn center(&self) -> Vector3<f64> {
        -(self.rotation.inverse() * self.translation)
    }

    pub fn transform_point(&self, x: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * x + self.translation
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> Pose {
        let inv = self.rotation.inverse();
        Pose {
            rotation: inv,
            translation: -(inv * self.translation),
        }
    }

    /// Transform taking camera-`a` coordinates to camera-`b` coordinates,
    /// i.e. `b ∘ a⁻¹`.
    pub fn relative(a: &Pose, b: &Pose) -> Pose {
        b.compose(&a.inverse())
    }

    pub fn to_homogeneous(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&self.rotation());
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }

    /// Rotation angle of `self` in degrees.
    pub fn rotation_angle_deg(&self) -> f64 {
        rotation_angle_deg(&self.rotation(), &Matrix3::identity())
    }
}

impl Default for Pose {
    fn default() -> Self {
        Self::identity()
    }
}

/// Angle in degrees of `aᵀ·b`, with the arccos argument clamped to [-1, 1].
pub fn rotation_angle_deg(a: &Matrix3<f64>, b: &Matrix3<f64>) -> f64 {
    let cos = (((a.transpose() * b).trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    cos.acos().to_degrees()
}
