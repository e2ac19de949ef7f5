use super::pose::{rotation_angle_deg, Pose};

/// Ground-truth baselines shorter than this leave the translation direction
/// undefined.
pub const MIN_BASELINE_M: f64 = 1e-6;

/// Angular discrepancy between an estimated and a ground-truth relative pose.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngularError {
    pub rotation_deg: f64,
    /// `None` when the ground-truth baseline is below [`MIN_BASELINE_M`].
    pub translation_deg: Option<f64>,
    /// `max(rotation_deg, translation_deg)`, or `rotation_deg` alone when the
    /// translation is undefined.
    pub pose_error_deg: f64,
}

impl AngularError {
    pub fn new(rotation_deg: f64, translation_deg: Option<f64>) -> Self {
        let pose_error_deg = match translation_deg {
            Some(t) => rotation_deg.max(t),
            None => rotation_deg,
        };
        Self { rotation_deg, translation_deg, pose_error_deg }
    }

    pub fn translation_undefined(&self) -> bool {
        self.translation_deg.is_none()
    }
}

/// Angle between two translation directions in degrees. Direction sign
/// matters: opposite directions are 180° apart. A zero-length estimate
/// carries no direction and scores 180°.
pub fn translation_angle_deg(gt: &nalgebra::Vector3<f64>, est: &nalgebra::Vector3<f64>) -> Option<f64> {
    let gt_norm = gt.norm();
    if gt_norm < MIN_BASELINE_M {
        return None;
    }
    let est_norm = est.norm();
    if est_norm == 0.0 || !est_norm.is_finite() {
        return Some(180.0);
    }
    let cos = (gt.dot(est) / (gt_norm * est_norm)).clamp(-1.0, 1.0);
    Some(cos.acos().to_degrees())
}

/// Rotation and translation-direction error of `est` against `gt`.
pub fn pose_error(gt: &Pose, est: &Pose) -> AngularError {
    let rotation_deg = rotation_angle_deg(&gt.rotation(), &est.rotation());
    let translation_deg = translation_angle_deg(gt.translation(), est.translation());
    AngularError::new(rotation_deg, translation_deg)
}
