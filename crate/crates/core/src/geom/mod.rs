//! Poses, pinhole cameras, depth maps, homographies and angular errors.
//!
//! Every pose is camera-from-world: a world point `X` lands at `R·X + t` in
//! camera coordinates. Depth is z-depth along the optical axis.

mod angular;
mod camera;
mod depth;
mod homography;
mod pose;

pub use angular::{pose_error, translation_angle_deg, AngularError, MIN_BASELINE_M};
pub use camera::{Camera, Pixel};
pub use depth::{DepthMap, DISCONTINUITY_RATIO};
pub use homography::Homography;
pub use pose::{rotation_angle_deg, Pose, ORTHONORMAL_TOLERANCE};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeomError {
    #[error("matrix is not a rotation (|RRᵀ-I| = {orthogonality:e}, det = {determinant})")]
    NotARotation { orthogonality: f64, determinant: f64 },
    #[error("non-finite or degenerate value")]
    NonFinite,
    #[error("invalid camera: {0}")]
    InvalidCamera(String),
    #[error("point is behind the camera")]
    BehindCamera,
    #[error("pixel is outside the image")]
    OutOfBounds,
    #[error("depth must be finite and positive")]
    InvalidDepth,
    #[error("expected {expected} values, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("homography is singular")]
    SingularHomography,
    #[error("point maps to infinity")]
    PointAtInfinity,
}
