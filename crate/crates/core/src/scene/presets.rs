use nalgebra::{UnitQuaternion, Vector3};

use super::{Plane, Primitive, SyntheticScene};
use crate::geom::{Camera, Pose};

/// Height of corridor cameras above the ground plane, meters.
pub const CORRIDOR_CAMERA_HEIGHT: f64 = 1.6;
const CORRIDOR_HALF_WIDTH: f64 = 12.0;
const CORRIDOR_WALL_HEIGHT: f64 = 20.0;
const CORRIDOR_LENGTH: f64 = 220.0;
const CORRIDOR_MID_Z: f64 = 90.0;

/// An urban street: two 20 m facades 24 m apart and a ground plane along the
/// z axis (x right, y down, z forward), spanning z ∈ [-20, 200]. Cameras at
/// y = 0 look down the street.
pub fn corridor() -> SyntheticScene {
    let ground = Plane::new(
        Vector3::new(0.0, CORRIDOR_CAMERA_HEIGHT, CORRIDOR_MID_Z),
        -Vector3::y(),
        CORRIDOR_LENGTH,
        2.0 * CORRIDOR_HALF_WIDTH,
    )
    .expect("valid preset");
    let wall_y = CORRIDOR_CAMERA_HEIGHT - 0.5 * CORRIDOR_WALL_HEIGHT;
    let wall = |side: f64| {
        Plane::new(
            Vector3::new(side * CORRIDOR_HALF_WIDTH, wall_y, CORRIDOR_MID_Z),
            Vector3::new(-side, 0.0, 0.0),
            CORRIDOR_LENGTH,
            CORRIDOR_WALL_HEIGHT,
        )
        .expect("valid preset")
    };
    SyntheticScene::new(
        "corridor",
        vec![Primitive::Plane(ground), Primitive::Plane(wall(-1.0)), Primitive::Plane(wall(1.0))],
    )
    .expect("non-empty preset")
}

/// 320×240 pinhole with a 65° horizontal field of view.
pub fn corridor_camera() -> Camera {
    Camera::new(250.0, 250.0, 159.5, 119.5, 320, 240).expect("valid preset")
}

fn yaw(deg: f64) -> UnitQuaternion<f64> {
    UnitQuaternion::from_axis_angle(&Vector3::y_axis(), deg.to_radians())
}

/// `n` cameras spaced `step` meters apart from `start`, heading `yaw_deg`
/// about the vertical axis (0° looks along +z).
pub fn straight_trajectory(start: Vector3<f64>, n: usize, step: f64, yaw_deg: f64) -> Vec<Pose> {
    let r = yaw(yaw_deg);
    let forward = r * Vector3::z();
    (0..n).map(|k| Pose::from_center(r, start + forward * (step * k as f64))).collect()
}

/// Drives `n` frames forward along +z, then the same path back facing -z.
pub fn out_and_back_trajectory(start: Vector3<f64>, n: usize, step: f64) -> Vec<Pose> {
    let mut out = straight_trajectory(start, n, step, 0.0);
    let end = start + Vector3::z() * (step * (n.saturating_sub(1)) as f64);
    out.extend(straight_trajectory(end, n, step, 180.0));
    out
}

/// Circle of `radius` around `center` in the ground plane, traversed `loops`
/// times with `frames_per_loop` frames per lap. Frames of later laps repeat
/// earlier ones exactly. Cameras face along the direction of travel.
pub fn loop_trajectory(center: Vector3<f64>, radius: f64, frames_per_loop: usize, loops: usize) -> Vec<Pose> {
    (0..frames_per_loop * loops)
        .map(|k| {
            let theta = std::f64::consts::TAU * (k % frames_per_loop) as f64 / frames_per_loop as f64;
            let c = center + Vector3::new(radius * theta.cos(), 0.0, radius * theta.sin());
            // Tangent (-sin θ, 0, cos θ) is +z rotated by θ about -y.
            Pose::from_center(yaw(-theta.to_degrees()), c)
        })
        .collect()
}
