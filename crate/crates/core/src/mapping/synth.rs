use std::collections::BTreeMap;

use super::{Keypoint, MapFrame, MultiTrajectoryMap, PointId};
use crate::formats::CameraId;
use crate::geom::{Camera, Pixel, Pose};
use crate::scene::SyntheticScene;
use crate::FrameId;

/// Builds a sparse map by casting a grid of keypoint rays (every `stride`
/// pixels, offset by half a stride) from each frame into the scene. Every
/// hit becomes a new 3D point observed by that keypoint, with exact depth.
pub fn synthesize_map(
    scene: &SyntheticScene,
    camera_id: CameraId,
    camera: &Camera,
    trajectories: &[(String, Vec<(FrameId, Pose)>)],
    stride: u32,
) -> MultiTrajectoryMap {
    let stride = stride.max(1);
    let mut map = MultiTrajectoryMap { cameras: BTreeMap::from([(camera_id, *camera)]), ..Default::default() };
    let mut next: PointId = 0;
    for (label, frames) in trajectories {
        for (fid, pose) in frames {
            map.frames.insert(*fid, MapFrame { pose: *pose, camera_id, trajectory: label.clone() });
            let mut kps = Vec::new();
            let inverse = pose.inverse();
            for y in (stride / 2..camera.height).step_by(stride as usize) {
                for x in (stride / 2..camera.width).step_by(stride as usize) {
                    let p = Pixel::new(x as f64, y as f64);
                    let Some(t) = scene.depth_at(camera, pose, &p) else { continue };
                    let world = inverse.transform_point(&(camera.ray(&p) * t));
                    let z = pose.transform_point(&world).z;
                    map.points3d.insert(next, world);
                    kps.push(Keypoint { pixel: p, depth: Some(z), point_id: Some(next) });
                    next += 1;
                }
            }
            map.keypoints.insert(*fid, kps);
        }
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{corridor, corridor_camera, straight_trajectory};
    use nalgebra::Vector3;

    #[test]
    fn synthesized_map_is_valid_and_exact() {
        let cam = corridor_camera();
        let frames: Vec<_> = straight_trajectory(Vector3::zeros(), 3, 1.0, 0.0).into_iter().enumerate().map(|(i, p)| (i as FrameId, p)).collect();
        let m = synthesize_map(&corridor(), 0, &cam, &[("a".to_string(), frames)], 16);
        m.validate().unwrap();
        for kp in m.keypoints_of(1) {
            let x = m.points3d[&kp.point_id.unwrap()];
            let q = cam.project(&m.frames[&1].pose.transform_point(&x)).unwrap();
            assert!((q - kp.pixel).norm() < 1e-9);
        }
        assert_eq!(m.keypoints_of(0).len(), m.keypoints_of(2).len());
    }
}
