//! Multi-trajectory sparse maps: data model, file format, triangulation,
//! sparse depth extraction, and block partitioning with box alignment.

mod blocks;
mod map_file;
mod synth;
mod triangulate;

use std::collections::BTreeMap;

use nalgebra::Vector3;

use crate::formats::{CameraId, FormatError};
use crate::geom::{Camera, Pixel, Pose};
use crate::FrameId;

pub use blocks::{
    align_block, partition_blocks, Aabb, BlockAlignment, ContainmentReport, SceneBlock, BOX_SCALES, BUFFER_FRACTION,
    MAX_BLOCK_EXTENT_M, POINT_FILTER_RADIUS_M, SCALE1_SPAN_M,
};
pub use map_file::{read_map, read_map_file, write_map};
pub use synth::synthesize_map;
pub use triangulate::{triangulate, Triangulation};

pub type PointId = u64;

/// Tolerance between a keypoint's stored depth and its linked point's z.
pub const DEPTH_CONSISTENCY_TOLERANCE_M: f64 = 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum MappingError {
    #[error("unknown frame {0}")]
    UnknownFrame(FrameId),
    #[error("unknown camera {0}")]
    UnknownCamera(CameraId),
    #[error("frame {frame} keypoint {index} links missing point {point}")]
    DanglingPoint { frame: FrameId, index: usize, point: PointId },
    #[error("frame {0} has an empty trajectory label")]
    EmptyLabel(FrameId),
    #[error("frame {frame} keypoint {index}: depth {depth} disagrees with linked point z {z}")]
    DepthMismatch { frame: FrameId, index: usize, depth: f64, z: f64 },
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(&'static str),
    #[error("degenerate point cloud: {0}")]
    DegeneratePointcloud(String),
    #[error(transparent)]
    Format(#[from] FormatError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MapFrame {
    pub pose: Pose,
    pub camera_id: CameraId,
    /// Trajectory, and with it visual domain, the frame was captured in.
    pub trajectory: String,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Keypoint {
    pub pixel: Pixel,
    pub depth: Option<f64>,
    pub point_id: Option<PointId>,
}

/// Frames of several trajectories registered in one metric world frame.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MultiTrajectoryMap {
    pub frames: BTreeMap<FrameId, MapFrame>,
    pub keypoints: BTreeMap<FrameId, Vec<Keypoint>>,
    pub points3d: BTreeMap<PointId, Vector3<f64>>,
    /// Intrinsics referenced by `MapFrame::camera_id`; stored in a separate file.
    pub cameras: BTreeMap<CameraId, Camera>,
}

impl MultiTrajectoryMap {
    pub fn frame(&self, id: FrameId) -> Result<&MapFrame, MappingError> {
        self.frames.get(&id).ok_or(MappingError::UnknownFrame(id))
    }

    pub fn camera_of(&self, id: FrameId) -> Result<&Camera, MappingError> {
        let f = self.frame(id)?;
        self.cameras.get(&f.camera_id).ok_or(MappingError::UnknownCamera(f.camera_id))
    }

    pub fn keypoints_of(&self, id: FrameId) -> &[Keypoint] {
        self.keypoints.get(&id).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Frame ids of one trajectory in ascending order.
    pub fn trajectory_frames(&self, label: &str) -> Vec<FrameId> {
        self.frames.iter().filter(|(_, f)| f.trajectory == label).map(|(id, _)| *id).collect()
    }

    /// Distinct trajectory labels in sorted order.
    pub fn trajectories(&self) -> Vec<String> {
        let mut out: Vec<String> = self.frames.values().map(|f| f.trajectory.clone()).collect();
        out.sort();
        out.dedup();
        out
    }

    /// Checks the structural invariants. Cameras are checked only when any
    /// are attached.
    pub fn validate(&self) -> Result<(), MappingError> {
        for (id, f) in &self.frames {
            if f.trajectory.is_empty() {
                return Err(MappingError::EmptyLabel(*id));
            }
            if !self.cameras.is_empty() && !self.cameras.contains_key(&f.camera_id) {
                return Err(MappingError::UnknownCamera(f.camera_id));
            }
        }
        for (fid, kps) in &self.keypoints {
            let frame = self.frame(*fid)?;
            for (index, kp) in kps.iter().enumerate() {
                let Some(pid) = kp.point_id else { continue };
                let x = self
                    .points3d
                    .get(&pid)
                    .ok_or(MappingError::DanglingPoint { frame: *fid, index, point: pid })?;
                if let Some(depth) = kp.depth {
                    let z = frame.pose.transform_point(x).z;
                    if !((depth - z).abs() <= DEPTH_CONSISTENCY_TOLERANCE_M) {
                        return Err(MappingError::DepthMismatch { frame: *fid, index, depth, z });
                    }
                }
            }
        }
        Ok(())
    }

    /// Depth of every linked 3D point in the frame's camera, paired with the
    /// observing keypoint. Points with non-positive z are skipped.
    pub fn extract_sparse_depth(&self, id: FrameId) -> Result<Vec<(Pixel, f64)>, MappingError> {
        let frame = self.frame(id)?;
        Ok(self
            .keypoints_of(id)
            .iter()
            .filter_map(|kp| {
                let x = self.points3d.get(&kp.point_id?)?;
                let z = frame.pose.transform_point(x).z;
                (z > 0.0).then_some((kp.pixel, z))
            })
            .collect())
    }

    /// Re-estimates every 3D point seen by at least two frames from its
    /// keypoint observations, and refreshes keypoint depths to match.
    pub fn retriangulate(&self) -> Result<Self, MappingError> {
        let mut tracks: BTreeMap<PointId, Vec<(FrameId, Pixel)>> = BTreeMap::new();
        for (fid, kps) in &self.keypoints {
            for kp in kps {
                if let Some(pid) = kp.point_id {
                    tracks.entry(pid).or_default().push((*fid, kp.pixel));
                }
            }
        }
        let mut out = self.clone();
        for (pid, track) in tracks {
            if track.len() < 2 {
                continue;
            }
            let mut obs = Vec::with_capacity(track.len());
            for (fid, px) in &track {
                obs.push((self.camera_of(*fid)?, &self.frame(*fid)?.pose, *px));
            }
            out.points3d.insert(pid, triangulate(&obs)?.point);
        }
        for (fid, kps) in out.keypoints.iter_mut() {
            let pose = &self.frame(*fid)?.pose;
            for kp in kps.iter_mut() {
                if let (Some(pid), Some(_)) = (kp.point_id, kp.depth) {
                    kp.depth = Some(pose.transform_point(&out.points3d[&pid]).z);
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::UnitQuaternion;

    pub(crate) fn toy_map() -> MultiTrajectoryMap {
        let mut m = MultiTrajectoryMap::default();
        m.cameras.insert(0, Camera::new(500.0, 500.0, 319.5, 239.5, 640, 480).unwrap());
        let yaw = |d: f64| UnitQuaternion::from_axis_angle(&Vector3::y_axis(), d.to_radians());
        let poses = [
            Pose::from_center(yaw(0.0), Vector3::new(0.0, 0.0, 0.0)),
            Pose::from_center(yaw(10.0), Vector3::new(1.0, 0.0, 0.5)),
            Pose::from_center(yaw(-5.0), Vector3::new(-1.0, 0.2, 1.0)),
        ];
        for (i, p) in poses.iter().enumerate() {
            let traj = if i < 2 { "summer" } else { "winter" };
            m.frames.insert(i as FrameId, MapFrame { pose: *p, camera_id: 0, trajectory: traj.into() });
        }
        let pts = [Vector3::new(0.5, -0.3, 7.0), Vector3::new(-1.0, 0.4, 9.0), Vector3::new(2.0, 1.0, 12.0)];
        for (k, x) in pts.iter().enumerate() {
            m.points3d.insert(k as PointId + 10, *x);
        }
        let cam = m.cameras[&0];
        for (fid, f) in &m.frames {
            let kps = m
                .points3d
                .iter()
                .map(|(pid, x)| {
                    let xc = f.pose.transform_point(x);
                    Keypoint { pixel: cam.project(&xc).unwrap(), depth: Some(xc.z), point_id: Some(*pid) }
                })
                .collect();
            m.keypoints.insert(*fid, kps);
        }
        m
    }

    #[test]
    fn toy_map_is_valid() {
        let m = toy_map();
        m.validate().unwrap();
        assert_eq!(m.trajectories(), vec!["summer".to_string(), "winter".to_string()]);
        assert_eq!(m.trajectory_frames("summer"), vec![0, 1]);
    }

    #[test]
    fn sparse_depth_matches_hand_transform() {
        let m = toy_map();
        // Frame 0 is the identity: depths are the world z values.
        let d0: Vec<f64> = m.extract_sparse_depth(0).unwrap().iter().map(|(_, z)| *z).collect();
        assert_eq!(d0, vec![7.0, 9.0, 12.0]);
        // Frame 1: yaw 10° about y, center (1, 0, 0.5); z_cam = sin·(X−1) + cos·(Z−0.5).
        let (s, c) = 10f64.to_radians().sin_cos();
        let d1: Vec<f64> = m.extract_sparse_depth(1).unwrap().iter().map(|(_, z)| *z).collect();
        for (z, x) in d1.iter().zip(m.points3d.values()) {
            let expected = s * (x.x - 1.0) + c * (x.z - 0.5);
            assert!((z - expected).abs() < 1e-9);
        }
        assert!(matches!(m.extract_sparse_depth(99), Err(MappingError::UnknownFrame(99))));
    }

    #[test]
    fn sparse_depth_skips_points_behind() {
        let mut m = toy_map();
        m.points3d.insert(99, Vector3::new(0.0, 0.0, -7.0));
        m.keypoints.get_mut(&0).unwrap().push(Keypoint { pixel: Pixel::new(1.0, 1.0), depth: None, point_id: Some(99) });
        assert_eq!(m.extract_sparse_depth(0).unwrap().len(), 3);
        let mut single = MultiTrajectoryMap::default();
        single.frames.insert(0, m.frames[&0].clone());
        single.points3d.insert(0, Vector3::new(0.0, 0.0, 7.0));
        single.keypoints.insert(0, vec![Keypoint { pixel: Pixel::new(0.0, 0.0), depth: None, point_id: Some(0) }]);
        assert_eq!(single.extract_sparse_depth(0).unwrap()[0].1, 7.0);
    }

    #[test]
    fn validation_catches_broken_links() {
        let mut m = toy_map();
        m.keypoints.get_mut(&1).unwrap()[0].depth = Some(1.0);
        assert!(matches!(m.validate(), Err(MappingError::DepthMismatch { frame: 1, index: 0, .. })));
        let mut m = toy_map();
        m.points3d.remove(&10);
        assert!(matches!(m.validate(), Err(MappingError::DanglingPoint { point: 10, .. })));
        let mut m = toy_map();
        m.frames.get_mut(&0).unwrap().trajectory.clear();
        assert!(matches!(m.validate(), Err(MappingError::EmptyLabel(0))));
    }

    #[test]
    fn triangulate_then_extract_round_trip() {
        let m = toy_map();
        let mut perturbed = m.clone();
        for x in perturbed.points3d.values_mut() {
            *x += Vector3::new(0.3, -0.2, 0.5);
        }
        let re = perturbed.retriangulate().unwrap();
        for fid in m.frames.keys() {
            let a = m.extract_sparse_depth(*fid).unwrap();
            let b = re.extract_sparse_depth(*fid).unwrap();
            for ((_, za), (_, zb)) in a.iter().zip(&b) {
                assert!((za - zb).abs() < 1e-6);
            }
            for (ka, kb) in m.keypoints_of(*fid).iter().zip(re.keypoints_of(*fid)) {
                assert!((ka.depth.unwrap() - kb.depth.unwrap()).abs() < 1e-6);
            }
        }
        re.validate().unwrap();
    }
}
