use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use nalgebra::Vector3;

use super::{data_lines, parse_field, FormatError};
use crate::geom::Pose;
use crate::FrameId;

/// Which direction the stored transforms map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PoseConvention {
    /// Stored transforms map world points into the camera (the internal convention).
    #[default]
    CameraFromWorld,
    /// Stored transforms place the camera in the world; inverted on load.
    WorldFromCamera,
}

/// Parses `frame_id tx ty tz qx qy qz qw` lines.
pub fn read_poses(text: &str, convention: PoseConvention) -> Result<BTreeMap<FrameId, Pose>, FormatError> {
    let mut out = BTreeMap::new();
    for (line, l) in data_lines(text) {
        let mut it = l.split_whitespace();
        let id: FrameId = parse_field(it.next(), line, "frame id")?;
        let mut v = [0.0f64; 7];
        for (k, slot) in v.iter_mut().enumerate() {
            *slot = parse_field(it.next(), line, ["tx", "ty", "tz", "qx", "qy", "qz", "qw"][k])?;
        }
        if it.next().is_some() {
            return Err(FormatError::parse(line, "trailing fields"));
        }
        let pose = Pose::from_quaternion(v[3], v[4], v[5], v[6], Vector3::new(v[0], v[1], v[2]))
            .map_err(|e| FormatError::parse(line, e.to_string()))?;
        let pose = match convention {
            PoseConvention::CameraFromWorld => pose,
            PoseConvention::WorldFromCamera => pose.inverse(),
        };
        if out.insert(id, pose).is_some() {
            return Err(FormatError::parse(line, format!("duplicate frame id {id}")));
        }
    }
    Ok(out)
}

pub fn read_poses_file(path: &Path, convention: PoseConvention) -> Result<BTreeMap<FrameId, Pose>, FormatError> {
    read_poses(&std::fs::read_to_string(path)?, convention)
}

/// Writes camera-from-world poses, one per line, sorted by frame id.
pub fn write_poses<W: Write>(w: &mut W, poses: &BTreeMap<FrameId, Pose>) -> std::io::Result<()> {
    writeln!(w, "# frame_id tx ty tz qx qy qz qw")?;
    for (id, p) in poses {
        let t = p.translation();
        let q = p.quaternion();
        writeln!(w, "{id} {} {} {} {} {} {} {}", t.x, t.y, t.z, q.i, q.j, q.k, q.w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::UnitQuaternion;

    #[test]
    fn parses_and_normalizes() {
        let text = "# comment\n\n3 1 2 3 0 0 0 2\n1 0 0 0 0 0 0 1\n";
        let poses = read_poses(text, PoseConvention::CameraFromWorld).unwrap();
        assert_eq!(poses.keys().copied().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(poses[&3].quaternion().w, 1.0);
        assert_eq!(*poses[&3].translation(), Vector3::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn world_from_camera_is_inverted() {
        let text = "0 5 0 0 0 0 0 1\n";
        let poses = read_poses(text, PoseConvention::WorldFromCamera).unwrap();
        assert_eq!(poses[&0].center(), Vector3::new(5.0, 0.0, 0.0));
    }

    #[test]
    fn errors_name_the_line() {
        let err = read_poses("0 1 2 3 0 0 0 1\n1 1 2 x 0 0 0 1\n", PoseConvention::default()).unwrap_err();
        assert!(matches!(err, FormatError::Parse { line: 2, .. }), "{err}");
        assert!(read_poses("0 1 2 3 0 0 0 1\n0 1 2 3 0 0 0 1\n", PoseConvention::default()).is_err());
        assert!(read_poses("0 1 2 3 0 0 0 0\n", PoseConvention::default()).is_err());
        assert!(read_poses("0 1 2 3 0 0 0 1 9\n", PoseConvention::default()).is_err());
    }

    #[test]
    fn save_load_is_lossless() {
        let mut poses = BTreeMap::new();
        for i in 0..20u64 {
            let q = UnitQuaternion::from_euler_angles(0.1 * i as f64, -0.37 * i as f64, 1.0 / (i + 1) as f64);
            poses.insert(i * 7, Pose::from_parts(q, Vector3::new(0.1 * i as f64, 1.0 / 3.0, -(i as f64).sqrt())));
        }
        let mut buf = Vec::new();
        write_poses(&mut buf, &poses).unwrap();
        let back = read_poses(std::str::from_utf8(&buf).unwrap(), PoseConvention::default()).unwrap();
        assert_eq!(back, poses);
    }
}
