use std::io::{self, Write};
use std::path::Path;

use nalgebra::Vector3;

use super::{Keypoint, MapFrame, MappingError, MultiTrajectoryMap, PointId};
use crate::formats::{data_lines, parse_field, FormatError};
use crate::geom::{Pixel, Pose};
use crate::FrameId;

#[derive(Clone, Copy, PartialEq)]
enum Section {
    None,
    Frames,
    Keypoints,
    Points,
}

fn optional<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<Option<T>, FormatError> {
    match tok {
        Some("-1") => Ok(None),
        other => parse_field(other, line, what).map(Some),
    }
}

/// Parses a map file with `[frames]`, `[keypoints]` and `[points3d]`
/// sections. Cameras are left empty; attach them from an intrinsics file.
pub fn read_map(text: &str) -> Result<MultiTrajectoryMap, MappingError> {
    let mut map = MultiTrajectoryMap::default();
    let mut section = Section::None;
    for (line, l) in data_lines(text) {
        match l {
            "[frames]" => section = Section::Frames,
            "[keypoints]" => section = Section::Keypoints,
            "[points3d]" => section = Section::Points,
            _ => {
                let mut it = l.split_whitespace();
                match section {
                    Section::None => return Err(FormatError::parse(line, "data before any section").into()),
                    Section::Frames => {
                        let id: FrameId = parse_field(it.next(), line, "frame id")?;
                        let trajectory: String = parse_field(it.next(), line, "trajectory label")?;
                        let mut v = [0.0f64; 7];
                        for (k, slot) in v.iter_mut().enumerate() {
                            *slot = parse_field(it.next(), line, ["tx", "ty", "tz", "qx", "qy", "qz", "qw"][k])?;
                        }
                        let camera_id = parse_field(it.next(), line, "camera id")?;
                        let pose = Pose::from_quaternion(v[3], v[4], v[5], v[6], Vector3::new(v[0], v[1], v[2]))
                            .map_err(|e| FormatError::parse(line, e.to_string()))?;
                        if map.frames.insert(id, MapFrame { pose, camera_id, trajectory }).is_some() {
                            return Err(FormatError::parse(line, format!("duplicate frame {id}")).into());
                        }
                    }
                    Section::Keypoints => {
                        let fid: FrameId = parse_field(it.next(), line, "frame id")?;
                        let x = parse_field(it.next(), line, "x")?;
                        let y = parse_field(it.next(), line, "y")?;
                        let depth: Option<f64> = optional(it.next(), line, "depth")?;
                        if depth.is_some_and(|d| !(d > 0.0 && d.is_finite())) {
                            return Err(FormatError::parse(line, "depth must be positive or -1").into());
                        }
                        let point_id: Option<PointId> = optional(it.next(), line, "point id")?;
                        if !map.frames.contains_key(&fid) {
                            return Err(FormatError::parse(line, format!("keypoint of unknown frame {fid}")).into());
                        }
                        map.keypoints.entry(fid).or_default().push(Keypoint { pixel: Pixel::new(x, y), depth, point_id });
                    }
                    Section::Points => {
                        let id: PointId = parse_field(it.next(), line, "point id")?;
                        let x = parse_field(it.next(), line, "X")?;
                        let y = parse_field(it.next(), line, "Y")?;
                        let z = parse_field(it.next(), line, "Z")?;
                        if map.points3d.insert(id, Vector3::new(x, y, z)).is_some() {
                            return Err(FormatError::parse(line, format!("duplicate point {id}")).into());
                        }
                    }
                }
                if it.next().is_some() {
                    return Err(FormatError::parse(line, "trailing fields").into());
                }
            }
        }
    }
    map.validate()?;
    Ok(map)
}

pub fn read_map_file(path: &Path) -> Result<MultiTrajectoryMap, MappingError> {
    read_map(&std::fs::read_to_string(path).map_err(FormatError::from)?)
}

pub fn write_map<W: Write>(w: &mut W, map: &MultiTrajectoryMap) -> io::Result<()> {
    writeln!(w, "[frames]")?;
    writeln!(w, "# id trajectory tx ty tz qx qy qz qw cam_id")?;
    for (id, f) in &map.frames {
        if f.trajectory.is_empty() || f.trajectory.contains(char::is_whitespace) {
            return Err(io::Error::new(io::ErrorKind::InvalidInput, format!("bad trajectory label {:?}", f.trajectory)));
        }
        let t = f.pose.translation();
        let q = f.pose.quaternion();
        writeln!(w, "{id} {} {} {} {} {} {} {} {} {}", f.trajectory, t.x, t.y, t.z, q.i, q.j, q.k, q.w, f.camera_id)?;
    }
    writeln!(w, "[keypoints]")?;
    writeln!(w, "# frame_id x y depth point3d_id")?;
    for (fid, kps) in &map.keypoints {
        for kp in kps {
            let depth = kp.depth.map_or("-1".to_string(), |d| d.to_string());
            let pid = kp.point_id.map_or("-1".to_string(), |p| p.to_string());
            writeln!(w, "{fid} {} {} {depth} {pid}", kp.pixel.x, kp.pixel.y)?;
        }
    }
    writeln!(w, "[points3d]")?;
    writeln!(w, "# id X Y Z")?;
    for (id, x) in &map.points3d {
        writeln!(w, "{id} {} {} {}", x.x, x.y, x.z)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::tests::toy_map;

    fn round_trip(m: &MultiTrajectoryMap) -> MultiTrajectoryMap {
        let mut buf = Vec::new();
        write_map(&mut buf, m).unwrap();
        read_map(std::str::from_utf8(&buf).unwrap()).unwrap()
    }

    #[test]
    fn load_save_load_is_lossless() {
        let mut m = toy_map();
        m.keypoints.get_mut(&2).unwrap().push(Keypoint { pixel: Pixel::new(0.1, 1.0 / 3.0), depth: None, point_id: None });
        m.cameras.clear();
        let once = round_trip(&m);
        assert_eq!(once, m);
        assert_eq!(round_trip(&once), once);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(read_map("0 a 0 0 0 0 0 0 1 0\n").is_err());
        let dangling = "[frames]\n0 a 0 0 0 0 0 0 1 0\n[keypoints]\n0 1 2 -1 5\n";
        assert!(matches!(read_map(dangling), Err(MappingError::DanglingPoint { point: 5, .. })));
        let unknown = "[frames]\n0 a 0 0 0 0 0 0 1 0\n[keypoints]\n3 1 2 -1 -1\n";
        assert!(read_map(unknown).is_err());
        let neg = "[frames]\n0 a 0 0 0 0 0 0 1 0\n[keypoints]\n0 1 2 -3 -1\n";
        assert!(read_map(neg).is_err());
        let mut m = toy_map();
        m.frames.get_mut(&0).unwrap().trajectory = "two words".into();
        assert!(write_map(&mut Vec::new(), &m).is_err());
    }
}
