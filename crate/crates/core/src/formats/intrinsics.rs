use std::collections::BTreeMap;
use std::io::Write;

use super::{data_lines, parse_field, FormatError};
use crate::geom::Camera;

pub type CameraId = u32;

/// Parses `cam_id fx fy cx cy width height` lines.
pub fn read_intrinsics(text: &str) -> Result<BTreeMap<CameraId, Camera>, FormatError> {
    let mut out = BTreeMap::new();
    for (line, l) in data_lines(text) {
        let mut it = l.split_whitespace();
        let id: CameraId = parse_field(it.next(), line, "camera id")?;
        let fx = parse_field(it.next(), line, "fx")?;
        let fy = parse_field(it.next(), line, "fy")?;
        let cx = parse_field(it.next(), line, "cx")?;
        let cy = parse_field(it.next(), line, "cy")?;
        let w = parse_field(it.next(), line, "width")?;
        let h = parse_field(it.next(), line, "height")?;
        if it.next().is_some() {
            return Err(FormatError::parse(line, "trailing fields"));
        }
        let cam = Camera::new(fx, fy, cx, cy, w, h).map_err(|e| FormatError::parse(line, e.to_string()))?;
        if out.insert(id, cam).is_some() {
            return Err(FormatError::parse(line, format!("duplicate camera id {id}")));
        }
    }
    Ok(out)
}

pub fn write_intrinsics<W: Write>(w: &mut W, cams: &BTreeMap<CameraId, Camera>) -> std::io::Result<()> {
    writeln!(w, "# cam_id fx fy cx cy width height")?;
    for (id, c) in cams {
        writeln!(w, "{id} {} {} {} {} {} {}", c.fx, c.fy, c.cx, c.cy, c.width, c.height)?;
    }
    Ok(())
}
