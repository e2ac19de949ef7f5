use std::io::Write;

use nalgebra::Vector3;

use super::{AaBox, Plane, Primitive, SceneError, SyntheticScene};
use crate::formats::{data_lines, parse_field, FormatError};

fn parse_err(e: FormatError) -> SceneError {
    match e {
        FormatError::Parse { line, message } => SceneError::Parse { line, message },
        other => SceneError::Parse { line: 0, message: other.to_string() },
    }
}

fn floats<const N: usize>(it: &mut std::str::SplitWhitespace<'_>, line: usize) -> Result<[f64; N], SceneError> {
    let mut out = [0.0; N];
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = parse_field(it.next(), line, &format!("value {}", k + 1)).map_err(parse_err)?;
    }
    if it.next().is_some() {
        return Err(SceneError::Parse { line, message: "trailing fields".into() });
    }
    Ok(out)
}

/// Parses a scene description:
///
/// ```text
/// scene corridor
/// plane cx cy cz nx ny nz ex ey
/// box minx miny minz maxx maxy maxz
/// ```
pub fn parse_scene(text: &str) -> Result<SyntheticScene, SceneError> {
    let mut id = String::from("scene");
    let mut prims = Vec::new();
    for (line, l) in data_lines(text) {
        let mut it = l.split_whitespace();
        let with_line = |e: SceneError| match e {
            SceneError::InvalidPrimitive(m) => SceneError::Parse { line, message: m },
            e => e,
        };
        match it.next() {
            Some("scene") => {
                id = it
                    .next()
                    .ok_or(SceneError::Parse { line, message: "missing scene id".into() })?
                    .to_string();
            }
            Some("plane") => {
                let v = floats::<8>(&mut it, line)?;
                let p = Plane::new(Vector3::new(v[0], v[1], v[2]), Vector3::new(v[3], v[4], v[5]), v[6], v[7])
                    .map_err(with_line)?;
                prims.push(Primitive::Plane(p));
            }
            Some("box") => {
                let v = floats::<6>(&mut it, line)?;
                let b = AaBox::new(Vector3::new(v[0], v[1], v[2]), Vector3::new(v[3], v[4], v[5])).map_err(with_line)?;
                prims.push(Primitive::Box(b));
            }
            Some(other) => return Err(SceneError::Parse { line, message: format!("unknown record {other:?}") }),
            None => {}
        }
    }
    SyntheticScene::new(id, prims)
}

pub fn write_scene<W: Write>(w: &mut W, scene: &SyntheticScene) -> std::io::Result<()> {
    writeln!(w, "scene {}", scene.id)?;
    for p in scene.primitives() {
        match p {
            Primitive::Plane(p) => writeln!(
                w,
                "plane {} {} {} {} {} {} {} {}",
                p.center.x, p.center.y, p.center.z, p.normal.x, p.normal.y, p.normal.z, p.extent_u, p.extent_v
            )?,
            Primitive::Box(b) => {
                writeln!(w, "box {} {} {} {} {} {}", b.min.x, b.min.y, b.min.z, b.max.x, b.max.y, b.max.z)?
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let s = crate::scene::corridor().with(Primitive::Box(
            AaBox::new(Vector3::new(-0.5, -0.5, 6.0), Vector3::new(0.5, 0.5, 6.5)).unwrap(),
        ));
        let mut buf = Vec::new();
        write_scene(&mut buf, &s).unwrap();
        let back = parse_scene(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn rejects_malformed() {
        assert!(matches!(parse_scene("plane 0 0 1 0 0 1 1\n"), Err(SceneError::Parse { line: 1, .. })));
        assert!(matches!(parse_scene("# c\nbox 0 0 0 1 1 0\n"), Err(SceneError::Parse { line: 2, .. })));
        assert!(matches!(parse_scene("sphere 1\n"), Err(SceneError::Parse { .. })));
        assert_eq!(parse_scene("scene empty\n"), Err(SceneError::Empty));
    }
}
