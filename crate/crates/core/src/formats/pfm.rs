//! Single-channel portable float maps (`Pf`). Rows are stored bottom to top.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use super::FormatError;
use crate::geom::DepthMap;

/// Writes little-endian f32 samples (scale `-1.0`). Invalid pixels are written as 0.0.
pub fn write_pfm<W: Write>(w: &mut W, depth: &DepthMap) -> std::io::Result<()> {
    let (width, height) = (depth.width() as usize, depth.height() as usize);
    write!(w, "Pf\n{width} {height}\n-1.0\n")?;
    let mut row = Vec::with_capacity(width * 4);
    for y in (0..height).rev() {
        row.clear();
        for x in 0..width {
            let v = depth.values()[y * width + x] as f32;
            row.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&row)?;
    }
    Ok(())
}

pub fn write_pfm_file(path: &Path, depth: &DepthMap) -> std::io::Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_pfm(&mut f, depth)?;
    f.flush()
}

fn header_token<R: BufRead>(r: &mut R) -> Result<String, FormatError> {
    let mut line = String::new();
    loop {
        line.clear();
        if r.read_line(&mut line)? == 0 {
            return Err(FormatError::Invalid("truncated PFM header".into()));
        }
        let t = line.trim();
        if !t.is_empty() && !t.starts_with('#') {
            return Ok(t.to_string());
        }
    }
}

/// Reads a `Pf` file. Zero and NaN samples become invalid pixels.
pub fn read_pfm<R: Read>(r: R) -> Result<DepthMap, FormatError> {
    let mut r = BufReader::new(r);
    let magic = header_token(&mut r)?;
    if magic != "Pf" {
        return Err(FormatError::Invalid(format!("unsupported PFM type {magic:?} (need single-channel Pf)")));
    }
    let dims = header_token(&mut r)?;
    let mut it = dims.split_whitespace();
    let width: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| FormatError::Invalid(format!("bad PFM dimensions {dims:?}")))?;
    let height: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| FormatError::Invalid(format!("bad PFM dimensions {dims:?}")))?;
    let scale: f64 = header_token(&mut r)?
        .parse()
        .map_err(|_| FormatError::Invalid("bad PFM scale".into()))?;
    if width == 0 || height == 0 || scale == 0.0 {
        return Err(FormatError::Invalid("empty PFM or zero scale".into()));
    }
    let little = scale < 0.0;
    let mut bytes = vec![0u8; width * height * 4];
    r.read_exact(&mut bytes)
        .map_err(|_| FormatError::Invalid("truncated PFM data".into()))?;
    let mut values = vec![0.0f64; width * height];
    for (i, chunk) in bytes.chunks_exact(4).enumerate() {
        let b = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let v = if little { f32::from_le_bytes(b) } else { f32::from_be_bytes(b) };
        let (row_from_bottom, x) = (i / width, i % width);
        values[(height - 1 - row_from_bottom) * width + x] = v as f64;
    }
    DepthMap::from_values(width as u32, height as u32, values).map_err(|e| FormatError::Invalid(e.to_string()))
}

pub fn read_pfm_file(path: &Path) -> Result<DepthMap, FormatError> {
    read_pfm(std::fs::File::open(path)?)
}
