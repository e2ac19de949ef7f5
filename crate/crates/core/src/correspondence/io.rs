use std::collections::BTreeMap;
use std::io::Write;

use super::{ConsistencyThresholds, CorrespondenceError, CorrespondencePair, CorrespondenceSet, FilterCounts, Method};
use crate::formats::write_comment_header;
use crate::geom::Pixel;

const CSV_HEADER: &str = "px,py,qx,qy,loop_px,depth_m";
/// Six little-endian `f32` fields per record, in CSV column order.
pub const BINARY_RECORD_BYTES: usize = 24;

fn format_err(msg: impl Into<String>) -> CorrespondenceError {
    CorrespondenceError::Format(msg.into())
}

/// Writes `provenance` as `#` comment lines, the column header, then one
/// row per pair.
pub fn write_csv<W: Write>(w: &mut W, set: &CorrespondenceSet, provenance: &[String]) -> std::io::Result<()> {
    write_comment_header(w, provenance)?;
    writeln!(w, "{CSV_HEADER}")?;
    for c in &set.pairs {
        writeln!(w, "{},{},{},{},{},{}", c.p.x, c.p.y, c.q.x, c.q.y, c.loop_distance, c.depth_difference)?;
    }
    Ok(())
}

pub fn read_csv(text: &str) -> Result<Vec<CorrespondencePair>, CorrespondenceError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        _ => return Err(format_err(format!("missing header {CSV_HEADER:?}"))),
    }
    lines
        .map(|(i, l)| {
            let v: Vec<f64> = l
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| format_err(format!("line {}: {e}", i + 1)))?;
            if v.len() != 6 {
                return Err(format_err(format!("line {}: expected 6 fields, got {}", i + 1, v.len())));
            }
            Ok(CorrespondencePair {
                p: Pixel::new(v[0], v[1]),
                q: Pixel::new(v[2], v[3]),
                loop_distance: v[4],
                depth_difference: v[5],
            })
        })
        .collect()
}

/// Writes the sidecar metadata: frame ids, domains, method, thresholds and
/// counts as `key=value` lines.
pub fn write_meta<W: Write>(w: &mut W, set: &CorrespondenceSet, provenance: &[String]) -> std::io::Result<()> {
    write_comment_header(w, provenance)?;
    writeln!(w, "reference={}", set.reference)?;
    writeln!(w, "query={}", set.query)?;
    writeln!(w, "domain_reference={}", set.domain_pair.0)?;
    writeln!(w, "domain_query={}", set.domain_pair.1)?;
    writeln!(w, "method={}", set.method.as_str())?;
    match &set.thresholds {
        Some(t) => {
            writeln!(w, "alpha_px={}", t.alpha)?;
            writeln!(w, "beta_m={}", t.beta)?;
        }
        None => {
            writeln!(w, "alpha_px=none")?;
            writeln!(w, "beta_m=none")?;
        }
    }
    writeln!(w, "candidates={}", set.counts.candidates)?;
    writeln!(w, "survived_loop={}", set.counts.survived_loop)?;
    writeln!(w, "survived_depth={}", set.counts.survived_depth)?;
    Ok(())
}

/// Parses a sidecar into a set with no pairs; combine with [`read_csv`].
pub fn read_meta(text: &str) -> Result<CorrespondenceSet, CorrespondenceError> {
    let mut kv = BTreeMap::new();
    for l in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let (k, v) = l.split_once('=').ok_or_else(|| format_err(format!("expected key=value, got {l:?}")))?;
        kv.insert(k.trim().to_string(), v.trim().to_string());
    }
    let get = |k: &str| kv.get(k).ok_or_else(|| format_err(format!("missing key {k}")));
    fn num<T: std::str::FromStr>(k: &str, v: &str) -> Result<T, CorrespondenceError> {
        v.parse().map_err(|_| format_err(format!("bad value for {k}: {v:?}")))
    }
    let method = Method::parse(get("method")?).ok_or_else(|| format_err("unknown method"))?;
    let thresholds = match (get("alpha_px")?.as_str(), get("beta_m")?.as_str()) {
        ("none", "none") => None,
        (a, b) => Some(ConsistencyThresholds::new(num("alpha_px", a)?, num("beta_m", b)?)?),
    };
    let counts = FilterCounts {
        candidates: num("candidates", get("candidates")?)?,
        survived_loop: num("survived_loop", get("survived_loop")?)?,
        survived_depth: num("survived_depth", get("survived_depth")?)?,
    };
    if !(counts.candidates >= counts.survived_loop && counts.survived_loop >= counts.survived_depth) {
        return Err(format_err("counts are not monotone"));
    }
    Ok(CorrespondenceSet {
        reference: num("reference", get("reference")?)?,
        query: num("query", get("query")?)?,
        domain_pair: (get("domain_reference")?.clone(), get("domain_query")?.clone()),
        method,
        thresholds,
        pairs: Vec::new(),
        counts,
    })
}

pub fn write_binary<W: Write>(w: &mut W, set: &CorrespondenceSet) -> std::io::Result<()> {
    for c in &set.pairs {
        for v in [c.p.x, c.p.y, c.q.x, c.q.y, c.loop_distance, c.depth_difference] {
            w.write_all(&(v as f32).to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_binary(bytes: &[u8]) -> Result<Vec<CorrespondencePair>, CorrespondenceError> {
    if !bytes.len().is_multiple_of(BINARY_RECORD_BYTES) {
        return Err(format_err(format!("length {} is not a multiple of {BINARY_RECORD_BYTES}", bytes.len())));
    }
    Ok(bytes
        .chunks_exact(BINARY_RECORD_BYTES)
        .map(|rec| {
            let f = |k: usize| f32::from_le_bytes(rec[4 * k..4 * k + 4].try_into().expect("4 bytes")) as f64;
            CorrespondencePair { p: Pixel::new(f(0), f(1)), q: Pixel::new(f(2), f(3)), loop_distance: f(4), depth_difference: f(5) }
        })
        .collect())
}
