//! Cross-domain correspondences.
//!
//! The main pathway ([`icdc`]) reprojects every candidate pixel of a
//! reference frame I into a query frame J using I's depth, then keeps it only
//! if reprojecting back through J's depth returns within `alpha` pixels (loop
//! consistency) and the transported depth agrees with J's depth within `beta`
//! meters (depth consistency). Homography and sparse-map pathways produce the
//! same [`CorrespondenceSet`] type without filtering.

mod io;

use nalgebra::Vector3;
use rayon::prelude::*;

use crate::geom::{Camera, DepthMap, GeomError, Homography, Pixel, Pose};
use crate::mapping::{MappingError, MultiTrajectoryMap};
use crate::FrameId;

pub use io::{read_binary, read_csv, read_meta, write_binary, write_csv, write_meta, BINARY_RECORD_BYTES};

/// Default loop-consistency threshold, pixels.
pub const DEFAULT_ALPHA_PX: f64 = 2.0;
/// Default depth-consistency threshold, meters.
pub const DEFAULT_BETA_M: f64 = 0.15;

#[derive(Debug, thiserror::Error)]
pub enum CorrespondenceError {
    #[error("invalid thresholds: {0}")]
    InvalidThresholds(String),
    #[error("stride must be at least 1")]
    InvalidStride,
    #[error(transparent)]
    Mapping(#[from] MappingError),
    #[error("malformed correspondence file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Why a single reprojection failed. Failures drop the candidate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ReprojectError {
    #[error("no valid depth at source pixel")]
    InvalidDepth,
    #[error("point behind target camera")]
    BehindCamera,
    #[error("projection outside target image")]
    OutOfBounds,
}

/// `alpha` (pixels) gates loop consistency, `beta` (meters) depth
/// consistency. `beta = ∞` disables the depth test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConsistencyThresholds {
    pub alpha: f64,
    pub beta: f64,
}

impl ConsistencyThresholds {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, CorrespondenceError> {
        if !(alpha > 0.0) || alpha.is_nan() {
            return Err(CorrespondenceError::InvalidThresholds(format!("alpha must be > 0, got {alpha}")));
        }
        if !(beta > 0.0) || beta.is_nan() {
            return Err(CorrespondenceError::InvalidThresholds(format!("beta must be > 0, got {beta}")));
        }
        Ok(Self { alpha, beta })
    }
}

impl Default for ConsistencyThresholds {
    fn default() -> Self {
        Self { alpha: DEFAULT_ALPHA_PX, beta: DEFAULT_BETA_M }
    }
}

/// One correspondence. Diagnostics are `NaN` when the producing pathway
/// cannot compute them (sparse maps have no dense depth in J).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrespondencePair {
    pub p: Pixel,
    pub q: Pixel,
    pub loop_distance: f64,
    pub depth_difference: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Icdc,
    Homography,
    SparseMap,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Icdc => "icdc",
            Method::Homography => "homography",
            Method::SparseMap => "sparse-map",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "icdc" => Some(Method::Icdc),
            "homography" => Some(Method::Homography),
            "sparse-map" => Some(Method::SparseMap),
            _ => None,
        }
    }
}

/// Candidate bookkeeping; always `candidates ≥ survived_loop ≥ survived_depth`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FilterCounts {
    pub candidates: usize,
    pub survived_loop: usize,
    pub survived_depth: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrespondenceSet {
    pub reference: FrameId,
    pub query: FrameId,
    /// Domain (trajectory) labels of the reference and query frames.
    pub domain_pair: (String, String),
    pub method: Method,
    /// Thresholds applied; `None` for unfiltered pathways.
    pub thresholds: Option<ConsistencyThresholds>,
    pub pairs: Vec<CorrespondencePair>,
    pub counts: FilterCounts,
}

impl CorrespondenceSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Landing points this close outside the image are clamped onto its border.
const BOUNDS_SLACK_PX: f64 = 1e-9;

/// Moves pixel `p` with known z-depth from camera I into camera J.
pub fn transfer(p: &Pixel, depth: f64, cam_i: &Camera, cam_j: &Camera, t_ji: &Pose) -> Result<(Pixel, f64), ReprojectError> {
    let x_i = cam_i.backproject(p, depth).map_err(|e| match e {
        GeomError::OutOfBounds => ReprojectError::OutOfBounds,
        _ => ReprojectError::InvalidDepth,
    })?;
    let x_j: Vector3<f64> = t_ji.transform_point(&x_i);
    if !(x_j.z > 0.0) {
        return Err(ReprojectError::BehindCamera);
    }
    let q = cam_j.project(&x_j).map_err(|_| ReprojectError::BehindCamera)?;
    // Rounding can push a border pixel a hair outside the image.
    let (w, h) = ((cam_j.width - 1) as f64, (cam_j.height - 1) as f64);
    let slack = |v: f64, hi: f64| (-BOUNDS_SLACK_PX..=hi + BOUNDS_SLACK_PX).contains(&v).then(|| v.clamp(0.0, hi));
    match (slack(q.x, w), slack(q.y, h)) {
        (Some(x), Some(y)) => Ok((Pixel::new(x, y), x_j.z)),
        _ => Err(ReprojectError::OutOfBounds),
    }
}

/// Reprojects `p` into J using depth sampled from `d_i` at `p`. Returns the
/// landing pixel and the point's z-depth in J.
pub fn reproject(p: &Pixel, d_i: &DepthMap, cam_i: &Camera, cam_j: &Camera, t_ji: &Pose) -> Result<(Pixel, f64), ReprojectError> {
    let depth = d_i.sample(p).ok_or(ReprojectError::InvalidDepth)?;
    transfer(p, depth, cam_i, cam_j, t_ji)
}

/// Both diagnostics for one candidate, sharing the forward reprojection.
fn evaluate(
    p: &Pixel,
    d_i: &DepthMap,
    d_j: &DepthMap,
    cam_i: &Camera,
    cam_j: &Camera,
    t_ji: &Pose,
    t_ij: &Pose,
) -> Result<CorrespondencePair, ReprojectError> {
    let (q, z_in_j) = reproject(p, d_i, cam_i, cam_j, t_ji)?;
    let depth_q = d_j.sample(&q).ok_or(ReprojectError::InvalidDepth)?;
    let (back, _) = transfer(&q, depth_q, cam_j, cam_i, t_ij)?;
    Ok(CorrespondencePair { p: *p, q, loop_distance: (p - back).norm(), depth_difference: (z_in_j - depth_q).abs() })
}

/// Distance between `p` and its round trip I → J → I, where the return leg
/// uses J's depth sampled at the sub-pixel landing point.
pub fn loop_consistency(
    p: &Pixel,
    d_i: &DepthMap,
    d_j: &DepthMap,
    cam_i: &Camera,
    cam_j: &Camera,
    t_ji: &Pose,
) -> Result<f64, ReprojectError> {
    evaluate(p, d_i, d_j, cam_i, cam_j, t_ji, &t_ji.inverse()).map(|c| c.loop_distance)
}

/// `|z_in_J − d_J(q)|`: how far the transported depth is from J's own depth
/// at the landing point.
pub fn depth_consistency(
    p: &Pixel,
    d_i: &DepthMap,
    d_j: &DepthMap,
    cam_i: &Camera,
    cam_j: &Camera,
    t_ji: &Pose,
) -> Result<f64, ReprojectError> {
    let (q, z_in_j) = reproject(p, d_i, cam_i, cam_j, t_ji)?;
    let depth_q = d_j.sample(&q).ok_or(ReprojectError::InvalidDepth)?;
    Ok((z_in_j - depth_q).abs())
}

/// Frame metadata carried into the output set.
#[derive(Clone, Debug, PartialEq)]
pub struct FramePair {
    pub reference: FrameId,
    pub query: FrameId,
    pub domain_pair: (String, String),
}

/// Generates and filters correspondences for every valid pixel of I on the
/// `stride` grid. Output is sorted by `(p.y, p.x)` regardless of how the
/// work is scheduled.
#[allow(clippy::too_many_arguments)]
pub fn icdc(
    frames: &FramePair,
    d_i: &DepthMap,
    d_j: &DepthMap,
    cam_i: &Camera,
    cam_j: &Camera,
    t_ji: &Pose,
    thresholds: &ConsistencyThresholds,
    stride: u32,
) -> Result<CorrespondenceSet, CorrespondenceError> {
    if stride == 0 {
        return Err(CorrespondenceError::InvalidStride);
    }
    ConsistencyThresholds::new(thresholds.alpha, thresholds.beta)?;
    let t_ij = t_ji.inverse();
    let rows: Vec<(FilterCounts, Vec<CorrespondencePair>)> = (0..d_i.height())
        .step_by(stride as usize)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|y| {
            let mut counts = FilterCounts::default();
            let mut pairs = Vec::new();
            for x in (0..d_i.width()).step_by(stride as usize) {
                if d_i.get(x, y).is_none() {
                    continue;
                }
                counts.candidates += 1;
                let p = Pixel::new(x as f64, y as f64);
                let Ok(c) = evaluate(&p, d_i, d_j, cam_i, cam_j, t_ji, &t_ij) else { continue };
                if !(c.loop_distance <= thresholds.alpha) {
                    continue;
                }
                counts.survived_loop += 1;
                if !(c.depth_difference <= thresholds.beta) {
                    continue;
                }
                counts.survived_depth += 1;
                pairs.push(c);
            }
            (counts, pairs)
        })
        .collect();
    let mut counts = FilterCounts::default();
    let mut pairs = Vec::new();
    for (c, p) in rows {
        counts.candidates += c.candidates;
        counts.survived_loop += c.survived_loop;
        counts.survived_depth += c.survived_depth;
        pairs.extend(p);
    }
    Ok(CorrespondenceSet {
        reference: frames.reference,
        query: frames.query,
        domain_pair: frames.domain_pair.clone(),
        method: Method::Icdc,
        thresholds: Some(*thresholds),
        pairs,
        counts,
    })
}

/// Pairs `(p, H·p)` for stride-grid pixels of I whose image lands inside J.
/// Diagnostics are zero since the mapping is exact.
pub fn homography_correspondences(frames: &FramePair, cam: &Camera, h: &Homography, stride: u32) -> Result<CorrespondenceSet, CorrespondenceError> {
    if stride == 0 {
        return Err(CorrespondenceError::InvalidStride);
    }
    let mut counts = FilterCounts::default();
    let mut pairs = Vec::new();
    for y in (0..cam.height).step_by(stride as usize) {
        for x in (0..cam.width).step_by(stride as usize) {
            counts.candidates += 1;
            let p = Pixel::new(x as f64, y as f64);
            let Ok(q) = h.apply(&p) else { continue };
            if cam.contains(&q) {
                pairs.push(CorrespondencePair { p, q, loop_distance: 0.0, depth_difference: 0.0 });
            }
        }
    }
    counts.survived_loop = pairs.len();
    counts.survived_depth = pairs.len();
    Ok(CorrespondenceSet {
        reference: frames.reference,
        query: frames.query,
        domain_pair: frames.domain_pair.clone(),
        method: Method::Homography,
        thresholds: None,
        pairs,
        counts,
    })
}

/// Transfers every keypoint of `frame_i` that has a linked map point into
/// `frame_j`. Pairs leaving J or landing behind it are dropped; no
/// consistency filtering is possible, so diagnostics are `NaN`.
pub fn sparse_map_correspondences(map: &MultiTrajectoryMap, frame_i: FrameId, frame_j: FrameId) -> Result<CorrespondenceSet, CorrespondenceError> {
    let fi = map.frame(frame_i)?;
    let fj = map.frame(frame_j)?;
    let cam_i = map.camera_of(frame_i)?;
    let cam_j = map.camera_of(frame_j)?;
    let t_ji = Pose::relative(&fi.pose, &fj.pose);
    let sparse = map.extract_sparse_depth(frame_i)?;
    let mut pairs: Vec<CorrespondencePair> = sparse
        .iter()
        .filter_map(|(p, z)| {
            let (q, _) = transfer(p, *z, cam_i, cam_j, &t_ji).ok()?;
            Some(CorrespondencePair { p: *p, q, loop_distance: f64::NAN, depth_difference: f64::NAN })
        })
        .collect();
    pairs.sort_by(|a, b| a.p.y.total_cmp(&b.p.y).then(a.p.x.total_cmp(&b.p.x)));
    let counts = FilterCounts { candidates: sparse.len(), survived_loop: pairs.len(), survived_depth: pairs.len() };
    Ok(CorrespondenceSet {
        reference: frame_i,
        query: frame_j,
        domain_pair: (fi.trajectory.clone(), fj.trajectory.clone()),
        method: Method::SparseMap,
        thresholds: None,
        pairs,
        counts,
    })
}
