use std::collections::{BTreeMap, BTreeSet};

use nalgebra::{Matrix3, SymmetricEigen, UnitQuaternion, Vector3};

use super::{MappingError, MultiTrajectoryMap, PointId};
use crate::FrameId;

/// Largest allowed distance between any two core frame positions of a block.
pub const MAX_BLOCK_EXTENT_M: f64 = 64.0;
/// Total growth of each bounds dimension used to collect buffer frames.
pub const BUFFER_FRACTION: f64 = 0.20;
/// Points farther than this from every observing core frame are discarded
/// before alignment.
pub const POINT_FILTER_RADIUS_M: f64 = 64.0;
/// Physical side length of the scale-1 box.
pub const SCALE1_SPAN_M: f64 = 3.0;
/// Concentric box scales.
pub const BOX_SCALES: [u32; 7] = [1, 2, 4, 8, 16, 32, 64];

/// A final block smaller than this fraction of the extent limit is merged
/// with its predecessor and the pair is re-split.
const REBALANCE_FRACTION: f64 = 0.25;
const BOUNDS_EPSILON_M: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: Vector3<f64>,
    pub max: Vector3<f64>,
}

impl Aabb {
    pub fn of<'a>(points: impl IntoIterator<Item = &'a Vector3<f64>>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = *it.next()?;
        Some(it.fold(Aabb { min: first, max: first }, |b, p| Aabb { min: b.min.inf(p), max: b.max.sup(p) }))
    }

    pub fn extent(&self) -> Vector3<f64> {
        self.max - self.min
    }

    /// Grows every dimension by `fraction` of its extent, split evenly
    /// between both sides.
    pub fn expanded(&self, fraction: f64) -> Self {
        let pad = self.extent() * (0.5 * fraction);
        Aabb { min: self.min - pad, max: self.max + pad }
    }

    pub fn contains(&self, p: &Vector3<f64>) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] - BOUNDS_EPSILON_M && p[i] <= self.max[i] + BOUNDS_EPSILON_M)
    }
}

/// World → box coordinates: `x_box = scale · (R·x − center)`. One box unit is
/// `SCALE1_SPAN_M` meters; the scale-`s` box is `|x_box|∞ ≤ s/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockAlignment {
    pub rotation: UnitQuaternion<f64>,
    /// Coordinate-wise median of the rotated cloud.
    pub center: Vector3<f64>,
    pub scale: f64,
    /// First principal component of the filtered cloud in world coordinates.
    pub principal_axis: Vector3<f64>,
}

impl BlockAlignment {
    pub fn apply(&self, x: &Vector3<f64>) -> Vector3<f64> {
        (self.rotation * x - self.center) * self.scale
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContainmentReport {
    pub point_count: usize,
    /// `(scale, fraction of filtered points inside that box)`.
    pub fractions: Vec<(u32, f64)>,
}

impl ContainmentReport {
    pub fn fraction_at(&self, scale: u32) -> Option<f64> {
        self.fractions.iter().find(|(s, _)| *s == scale).map(|(_, f)| *f)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SceneBlock {
    pub index: usize,
    pub trajectory: String,
    pub members: Vec<FrameId>,
    pub buffer: Vec<FrameId>,
    pub core_bounds: Aabb,
    pub alignment: Option<BlockAlignment>,
    pub containment: Option<ContainmentReport>,
}

fn diameter(points: &[Vector3<f64>]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            d = d.max((points[i] - points[j]).norm());
        }
    }
    d
}

/// Diameters of every prefix: `out[k]` covers `points[..=k]`.
fn prefix_diameters(points: &[Vector3<f64>]) -> Vec<f64> {
    let mut out = Vec::with_capacity(points.len());
    let mut d: f64 = 0.0;
    for k in 0..points.len() {
        for j in 0..k {
            d = d.max((points[k] - points[j]).norm());
        }
        out.push(d);
    }
    out
}

/// Splits a trajectory into blocks by walking its frames in id order and
/// closing a block when the next frame would push its diameter past
/// `max_extent`. A short final block is rebalanced with its predecessor.
/// Frames of other blocks inside a block's bounds grown by `buffer_fraction`
/// form its buffer.
pub fn partition_blocks(map: &MultiTrajectoryMap, trajectory: &str, max_extent: f64, buffer_fraction: f64) -> Vec<SceneBlock> {
    let ids = map.trajectory_frames(trajectory);
    let pos: BTreeMap<FrameId, Vector3<f64>> = ids.iter().map(|id| (*id, map.frames[id].pose.center())).collect();

    let mut groups: Vec<Vec<FrameId>> = Vec::new();
    let mut current: Vec<FrameId> = Vec::new();
    for id in &ids {
        let p = pos[id];
        if current.iter().any(|m| (pos[m] - p).norm() > max_extent) {
            groups.push(std::mem::take(&mut current));
        }
        current.push(*id);
    }
    if !current.is_empty() {
        groups.push(current);
    }

    if groups.len() >= 2 {
        let last: Vec<Vector3<f64>> = groups[groups.len() - 1].iter().map(|id| pos[id]).collect();
        if diameter(&last) < REBALANCE_FRACTION * max_extent {
            let tail = groups.pop().expect("len >= 2");
            let mut merged = groups.pop().expect("len >= 2");
            merged.extend(tail);
            let pts: Vec<Vector3<f64>> = merged.iter().map(|id| pos[id]).collect();
            let pre = prefix_diameters(&pts);
            let mut rev = pts.clone();
            rev.reverse();
            let suf = prefix_diameters(&rev);
            let n = pts.len();
            // Split at k: first k frames, then the rest.
            let best = (1..n)
                .filter(|k| pre[k - 1] <= max_extent && suf[n - k - 1] <= max_extent)
                .min_by(|a, b| {
                    let ca = pre[a - 1].max(suf[n - a - 1]);
                    let cb = pre[b - 1].max(suf[n - b - 1]);
                    ca.total_cmp(&cb)
                });
            // The original boundary is always feasible.
            let k = best.expect("original split is feasible");
            let rest = merged.split_off(k);
            groups.push(merged);
            groups.push(rest);
        }
    }

    let bounds: Vec<Aabb> = groups
        .iter()
        .map(|g| Aabb::of(g.iter().map(|id| &pos[id])).expect("non-empty group"))
        .collect();
    groups
        .iter()
        .enumerate()
        .map(|(index, members)| {
            let grown = bounds[index].expanded(buffer_fraction);
            let buffer = groups
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != index)
                .flat_map(|(_, g)| g.iter())
                .filter(|id| grown.contains(&pos[id]))
                .copied()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            SceneBlock {
                index,
                trajectory: trajectory.to_string(),
                members: members.clone(),
                buffer,
                core_bounds: bounds[index],
                alignment: None,
                containment: None,
            }
        })
        .collect()
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Minimal rotation taking unit `a` onto unit `b`.
fn rotation_onto(a: &Vector3<f64>, b: &Vector3<f64>) -> UnitQuaternion<f64> {
    UnitQuaternion::rotation_between(a, b).unwrap_or_else(|| {
        // Antiparallel: half turn about any axis orthogonal to `a`.
        let helper = if a.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
        UnitQuaternion::from_axis_angle(&nalgebra::Unit::new_normalize(a.cross(&helper)), std::f64::consts::PI)
    })
}

/// Points of the block's core frames, deduplicated by id, keeping those
/// within `POINT_FILTER_RADIUS_M` of at least one observing core frame.
pub(crate) fn block_points(block: &SceneBlock, map: &MultiTrajectoryMap) -> Result<Vec<Vector3<f64>>, MappingError> {
    let mut kept: BTreeSet<PointId> = BTreeSet::new();
    for fid in &block.members {
        let center = map.frame(*fid)?.pose.center();
        for kp in map.keypoints_of(*fid) {
            let Some(pid) = kp.point_id else { continue };
            let Some(x) = map.points3d.get(&pid) else { continue };
            if (x - center).norm() <= POINT_FILTER_RADIUS_M {
                kept.insert(pid);
            }
        }
    }
    Ok(kept.iter().map(|pid| map.points3d[pid]).collect())
}

/// Centers the block's filtered cloud on its median, scales it so the
/// scale-1 box spans `SCALE1_SPAN_M`, and rotates its first principal
/// component onto the box body diagonal.
pub fn align_block(block: &SceneBlock, map: &MultiTrajectoryMap) -> Result<SceneBlock, MappingError> {
    let pts = block_points(block, map)?;
    if pts.len() < 3 {
        return Err(MappingError::DegeneratePointcloud(format!("{} points after filtering", pts.len())));
    }
    let n = pts.len() as f64;
    let mean = pts.iter().sum::<Vector3<f64>>() / n;
    let cov = pts.iter().fold(Matrix3::zeros(), |acc, p| {
        let d = p - mean;
        acc + d * d.transpose()
    }) / n;
    let eig = SymmetricEigen::new(cov);
    let mut order = [0usize, 1, 2];
    order.sort_by(|i, j| eig.eigenvalues[*j].total_cmp(&eig.eigenvalues[*i]));
    let (l1, l2) = (eig.eigenvalues[order[0]], eig.eigenvalues[order[1]]);
    if !(l1 > 0.0) || l2 <= 1e-12 * l1 {
        return Err(MappingError::DegeneratePointcloud("covariance rank below 2".into()));
    }
    let mut axis: Vector3<f64> = eig.eigenvectors.column(order[0]).into();
    let lead = axis.iamax();
    if axis[lead] < 0.0 {
        axis = -axis;
    }
    let diagonal = Vector3::repeat(1.0 / 3f64.sqrt());
    let rotation = rotation_onto(&axis, &diagonal);
    let rotated: Vec<Vector3<f64>> = pts.iter().map(|p| rotation * p).collect();
    let center = Vector3::from_fn(|i, _| median(&mut rotated.iter().map(|p| p[i]).collect::<Vec<_>>()));
    let alignment = BlockAlignment { rotation, center, scale: 1.0 / SCALE1_SPAN_M, principal_axis: axis };

    let boxed: Vec<Vector3<f64>> = rotated.iter().map(|r| (r - center) * alignment.scale).collect();
    let fractions = BOX_SCALES
        .iter()
        .map(|s| {
            let half = 0.5 * *s as f64;
            let inside = boxed.iter().filter(|b| b.amax() <= half).count();
            (*s, inside as f64 / n)
        })
        .collect();

    let mut out = block.clone();
    out.alignment = Some(alignment);
    out.containment = Some(ContainmentReport { point_count: pts.len(), fractions });
    Ok(out)
}
