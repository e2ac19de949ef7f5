use crate::geom::rotation_angle_deg;
use crate::mapping::MultiTrajectoryMap;
use crate::FrameId;

use super::BenchmarkError;

/// Spatial gates for pair selection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KeyframeParams {
    /// Minimum spacing between consecutive reference frames, meters.
    pub reference_spacing_m: f64,
    /// Maximum reference–query camera distance, meters.
    pub max_distance_m: f64,
    /// Maximum relative rotation angle between reference and query, degrees.
    pub max_angle_deg: f64,
    /// Minimum spacing between kept queries of one reference, meters. Zero
    /// selects the per-pass rule used for training pairs instead.
    pub query_spacing_m: f64,
}

/// Evaluation pairs: references every 10 m, queries within 8 m and 45°,
/// thinned to 2 m.
pub const EVAL_PARAMS: KeyframeParams =
    KeyframeParams { reference_spacing_m: 10.0, max_distance_m: 8.0, max_angle_deg: 45.0, query_spacing_m: 2.0 };

/// Training pairs: references every 6 m, up to two queries per pass within
/// 6 m and 45°.
pub const TRAIN_PARAMS: KeyframeParams =
    KeyframeParams { reference_spacing_m: 6.0, max_distance_m: 6.0, max_angle_deg: 45.0, query_spacing_m: 0.0 };

#[derive(Clone, Debug, PartialEq)]
pub struct KeyframePair {
    pub reference_trajectory: String,
    pub query_trajectory: String,
    pub reference: FrameId,
    pub query: FrameId,
    pub distance_m: f64,
    pub angle_deg: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KeyframePairs {
    pub params: KeyframeParams,
    pub references: Vec<FrameId>,
    pub pairs: Vec<KeyframePair>,
}

fn frames_of(map: &MultiTrajectoryMap, label: &str) -> Result<Vec<FrameId>, BenchmarkError> {
    let ids = map.trajectory_frames(label);
    if ids.is_empty() {
        return Err(BenchmarkError::EmptyTrajectory(label.to_string()));
    }
    Ok(ids)
}

struct Gate<'a> {
    map: &'a MultiTrajectoryMap,
    params: KeyframeParams,
}

impl Gate<'_> {
    fn distance(&self, a: FrameId, b: FrameId) -> f64 {
        (self.map.frames[&a].pose.center() - self.map.frames[&b].pose.center()).norm()
    }

    fn angle(&self, a: FrameId, b: FrameId) -> f64 {
        rotation_angle_deg(&self.map.frames[&a].pose.rotation(), &self.map.frames[&b].pose.rotation())
    }

    fn admits(&self, r: FrameId, q: FrameId) -> bool {
        self.distance(r, q) <= self.params.max_distance_m && self.angle(r, q) <= self.params.max_angle_deg
    }

    fn pair(&self, rt: &str, qt: &str, r: FrameId, q: FrameId) -> KeyframePair {
        KeyframePair {
            reference_trajectory: rt.to_string(),
            query_trajectory: qt.to_string(),
            reference: r,
            query: q,
            distance_m: self.distance(r, q),
            angle_deg: self.angle(r, q),
        }
    }
}

/// Evaluation keyframing. References are taken along the reference
/// trajectory in frame order whenever the camera has moved at least 10 m from
/// the previous reference. Each reference is paired with query-trajectory
/// frames within 8 m and 45°, keeping a query only if it is at least 2 m from
/// the previously kept one. A frame is never paired with itself.
pub fn keyframe_eval(map: &MultiTrajectoryMap, reference: &str, query: &str) -> Result<KeyframePairs, BenchmarkError> {
    keyframe_eval_with(map, reference, query, EVAL_PARAMS)
}

/// [`keyframe_eval`] with custom gates. `query_spacing_m` is the query
/// thinning distance here.
pub fn keyframe_eval_with(
    map: &MultiTrajectoryMap,
    reference: &str,
    query: &str,
    params: KeyframeParams,
) -> Result<KeyframePairs, BenchmarkError> {
    let refs_all = frames_of(map, reference)?;
    let queries = frames_of(map, query)?;
    let gate = Gate { map, params };

    let mut references: Vec<FrameId> = Vec::new();
    for id in refs_all {
        if references.last().is_none_or(|last| gate.distance(*last, id) >= params.reference_spacing_m) {
            references.push(id);
        }
    }

    let mut pairs = Vec::new();
    for r in &references {
        let mut last_kept: Option<FrameId> = None;
        for q in queries.iter().filter(|q| *q != r && gate.admits(*r, **q)) {
            if last_kept.is_none_or(|k| gate.distance(k, *q) >= params.query_spacing_m) {
                pairs.push(gate.pair(reference, query, *r, *q));
                last_kept = Some(*q);
            }
        }
    }
    Ok(KeyframePairs { params, references, pairs })
}

/// Training keyframing over every ordered pair of the given trajectories
/// (including a trajectory with itself). References are taken in frame order
/// when at least 6 m from every reference already chosen, so revisits do not
/// add references. Query frames within 6 m and 45° are grouped into passes
/// (runs of consecutive frames of the query trajectory); each pass
/// contributes its first and last frame, so pair counts grow with the number
/// of loops.
pub fn keyframe_train(map: &MultiTrajectoryMap, trajectories: &[String]) -> Result<KeyframePairs, BenchmarkError> {
    let params = TRAIN_PARAMS;
    let gate = Gate { map, params };
    let mut per_traj = Vec::with_capacity(trajectories.len());
    for t in trajectories {
        per_traj.push(frames_of(map, t)?);
    }
    let mut references_all = Vec::new();
    let mut pairs = Vec::new();
    for (rt, r_frames) in trajectories.iter().zip(&per_traj) {
        let mut references: Vec<FrameId> = Vec::new();
        for id in r_frames {
            if references.iter().all(|r| gate.distance(*r, *id) >= params.reference_spacing_m) {
                references.push(*id);
            }
        }
        for (qt, q_frames) in trajectories.iter().zip(&per_traj) {
            for r in &references {
                // Passes are runs of consecutive positions in the query
                // trajectory; the reference itself may sit inside a run.
                let mut run: Vec<FrameId> = Vec::new();
                let flush = |run: &mut Vec<FrameId>, pairs: &mut Vec<KeyframePair>| {
                    let picks: Vec<FrameId> = run.iter().copied().filter(|q| q != r).collect();
                    if let Some(first) = picks.first() {
                        pairs.push(gate.pair(rt, qt, *r, *first));
                    }
                    if picks.len() >= 2 {
                        pairs.push(gate.pair(rt, qt, *r, *picks.last().expect("non-empty")));
                    }
                    run.clear();
                };
                for q in q_frames {
                    if gate.admits(*r, *q) {
                        run.push(*q);
                    } else if !run.is_empty() {
                        flush(&mut run, &mut pairs);
                    }
                }
                flush(&mut run, &mut pairs);
            }
        }
        references_all.extend(references);
    }
    Ok(KeyframePairs { params, references: references_all, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Pose;
    use crate::mapping::MapFrame;
    use crate::scene::{loop_trajectory, straight_trajectory};
    use nalgebra::Vector3;

    fn add(map: &mut MultiTrajectoryMap, label: &str, first_id: FrameId, poses: &[Pose]) {
        for (k, p) in poses.iter().enumerate() {
            map.frames.insert(first_id + k as FrameId, MapFrame { pose: *p, camera_id: 0, trajectory: label.into() });
        }
    }

    fn assert_eval_constraints(map: &MultiTrajectoryMap, kp: &KeyframePairs) {
        for p in &kp.pairs {
            let a = &map.frames[&p.reference].pose;
            let b = &map.frames[&p.query].pose;
            assert!((a.center() - b.center()).norm() <= 8.0);
            assert!(rotation_angle_deg(&a.rotation(), &b.rotation()) <= 45.0);
            assert_ne!(p.reference, p.query);
        }
        for w in kp.references.windows(2) {
            assert!((map.frames[&w[0]].pose.center() - map.frames[&w[1]].pose.center()).norm() >= 10.0);
        }
        for r in &kp.references {
            let qs: Vec<_> = kp.pairs.iter().filter(|p| p.reference == *r).map(|p| p.query).collect();
            for w in qs.windows(2) {
                assert!((map.frames[&w[0]].pose.center() - map.frames[&w[1]].pose.center()).norm() >= 2.0);
            }
        }
    }

    #[test]
    fn straight_trajectory_against_itself() {
        let mut m = MultiTrajectoryMap::default();
        add(&mut m, "a", 0, &straight_trajectory(Vector3::zeros(), 101, 1.0, 0.0));
        let kp = keyframe_eval(&m, "a", "a").unwrap();
        assert_eval_constraints(&m, &kp);
        // Independent simulation on positions 0..=100 m: references at
        // multiples of 10 m; queries within 8 m taken 2 m apart from the
        // first admissible one, skipping the reference.
        let refs: Vec<u64> = (0..=100).step_by(10).collect();
        assert_eq!(kp.references, refs);
        let mut expected = Vec::new();
        for r in &refs {
            let lo = r.saturating_sub(8);
            let hi = (*r + 8).min(100);
            let mut last: Option<u64> = None;
            for q in lo..=hi {
                if q == *r {
                    continue;
                }
                if last.is_none_or(|l| q - l >= 2) {
                    expected.push((*r, q));
                    last = Some(q);
                }
            }
        }
        let got: Vec<_> = kp.pairs.iter().map(|p| (p.reference, p.query)).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn distant_or_rotated_queries_give_no_pairs() {
        let mut m = MultiTrajectoryMap::default();
        add(&mut m, "a", 0, &straight_trajectory(Vector3::zeros(), 30, 1.0, 0.0));
        add(&mut m, "far", 100, &straight_trajectory(Vector3::new(9.0, 0.0, 0.0), 30, 1.0, 0.0));
        add(&mut m, "turned", 200, &straight_trajectory(Vector3::zeros(), 30, 1.0, 90.0));
        let far = keyframe_eval(&m, "a", "far").unwrap();
        assert!(!far.references.is_empty() && far.pairs.is_empty());
        let turned = keyframe_eval(&m, "a", "turned").unwrap();
        assert!(turned.pairs.is_empty());
        assert!(matches!(keyframe_eval(&m, "a", "nope"), Err(BenchmarkError::EmptyTrajectory(_))));
    }

    #[test]
    fn training_pairs_single_pass() {
        let mut m = MultiTrajectoryMap::default();
        add(&mut m, "a", 0, &straight_trajectory(Vector3::zeros(), 61, 1.0, 0.0));
        let kp = keyframe_train(&m, &["a".to_string()]).unwrap();
        // References at 0, 6, ..., 60.
        assert_eq!(kp.references, (0..=60).step_by(6).collect::<Vec<u64>>());
        for r in &kp.references {
            let qs: Vec<_> = kp.pairs.iter().filter(|p| p.reference == *r).collect();
            assert!(qs.len() <= 2 && !qs.is_empty());
            assert!(qs.iter().all(|p| p.distance_m <= 6.0 && p.angle_deg <= 45.0 && p.query != *r));
        }
        // Interior references get the two ends of their ±6 m window.
        let at30: Vec<_> = kp.pairs.iter().filter(|p| p.reference == 30).map(|p| p.query).collect();
        assert_eq!(at30, vec![24, 36]);
        assert!(matches!(keyframe_train(&m, &["b".to_string()]), Err(BenchmarkError::EmptyTrajectory(_))));
    }

    #[test]
    fn training_pairs_double_with_loops() {
        let laps = |n| loop_trajectory(Vector3::zeros(), 30.0, 90, n);
        let mut m = MultiTrajectoryMap::default();
        add(&mut m, "ref", 0, &laps(1));
        add(&mut m, "q1", 1000, &laps(1));
        add(&mut m, "q2", 2000, &laps(2));
        let count = |q: &str| {
            keyframe_train(&m, &["ref".to_string(), q.to_string()])
                .unwrap()
                .pairs
                .iter()
                .filter(|p| p.reference_trajectory == "ref" && p.query_trajectory == q)
                .count() as i64
        };
        let (single, double) = (count("q1"), count("q2"));
        let refs = keyframe_train(&m, &["ref".to_string()]).unwrap().references.len() as i64;
        assert!(single > 0);
        // Passes joined across the lap seam may merge: at most one per reference.
        assert!((double - 2 * single).abs() <= refs, "{single} {double}");
    }
}
