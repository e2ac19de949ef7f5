use std::collections::BTreeMap;

use crate::geom::{rotation_angle_deg, Pose};
use crate::FrameId;

/// AUC thresholds reported for relative pose errors, degrees.
pub const AUC_THRESHOLDS_DEG: [f64; 3] = [5.0, 10.0, 20.0];
/// `(position m, rotation deg)` thresholds for absolute localization.
pub const ABSOLUTE_THRESHOLDS: [(f64, f64); 3] = [(0.25, 2.0), (0.5, 5.0), (5.0, 10.0)];

/// Median with the midpoint convention for even counts. `+∞` (failed
/// estimates) sorts last. `None` for an empty list.
pub fn median(errors: &[f64]) -> Option<f64> {
    if errors.is_empty() {
        return None;
    }
    let mut v = errors.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        let (a, b) = (v[n / 2 - 1], v[n / 2]);
        if a == b { a } else { 0.5 * (a + b) }
    })
}

/// Area under the cumulative fraction-correct curve on `[0, threshold]`,
/// divided by `threshold`. Integrates the step function exactly: an error
/// `e` contributes `max(0, threshold − e) / (n · threshold)`. Failures
/// (`+∞`) contribute nothing. Empty input gives 0.
pub fn auc(errors: &[f64], threshold: f64) -> f64 {
    if errors.is_empty() {
        return 0.0;
    }
    let area: f64 = errors.iter().map(|e| (threshold - e).max(0.0)).sum();
    area / (errors.len() as f64 * threshold)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairSummary {
    pub errors: Vec<f64>,
    pub median_deg: f64,
    /// `(threshold deg, auc)` for each of [`AUC_THRESHOLDS_DEG`].
    pub auc: Vec<(f64, f64)>,
    pub failures: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoseErrorSummary {
    /// Keyed by `(reference trajectory, query trajectory)`.
    pub pairs: BTreeMap<(String, String), PairSummary>,
    /// Per reference trajectory: mean of the medians over the other
    /// trajectories it was evaluated against.
    pub cross_domain: BTreeMap<String, f64>,
}

/// Summarizes per trajectory-pair pose errors (failures as `+∞`). Pairs with
/// no errors are omitted.
pub fn summarize(errors: &BTreeMap<(String, String), Vec<f64>>) -> PoseErrorSummary {
    let mut pairs = BTreeMap::new();
    for (key, errs) in errors {
        let Some(median_deg) = median(errs) else { continue };
        pairs.insert(
            key.clone(),
            PairSummary {
                errors: errs.clone(),
                median_deg,
                auc: AUC_THRESHOLDS_DEG.iter().map(|t| (*t, auc(errs, *t))).collect(),
                failures: errs.iter().filter(|e| !e.is_finite()).count(),
            },
        );
    }
    let mut medians: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for ((r, q), s) in &pairs {
        if r != q {
            medians.entry(r.clone()).or_default().push(s.median_deg);
        }
    }
    let cross_domain = medians.into_iter().map(|(r, m)| (r, m.iter().sum::<f64>() / m.len() as f64)).collect();
    PoseErrorSummary { pairs, cross_domain }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AbsoluteAccuracy {
    /// `(position m, rotation deg, fraction localized)` per threshold.
    pub fractions: Vec<(f64, f64, f64)>,
    pub images: usize,
}

/// Fraction of ground-truth images whose estimate is within both the
/// position and the rotation threshold. Missing estimates count as failures.
pub fn absolute_accuracy(gt: &BTreeMap<FrameId, Pose>, est: &BTreeMap<FrameId, Pose>) -> AbsoluteAccuracy {
    let errs: Vec<Option<(f64, f64)>> = gt
        .iter()
        .map(|(id, g)| {
            est.get(id).map(|e| ((g.center() - e.center()).norm(), rotation_angle_deg(&g.rotation(), &e.rotation())))
        })
        .collect();
    let n = errs.len();
    let fractions = ABSOLUTE_THRESHOLDS
        .iter()
        .map(|(d, a)| {
            let ok = errs.iter().flatten().filter(|(pe, re)| pe <= d && re <= a).count();
            (*d, *a, if n == 0 { 0.0 } else { ok as f64 / n as f64 })
        })
        .collect();
    AbsoluteAccuracy { fractions, images: n }
}
