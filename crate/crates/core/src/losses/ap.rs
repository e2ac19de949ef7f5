use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{check_unit_interval, LossError};
use crate::geom::Pixel;

/// Per-point AP values, predicted reliabilities and κ.
#[derive(Clone, Debug, PartialEq)]
pub struct ReliabilityInputs {
    ap: Vec<f64>,
    r: Vec<f64>,
    kappa: f64,
}

impl ReliabilityInputs {
    pub fn new(ap: Vec<f64>, r: Vec<f64>, kappa: f64) -> Result<Self, LossError> {
        if ap.is_empty() || ap.len() != r.len() {
            return Err(LossError::InvalidInput(format!("ap and r lengths {} and {} must match and be nonzero", ap.len(), r.len())));
        }
        check_unit_interval("ap", &ap)?;
        check_unit_interval("r", &r)?;
        check_unit_interval("kappa", &[kappa])?;
        Ok(Self { ap, r, kappa })
    }

    pub fn ap(&self) -> &[f64] {
        &self.ap
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }
}

/// Per-point losses, their mean, and the gradient of the mean.
#[derive(Clone, Debug, PartialEq)]
pub struct ApKappaLoss {
    pub per_point: Vec<f64>,
    pub mean: f64,
    pub grad_ap: Vec<f64>,
    pub grad_r: Vec<f64>,
}

/// `1 − (AP·R + κ(1 − R))` per point and its mean over the points.
pub fn ap_kappa_loss(inp: &ReliabilityInputs) -> ApKappaLoss {
    let n = inp.ap.len() as f64;
    let k = inp.kappa;
    let per_point: Vec<f64> = inp.ap.iter().zip(&inp.r).map(|(a, r)| 1.0 - (a * r + k * (1.0 - r))).collect();
    let mean = per_point.iter().sum::<f64>() / n;
    let grad_ap = inp.r.iter().map(|r| -r / n).collect();
    let grad_r = inp.ap.iter().map(|a| -(a - k) / n).collect();
    ApKappaLoss { per_point, mean, grad_ap, grad_r }
}

/// Similarity of a descriptor to its positive anchor and to its negatives.
#[derive(Clone, Debug, PartialEq)]
pub struct DescriptorRanking {
    positive: f64,
    negatives: Vec<f64>,
}

impl DescriptorRanking {
    pub fn new(positive: f64, negatives: Vec<f64>) -> Result<Self, LossError> {
        if negatives.is_empty() {
            return Err(LossError::InvalidInput("ranking needs at least one negative".into()));
        }
        let in_range = |v: &f64| (-1.0..=1.0).contains(v);
        if !in_range(&positive) || !negatives.iter().all(in_range) {
            return Err(LossError::InvalidInput("similarities must lie in [-1, 1]".into()));
        }
        Ok(Self { positive, negatives })
    }

    pub fn positive(&self) -> f64 {
        self.positive
    }

    pub fn negatives(&self) -> &[f64] {
        &self.negatives
    }
}

/// AP of the single positive under a hard ranking: `1 / rank`. A negative
/// tied with the positive counts as half ranked ahead of it.
pub fn exact_ap(rank: &DescriptorRanking) -> f64 {
    let ahead = rank.negatives.iter().filter(|v| **v > rank.positive).count() as f64;
    let tied = rank.negatives.iter().filter(|v| **v == rank.positive).count() as f64;
    1.0 / (1.0 + ahead + 0.5 * tied)
}

/// Linear-interpolation weights of `x` over `bins` centers evenly spaced on
/// `[−1, 1]`: the two neighboring bins and their shares.
fn soft_bin(x: f64, bins: usize) -> [(usize, f64); 2] {
    let pos = (x + 1.0) / 2.0 * (bins - 1) as f64;
    let lo = (pos.floor() as usize).min(bins - 2);
    let w = (pos - lo as f64).clamp(0.0, 1.0);
    [(lo, 1.0 - w), (lo + 1, w)]
}

/// Histogram-binned soft AP. Similarities are spread over `bins` centers on
/// `[−1, 1]` by linear interpolation; the precision at a bin is
/// `1 / (1 + negative mass above it + half the negative mass in it)`; the
/// positive's interpolation weights average those precisions.
///
/// Mass sharing a bin with the positive counts half, the tie rule of
/// [`exact_ap`], so the two agree when every similarity sits on a bin
/// center. Because per-bin precision never decreases with similarity,
/// raising the positive never lowers the result.
pub fn ap_approx(rank: &DescriptorRanking, bins: usize) -> Result<f64, LossError> {
    if bins < 2 {
        return Err(LossError::InvalidInput("soft AP needs at least 2 bins".into()));
    }
    let mut negative = vec![0.0; bins];
    for v in &rank.negatives {
        for (b, w) in soft_bin(*v, bins) {
            negative[b] += w;
        }
    }
    // Negative mass strictly above each bin plus half of its own.
    let mut ahead = vec![0.0; bins];
    let mut above = 0.0;
    for b in (0..bins).rev() {
        ahead[b] = above + 0.5 * negative[b];
        above += negative[b];
    }
    let ap = soft_bin(rank.positive, bins).iter().map(|(b, w)| w / (1.0 + ahead[*b])).sum::<f64>();
    Ok(ap.clamp(0.0, 1.0))
}

/// Up to `count` indices of `points` at least `min_distance_px` from
/// `anchor`, sampled without replacement. Returned in ascending order.
pub fn sample_negatives(points: &[Pixel], anchor: &Pixel, min_distance_px: f64, count: usize, seed: u64) -> Vec<usize> {
    let eligible: Vec<usize> = (0..points.len()).filter(|k| (points[*k] - anchor).norm() >= min_distance_px).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<usize> =
        index::sample(&mut rng, eligible.len(), count.min(eligible.len())).into_iter().map(|k| eligible[k]).collect();
    picked.sort_unstable();
    picked
}
