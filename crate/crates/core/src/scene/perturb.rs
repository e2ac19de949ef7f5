use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::SceneError;
use crate::geom::DepthMap;

/// Imperfections applied to a rendered depth map to imitate one visual
/// domain's depth source.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DomainPerturbation {
    /// Standard deviation of additive Gaussian noise, meters.
    pub depth_noise_sigma: f64,
    /// Fraction of valid pixels turned into outliers.
    pub outlier_fraction: f64,
    /// Outliers are shifted by a magnitude drawn uniformly from `[m, 2m)`.
    pub outlier_magnitude_min: f64,
    pub seed: u64,
}

impl DomainPerturbation {
    pub fn none() -> Self {
        Self { depth_noise_sigma: 0.0, outlier_fraction: 0.0, outlier_magnitude_min: 0.0, seed: 0 }
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        if !(self.depth_noise_sigma >= 0.0 && self.depth_noise_sigma.is_finite()) {
            return Err(SceneError::InvalidPerturbation("sigma must be >= 0".into()));
        }
        if !(0.0..=1.0).contains(&self.outlier_fraction) {
            return Err(SceneError::InvalidPerturbation("outlier fraction must be in [0, 1]".into()));
        }
        if !(self.outlier_magnitude_min >= 0.0 && self.outlier_magnitude_min.is_finite()) {
            return Err(SceneError::InvalidPerturbation("outlier magnitude must be >= 0".into()));
        }
        Ok(())
    }
}

/// Smallest depth a perturbed pixel may take; keeps valid pixels valid.
const MIN_PERTURBED_DEPTH: f64 = 1e-6;

/// Adds seeded Gaussian noise to every valid pixel, then shifts a seeded
/// subset of `round(fraction · valid)` pixels by at least
/// `outlier_magnitude_min` with random sign. The invalid mask is unchanged.
pub fn perturb(depth: &DepthMap, pert: &DomainPerturbation) -> Result<DepthMap, SceneError> {
    pert.validate()?;
    let mut out = depth.clone();
    if pert.depth_noise_sigma == 0.0 && pert.outlier_fraction == 0.0 {
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(pert.seed);
    let w = depth.width();
    let valid: Vec<usize> = depth
        .valid_mask()
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.then_some(i))
        .collect();
    let mut values: Vec<f64> = valid.iter().map(|i| depth.values()[*i]).collect();

    if pert.depth_noise_sigma > 0.0 {
        let normal = Normal::new(0.0, pert.depth_noise_sigma).expect("sigma validated");
        for v in values.iter_mut() {
            *v += normal.sample(&mut rng);
        }
    }

    let n_out = (pert.outlier_fraction * valid.len() as f64).round() as usize;
    if n_out > 0 {
        let mut picks = index::sample(&mut rng, valid.len(), n_out).into_vec();
        picks.sort_unstable();
        for k in picks {
            let magnitude = pert.outlier_magnitude_min * (1.0 + rng.random::<f64>());
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let shifted = values[k] + sign * magnitude;
            values[k] = if shifted > MIN_PERTURBED_DEPTH { shifted } else { values[k] + magnitude };
        }
    }

    for (i, v) in valid.iter().zip(values) {
        let (x, y) = ((*i % w as usize) as u32, (*i / w as usize) as u32);
        out.set(x, y, v.max(MIN_PERTURBED_DEPTH));
    }
    Ok(out)
}
