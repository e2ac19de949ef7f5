//! Loss kernels for training keypoint detectors on cross-domain
//! correspondences: cosine-similarity repeatability, patch peakiness,
//! AP-based reliability, and the domain-adapted global loss.
//!
//! The kernels are framework-agnostic. Differentiable parts return analytic
//! gradients; gradient stopping is reported as explicit flags.

mod ap;
mod global;
mod repeatability;

pub use ap::{ap_approx, ap_kappa_loss, exact_ap, sample_negatives, ApKappaLoss, DescriptorRanking, ReliabilityInputs};
pub use global::{adapted_global_loss, global_loss, DomainPair, GlobalLoss, GradientPath};
pub use repeatability::{cosim_loss, peakiness_loss, CosimLoss, HeatmapSamples};

/// Default κ: the AP credited to a point predicted fully unreliable.
pub const DEFAULT_KAPPA: f64 = 0.5;
/// Default minimum pixel distance between a point and its sampled negatives.
pub const DEFAULT_NEGATIVE_MIN_DISTANCE_PX: f64 = 8.0;
/// Default number of similarity bins for the soft AP.
pub const DEFAULT_AP_BINS: usize = 25;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LossError {
    #[error("numerically degenerate input: {0}")]
    NumericallyDegenerate(&'static str),
    #[error("grid holds no complete patch")]
    EmptyGrid,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

fn check_unit_interval(name: &str, values: &[f64]) -> Result<(), LossError> {
    match values.iter().position(|v| !(0.0..=1.0).contains(v)) {
        Some(i) => Err(LossError::InvalidInput(format!("{name}[{i}] = {} outside [0, 1]", values[i]))),
        None => Ok(()),
    }
}
