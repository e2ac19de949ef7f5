//! Localization benchmark: keyframe pair selection, relative pose estimation
//! from correspondences, and pose error statistics.

mod keyframe;
mod metrics;
mod relpose;
mod report;

pub use keyframe::{keyframe_eval, keyframe_eval_with, keyframe_train, KeyframePair, KeyframePairs, KeyframeParams, EVAL_PARAMS, TRAIN_PARAMS};
pub use metrics::{
    absolute_accuracy, auc, median, summarize, AbsoluteAccuracy, PairSummary, PoseErrorSummary, ABSOLUTE_THRESHOLDS,
    AUC_THRESHOLDS_DEG,
};
pub use relpose::{estimate_relative_pose, estimate_relative_pose_from_set, RansacConfig, RelativePoseEstimate};
pub use report::{write_curve_csv, write_results_csv, write_summary, PairResult, PairStatus};

use crate::FrameId;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BenchmarkError {
    #[error("trajectory {0:?} has no frames")]
    EmptyTrajectory(String),
    #[error("unknown frame {0}")]
    UnknownFrame(FrameId),
    #[error("too few correspondences: {got} < {needed}")]
    TooFewCorrespondences { got: usize, needed: usize },
    #[error("no model reached {needed} inliers (best {best})")]
    NoConsensus { best: usize, needed: usize },
    #[error("correspondences are explained by a pure rotation; translation is undefined")]
    TranslationUndefined,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
