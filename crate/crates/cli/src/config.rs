use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const SEED_ENV: &str = "ICDC_SEED";

/// Everything a run depends on. Loaded from TOML, then overridden by flags.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    /// Worker count; never part of the config hash since outputs do not
    /// depend on it.
    pub jobs: Option<usize>,
    pub output: Option<PathBuf>,
    pub paths: Paths,
    pub synth: SynthConfig,
    pub correspond: CorrespondConfig,
    pub keyframes: KeyframeConfig,
    pub ransac: RansacSection,
    pub blocks: BlocksConfig,
    pub losses: LossesConfig,
}

/// Input locations. Unset entries default to the standard names inside
/// `dataset`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub scene: Option<PathBuf>,
    pub dataset: Option<PathBuf>,
    pub map: Option<PathBuf>,
    pub poses: Option<PathBuf>,
    pub intrinsics: Option<PathBuf>,
    pub depth: Option<PathBuf>,
    pub estimates: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    /// Built-in scene used when no scene file is given.
    pub preset: String,
    /// `fx fy cx cy width height`; the preset camera when unset.
    pub camera: Option<[f64; 6]>,
    /// Keypoint grid spacing of the sparse map, pixels.
    pub map_stride: u32,
    pub trajectories: Vec<TrajectorySpec>,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self { preset: "corridor".into(), camera: None, map_stride: 16, trajectories: vec![TrajectorySpec::default()] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrajectorySpec {
    pub label: String,
    /// `straight`, `loop` or `out-and-back`.
    pub kind: String,
    pub start: [f64; 3],
    /// Frame count; frames per lap for loops, frames per leg for out-and-back.
    pub frames: usize,
    pub step: f64,
    pub yaw_deg: f64,
    pub center: [f64; 3],
    pub radius: f64,
    pub loops: usize,
    pub depth_noise_sigma: f64,
    pub outlier_fraction: f64,
    pub outlier_magnitude_min: f64,
}

impl Default for TrajectorySpec {
    fn default() -> Self {
        Self {
            label: "default".into(),
            kind: "straight".into(),
            start: [0.0; 3],
            frames: 50,
            step: 1.0,
            yaw_deg: 0.0,
            center: [0.0; 3],
            radius: 10.0,
            loops: 1,
            depth_noise_sigma: 0.0,
            outlier_fraction: 0.0,
            outlier_magnitude_min: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorrespondConfig {
    pub method: String,
    pub alpha_px: f64,
    pub beta_m: f64,
    pub stride: u32,
    /// Row-major 3×3 matrix for the homography pathway.
    pub homography: [f64; 9],
}

impl Default for CorrespondConfig {
    fn default() -> Self {
        Self {
            method: "icdc".into(),
            alpha_px: 2.0,
            beta_m: 0.15,
            stride: 1,
            homography: [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KeyframeConfig {
    pub reference_spacing_m: f64,
    pub max_distance_m: f64,
    pub max_angle_deg: f64,
    pub query_spacing_m: f64,
}

impl Default for KeyframeConfig {
    fn default() -> Self {
        Self { reference_spacing_m: 10.0, max_distance_m: 8.0, max_angle_deg: 45.0, query_spacing_m: 2.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RansacSection {
    pub sampson_threshold_px: f64,
    pub max_iterations: usize,
    pub confidence: f64,
    pub min_inliers: usize,
}

impl Default for RansacSection {
    fn default() -> Self {
        Self { sampson_threshold_px: 1.0, max_iterations: 2000, confidence: 0.999, min_inliers: 15 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlocksConfig {
    pub max_extent_m: f64,
    pub buffer_fraction: f64,
}

impl Default for BlocksConfig {
    fn default() -> Self {
        Self { max_extent_m: 64.0, buffer_fraction: 0.2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LossesConfig {
    pub kappa: f64,
    pub bins: usize,
}

impl Default for LossesConfig {
    fn default() -> Self {
        Self { kappa: 0.5, bins: 25 }
    }
}

fn finite_positive(name: &str, v: f64) -> CliResult<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::config(format!("{name} must be > 0, got {v}")))
    }
}

impl RunConfig {
    /// Reads a TOML file; relative paths inside it resolve against the
    /// file's directory.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut Option<PathBuf>| {
            if let Some(q) = p.as_mut() {
                if q.is_relative() {
                    *q = base.join(&*q);
                }
            }
        };
        let p = &mut cfg.paths;
        for slot in [&mut p.scene, &mut p.dataset, &mut p.map, &mut p.poses, &mut p.intrinsics, &mut p.depth, &mut p.estimates] {
            rebase(slot);
        }
        rebase(&mut cfg.output);
        Ok(cfg)
    }

    /// Range checks on every numeric parameter.
    pub fn validate(&self) -> CliResult<()> {
        let c = &self.correspond;
        finite_positive("alpha_px", c.alpha_px)?;
        finite_positive("beta_m", c.beta_m)?;
        if c.stride == 0 {
            return Err(CliError::config("stride must be >= 1"));
        }
        if self.synth.map_stride == 0 {
            return Err(CliError::config("map_stride must be >= 1"));
        }
        for (k, t) in self.synth.trajectories.iter().enumerate() {
            if self.synth.trajectories[..k].iter().any(|u| u.label == t.label) {
                return Err(CliError::config(format!("duplicate trajectory label {:?}", t.label)));
            }
            if t.label.is_empty() || t.label.contains(char::is_whitespace) {
                return Err(CliError::config(format!("trajectory label {:?} must be non-empty without spaces", t.label)));
            }
            if t.frames == 0 {
                return Err(CliError::config(format!("trajectory {} has no frames", t.label)));
            }
            if !matches!(t.kind.as_str(), "straight" | "loop" | "out-and-back") {
                return Err(CliError::config(format!("unknown trajectory kind {:?}", t.kind)));
            }
        }
        let k = &self.keyframes;
        finite_positive("reference_spacing_m", k.reference_spacing_m)?;
        finite_positive("max_distance_m", k.max_distance_m)?;
        finite_positive("max_angle_deg", k.max_angle_deg)?;
        if !(k.query_spacing_m >= 0.0) {
            return Err(CliError::config("query_spacing_m must be >= 0"));
        }
        self.ransac_config(0).validate().map_err(CliError::config)?;
        finite_positive("max_extent_m", self.blocks.max_extent_m)?;
        if !(self.blocks.buffer_fraction >= 0.0 && self.blocks.buffer_fraction.is_finite()) {
            return Err(CliError::config("buffer_fraction must be >= 0"));
        }
        if !(0.0..=1.0).contains(&self.losses.kappa) {
            return Err(CliError::config("kappa must be in [0, 1]"));
        }
        if self.losses.bins < 2 {
            return Err(CliError::config("bins must be >= 2"));
        }
        Ok(())
    }

    pub fn ransac_config(&self, seed: u64) -> icdc_core::benchmark::RansacConfig {
        let r = &self.ransac;
        icdc_core::benchmark::RansacConfig {
            sampson_threshold_px: r.sampson_threshold_px,
            max_iterations: r.max_iterations,
            confidence: r.confidence,
            min_inliers: r.min_inliers,
            seed,
        }
    }

    /// Flag, then config, then `ICDC_SEED`, then zero.
    pub fn resolve_seed(&mut self, flag: Option<u64>) -> CliResult<u64> {
        let seed = match (flag, self.seed) {
            (Some(s), _) | (None, Some(s)) => s,
            (None, None) => match std::env::var(SEED_ENV) {
                Ok(v) => v.trim().parse().map_err(|_| CliError::config(format!("{SEED_ENV}={v:?} is not a u64")))?,
                Err(_) => 0,
            },
        };
        self.seed = Some(seed);
        Ok(seed)
    }

    /// SHA-256 of the effective config with worker count and output
    /// directory removed.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.jobs = None;
        c.output = None;
        let text = toml::to_string(&c).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}
