use super::{check_unit_interval, LossError};

/// Norm below which a heatmap sample vector counts as zero.
const MIN_NORM: f64 = 1e-12;

/// Reference heatmap values `s` at points `p_1..p_N` and query heatmap
/// values `s_prime` at their correspondences.
#[derive(Clone, Debug, PartialEq)]
pub struct HeatmapSamples {
    s: Vec<f64>,
    s_prime: Vec<f64>,
}

impl HeatmapSamples {
    pub fn new(s: Vec<f64>, s_prime: Vec<f64>) -> Result<Self, LossError> {
        if s.is_empty() || s.len() != s_prime.len() {
            return Err(LossError::InvalidInput(format!("sample lengths {} and {} must match and be nonzero", s.len(), s_prime.len())));
        }
        check_unit_interval("s", &s)?;
        check_unit_interval("s_prime", &s_prime)?;
        Ok(Self { s, s_prime })
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn s_prime(&self) -> &[f64] {
        &self.s_prime
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CosimLoss {
    pub value: f64,
    pub grad_s: Vec<f64>,
    pub grad_s_prime: Vec<f64>,
}

/// `1 − s·s′ / (‖s‖‖s′‖)`, over whole sample vectors (no patching), with
/// its gradient.
pub fn cosim_loss(h: &HeatmapSamples) -> Result<CosimLoss, LossError> {
    let (s, sp) = (&h.s, &h.s_prime);
    let dot: f64 = s.iter().zip(sp).map(|(a, b)| a * b).sum();
    let na = s.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nb = sp.iter().map(|v| v * v).sum::<f64>().sqrt();
    if na <= MIN_NORM || nb <= MIN_NORM {
        return Err(LossError::NumericallyDegenerate("zero heatmap sample vector"));
    }
    let cos = dot / (na * nb);
    // ∂cos/∂s = s′/(‖s‖‖s′‖) − cos·s/‖s‖², symmetrically for s′.
    let grad_s = s.iter().zip(sp).map(|(a, b)| -(b / (na * nb) - cos * a / (na * na))).collect();
    let grad_s_prime = s.iter().zip(sp).map(|(a, b)| -(a / (na * nb) - cos * b / (nb * nb))).collect();
    Ok(CosimLoss { value: (1.0 - cos).clamp(0.0, 2.0), grad_s, grad_s_prime })
}

/// `1 − mean over patches of (max − mean)` on non-overlapping `patch`×`patch`
/// tiles of a row-major `width`×`height` grid. Trailing rows and columns
/// that do not fill a patch are dropped.
///
/// A one-hot patch of K pixels scores `1/K`, not 0: the minimum depends on
/// the patch size.
pub fn peakiness_loss(grid: &[f64], width: usize, height: usize, patch: usize) -> Result<f64, LossError> {
    if patch == 0 {
        return Err(LossError::InvalidInput("patch size must be at least 1".into()));
    }
    if grid.len() != width * height {
        return Err(LossError::InvalidInput(format!("grid has {} values, expected {width}x{height}", grid.len())));
    }
    check_unit_interval("grid", grid)?;
    let (px, py) = (width / patch, height / patch);
    if px == 0 || py == 0 {
        return Err(LossError::EmptyGrid);
    }
    let mut total = 0.0;
    for ty in 0..py {
        for tx in 0..px {
            let (mut max, mut sum) = (f64::NEG_INFINITY, 0.0);
            for y in ty * patch..(ty + 1) * patch {
                for v in &grid[y * width + tx * patch..y * width + (tx + 1) * patch] {
                    max = max.max(*v);
                    sum += v;
                }
            }
            total += max - sum / (patch * patch) as f64;
        }
    }
    Ok(1.0 - total / (px * py) as f64)
}
