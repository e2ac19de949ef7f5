use nalgebra::{DMatrix, DVector, Matrix3, Rotation3, SMatrix, SVector, UnitQuaternion, Vector2, Vector3};
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::BenchmarkError;
use crate::correspondence::CorrespondenceSet;
use crate::geom::{Camera, Pixel, Pose};

/// Minimal sample size of the eight-point solver.
const SAMPLE_SIZE: usize = 8;
/// Inlier-refit rounds after each new best RANSAC model.
const LOCAL_REFITS: usize = 3;
const REFINE_ITERATIONS: usize = 30;
const JACOBIAN_STEP: f64 = 1e-7;
/// Tukey biweight cutoff for the final refinement, in units of the inlier
/// threshold.
const TUKEY_CUTOFF: f64 = 3.0;
const REWEIGHT_ROUNDS: usize = 4;
/// Runner-up RANSAC hypotheses polished besides the best one.
const POOL_SIZE: usize = 8;
/// Tukey constant for 95% Gaussian efficiency.
const TUKEY_EFFICIENCY: f64 = 4.685;
/// Normalized-coordinate floor on the Tukey cutoff for noise-free input.
const MIN_CUTOFF: f64 = 1e-12;
/// Share of inliers a pure rotation must explain for the translation to be
/// declared undefined.
const ROTATION_ONLY_FRACTION: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RansacConfig {
    /// Sampson distance threshold in pixels, converted to normalized
    /// coordinates with the mean focal length.
    pub sampson_threshold_px: f64,
    pub max_iterations: usize,
    pub confidence: f64,
    pub min_inliers: usize,
    pub seed: u64,
}

impl Default for RansacConfig {
    fn default() -> Self {
        Self { sampson_threshold_px: 1.0, max_iterations: 2000, confidence: 0.999, min_inliers: 15, seed: 0 }
    }
}

impl RansacConfig {
    pub fn validate(&self) -> Result<(), BenchmarkError> {
        if !(self.sampson_threshold_px > 0.0 && self.sampson_threshold_px.is_finite()) {
            return Err(BenchmarkError::InvalidConfig("sampson threshold must be > 0".into()));
        }
        if self.max_iterations == 0 {
            return Err(BenchmarkError::InvalidConfig("max iterations must be >= 1".into()));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(BenchmarkError::InvalidConfig("confidence must be in (0, 1)".into()));
        }
        if self.min_inliers < SAMPLE_SIZE {
            return Err(BenchmarkError::InvalidConfig(format!("min inliers must be >= {SAMPLE_SIZE}")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelativePoseEstimate {
    /// Estimated `T_JI` with unit-length translation.
    pub pose: Pose,
    pub inliers: Vec<bool>,
    pub inlier_count: usize,
    pub iterations: usize,
}

/// Hartley normalization: centroid to the origin, mean distance √2.
fn normalizer(pts: &[Vector2<f64>]) -> Matrix3<f64> {
    let n = pts.len() as f64;
    let c = pts.iter().sum::<Vector2<f64>>() / n;
    let mean_dist = pts.iter().map(|p| (p - c).norm()).sum::<f64>() / n;
    let s = if mean_dist > 0.0 { std::f64::consts::SQRT_2 / mean_dist } else { 1.0 };
    Matrix3::new(s, 0.0, -s * c.x, 0.0, s, -s * c.y, 0.0, 0.0, 1.0)
}

fn apply(t: &Matrix3<f64>, p: &Vector2<f64>) -> Vector2<f64> {
    let v = t * Vector3::new(p.x, p.y, 1.0);
    Vector2::new(v.x / v.z, v.y / v.z)
}

/// Replaces the singular values of `e` with (1, 1, 0).
fn project_to_essential(e: &Matrix3<f64>) -> Option<Matrix3<f64>> {
    let svd = e.svd(true, true);
    let (u, v_t) = (svd.u?, svd.v_t?);
    let mut order = [0usize, 1, 2];
    order.sort_by(|i, j| svd.singular_values[*j].total_cmp(&svd.singular_values[*i]));
    let mut s = Matrix3::zeros();
    s[(order[0], order[0])] = 1.0;
    s[(order[1], order[1])] = 1.0;
    Some(u * s * v_t)
}

/// Normalized eight-point fit of `x_jᵀ E x_i = 0` over the given indices.
fn eight_point(xi: &[Vector2<f64>], xj: &[Vector2<f64>], idx: &[usize]) -> Option<Matrix3<f64>> {
    let a_pts: Vec<_> = idx.iter().map(|k| xi[*k]).collect();
    let b_pts: Vec<_> = idx.iter().map(|k| xj[*k]).collect();
    let (ta, tb) = (normalizer(&a_pts), normalizer(&b_pts));
    let rows = idx.len().max(9);
    let mut a = DMatrix::<f64>::zeros(rows, 9);
    for (r, (p, q)) in a_pts.iter().zip(&b_pts).enumerate() {
        let (p, q) = (apply(&ta, p), apply(&tb, q));
        let row = [q.x * p.x, q.x * p.y, q.x, q.y * p.x, q.y * p.y, q.y, p.x, p.y, 1.0];
        for (c, v) in row.iter().enumerate() {
            a[(r, c)] = *v;
        }
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t?;
    let k = (0..svd.singular_values.len()).min_by(|i, j| svd.singular_values[*i].total_cmp(&svd.singular_values[*j]))?;
    let f = v_t.row(k);
    let e_hat = Matrix3::new(f[0], f[1], f[2], f[3], f[4], f[5], f[6], f[7], f[8]);
    let e = tb.transpose() * e_hat * ta;
    if !e.iter().all(|v| v.is_finite()) {
        return None;
    }
    project_to_essential(&(e / e.norm()))
}

fn sampson(e: &Matrix3<f64>, p: &Vector2<f64>, q: &Vector2<f64>) -> f64 {
    let x = Vector3::new(p.x, p.y, 1.0);
    let y = Vector3::new(q.x, q.y, 1.0);
    let ex = e * x;
    let ety = e.transpose() * y;
    let num = y.dot(&ex);
    let den = ex.x * ex.x + ex.y * ex.y + ety.x * ety.x + ety.y * ety.y;
    if den <= 0.0 {
        return f64::INFINITY;
    }
    (num * num / den).sqrt()
}

fn inlier_mask(e: &Matrix3<f64>, xi: &[Vector2<f64>], xj: &[Vector2<f64>], thr: f64) -> Vec<bool> {
    xi.iter().zip(xj).map(|(p, q)| sampson(e, p, q) <= thr).collect()
}

/// Depth of the point seen along bearings `a` (camera I) and `b` (camera J)
/// in both cameras, by linear triangulation.
fn two_view_depths(r: &Matrix3<f64>, t: &Vector3<f64>, a: &Vector3<f64>, b: &Vector3<f64>) -> Option<(f64, f64)> {
    // z_j·b = z_i·R·a + t  ⇒  [R·a, −b]·(z_i, z_j)ᵀ = −t in least squares.
    let ra = r * a;
    let m = SMatrix::<f64, 3, 2>::from_columns(&[ra, -b]);
    let mtm = m.transpose() * m;
    let z = mtm.try_inverse()? * (m.transpose() * (-t));
    Some((z[0] * a.z, z[1] * b.z))
}

/// Masked pairs that triangulate in front of both cameras under `(r, t)`.
fn cheirality_votes(r: &Matrix3<f64>, t: &Vector3<f64>, xi: &[Vector2<f64>], xj: &[Vector2<f64>], mask: &[bool]) -> usize {
    xi.iter()
        .zip(xj)
        .zip(mask)
        .filter(|(_, m)| **m)
        .filter(|((p, q), _)| {
            let a = Vector3::new(p.x, p.y, 1.0);
            let b = Vector3::new(q.x, q.y, 1.0);
            two_view_depths(r, t, &a, &b).is_some_and(|(zi, zj)| zi > 0.0 && zj > 0.0)
        })
        .count()
}

/// Refinement cannot tell `t` from `-t`; settles the sign by cheirality.
fn choose_sign(r: Matrix3<f64>, t: Vector3<f64>, xi: &[Vector2<f64>], xj: &[Vector2<f64>], mask: &[bool]) -> (Matrix3<f64>, Vector3<f64>) {
    if cheirality_votes(&r, &-t, xi, xj, mask) > cheirality_votes(&r, &t, xi, xj, mask) { (r, -t) } else { (r, t) }
}

fn decompose(e: &Matrix3<f64>, xi: &[Vector2<f64>], xj: &[Vector2<f64>], mask: &[bool]) -> Option<(Matrix3<f64>, Vector3<f64>)> {
    let svd = e.svd(true, true);
    let mut u = svd.u?;
    let mut v_t = svd.v_t?;
    // Order singular values descending so the null direction is the last column.
    let mut order = [0usize, 1, 2];
    order.sort_by(|i, j| svd.singular_values[*j].total_cmp(&svd.singular_values[*i]));
    u = Matrix3::from_columns(&[u.column(order[0]), u.column(order[1]), u.column(order[2])]);
    v_t = Matrix3::from_rows(&[v_t.row(order[0]), v_t.row(order[1]), v_t.row(order[2])]);
    if u.determinant() < 0.0 {
        u = -u;
    }
    if v_t.determinant() < 0.0 {
        v_t = -v_t;
    }
    let w = Matrix3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0);
    let t: Vector3<f64> = u.column(2).into();
    let candidates = [(u * w * v_t, t), (u * w * v_t, -t), (u * w.transpose() * v_t, t), (u * w.transpose() * v_t, -t)];
    let votes = |(r, t): &(Matrix3<f64>, Vector3<f64>)| cheirality_votes(r, t, xi, xj, mask);
    let mut best: Option<(usize, usize)> = None;
    for (k, c) in candidates.iter().enumerate() {
        let v = votes(c);
        if best.is_none_or(|(bv, _)| v > bv) {
            best = Some((v, k));
        }
    }
    let (r, t) = candidates[best?.1];
    Some((r, t.normalize()))
}

/// Re-estimates from the inliers of a fresh best model while that grows
/// the inlier set.
fn local_refit(mut e: Matrix3<f64>, mut count: usize, xi: &[Vector2<f64>], xj: &[Vector2<f64>], thr: f64) -> (usize, Matrix3<f64>) {
    for _ in 0..LOCAL_REFITS {
        let mask = inlier_mask(&e, xi, xj, thr);
        let idx: Vec<usize> = (0..xi.len()).filter(|k| mask[*k]).collect();
        if idx.len() < SAMPLE_SIZE {
            break;
        }
        let Some(refit) = eight_point(xi, xj, &idx) else { break };
        let c = inlier_mask(&refit, xi, xj, thr).iter().filter(|m| **m).count();
        if c <= count {
            break;
        }
        (e, count) = (refit, c);
    }
    (count, e)
}

fn skew(t: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -t.z, t.y, t.z, 0.0, -t.x, -t.y, t.x, 0.0)
}

fn essential(r: &Matrix3<f64>, t: &Vector3<f64>) -> Matrix3<f64> {
    skew(t) * r
}

fn signed_sampson(e: &Matrix3<f64>, p: &Vector2<f64>, q: &Vector2<f64>) -> f64 {
    let x = Vector3::new(p.x, p.y, 1.0);
    let y = Vector3::new(q.x, q.y, 1.0);
    let ex = e * x;
    let ety = e.transpose() * y;
    let den = (ex.x * ex.x + ex.y * ex.y + ety.x * ety.x + ety.y * ety.y).sqrt();
    if den > 0.0 { y.dot(&ex) / den } else { 0.0 }
}

/// Levenberg–Marquardt on weighted Sampson residuals over a rotation
/// increment (3) and a tangent step of the unit translation (2).
fn refine(r0: Matrix3<f64>, t0: Vector3<f64>, xi: &[Vector2<f64>], xj: &[Vector2<f64>], weights: &[f64]) -> (Matrix3<f64>, Vector3<f64>) {
    let idx: Vec<usize> = (0..xi.len()).filter(|k| weights[*k] > 0.0).collect();
    let sqrt_w: Vec<f64> = idx.iter().map(|k| weights[*k].sqrt()).collect();
    let mut r = r0;
    let mut t = t0.normalize();
    let residuals = |r: &Matrix3<f64>, t: &Vector3<f64>| -> Vec<f64> {
        let e = essential(r, t);
        idx.iter().zip(&sqrt_w).map(|(k, w)| w * signed_sampson(&e, &xi[*k], &xj[*k])).collect()
    };
    let step = |r: &Matrix3<f64>, t: &Vector3<f64>, d: &SVector<f64, 5>| {
        let helper = if t.x.abs() < 0.9 { Vector3::x() } else { Vector3::y() };
        let b1 = t.cross(&helper).normalize();
        let b2 = t.cross(&b1);
        let dr = Rotation3::new(Vector3::new(d[0], d[1], d[2]));
        (dr.matrix() * r, (t + b1 * d[3] + b2 * d[4]).normalize())
    };
    if idx.len() < 5 {
        return (r, t);
    }
    let cost = |res: &[f64]| res.iter().map(|v| v * v).sum::<f64>();
    let mut res = residuals(&r, &t);
    let mut c = cost(&res);
    let mut lambda = 1e-3;
    for _ in 0..REFINE_ITERATIONS {
        let mut jac = DMatrix::<f64>::zeros(idx.len(), 5);
        for k in 0..5 {
            let mut d = SVector::<f64, 5>::zeros();
            d[k] = JACOBIAN_STEP;
            let (rp, tp) = step(&r, &t, &d);
            d[k] = -JACOBIAN_STEP;
            let (rm, tm) = step(&r, &t, &d);
            let (fp, fm) = (residuals(&rp, &tp), residuals(&rm, &tm));
            for i in 0..idx.len() {
                jac[(i, k)] = (fp[i] - fm[i]) / (2.0 * JACOBIAN_STEP);
            }
        }
        let jt = jac.transpose();
        let g = &jt * DVector::from_column_slice(&res);
        let h = &jt * &jac;
        let mut improved = false;
        for _ in 0..10 {
            let mut damped = h.clone();
            for k in 0..5 {
                damped[(k, k)] += lambda * h[(k, k)].max(1e-12);
            }
            let Some(delta) = damped.cholesky().map(|ch| ch.solve(&(-&g))) else {
                lambda *= 10.0;
                continue;
            };
            let d = SVector::<f64, 5>::from_iterator(delta.iter().copied());
            let (rn, tn) = step(&r, &t, &d);
            let rn_res = residuals(&rn, &tn);
            let cn = cost(&rn_res);
            if cn < c {
                (r, t, res) = (rn, tn, rn_res);
                let done = (c - cn) <= 1e-12 * c;
                c = cn;
                lambda = (lambda * 0.1).max(1e-12);
                improved = !done;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    (r, t)
}

/// MAD estimate of the residual standard deviation over points within `thr`.
fn robust_scale(r: &Matrix3<f64>, t: &Vector3<f64>, xi: &[Vector2<f64>], xj: &[Vector2<f64>], thr: f64) -> f64 {
    let e = essential(r, t);
    let mut abs: Vec<f64> = xi.iter().zip(xj).map(|(p, q)| signed_sampson(&e, p, q).abs()).filter(|v| *v <= thr).collect();
    if abs.is_empty() {
        return thr;
    }
    abs.sort_by(f64::total_cmp);
    1.4826 * abs[abs.len() / 2]
}

/// Tukey biweights of the Sampson residuals under `(r, t)`; zero beyond
/// `cutoff`.
fn tukey_weights(r: &Matrix3<f64>, t: &Vector3<f64>, xi: &[Vector2<f64>], xj: &[Vector2<f64>], cutoff: f64) -> Vec<f64> {
    let e = essential(r, t);
    xi.iter()
        .zip(xj)
        .map(|(p, q)| {
            let u = signed_sampson(&e, p, q) / cutoff;
            if u.abs() < 1.0 { (1.0 - u * u).powi(2) } else { 0.0 }
        })
        .collect()
}

/// Decomposes `e` on its inliers, then refines: plain least squares on the
/// inliers, followed by Tukey-reweighted rounds with a MAD-scaled cutoff so
/// points near the threshold enter or leave smoothly instead of pinning the
/// fit to the hypothesis that chose them.
fn polish(e: &Matrix3<f64>, xi: &[Vector2<f64>], xj: &[Vector2<f64>], thr: f64) -> Option<(Matrix3<f64>, Vector3<f64>)> {
    let mask = inlier_mask(e, xi, xj, thr);
    let (r, t) = decompose(e, xi, xj, &mask)?;
    let weights: Vec<f64> = mask.iter().map(|m| if *m { 1.0 } else { 0.0 }).collect();
    let (mut r, mut t) = refine(r, t, xi, xj, &weights);
    for _ in 0..REWEIGHT_ROUNDS {
        let cutoff = (TUKEY_EFFICIENCY * robust_scale(&r, &t, xi, xj, thr)).clamp(MIN_CUTOFF, TUKEY_CUTOFF * thr);
        let weights = tukey_weights(&r, &t, xi, xj, cutoff);
        (r, t) = refine(r, t, xi, xj, &weights);
    }
    Some(choose_sign(r, t, xi, xj, &mask))
}

/// Total Tukey biweight loss of the Sampson residuals at a fixed cutoff.
fn robust_cost(r: &Matrix3<f64>, t: &Vector3<f64>, xi: &[Vector2<f64>], xj: &[Vector2<f64>], cutoff: f64) -> f64 {
    let e = essential(r, t);
    xi.iter()
        .zip(xj)
        .map(|(p, q)| {
            let u = (signed_sampson(&e, p, q) / cutoff).min(1.0).max(-1.0);
            1.0 - (1.0 - u * u).powi(3)
        })
        .sum()
}

/// Fraction of inliers whose bearings a single rotation maps onto each other
/// within `thr` (normalized units).
fn rotation_explained_fraction(xi: &[Vector2<f64>], xj: &[Vector2<f64>], mask: &[bool], thr: f64) -> f64 {
    let bear = |p: &Vector2<f64>| Vector3::new(p.x, p.y, 1.0).normalize();
    let pairs: Vec<(Vector3<f64>, Vector3<f64>)> =
        xi.iter().zip(xj).zip(mask).filter(|(_, m)| **m).map(|((p, q), _)| (bear(p), bear(q))).collect();
    if pairs.is_empty() {
        return 0.0;
    }
    // Kabsch: R maximizing Σ b_jᵀ R b_i.
    let h = pairs.iter().fold(Matrix3::zeros(), |acc, (a, b)| acc + b * a.transpose());
    let svd = h.svd(true, true);
    let (Some(u), Some(v_t)) = (svd.u, svd.v_t) else { return 0.0 };
    let d = (u * v_t).determinant().signum();
    let r = u * Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, d)) * v_t;
    let explained = pairs
        .iter()
        .filter(|(a, b)| {
            let ra = r * a;
            ra.z > 0.0 && (Vector2::new(ra.x / ra.z, ra.y / ra.z) - Vector2::new(b.x / b.z, b.y / b.z)).norm() <= thr
        })
        .count();
    explained as f64 / pairs.len() as f64
}

/// Essential-matrix relative pose `T_JI` (unit translation) from pixel pairs
/// `(p in I, q in J)`: eight-point RANSAC scored by Sampson distance with
/// inlier refits, cheirality voting over the four decompositions, and a
/// final Levenberg–Marquardt refinement of the Sampson error.
/// Correspondences a pure rotation explains are refused with
/// [`BenchmarkError::TranslationUndefined`] rather than given an arbitrary
/// translation.
pub fn estimate_relative_pose(
    pairs: &[(Pixel, Pixel)],
    cam_i: &Camera,
    cam_j: &Camera,
    config: &RansacConfig,
) -> Result<RelativePoseEstimate, BenchmarkError> {
    config.validate()?;
    let n = pairs.len();
    if n < SAMPLE_SIZE.max(config.min_inliers) {
        return Err(BenchmarkError::TooFewCorrespondences { got: n, needed: SAMPLE_SIZE.max(config.min_inliers) });
    }
    let norm = |c: &Camera, p: &Pixel| Vector2::new((p.x - c.cx) / c.fx, (p.y - c.cy) / c.fy);
    let xi: Vec<_> = pairs.iter().map(|(p, _)| norm(cam_i, p)).collect();
    let xj: Vec<_> = pairs.iter().map(|(_, q)| norm(cam_j, q)).collect();
    let mean_focal = 0.25 * (cam_i.fx + cam_i.fy + cam_j.fx + cam_j.fy);
    let thr = config.sampson_threshold_px / mean_focal;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut best: Option<(usize, Matrix3<f64>)> = None;
    // Runner-up hypotheses, polished alongside the best so a poor local
    // minimum near one of them does not decide the answer.
    let mut pool: Vec<(usize, Matrix3<f64>)> = Vec::new();
    let mut needed = config.max_iterations;
    let mut iterations = 0;
    while iterations < needed.min(config.max_iterations) {
        iterations += 1;
        let sample = index::sample(&mut rng, n, SAMPLE_SIZE).into_vec();
        let Some(e) = eight_point(&xi, &xj, &sample) else { continue };
        let count = inlier_mask(&e, &xi, &xj, thr).iter().filter(|m| **m).count();
        if count >= config.min_inliers && (pool.len() < POOL_SIZE || count > pool[pool.len() - 1].0) {
            let at = pool.partition_point(|(c, _)| *c >= count);
            pool.insert(at, (count, e));
            pool.truncate(POOL_SIZE);
        }
        if best.as_ref().is_none_or(|(c, _)| count > *c) {
            let (count, e) = local_refit(e, count, &xi, &xj, thr);
            best = Some((count, e));
            let w = count as f64 / n as f64;
            let p_good = w.powi(SAMPLE_SIZE as i32);
            needed = if p_good >= 1.0 {
                0
            } else if p_good <= 0.0 {
                config.max_iterations
            } else {
                ((1.0 - config.confidence).ln() / (-p_good).ln_1p()).ceil().max(1.0).min(usize::MAX as f64) as usize
            };
        }
    }
    let best_count = best.as_ref().map_or(0, |(c, _)| *c);
    let Some((_, mut e)) = best.filter(|(c, _)| *c >= config.min_inliers) else {
        return Err(BenchmarkError::NoConsensus { best: best_count, needed: config.min_inliers });
    };

    let mut mask = inlier_mask(&e, &xi, &xj, thr);
    let idx: Vec<usize> = (0..n).filter(|k| mask[*k]).collect();
    if let Some(refit) = eight_point(&xi, &xj, &idx) {
        let refit_mask = inlier_mask(&refit, &xi, &xj, thr);
        if refit_mask.iter().filter(|m| **m).count() >= idx.len() {
            e = refit;
            mask = refit_mask;
        }
    }
    let inlier_count = mask.iter().filter(|m| **m).count();
    if inlier_count < config.min_inliers {
        return Err(BenchmarkError::NoConsensus { best: inlier_count, needed: config.min_inliers });
    }
    if rotation_explained_fraction(&xi, &xj, &mask, thr) >= ROTATION_ONLY_FRACTION {
        return Err(BenchmarkError::TranslationUndefined);
    }
    let mut polished: Option<(f64, Matrix3<f64>, Vector3<f64>)> = None;
    for start in std::iter::once(e).chain(pool.iter().map(|(_, e)| *e)) {
        let Some((r, t)) = polish(&start, &xi, &xj, thr) else { continue };
        let cost = robust_cost(&r, &t, &xi, &xj, TUKEY_CUTOFF * thr);
        if polished.as_ref().is_none_or(|(c, _, _)| cost < *c) {
            polished = Some((cost, r, t));
        }
    }
    let (_, r, t) = polished.ok_or(BenchmarkError::NoConsensus { best: 0, needed: config.min_inliers })?;
    let mask = inlier_mask(&essential(&r, &t), &xi, &xj, thr);
    let inlier_count = mask.iter().filter(|m| **m).count();
    if inlier_count < config.min_inliers {
        return Err(BenchmarkError::NoConsensus { best: inlier_count, needed: config.min_inliers });
    }
    let rotation = UnitQuaternion::from_matrix(&r);
    Ok(RelativePoseEstimate { pose: Pose::from_parts(rotation, t), inliers: mask, inlier_count, iterations })
}

/// [`estimate_relative_pose`] on the `(p, q)` pairs of a correspondence set.
pub fn estimate_relative_pose_from_set(
    set: &CorrespondenceSet,
    cam_i: &Camera,
    cam_j: &Camera,
    config: &RansacConfig,
) -> Result<RelativePoseEstimate, BenchmarkError> {
    let pairs: Vec<(Pixel, Pixel)> = set.pairs.iter().map(|c| (c.p, c.q)).collect();
    estimate_relative_pose(&pairs, cam_i, cam_j, config)
}
