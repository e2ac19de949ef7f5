use nalgebra::{DMatrix, Vector3, Vector4};

use super::MappingError;
use crate::geom::{Camera, Pixel, Pose};

/// Relative gap below which the two smallest singular values are considered
/// equal, leaving the null space ambiguous.
const NULLSPACE_GAP: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Triangulation {
    pub point: Vector3<f64>,
    /// Root-mean-square reprojection residual over all observations, pixels.
    pub rms_residual_px: f64,
}

/// Linear (DLT) triangulation from at least two observations, solved in
/// normalized image coordinates. The point must lie in front of every camera.
pub fn triangulate(observations: &[(&Camera, &Pose, Pixel)]) -> Result<Triangulation, MappingError> {
    if observations.len() < 2 {
        return Err(MappingError::DegenerateGeometry("need at least two observations"));
    }
    let mut a = DMatrix::<f64>::zeros(2 * observations.len(), 4);
    for (k, (cam, pose, px)) in observations.iter().enumerate() {
        let xn = (px.x - cam.cx) / cam.fx;
        let yn = (px.y - cam.cy) / cam.fy;
        let p = pose.to_homogeneous();
        for c in 0..4 {
            a[(2 * k, c)] = xn * p[(2, c)] - p[(0, c)];
            a[(2 * k + 1, c)] = yn * p[(2, c)] - p[(1, c)];
        }
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|i, j| svd.singular_values[*j].total_cmp(&svd.singular_values[*i]));
    let s = |k: usize| svd.singular_values[order[k]];
    if order.len() < 4 || (s(2) - s(3)).abs() <= NULLSPACE_GAP * s(0) {
        return Err(MappingError::DegenerateGeometry("ambiguous null space"));
    }
    let h: Vector4<f64> = v_t.row(order[3]).transpose().fixed_rows::<4>(0).into();
    if h.w.abs() <= f64::EPSILON * h.xyz().norm() {
        return Err(MappingError::DegenerateGeometry("point at infinity"));
    }
    let point = h.xyz() / h.w;
    let mut sq = 0.0;
    for (cam, pose, px) in observations {
        let xc = pose.transform_point(&point);
        if !(xc.z > 0.0) {
            return Err(MappingError::DegenerateGeometry("cheirality violated"));
        }
        let q = cam.project(&xc).map_err(|_| MappingError::DegenerateGeometry("cheirality violated"))?;
        sq += (q - px).norm_squared();
    }
    Ok(Triangulation { point, rms_residual_px: (sq / observations.len() as f64).sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::UnitQuaternion;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn cam() -> Camera {
        Camera::new(500.0, 500.0, 319.5, 239.5, 640, 480).unwrap()
    }

    fn observe(c: &Camera, p: &Pose, x: &Vector3<f64>) -> Pixel {
        c.project(&p.transform_point(x)).unwrap()
    }

    #[test]
    fn two_views_recover_point() {
        let c = cam();
        let x = Vector3::new(0.0, 0.0, 10.0);
        let a = Pose::identity();
        let b = Pose::from_center(UnitQuaternion::identity(), Vector3::new(1.0, 0.0, 0.0));
        let t = triangulate(&[(&c, &a, observe(&c, &a, &x)), (&c, &b, observe(&c, &b, &x))]).unwrap();
        assert!((t.point - x).norm() < 1e-6);
        assert!(t.rms_residual_px < 1e-6);
    }

    #[test]
    fn zero_baseline_is_degenerate() {
        let c = cam();
        let a = Pose::identity();
        let px = Pixel::new(300.0, 200.0);
        assert!(matches!(triangulate(&[(&c, &a, px), (&c, &a, px)]), Err(MappingError::DegenerateGeometry(_))));
        assert!(triangulate(&[(&c, &a, px)]).is_err());
    }

    #[test]
    fn point_behind_cameras_is_rejected() {
        let c = cam();
        let a = Pose::identity();
        let b = Pose::from_center(UnitQuaternion::identity(), Vector3::new(1.0, 0.0, 0.0));
        // Rays that converge only behind the cameras.
        let pa = Pixel::new(319.5 + 50.0, 239.5);
        let pb = Pixel::new(319.5 + 100.0, 239.5);
        assert!(matches!(triangulate(&[(&c, &a, pa), (&c, &b, pb)]), Err(MappingError::DegenerateGeometry(_))));
    }

    #[test]
    fn noisy_five_views_within_five_centimeters() {
        let c = cam();
        let x = Vector3::new(0.3, -0.2, 10.0);
        let poses: Vec<Pose> = (0..5)
            .map(|k| {
                let cx = -4.0 + 2.0 * k as f64;
                // Each camera turns to look at the point.
                let yaw = (x.x - cx).atan2(x.z);
                Pose::from_center(UnitQuaternion::from_axis_angle(&Vector3::y_axis(), yaw), Vector3::new(cx, 0.0, 0.0))
            })
            .collect();
        let noise = Normal::new(0.0, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut errors = Vec::new();
        for _ in 0..200 {
            let obs: Vec<_> = poses
                .iter()
                .map(|p| {
                    let q = observe(&c, p, &x) + Pixel::new(noise.sample(&mut rng), noise.sample(&mut rng));
                    (&c, p, q)
                })
                .collect();
            let t = triangulate(&obs).unwrap();
            errors.push((t.point - x).norm());
        }
        errors.sort_by(f64::total_cmp);
        // 95% of trials, and the median comfortably, stay below 5 cm.
        assert!(errors[190] < 0.05, "p95 {}", errors[190]);
        assert!(errors[100] < 0.02, "median {}", errors[100]);
    }
}
