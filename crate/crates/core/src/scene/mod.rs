//! Synthetic scenes and an exact ray-casting depth renderer.
//!
//! A scene stands in for the per-domain radiance fields: it renders the
//! z-depth of the first surface hit along every pixel ray, and answers
//! ground-truth correspondence queries exactly. Visual domains are modelled
//! as the same geometry rendered with independent [`DomainPerturbation`]s.

mod oracle;
mod perturb;
mod presets;
mod primitive;
mod scene_file;

use nalgebra::Vector3;
use rayon::prelude::*;

use crate::geom::{Camera, DepthMap, Pixel, Pose};

pub use oracle::{analytic_correspondence, analytic_correspondence_across, OracleError, OracleMatch};
pub use perturb::{perturb, DomainPerturbation};
pub use presets::{
    corridor, corridor_camera, loop_trajectory, out_and_back_trajectory, straight_trajectory, CORRIDOR_CAMERA_HEIGHT,
};
pub use primitive::{AaBox, Plane, Primitive, RAY_EPSILON};
pub use scene_file::{parse_scene, write_scene};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SceneError {
    #[error("invalid primitive: {0}")]
    InvalidPrimitive(String),
    #[error("scene has no primitives")]
    Empty,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid perturbation: {0}")]
    InvalidPerturbation(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticScene {
    pub id: String,
    primitives: Vec<Primitive>,
}

impl SyntheticScene {
    pub fn new(id: impl Into<String>, primitives: Vec<Primitive>) -> Result<Self, SceneError> {
        if primitives.is_empty() {
            return Err(SceneError::Empty);
        }
        Ok(Self { id: id.into(), primitives })
    }

    pub fn primitives(&self) -> &[Primitive] {
        &self.primitives
    }

    /// Returns a copy with an extra primitive.
    pub fn with(&self, primitive: Primitive) -> Self {
        let mut s = self.clone();
        s.primitives.push(primitive);
        s
    }

    /// Smallest positive ray parameter over all primitives.
    pub fn cast(&self, origin: &Vector3<f64>, dir: &Vector3<f64>) -> Option<f64> {
        self.primitives
            .iter()
            .filter_map(|p| p.intersect(origin, dir))
            .min_by(f64::total_cmp)
    }

    /// z-depth of the first surface seen through pixel `p`.
    pub fn depth_at(&self, cam: &Camera, pose: &Pose, p: &Pixel) -> Option<f64> {
        let dir = pose.quaternion().inverse() * cam.ray(p);
        self.cast(&pose.center(), &dir)
    }
}

/// Renders z-depth for every pixel; rays that miss leave the pixel invalid.
pub fn render_depth(scene: &SyntheticScene, cam: &Camera, pose: &Pose) -> DepthMap {
    let r_t = pose.rotation().transpose();
    let origin = pose.center();
    let (w, h) = (cam.width as usize, cam.height as usize);
    let values: Vec<f64> = (0..h)
        .into_par_iter()
        .flat_map_iter(|y| {
            let r_t = &r_t;
            let origin = &origin;
            (0..w).map(move |x| {
                let dir = r_t * cam.ray(&Pixel::new(x as f64, y as f64));
                scene.cast(origin, &dir).unwrap_or(0.0)
            })
        })
        .collect();
    DepthMap::from_values(cam.width, cam.height, values).expect("dimensions follow the camera")
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::UnitQuaternion;

    fn cam() -> Camera {
        Camera::new(100.0, 100.0, 31.5, 23.5, 64, 48).unwrap()
    }

    #[test]
    fn fronto_parallel_plane_is_exact() {
        let plane = Plane::new(Vector3::new(0.0, 0.0, 10.0), Vector3::z(), 1000.0, 1000.0).unwrap();
        let scene = SyntheticScene::new("wall", vec![Primitive::Plane(plane)]).unwrap();
        let d = render_depth(&scene, &cam(), &Pose::identity());
        assert!(d.values().iter().all(|v| *v == 10.0));
    }

    #[test]
    fn empty_half_space_is_all_invalid() {
        let plane = Plane::new(Vector3::new(0.0, 0.0, -10.0), Vector3::z(), 1000.0, 1000.0).unwrap();
        let scene = SyntheticScene::new("behind", vec![Primitive::Plane(plane)]).unwrap();
        let d = render_depth(&scene, &cam(), &Pose::identity());
        assert_eq!(d.valid_count(), 0);
    }

    #[test]
    fn tilted_plane_matches_closed_form() {
        // Plane through (0,0,10) tilted 45° about x: normal (0, -sin45, cos45).
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let n = Vector3::new(0.0, -s, s);
        let plane = Plane::new(Vector3::new(0.0, 0.0, 10.0), n, 1e4, 1e4).unwrap();
        let scene = SyntheticScene::new("tilted", vec![Primitive::Plane(plane)]).unwrap();
        let c = cam();
        let d = render_depth(&scene, &c, &Pose::identity());
        for y in 0..c.height {
            for x in 0..c.width {
                // Ray (a, b, 1): (−b·s + s)·z = 10·s  ⇒  z = 10 / (1 − b).
                let b = (y as f64 - c.cy) / c.fy;
                let expected = 10.0 / (1.0 - b);
                let got = d.get(x, y).unwrap();
                assert!((got - expected).abs() < 1e-9, "({x},{y}) {got} vs {expected}");
            }
        }
    }

    #[test]
    fn render_is_bit_reproducible() {
        let scene = corridor();
        let c = corridor_camera();
        let pose = Pose::from_center(UnitQuaternion::from_euler_angles(0.01, 0.2, 0.0), Vector3::new(0.3, 0.1, 12.0));
        let a = render_depth(&scene, &c, &pose);
        let b = render_depth(&scene, &c, &pose);
        assert_eq!(a, b);
        assert!(a.valid_count() > 0);
    }

    #[test]
    fn nearest_primitive_wins() {
        let far = Plane::new(Vector3::new(0.0, 0.0, 10.0), Vector3::z(), 100.0, 100.0).unwrap();
        let near = AaBox::new(Vector3::new(-1.0, -1.0, 4.0), Vector3::new(1.0, 1.0, 5.0)).unwrap();
        let scene = SyntheticScene::new("s", vec![Primitive::Plane(far), Primitive::Box(near)]).unwrap();
        assert_eq!(scene.cast(&Vector3::zeros(), &Vector3::z()), Some(4.0));
        assert!(SyntheticScene::new("none", vec![]).is_err());
    }
}
