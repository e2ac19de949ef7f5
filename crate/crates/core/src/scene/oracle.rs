use super::SyntheticScene;
use crate::geom::{Camera, Pixel, Pose};

/// Depth tolerance for deciding that a nearer surface blocks the point in J.
pub const OCCLUSION_TOLERANCE_M: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OracleMatch {
    Visible(Pixel),
    Occluded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("no surface behind pixel of frame I")]
    NoSurface,
    #[error("surface point falls outside frame J")]
    OutOfBoundsInJ,
}

/// Exact ground-truth correspondence of pixel `p` of frame I in frame J.
pub fn analytic_correspondence(
    scene: &SyntheticScene,
    cam_i: &Camera,
    pose_i: &Pose,
    cam_j: &Camera,
    pose_j: &Pose,
    p: &Pixel,
) -> Result<OracleMatch, OracleError> {
    analytic_correspondence_across(scene, scene, cam_i, pose_i, cam_j, pose_j, p)
}

/// As [`analytic_correspondence`], but the surface seen at `p` comes from
/// `scene_i` and visibility in J is decided against `scene_j`. Used when two
/// domains differ by transient geometry.
pub fn analytic_correspondence_across(
    scene_i: &SyntheticScene,
    scene_j: &SyntheticScene,
    cam_i: &Camera,
    pose_i: &Pose,
    cam_j: &Camera,
    pose_j: &Pose,
    p: &Pixel,
) -> Result<OracleMatch, OracleError> {
    let depth = scene_i.depth_at(cam_i, pose_i, p).ok_or(OracleError::NoSurface)?;
    let x_world = pose_i.inverse().transform_point(&(cam_i.ray(p) * depth));
    let x_j = pose_j.transform_point(&x_world);
    let q = cam_j.project(&x_j).map_err(|_| OracleError::OutOfBoundsInJ)?;
    if !cam_j.contains(&q) {
        return Err(OracleError::OutOfBoundsInJ);
    }
    match scene_j.depth_at(cam_j, pose_j, &q) {
        Some(t) if t < x_j.z - OCCLUSION_TOLERANCE_M => Ok(OracleMatch::Occluded),
        _ => Ok(OracleMatch::Visible(q)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{render_depth, AaBox, Plane, Primitive};
    use nalgebra::{UnitQuaternion, Vector3};

    fn cam() -> Camera {
        Camera::new(200.0, 200.0, 63.5, 47.5, 128, 96).unwrap()
    }

    fn wall(z: f64) -> SyntheticScene {
        let plane = Plane::new(Vector3::new(0.0, 0.0, z), Vector3::z(), 1e3, 1e3).unwrap();
        SyntheticScene::new("wall", vec![Primitive::Plane(plane)]).unwrap()
    }

    #[test]
    fn identical_poses_map_to_self() {
        let s = wall(7.0);
        let c = cam();
        let pose = Pose::identity();
        let p = Pixel::new(17.0, 80.0);
        let Ok(OracleMatch::Visible(q)) = analytic_correspondence(&s, &c, &pose, &c, &pose, &p) else {
            panic!("expected visible");
        };
        assert!((q - p).norm() < 1e-12);
    }

    #[test]
    fn stereo_disparity() {
        // Camera J centered at +b along x sees the point shifted by -fx·b/d.
        let (b, d) = (0.5, 8.0);
        let s = wall(d);
        let c = cam();
        let pose_j = Pose::from_center(UnitQuaternion::identity(), Vector3::new(b, 0.0, 0.0));
        let p = Pixel::new(90.0, 40.0);
        let Ok(OracleMatch::Visible(q)) = analytic_correspondence(&s, &c, &Pose::identity(), &c, &pose_j, &p) else {
            panic!("expected visible");
        };
        assert!((p.x - q.x - c.fx * b / d).abs() < 1e-12);
        assert!((q.y - p.y).abs() < 1e-12);
    }

    #[test]
    fn occluder_masks_pixels() {
        // Box between wall and J only; every pixel whose J-ray crosses the box
        // is Occluded, which is checked by an independent second cast.
        let c = cam();
        let pose_j = Pose::from_center(UnitQuaternion::identity(), Vector3::new(0.0, 0.0, 1.0));
        let occluder = AaBox::new(Vector3::new(-0.3, -0.3, 4.0), Vector3::new(0.3, 0.3, 4.2)).unwrap();
        let s = wall(10.0).with(Primitive::Box(occluder.clone()));
        let mut occluded = 0;
        for y in (0..96).step_by(3) {
            for x in (0..128).step_by(3) {
                let p = Pixel::new(x as f64, y as f64);
                let Ok(r) = analytic_correspondence(&wall(10.0), &c, &Pose::identity(), &c, &pose_j, &p) else {
                    continue;
                };
                let OracleMatch::Visible(q) = r else { panic!("no occluder in this scene") };
                let dir = c.ray(&q);
                let blocked = Primitive::Box(occluder.clone()).intersect(&pose_j.center(), &dir).is_some();
                let r2 = analytic_correspondence_across(&wall(10.0), &s, &c, &Pose::identity(), &c, &pose_j, &p).unwrap();
                assert_eq!(r2 == OracleMatch::Occluded, blocked, "pixel {x},{y}");
                occluded += blocked as usize;
            }
        }
        assert!(occluded > 10);
    }

    #[test]
    fn out_of_bounds_and_no_surface() {
        let c = cam();
        let s = wall(5.0);
        let pose_j = Pose::from_center(UnitQuaternion::identity(), Vector3::new(50.0, 0.0, 0.0));
        let p = Pixel::new(10.0, 10.0);
        assert_eq!(analytic_correspondence(&s, &c, &Pose::identity(), &c, &pose_j, &p), Err(OracleError::OutOfBoundsInJ));
        let behind = wall(-5.0);
        assert_eq!(
            analytic_correspondence(&behind, &c, &Pose::identity(), &c, &Pose::identity(), &p),
            Err(OracleError::NoSurface)
        );
    }

    #[test]
    fn consistent_with_rendered_depth() {
        let s = crate::scene::corridor();
        let c = crate::scene::corridor_camera();
        let pose_i = Pose::from_center(UnitQuaternion::identity(), Vector3::new(0.0, 0.0, 10.0));
        let pose_j = Pose::from_center(UnitQuaternion::from_euler_angles(0.0, 0.05, 0.0), Vector3::new(0.2, 0.0, 13.0));
        let d = render_depth(&s, &c, &pose_i);
        let rel = Pose::relative(&pose_i, &pose_j);
        for y in (0..c.height).step_by(7) {
            for x in (0..c.width).step_by(7) {
                let p = Pixel::new(x as f64, y as f64);
                let Some(z) = d.get(x, y) else { continue };
                let Ok(OracleMatch::Visible(q)) = analytic_correspondence(&s, &c, &pose_i, &c, &pose_j, &p) else {
                    continue;
                };
                let x_j = rel.transform_point(&c.backproject(&p, z).unwrap());
                let q2 = c.project(&x_j).unwrap();
                assert!((q - q2).norm() < 1e-7, "{x},{y}");
            }
        }
    }
}
