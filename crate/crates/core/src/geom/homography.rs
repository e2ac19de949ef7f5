use nalgebra::{Matrix3, Vector3};

use super::{GeomError, Pixel};

/// Projective map of the image plane, defined up to scale.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Homography(Matrix3<f64>);

impl Homography {
    pub fn new(m: Matrix3<f64>) -> Result<Self, GeomError> {
        let scale = m.abs().max();
        if !scale.is_finite() || scale == 0.0 {
            return Err(GeomError::SingularHomography);
        }
        let normalized = m / scale;
        if normalized.determinant().abs() <= 1e-12 {
            return Err(GeomError::SingularHomography);
        }
        Ok(Self(m))
    }

    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    pub fn translation(tx: f64, ty: f64) -> Self {
        Self(Matrix3::new(1.0, 0.0, tx, 0.0, 1.0, ty, 0.0, 0.0, 1.0))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn inverse(&self) -> Homography {
        Homography(self.0.try_inverse().expect("checked invertible at construction"))
    }

    pub fn apply(&self, p: &Pixel) -> Result<Pixel, GeomError> {
        let h = self.0 * Vector3::new(p.x, p.y, 1.0);
        if h.z.abs() <= 1e-12 {
            return Err(GeomError::PointAtInfinity);
        }
        Ok(Pixel::new(h.x / h.z, h.y / h.z))
    }
}
