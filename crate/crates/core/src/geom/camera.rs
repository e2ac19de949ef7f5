use nalgebra::{Matrix3, Vector2, Vector3};

use super::GeomError;

pub type Pixel = Vector2<f64>;

/// Pinhole camera. Pixel centers sit on integer coordinates, so the valid
/// image domain is `[0, width-1] × [0, height-1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Camera {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
}

impl Camera {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64, width: u32, height: u32) -> Result<Self, GeomError> {
        if !(fx > 0.0 && fy > 0.0 && fx.is_finite() && fy.is_finite() && cx.is_finite() && cy.is_finite()) {
            return Err(GeomError::InvalidCamera("focal lengths must be positive and finite".into()));
        }
        if width == 0 || height == 0 {
            return Err(GeomError::InvalidCamera("image size must be at least 1x1".into()));
        }
        Ok(Self { fx, fy, cx, cy, width, height })
    }

    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::new(self.fx, 0.0, self.cx, 0.0, self.fy, self.cy, 0.0, 0.0, 1.0)
    }

    pub fn contains(&self, p: &Pixel) -> bool {
        p.x >= 0.0 && p.y >= 0.0 && p.x <= (self.width - 1) as f64 && p.y <= (self.height - 1) as f64
    }

    pub fn project(&self, x_cam: &Vector3<f64>) -> Result<Pixel, GeomError> {
        if !(x_cam.z > 0.0) {
            return Err(GeomError::BehindCamera);
        }
        Ok(Pixel::new(self.fx * x_cam.x / x_cam.z + self.cx, self.fy * x_cam.y / x_cam.z + self.cy))
    }

    /// Camera-frame point at z-depth `depth` seen through pixel `p`.
    pub fn backproject(&self, p: &Pixel, depth: f64) -> Result<Vector3<f64>, GeomError> {
        if !(depth > 0.0) || !depth.is_finite() {
            return Err(GeomError::InvalidDepth);
        }
        if !self.contains(p) {
            return Err(GeomError::OutOfBounds);
        }
        Ok(self.ray(p) * depth)
    }

    /// Ray direction through `p`, scaled so its z component is 1.
    pub fn ray(&self, p: &Pixel) -> Vector3<f64> {
        Vector3::new((p.x - self.cx) / self.fx, (p.y - self.cy) / self.fy, 1.0)
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }
}
