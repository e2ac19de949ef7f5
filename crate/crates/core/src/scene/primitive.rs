use nalgebra::Vector3;

use super::SceneError;

/// Smallest accepted ray parameter; hits closer than this are ignored.
pub const RAY_EPSILON: f64 = 1e-9;

/// Finite rectangular plane. `u = normalize(h × n)` and `v = n × u`, where the
/// helper `h` is the world y axis unless the normal is within ~25° of it, in
/// which case the world x axis is used. `extent_u`/`extent_v` are full side
/// lengths along `u`/`v`.
#[derive(Clone, Debug, PartialEq)]
pub struct Plane {
    pub center: Vector3<f64>,
    pub normal: Vector3<f64>,
    pub extent_u: f64,
    pub extent_v: f64,
    u: Vector3<f64>,
    v: Vector3<f64>,
}

impl Plane {
    pub fn new(center: Vector3<f64>, normal: Vector3<f64>, extent_u: f64, extent_v: f64) -> Result<Self, SceneError> {
        let norm = normal.norm();
        if !(norm > 0.0 && norm.is_finite()) || !center.iter().all(|c| c.is_finite()) {
            return Err(SceneError::InvalidPrimitive("plane normal must be non-zero and finite".into()));
        }
        if !(extent_u > 0.0 && extent_v > 0.0 && extent_u.is_finite() && extent_v.is_finite()) {
            return Err(SceneError::InvalidPrimitive("plane extents must be positive".into()));
        }
        let normal = normal / norm;
        let helper = if normal.y.abs() < 0.9 { Vector3::y() } else { Vector3::x() };
        let u = helper.cross(&normal).normalize();
        let v = normal.cross(&u);
        Ok(Self { center, normal, extent_u, extent_v, u, v })
    }

    pub fn axes(&self) -> (&Vector3<f64>, &Vector3<f64>) {
        (&self.u, &self.v)
    }

    fn intersect(&self, origin: &Vector3<f64>, dir: &Vector3<f64>) -> Option<f64> {
        let denom = self.normal.dot(dir);
        if denom.abs() < 1e-15 {
            return None;
        }
        let t = self.normal.dot(&(self.center - origin)) / denom;
        if !(t > RAY_EPSILON) {
            return None;
        }
        let local = origin + dir * t - self.center;
        (local.dot(&self.u).abs() <= 0.5 * self.extent_u && local.dot(&self.v).abs() <= 0.5 * self.extent_v)
            .then_some(t)
    }
}

/// Axis-aligned box.
#[derive(Clone, Debug, PartialEq)]
pub struct AaBox {
    pub min: Vector3<f64>,
    pub max: Vector3<f64>,
}

impl AaBox {
    pub fn new(min: Vector3<f64>, max: Vector3<f64>) -> Result<Self, SceneError> {
        if !(0..3).all(|i| min[i].is_finite() && max[i].is_finite() && max[i] > min[i]) {
            return Err(SceneError::InvalidPrimitive("box needs max > min on every axis".into()));
        }
        Ok(Self { min, max })
    }

    /// Slab test. From inside the box the exit distance is returned.
    fn intersect(&self, origin: &Vector3<f64>, dir: &Vector3<f64>) -> Option<f64> {
        let mut near = f64::NEG_INFINITY;
        let mut far = f64::INFINITY;
        for i in 0..3 {
            if dir[i].abs() < 1e-15 {
                if origin[i] < self.min[i] || origin[i] > self.max[i] {
                    return None;
                }
                continue;
            }
            let a = (self.min[i] - origin[i]) / dir[i];
            let b = (self.max[i] - origin[i]) / dir[i];
            near = near.max(a.min(b));
            far = far.min(a.max(b));
        }
        if near > far || !(far > RAY_EPSILON) {
            return None;
        }
        Some(if near > RAY_EPSILON { near } else { far })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Primitive {
    Plane(Plane),
    Box(AaBox),
}

impl Primitive {
    /// Ray parameter of the first hit, if any. `dir` need not be unit length.
    pub fn intersect(&self, origin: &Vector3<f64>, dir: &Vector3<f64>) -> Option<f64> {
        match self {
            Primitive::Plane(p) => p.intersect(origin, dir),
            Primitive::Box(b) => b.intersect(origin, dir),
        }
    }
}
