use super::{GeomError, Pixel};

/// Neighbourhoods whose largest depth exceeds the smallest by more than this
/// factor are treated as depth discontinuities when sampling.
pub const DISCONTINUITY_RATIO: f64 = 1.5;

/// Per-pixel z-depth (meters along the optical axis) with a validity mask.
#[derive(Clone, Debug, PartialEq)]
pub struct DepthMap {
    width: u32,
    height: u32,
    values: Vec<f64>,
    valid: Vec<bool>,
}

impl DepthMap {
    /// Builds a map from row-major values. Zero, negative and non-finite
    /// entries become invalid.
    pub fn from_values(width: u32, height: u32, values: Vec<f64>) -> Result<Self, GeomError> {
        if values.len() != width as usize * height as usize || width == 0 || height == 0 {
            return Err(GeomError::DimensionMismatch {
                expected: width as usize * height as usize,
                actual: values.len(),
            });
        }
        let valid: Vec<bool> = values.iter().map(|d| d.is_finite() && *d > 0.0).collect();
        let values = values
            .into_iter()
            .zip(&valid)
            .map(|(d, ok)| if *ok { d } else { 0.0 })
            .collect();
        Ok(Self { width, height, values, valid })
    }

    pub fn invalid(width: u32, height: u32) -> Self {
        let n = width as usize * height as usize;
        Self {
            width,
            height,
            values: vec![0.0; n],
            valid: vec![false; n],
        }
    }

    pub fn constant(width: u32, height: u32, depth: f64) -> Self {
        Self::from_values(width, height, vec![depth; width as usize * height as usize])
            .expect("dimensions are consistent")
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Raw values; invalid pixels hold 0.0.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn valid_mask(&self) -> &[bool] {
        &self.valid
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|v| **v).count()
    }

    fn index(&self, x: u32, y: u32) -> usize {
        y as usize * self.width as usize + x as usize
    }

    pub fn get(&self, x: u32, y: u32) -> Option<f64> {
        if x >= self.width || y >= self.height {
            return None;
        }
        let i = self.index(x, y);
        self.valid[i].then_some(self.values[i])
    }

    /// Sets a pixel; non-positive or non-finite depths invalidate it.
    pub fn set(&mut self, x: u32, y: u32, depth: f64) {
        let i = self.index(x, y);
        if depth.is_finite() && depth > 0.0 {
            self.values[i] = depth;
            self.valid[i] = true;
        } else {
            self.values[i] = 0.0;
            self.valid[i] = false;
        }
    }

    /// Depth at a sub-pixel location.
    ///
    /// Inverse depth is interpolated bilinearly over the neighbours on the
    /// same surface as the nearest valid neighbour, with the bilinear weights
    /// renormalized over them. A neighbour is on that surface when its depth
    /// is within [`DISCONTINUITY_RATIO`] of the nearest one and it is valid.
    /// With four such neighbours this is plain bilinear interpolation, exact
    /// on planes; at a silhouette it never mixes the two sides. Returns
    /// `None` outside the image or when no neighbour is valid.
    pub fn sample(&self, q: &Pixel) -> Option<f64> {
        if !(q.x >= 0.0 && q.y >= 0.0 && q.x <= (self.width - 1) as f64 && q.y <= (self.height - 1) as f64) {
            return None;
        }
        let x0 = q.x.floor() as u32;
        let y0 = q.y.floor() as u32;
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let fx = q.x - x0 as f64;
        let fy = q.y - y0 as f64;

        let corners = [(x0, y0), (x1, y0), (x0, y1), (x1, y1)];
        let weights = [(1.0 - fx) * (1.0 - fy), fx * (1.0 - fy), (1.0 - fx) * fy, fx * fy];
        let depths = corners.map(|(x, y)| self.get(x, y));

        let mut nearest: Option<(f64, f64)> = None;
        for ((x, y), d) in corners.iter().zip(depths) {
            let Some(d) = d else { continue };
            let dist = (*x as f64 - q.x).powi(2) + (*y as f64 - q.y).powi(2);
            if nearest.is_none_or(|(b, _)| dist < b) {
                nearest = Some((dist, d));
            }
        }
        let (_, anchor) = nearest?;

        let (mut inv, mut total) = (0.0, 0.0);
        for (d, w) in depths.iter().zip(weights) {
            let Some(d) = d else { continue };
            if d.max(anchor) <= DISCONTINUITY_RATIO * d.min(anchor) {
                inv += w / d;
                total += w;
            }
        }
        if total <= 0.0 {
            return Some(anchor);
        }
        Some(total / inv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invalid_encodings() {
        let d = DepthMap::from_values(2, 2, vec![1.0, 0.0, f64::NAN, -3.0]).unwrap();
        assert_eq!(d.valid_mask(), &[true, false, false, false]);
        assert_eq!(d.get(0, 0), Some(1.0));
        assert_eq!(d.get(1, 0), None);
        assert_eq!(d.get(5, 0), None);
    }

    #[test]
    fn dimension_check() {
        assert!(DepthMap::from_values(3, 2, vec![1.0; 5]).is_err());
    }

    #[test]
    fn sampling_is_exact_at_pixel_centers() {
        let vals: Vec<f64> = (0..12).map(|i| 1.0 + i as f64 * 0.1).collect();
        let d = DepthMap::from_values(4, 3, vals).unwrap();
        for y in 0..3 {
            for x in 0..4 {
                let s = d.sample(&Pixel::new(x as f64, y as f64)).unwrap();
                assert!((s - d.get(x, y).unwrap()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn inverse_depth_interpolation_is_exact_on_planes() {
        // z = 1 / (a + b x + c y) is what a pinhole camera sees of a plane.
        let (a, b, c) = (0.05, 0.002, 0.003);
        let z = |x: f64, y: f64| 1.0 / (a + b * x + c * y);
        let vals = (0..20).flat_map(|y| (0..20).map(move |x| z(x as f64, y as f64))).collect();
        let d = DepthMap::from_values(20, 20, vals).unwrap();
        let q = Pixel::new(7.3, 11.8);
        assert!((d.sample(&q).unwrap() - z(q.x, q.y)).abs() < 1e-9);
    }

    #[test]
    fn invalid_neighbour_is_left_out() {
        // Valid: 1 (0,0), 1.2 (1,0), 4 (1,1); (0,1) is invalid.
        let d = DepthMap::from_values(2, 2, vec![1.0, 1.2, 0.0, 4.0]).unwrap();
        // Nearest is 1.0; 1.2 is on the same surface, 4.0 is not.
        let q = Pixel::new(0.25, 0.3);
        let (w0, w1) = (0.75 * 0.7, 0.25 * 0.7);
        let expected = (w0 + w1) / (w0 / 1.0 + w1 / 1.2);
        assert!((d.sample(&q).unwrap() - expected).abs() < 1e-12);
        // Nearest is 4.0, alone on its surface.
        assert_eq!(d.sample(&Pixel::new(0.9, 0.9)), Some(4.0));
        let none = DepthMap::invalid(2, 2);
        assert_eq!(none.sample(&Pixel::new(0.5, 0.5)), None);
    }

    #[test]
    fn discontinuity_keeps_the_nearest_side() {
        let d = DepthMap::from_values(2, 1, vec![5.0, 50.0]).unwrap();
        assert_eq!(d.sample(&Pixel::new(0.49, 0.0)), Some(5.0));
        assert_eq!(d.sample(&Pixel::new(0.51, 0.0)), Some(50.0));
        // Next to a silhouette only the far column is used, with rows still
        // interpolated: left column near, right column a sloped far plane.
        let z = |y: f64| 1.0 / (0.02 + 0.001 * y);
        let d = DepthMap::from_values(2, 2, vec![2.0, z(0.0), 2.0, z(1.0)]).unwrap();
        let q = Pixel::new(0.6, 0.3);
        assert!((d.sample(&q).unwrap() - z(0.3)).abs() < 1e-9);
    }

    #[test]
    fn out_of_image() {
        let d = DepthMap::constant(3, 3, 2.0);
        assert_eq!(d.sample(&Pixel::new(2.0, 2.0)), Some(2.0));
        assert_eq!(d.sample(&Pixel::new(2.0001, 1.0)), None);
        assert_eq!(d.sample(&Pixel::new(-0.0001, 1.0)), None);
    }
}
