use crate::{Error, Result};

/// 2-D scalar raster with row-major f64 storage.
///
/// The universal currency between modules: forward-model outputs, noisy
/// images, reconstructions, and metric maps are all `ImageGrid`s. Pixel
/// values are normalized intensities, typically in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGrid {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl ImageGrid {
    pub fn zeros(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "grid extents must be positive");
        ImageGrid {
            width,
            height,
            pixels: vec![0.0; width * height],
        }
    }

    pub fn from_pixels(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(Error::shape(
                "ImageGrid::from_pixels",
                format!("{}x{} grid needs {} pixels, got {}", width, height, width * height, pixels.len()),
            ));
        }
        Ok(ImageGrid { width, height, pixels })
    }

    /// Builds a grid by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        ImageGrid { width, height, pixels }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.pixels[y * self.width + x] = v;
    }

    #[inline]
    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    #[inline]
    pub fn pixels_mut(&mut self) -> &mut [f64] {
        &mut self.pixels
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.pixels[y * self.width..(y + 1) * self.width]
    }

    pub fn is_finite(&self) -> bool {
        self.pixels.iter().all(|p| p.is_finite())
    }

    pub fn max(&self) -> f64 {
        self.pixels.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.pixels.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn mean(&self) -> f64 {
        self.pixels.iter().sum::<f64>() / self.pixels.len() as f64
    }

    /// Root-mean-square over all pixels, background zeros included.
    pub fn rms(&self) -> f64 {
        (self.pixels.iter().map(|p| p * p).sum::<f64>() / self.pixels.len() as f64).sqrt()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ImageGrid {
        ImageGrid {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&p| f(p)).collect(),
        }
    }

    pub fn scale(&self, factor: f64) -> ImageGrid {
        self.map(|p| p * factor)
    }

    /// Intensity centroid `(x, y)` in pixel coordinates.
    ///
    /// Falls back to the frame center when total intensity is zero.
    pub fn centroid(&self) -> (f64, f64) {
        let mut sx = 0.0;
        let mut sy = 0.0;
        let mut total = 0.0;
        for y in 0..self.height {
            for x in 0..self.width {
                let v = self.get(x, y);
                sx += v * x as f64;
                sy += v * y as f64;
                total += v;
            }
        }
        if total.abs() < 1e-300 {
            ((self.width as f64 - 1.0) / 2.0, (self.height as f64 - 1.0) / 2.0)
        } else {
            (sx / total, sy / total)
        }
    }

    /// Bilinear sample with edge clamping; `(x, y)` in pixel coordinates.
    pub fn sample_bilinear(&self, x: f64, y: f64) -> f64 {
        let xc = x.clamp(0.0, (self.width - 1) as f64);
        let yc = y.clamp(0.0, (self.height - 1) as f64);
        let x0 = xc.floor() as usize;
        let y0 = yc.floor() as usize;
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let fx = xc - x0 as f64;
        let fy = yc - y0 as f64;
        let top = self.get(x0, y0) * (1.0 - fx) + self.get(x1, y0) * fx;
        let bot = self.get(x0, y1) * (1.0 - fx) + self.get(x1, y1) * fx;
        top * (1.0 - fy) + bot * fy
    }

    /// Bilinear resize to a new geometry.
    pub fn resize_bilinear(&self, width: usize, height: usize) -> ImageGrid {
        assert!(width > 0 && height > 0);
        if width == self.width && height == self.height {
            return self.clone();
        }
        let sx = self.width as f64 / width as f64;
        let sy = self.height as f64 / height as f64;
        ImageGrid::from_fn(width, height, |x, y| {
            self.sample_bilinear((x as f64 + 0.5) * sx - 0.5, (y as f64 + 0.5) * sy - 0.5)
        })
    }

    /// Rotates the frame by 90 degrees counterclockwise.
    pub fn rotate90(&self) -> ImageGrid {
        ImageGrid::from_fn(self.height, self.width, |x, y| {
            self.get(self.width - 1 - y, x)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_pixels_checks_length() {
        assert!(ImageGrid::from_pixels(2, 2, vec![0.0; 3]).is_err());
        assert!(ImageGrid::from_pixels(2, 2, vec![0.0; 4]).is_ok());
    }

    #[test]
    fn centroid_of_point_mass() {
        let mut g = ImageGrid::zeros(9, 9);
        g.set(2, 6, 5.0);
        assert_eq!(g.centroid(), (2.0, 6.0));
    }

    #[test]
    fn bilinear_interpolates_midpoints() {
        let g = ImageGrid::from_pixels(2, 1, vec![0.0, 1.0]).unwrap();
        assert!((g.sample_bilinear(0.5, 0.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rotate90_preserves_values() {
        let g = ImageGrid::from_fn(3, 2, |x, y| (x + 10 * y) as f64);
        let r = g.rotate90();
        assert_eq!(r.width(), 2);
        assert_eq!(r.height(), 3);
        // CCW: the top-right corner becomes the top-left corner
        assert_eq!(r.get(0, 0), g.get(2, 0));
        assert_eq!(r.get(1, 2), g.get(0, 1));
    }

    #[test]
    fn rms_of_constant() {
        let g = ImageGrid::from_pixels(4, 1, vec![2.0; 4]).unwrap();
        assert!((g.rms() - 2.0).abs() < 1e-12);
    }
}
