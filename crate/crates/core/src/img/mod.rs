//! Grayscale image value type plus the resampling and quality metrics the
//! rest of the pipeline is built on.
//!
//! Pixels are `f64` intensities, nominally in `[0, 1]`, stored row-major.
//! Files are only quantized at the I/O boundary (see [`io`]).

mod io;

pub(crate) use io::{decode_bytes, encode_pgm_bytes};
pub use io::{load_image, save_image, BitDepth};

use crate::{Error, Result};

/// 2D grayscale raster. Carries scenes, PSF kernels, and sensor measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Image {
    /// All-zero image. Panics if either dimension is zero; use
    /// [`Image::from_vec`] for fallible construction from external input.
    pub fn zeros(width: usize, height: usize) -> Image {
        assert!(width >= 1 && height >= 1, "image dimensions must be >= 1");
        Image {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<f64>) -> Result<Image> {
        if width == 0 || height == 0 {
            return Err(Error::ZeroDimension);
        }
        if data.len() != width * height {
            return Err(Error::DimensionMismatch {
                want_w: width,
                want_h: height,
                got_w: data.len(),
                got_h: 1,
            });
        }
        if let Some(idx) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(idx));
        }
        Ok(Image {
            width,
            height,
            data,
        })
    }

    pub fn constant(width: usize, height: usize, value: f64) -> Image {
        let mut img = Image::zeros(width, height);
        img.data.fill(value);
        img
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn same_size(&self, other: &Image) -> bool {
        self.width == other.width && self.height == other.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        debug_assert!(x < self.width && y < self.height);
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        debug_assert!(x < self.width && y < self.height);
        self.data[y * self.width + x] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn min_value(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn scaled(&self, factor: f64) -> Image {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= factor;
        }
        out
    }

    pub fn clamped(&self, lo: f64, hi: f64) -> Image {
        let mut out = self.clone();
        for v in &mut out.data {
            *v = v.clamp(lo, hi);
        }
        out
    }

    /// Copy `src` into `self` with its top-left corner at `(x0, y0)`.
    /// The region must fit; existing pixels are overwritten.
    pub fn paste(&mut self, src: &Image, x0: usize, y0: usize) {
        assert!(x0 + src.width <= self.width && y0 + src.height <= self.height);
        for y in 0..src.height {
            let dst_off = (y0 + y) * self.width + x0;
            self.data[dst_off..dst_off + src.width].copy_from_slice(src.row(y));
        }
    }

    /// Extract the `w`x`h` window whose top-left corner is `(x0, y0)`.
    pub fn crop(&self, x0: usize, y0: usize, w: usize, h: usize) -> Image {
        assert!(w >= 1 && h >= 1 && x0 + w <= self.width && y0 + h <= self.height);
        let mut data = Vec::with_capacity(w * h);
        for y in y0..y0 + h {
            data.extend_from_slice(&self.data[y * self.width + x0..y * self.width + x0 + w]);
        }
        Image {
            width: w,
            height: h,
            data,
        }
    }

    /// Bilinear sample at continuous pixel coordinates, clamped to the border.
    pub fn sample_clamped(&self, x: f64, y: f64) -> f64 {
        let x = x.clamp(0.0, (self.width - 1) as f64);
        let y = y.clamp(0.0, (self.height - 1) as f64);
        let x0 = x.floor() as usize;
        let y0 = y.floor() as usize;
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let fx = x - x0 as f64;
        let fy = y - y0 as f64;
        let top = self.get(x0, y0) * (1.0 - fx) + self.get(x1, y0) * fx;
        let bot = self.get(x0, y1) * (1.0 - fx) + self.get(x1, y1) * fx;
        top * (1.0 - fy) + bot * fy
    }
}

/// Bilinear resampling with the half-pixel-center convention: destination
/// pixel `i` samples the source at `(i + 0.5) * src/dst - 0.5`, clamped to
/// the image border.
pub fn resize_bilinear(img: &Image, new_width: usize, new_height: usize) -> Result<Image> {
    if new_width == 0 || new_height == 0 {
        return Err(Error::ZeroDimension);
    }
    if new_width == img.width && new_height == img.height {
        return Ok(img.clone());
    }
    let sx = img.width as f64 / new_width as f64;
    let sy = img.height as f64 / new_height as f64;
    let mut out = Image::zeros(new_width, new_height);
    for y in 0..new_height {
        let src_y = (y as f64 + 0.5) * sy - 0.5;
        for x in 0..new_width {
            let src_x = (x as f64 + 0.5) * sx - 0.5;
            out.set(x, y, img.sample_clamped(src_x, src_y));
        }
    }
    Ok(out)
}

/// Peak signal-to-noise ratio in dB, capped at 99.0 when the MSE drops
/// below 1e-12 so identical images stay finite and sortable.
pub fn psnr(a: &Image, b: &Image, peak: f64) -> Result<f64> {
    if !a.same_size(b) {
        return Err(Error::DimensionMismatch {
            want_w: a.width,
            want_h: a.height,
            got_w: b.width,
            got_h: b.height,
        });
    }
    let n = a.data.len() as f64;
    let mse: f64 = a
        .data
        .iter()
        .zip(&b.data)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<f64>()
        / n;
    if mse < 1e-12 {
        Ok(99.0)
    } else {
        Ok(10.0 * (peak * peak / mse).log10())
    }
}

/// Anisotropic total variation: sum of absolute forward differences along
/// rows and columns, with zero difference past the last row/column.
pub fn total_variation(img: &Image) -> f64 {
    let mut tv = 0.0;
    for y in 0..img.height {
        for x in 0..img.width {
            let v = img.get(x, y);
            if x + 1 < img.width {
                tv += (img.get(x + 1, y) - v).abs();
            }
            if y + 1 < img.height {
                tv += (img.get(x, y + 1) - v).abs();
            }
        }
    }
    tv
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_image(w: usize, h: usize, seed: u64) -> Image {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..w * h).map(|_| rng.random::<f64>()).collect();
        Image::from_vec(w, h, data).unwrap()
    }

    #[test]
    fn from_vec_rejects_bad_input() {
        assert!(matches!(
            Image::from_vec(0, 3, vec![]),
            Err(Error::ZeroDimension)
        ));
        assert!(Image::from_vec(2, 2, vec![0.0; 3]).is_err());
        assert!(matches!(
            Image::from_vec(2, 1, vec![0.0, f64::NAN]),
            Err(Error::NonFinite(1))
        ));
    }

    #[test]
    fn resize_identity_returns_same_image() {
        let img = random_image(7, 5, 1);
        let out = resize_bilinear(&img, 7, 5).unwrap();
        assert_eq!(img, out);
    }

    #[test]
    fn resize_constant_stays_constant() {
        let img = Image::constant(5, 4, 0.37);
        let out = resize_bilinear(&img, 13, 9).unwrap();
        for &v in out.as_slice() {
            assert!((v - 0.37).abs() < 1e-12);
        }
    }

    #[test]
    fn resize_1x2_to_1x3_hits_half_pixel_values() {
        // Hand evaluation of the half-pixel-center formula: the middle
        // output sample lands exactly between the two source pixels.
        let img = Image::from_vec(2, 1, vec![0.0, 1.0]).unwrap();
        let out = resize_bilinear(&img, 3, 1).unwrap();
        assert!((out.get(0, 0) - 0.0).abs() < 1e-12);
        assert!((out.get(1, 0) - 0.5).abs() < 1e-12);
        assert!((out.get(2, 0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn resize_rejects_zero_dimension() {
        let img = Image::zeros(4, 4);
        assert!(matches!(
            resize_bilinear(&img, 0, 4),
            Err(Error::ZeroDimension)
        ));
    }

    #[test]
    fn psnr_identity_caps_at_99() {
        let img = random_image(8, 8, 2);
        assert_eq!(psnr(&img, &img, 1.0).unwrap(), 99.0);
    }

    #[test]
    fn psnr_analytic_case() {
        let a = Image::constant(10, 10, 0.0);
        let b = Image::constant(10, 10, 0.1);
        // MSE = 0.01 -> 10 * log10(1 / 0.01) = 20 dB.
        assert!((psnr(&a, &b, 1.0).unwrap() - 20.0).abs() < 1e-9);
    }

    #[test]
    fn psnr_matches_direct_loop_oracle() {
        let a = random_image(16, 16, 3);
        let b = random_image(16, 16, 4);
        let mut mse = 0.0;
        for y in 0..16 {
            for x in 0..16 {
                let d = a.get(x, y) - b.get(x, y);
                mse += d * d;
            }
        }
        mse /= 256.0;
        let expect = 10.0 * (1.0 / mse).log10();
        let got = psnr(&a, &b, 1.0).unwrap();
        assert!((got - expect).abs() / expect.abs() < 1e-9);
    }

    #[test]
    fn psnr_rejects_dimension_mismatch() {
        let a = Image::zeros(4, 4);
        let b = Image::zeros(4, 5);
        assert!(psnr(&a, &b, 1.0).is_err());
    }

    #[test]
    fn tv_constant_is_zero() {
        assert_eq!(total_variation(&Image::constant(6, 6, 0.8)), 0.0);
    }

    #[test]
    fn tv_step_edge_counts_rows() {
        // One vertical step edge of amplitude 1 contributes |diff| = 1 per row.
        let h = 7;
        let w = 6;
        let mut img = Image::zeros(w, h);
        for y in 0..h {
            for x in 3..w {
                img.set(x, y, 1.0);
            }
        }
        assert!((total_variation(&img) - h as f64).abs() < 1e-12);
    }

    #[test]
    fn tv_matches_nested_loop_oracle() {
        let img = random_image(8, 8, 5);
        let mut tv = 0.0;
        for y in 0..8usize {
            for x in 0..8usize {
                if x + 1 < 8 {
                    tv += (img.get(x + 1, y) - img.get(x, y)).abs();
                }
                if y + 1 < 8 {
                    tv += (img.get(x, y + 1) - img.get(x, y)).abs();
                }
            }
        }
        assert_eq!(total_variation(&img), tv);
    }

    proptest! {
        #[test]
        fn psnr_is_symmetric(seed_a in 0u64..1000, seed_b in 0u64..1000) {
            let a = random_image(9, 7, seed_a);
            let b = random_image(9, 7, seed_b);
            prop_assert_eq!(psnr(&a, &b, 1.0).unwrap(), psnr(&b, &a, 1.0).unwrap());
        }

        #[test]
        fn tv_is_positively_homogeneous(seed in 0u64..1000, alpha in 0.0f64..8.0) {
            let img = random_image(6, 6, seed);
            let scaled = img.scaled(alpha);
            let lhs = total_variation(&scaled);
            let rhs = alpha * total_variation(&img);
            prop_assert!((lhs - rhs).abs() < 1e-9 * (1.0 + rhs));
        }

        #[test]
        fn resize_respects_input_range(seed in 0u64..1000, nw in 1usize..24, nh in 1usize..24) {
            let img = random_image(8, 6, seed);
            let out = resize_bilinear(&img, nw, nh).unwrap();
            let (lo, hi) = (img.min_value(), img.max_value());
            for &v in out.as_slice() {
                prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
            }
        }
    }
}
