//! PSF synthesis and the crop-convolve capture model `b = crop(h * x)` with
//! its adjoint.
//!
//! Geometry: scene, PSF, and measurement all share one `H x W` grid. The
//! forward path zero-pads scene and kernel to `2H x 2W` (placed top-left),
//! multiplies spectra, and crops the `H x W` window at offset
//! `(H/2, W/2)` — chosen so that a delta kernel at the PSF image center maps
//! the scene to itself. The adjoint runs the same pipeline transposed:
//! embed at the crop offset, correlate, read the top-left window.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fft2::{self, Fft2};
use crate::img;
use crate::{Error, Image, Result};

/// Normalized point spread function on the scene grid.
#[derive(Debug, Clone)]
pub struct Psf {
    kernel: Image,
    provenance: PsfProvenance,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum PsfProvenance {
    Simulated {
        seed: u64,
        speckle_count: u32,
        aperture_fraction: f64,
        speckle_sigma: f64,
    },
    Loaded {
        path: PathBuf,
    },
    Kernel,
}

impl Psf {
    /// Wrap an arbitrary kernel image: negatives clamped to zero, then
    /// normalized to unit sum.
    pub fn from_kernel(kernel: Image) -> Result<Psf> {
        Self::normalized(kernel, PsfProvenance::Kernel)
    }

    /// Unit impulse at the grid center `(W/2, H/2)`; turns the capture
    /// operator into the identity on the crop window.
    pub fn centered_delta(width: usize, height: usize) -> Psf {
        let mut kernel = Image::zeros(width, height);
        kernel.set(width / 2, height / 2, 1.0);
        Psf {
            kernel,
            provenance: PsfProvenance::Kernel,
        }
    }

    fn normalized(kernel: Image, provenance: PsfProvenance) -> Result<Psf> {
        let clamped = kernel.clamped(0.0, f64::INFINITY);
        let sum = clamped.sum();
        if sum <= 1e-12 {
            return Err(Error::DegeneratePsf);
        }
        Ok(Psf {
            kernel: clamped.scaled(1.0 / sum),
            provenance,
        })
    }

    pub fn kernel(&self) -> &Image {
        &self.kernel
    }

    pub fn provenance(&self) -> &PsfProvenance {
        &self.provenance
    }

    pub fn width(&self) -> usize {
        self.kernel.width()
    }

    pub fn height(&self) -> usize {
        self.kernel.height()
    }
}

/// Load a measured PSF from an image file.
pub fn load_psf(path: &Path) -> Result<Psf> {
    let kernel = img::load_image(path)?;
    Psf::normalized(
        kernel,
        PsfProvenance::Loaded {
            path: path.to_owned(),
        },
    )
}

/// Simulate a diffuser-style PSF as a sum of seeded isotropic Gaussian
/// speckles confined to the central aperture disc.
///
/// The disc radius is `aperture_fraction * min(W, H) / 2`. Speckle centers
/// are kept far enough inside the disc that each Gaussian decays below
/// `1e-6` of its peak before the boundary, and the kernel is hard-masked at
/// the disc so the stated support bound holds exactly.
pub fn simulate_psf(
    width: usize,
    height: usize,
    speckle_count: u32,
    aperture_fraction: f64,
    speckle_sigma: f64,
    seed: u64,
) -> Result<Psf> {
    if width == 0 || height == 0 {
        return Err(Error::ZeroDimension);
    }
    if speckle_count < 1 {
        return Err(Error::InvalidArgument("speckle_count must be >= 1".into()));
    }
    if !(aperture_fraction > 0.0 && aperture_fraction <= 1.0) {
        return Err(Error::InvalidArgument(
            "aperture_fraction must lie in (0, 1]".into(),
        ));
    }
    if !(speckle_sigma > 0.0) {
        return Err(Error::InvalidArgument("speckle_sigma must be > 0".into()));
    }

    let radius = aperture_fraction * width.min(height) as f64 / 2.0;
    // exp(-d^2 / (2 sigma^2)) falls below 1e-6 at d = sigma * sqrt(2 ln 1e6).
    let tail = speckle_sigma * (2.0 * 1e6f64.ln()).sqrt();
    let center_radius = (radius - tail - 1.0).max(0.0);
    let cx = (width as f64 - 1.0) / 2.0;
    let cy = (height as f64 - 1.0) / 2.0;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kernel = Image::zeros(width, height);
    let window = (6.0 * speckle_sigma).ceil() as i64;
    let inv_two_sigma2 = 1.0 / (2.0 * speckle_sigma * speckle_sigma);
    for _ in 0..speckle_count {
        let u: f64 = rng.random();
        let theta: f64 = rng.random::<f64>() * std::f64::consts::TAU;
        let r = center_radius * u.sqrt();
        let px = cx + r * theta.cos();
        let py = cy + r * theta.sin();
        let x_lo = ((px as i64) - window).max(0) as usize;
        let x_hi = ((px as i64) + window + 1).min(width as i64) as usize;
        let y_lo = ((py as i64) - window).max(0) as usize;
        let y_hi = ((py as i64) + window + 1).min(height as i64) as usize;
        for y in y_lo..y_hi {
            for x in x_lo..x_hi {
                let dx = x as f64 - px;
                let dy = y as f64 - py;
                let v = kernel.get(x, y) + (-(dx * dx + dy * dy) * inv_two_sigma2).exp();
                kernel.set(x, y, v);
            }
        }
    }
    // Hard aperture mask: everything outside the disc is exactly zero.
    for y in 0..height {
        for x in 0..width {
            let dx = x as f64 - cx;
            let dy = y as f64 - cy;
            if dx * dx + dy * dy > radius * radius {
                kernel.set(x, y, 0.0);
            }
        }
    }
    Psf::normalized(
        kernel,
        PsfProvenance::Simulated {
            seed,
            speckle_count,
            aperture_fraction,
            speckle_sigma,
        },
    )
}

/// Optical-condition knobs applied on the capture side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CaptureParams {
    /// Illumination multiplier; 1.0 is the baseline.
    pub intensity_scale: f64,
    /// Additive Gaussian noise sigma in intensity units; 0 disables noise.
    pub noise_sigma: f64,
    /// Lateral scene shift in pixels (zero fill), positive right/down.
    pub shift_x: i32,
    pub shift_y: i32,
    /// Geometric scaling of the PSF about its centroid; proxy for axial
    /// target motion. 1.0 is the baseline.
    pub psf_magnification: f64,
    /// 0 disables quantization; 8 quantizes to 256 levels of [0, max(1, peak)].
    pub quantize_bits: u8,
    /// Seed for the noise stream.
    pub seed: u64,
}

impl Default for CaptureParams {
    fn default() -> CaptureParams {
        CaptureParams {
            intensity_scale: 1.0,
            noise_sigma: 0.0,
            shift_x: 0,
            shift_y: 0,
            psf_magnification: 1.0,
            quantize_bits: 0,
            seed: 0,
        }
    }
}

impl CaptureParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.intensity_scale > 0.0) {
            return Err(Error::InvalidArgument("intensity_scale must be > 0".into()));
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(Error::InvalidArgument("noise_sigma must be >= 0".into()));
        }
        if !(self.psf_magnification > 0.0) {
            return Err(Error::InvalidArgument(
                "psf_magnification must be > 0".into(),
            ));
        }
        if self.quantize_bits != 0 && self.quantize_bits != 8 {
            return Err(Error::InvalidArgument(
                "quantize_bits must be 0 (off) or 8".into(),
            ));
        }
        Ok(())
    }
}

/// Sensor-grid measurement together with the capture settings that made it.
#[derive(Debug, Clone)]
pub struct SensorMeasurement {
    pub data: Image,
    pub params: CaptureParams,
}

/// Precomputed frequency-domain capture operator for one PSF. Shareable
/// read-only across worker threads.
pub struct CaptureOperator {
    fft: Arc<Fft2>,
    psf_hat: Vec<Complex64>,
    scene_w: usize,
    scene_h: usize,
    crop_x: usize,
    crop_y: usize,
}

impl CaptureOperator {
    pub fn new(psf: &Psf) -> CaptureOperator {
        Self::from_kernel(psf.kernel())
    }

    pub(crate) fn from_kernel(kernel: &Image) -> CaptureOperator {
        let (w, h) = (kernel.width(), kernel.height());
        let fft = fft2::plan(2 * w, 2 * h);
        let padded = embed(kernel, 2 * w, 2 * h, 0, 0);
        let psf_hat = fft.forward(&padded);
        CaptureOperator {
            fft,
            psf_hat,
            scene_w: w,
            scene_h: h,
            crop_x: w / 2,
            crop_y: h / 2,
        }
    }

    pub fn scene_width(&self) -> usize {
        self.scene_w
    }

    pub fn scene_height(&self) -> usize {
        self.scene_h
    }

    pub(crate) fn fft(&self) -> &Arc<Fft2> {
        &self.fft
    }

    pub(crate) fn psf_hat(&self) -> &[Complex64] {
        &self.psf_hat
    }

    pub(crate) fn crop_offset(&self) -> (usize, usize) {
        (self.crop_x, self.crop_y)
    }

    fn check_dims(&self, img: &Image) -> Result<()> {
        if img.width() != self.scene_w || img.height() != self.scene_h {
            return Err(Error::DimensionMismatch {
                want_w: self.scene_w,
                want_h: self.scene_h,
                got_w: img.width(),
                got_h: img.height(),
            });
        }
        Ok(())
    }

    /// Noiseless linear forward map: `crop(h * x)`.
    pub fn forward(&self, scene: &Image) -> Result<Image> {
        self.check_dims(scene)?;
        let padded = embed(scene, 2 * self.scene_w, 2 * self.scene_h, 0, 0);
        let mut spec = self.fft.forward(&padded);
        for (s, h) in spec.iter_mut().zip(&self.psf_hat) {
            *s *= h;
        }
        let conv = self.fft.inverse(&spec);
        Ok(extract(
            &conv,
            2 * self.scene_w,
            self.crop_x,
            self.crop_y,
            self.scene_w,
            self.scene_h,
        ))
    }

    /// Adjoint map `(CH)^T = H^T C^T`: zero-pad the measurement into the
    /// crop window, correlate with the kernel, read the scene window.
    pub fn adjoint(&self, meas: &Image) -> Result<Image> {
        self.check_dims(meas)?;
        let padded = embed(meas, 2 * self.scene_w, 2 * self.scene_h, self.crop_x, self.crop_y);
        let mut spec = self.fft.forward(&padded);
        for (s, h) in spec.iter_mut().zip(&self.psf_hat) {
            *s *= h.conj();
        }
        let corr = self.fft.inverse(&spec);
        Ok(extract(
            &corr,
            2 * self.scene_w,
            0,
            0,
            self.scene_w,
            self.scene_h,
        ))
    }
}

/// Place `img` into a `pw x ph` zero buffer with its top-left at `(x0, y0)`.
fn embed(img: &Image, pw: usize, ph: usize, x0: usize, y0: usize) -> Vec<f64> {
    assert!(x0 + img.width() <= pw && y0 + img.height() <= ph);
    let mut out = vec![0.0; pw * ph];
    for y in 0..img.height() {
        let off = (y0 + y) * pw + x0;
        out[off..off + img.width()].copy_from_slice(img.row(y));
    }
    out
}

fn extract(buf: &[f64], stride: usize, x0: usize, y0: usize, w: usize, h: usize) -> Image {
    let mut out = Image::zeros(w, h);
    for y in 0..h {
        let off = (y0 + y) * stride + x0;
        out.as_mut_slice()[y * w..(y + 1) * w].copy_from_slice(&buf[off..off + w]);
    }
    out
}

/// Capture pipeline bound to one PSF and one set of optical conditions.
/// Builds the (possibly magnified) kernel spectrum once; individual scenes
/// then differ only in their noise seed.
pub struct Capture {
    op: CaptureOperator,
    params: CaptureParams,
}

impl Capture {
    pub fn new(psf: &Psf, params: CaptureParams) -> Result<Capture> {
        params.validate()?;
        let op = if (params.psf_magnification - 1.0).abs() > 1e-12 {
            let magnified = magnify_kernel(psf.kernel(), params.psf_magnification)?;
            CaptureOperator::from_kernel(&magnified)
        } else {
            CaptureOperator::new(psf)
        };
        Ok(Capture { op, params })
    }

    pub fn params(&self) -> &CaptureParams {
        &self.params
    }

    pub fn apply(&self, scene: &Image) -> Result<SensorMeasurement> {
        self.apply_with_seed(scene, self.params.seed)
    }

    /// Capture with an explicit noise seed (used for per-scene streams).
    pub fn apply_with_seed(&self, scene: &Image, noise_seed: u64) -> Result<SensorMeasurement> {
        let shifted = if self.params.shift_x != 0 || self.params.shift_y != 0 {
            shift_zero_fill(scene, self.params.shift_x, self.params.shift_y)
        } else {
            scene.clone()
        };
        let scaled = if (self.params.intensity_scale - 1.0).abs() > 1e-15 {
            shifted.scaled(self.params.intensity_scale)
        } else {
            shifted
        };
        let mut b = self.op.forward(&scaled)?;

        if self.params.noise_sigma > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(noise_seed);
            let normal = Normal::new(0.0, self.params.noise_sigma)
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            for v in b.as_mut_slice() {
                *v += rng.sample(normal);
            }
        }
        for v in b.as_mut_slice() {
            *v = v.max(0.0);
        }
        if self.params.quantize_bits == 8 {
            let range = b.max_value().max(1.0);
            for v in b.as_mut_slice() {
                *v = (*v / range * 255.0).round() * range / 255.0;
            }
        }
        let mut params = self.params.clone();
        params.seed = noise_seed;
        Ok(SensorMeasurement { data: b, params })
    }
}

/// Simulate one capture: shift, scale, magnified-PSF convolution, crop,
/// noise, clamp, optional quantization.
pub fn forward_capture(scene: &Image, psf: &Psf, params: &CaptureParams) -> Result<SensorMeasurement> {
    if scene.width() != psf.width() || scene.height() != psf.height() {
        return Err(Error::DimensionMismatch {
            want_w: psf.width(),
            want_h: psf.height(),
            got_w: scene.width(),
            got_h: scene.height(),
        });
    }
    Capture::new(psf, params.clone())?.apply(scene)
}

/// Adjoint of the noiseless forward map; required by every iterative solver.
pub fn adjoint_capture(meas: &Image, psf: &Psf) -> Result<Image> {
    CaptureOperator::new(psf).adjoint(meas)
}

fn shift_zero_fill(img: &Image, sx: i32, sy: i32) -> Image {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let mut out = Image::zeros(img.width(), img.height());
    for y in 0..h {
        let src_y = y - sy as i64;
        if src_y < 0 || src_y >= h {
            continue;
        }
        for x in 0..w {
            let src_x = x - sx as i64;
            if src_x < 0 || src_x >= w {
                continue;
            }
            out.set(x as usize, y as usize, img.get(src_x as usize, src_y as usize));
        }
    }
    out
}

/// Rescale a kernel by `factor` about its intensity centroid (bilinear,
/// zero outside the original support) and renormalize to unit sum.
fn magnify_kernel(kernel: &Image, factor: f64) -> Result<Image> {
    let (w, h) = (kernel.width(), kernel.height());
    let mass = kernel.sum();
    if mass <= 1e-12 {
        return Err(Error::DegeneratePsf);
    }
    let mut cx = 0.0;
    let mut cy = 0.0;
    for y in 0..h {
        for x in 0..w {
            let v = kernel.get(x, y);
            cx += v * x as f64;
            cy += v * y as f64;
        }
    }
    cx /= mass;
    cy /= mass;

    let mut out = Image::zeros(w, h);
    for y in 0..h {
        let src_y = cy + (y as f64 - cy) / factor;
        for x in 0..w {
            let src_x = cx + (x as f64 - cx) / factor;
            out.set(x, y, sample_zero_fill(kernel, src_x, src_y));
        }
    }
    let sum = out.sum();
    if sum <= 1e-12 {
        return Err(Error::DegeneratePsf);
    }
    Ok(out.scaled(1.0 / sum))
}

fn sample_zero_fill(img: &Image, x: f64, y: f64) -> f64 {
    if x < -1.0 || y < -1.0 || x > img.width() as f64 || y > img.height() as f64 {
        return 0.0;
    }
    let x0 = x.floor();
    let y0 = y.floor();
    let fx = x - x0;
    let fy = y - y0;
    let mut acc = 0.0;
    for (dy, wy) in [(0, 1.0 - fy), (1, fy)] {
        let yy = y0 as i64 + dy;
        if yy < 0 || yy >= img.height() as i64 || wy == 0.0 {
            continue;
        }
        for (dx, wx) in [(0, 1.0 - fx), (1, fx)] {
            let xx = x0 as i64 + dx;
            if xx < 0 || xx >= img.width() as i64 || wx == 0.0 {
                continue;
            }
            acc += wy * wx * img.get(xx as usize, yy as usize);
        }
    }
    acc
}
