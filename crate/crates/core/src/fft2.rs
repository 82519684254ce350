//! Real-input 2D FFT plans shared by the capture operator and the solvers.
//!
//! The transform of a `width x height` real image is stored column-major as
//! `(width / 2 + 1) x height` complex bins (`spec[x * height + y]`), which
//! keeps the column FFT passes contiguous. Plans are cached per geometry and
//! are safe to share across threads.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub(crate) struct Fft2 {
    width: usize,
    height: usize,
    spec_width: usize,
    row_fwd: Arc<dyn RealToComplex<f64>>,
    row_inv: Arc<dyn ComplexToReal<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    fn new(width: usize, height: usize) -> Fft2 {
        let mut real_planner = RealFftPlanner::new();
        let mut planner = FftPlanner::new();
        Fft2 {
            width,
            height,
            spec_width: width / 2 + 1,
            row_fwd: real_planner.plan_fft_forward(width),
            row_inv: real_planner.plan_fft_inverse(width),
            col_fwd: planner.plan_fft_forward(height),
            col_inv: planner.plan_fft_inverse(height),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn spec_len(&self) -> usize {
        self.spec_width * self.height
    }

    /// Forward transform of a row-major real buffer of `width * height`.
    pub fn forward(&self, real: &[f64]) -> Vec<Complex64> {
        assert_eq!(real.len(), self.width * self.height);
        let sw = self.spec_width;
        let mut rows = vec![Complex64::default(); sw * self.height];
        let mut in_scratch = vec![0.0; self.width];
        for y in 0..self.height {
            in_scratch.copy_from_slice(&real[y * self.width..(y + 1) * self.width]);
            self.row_fwd
                .process(&mut in_scratch, &mut rows[y * sw..(y + 1) * sw])
                .expect("row fft");
        }
        // Transpose to column-major so each length-`height` FFT is contiguous.
        let mut spec = vec![Complex64::default(); sw * self.height];
        for y in 0..self.height {
            for x in 0..sw {
                spec[x * self.height + y] = rows[y * sw + x];
            }
        }
        for col in spec.chunks_exact_mut(self.height) {
            self.col_fwd.process(col);
        }
        spec
    }

    /// Inverse transform back to a row-major real buffer, normalized so that
    /// `inverse(forward(x)) == x`.
    pub fn inverse(&self, spec: &[Complex64]) -> Vec<f64> {
        assert_eq!(spec.len(), self.spec_len());
        let sw = self.spec_width;
        let mut cols = spec.to_vec();
        for col in cols.chunks_exact_mut(self.height) {
            self.col_inv.process(col);
        }
        let mut rows = vec![Complex64::default(); sw * self.height];
        for x in 0..sw {
            for y in 0..self.height {
                rows[y * sw + x] = cols[x * self.height + y];
            }
        }
        let mut real = vec![0.0; self.width * self.height];
        let scale = 1.0 / (self.width * self.height) as f64;
        let mut spec_scratch = vec![Complex64::default(); sw];
        for y in 0..self.height {
            spec_scratch.copy_from_slice(&rows[y * sw..(y + 1) * sw]);
            // realfft requires exact conjugate symmetry at the DC/Nyquist
            // bins; elementwise spectrum products can leave them with tiny
            // imaginary parts, so zero those explicitly.
            spec_scratch[0].im = 0.0;
            if self.width % 2 == 0 {
                spec_scratch[sw - 1].im = 0.0;
            }
            self.row_inv
                .process(&mut spec_scratch, &mut real[y * self.width..(y + 1) * self.width])
                .expect("row ifft");
        }
        for v in &mut real {
            *v *= scale;
        }
        real
    }
}

/// Shared plan cache keyed by geometry.
pub(crate) fn plan(width: usize, height: usize) -> Arc<Fft2> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Fft2>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry((width, height))
        .or_insert_with(|| Arc::new(Fft2::new(width, height)))
        .clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn forward_inverse_round_trip() {
        for (w, h) in [(8, 8), (6, 10), (9, 7), (486, 2)] {
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            let data: Vec<f64> = (0..w * h).map(|_| rng.random::<f64>() - 0.5).collect();
            let fft = plan(w, h);
            let spec = fft.forward(&data);
            let back = fft.inverse(&spec);
            for (a, b) in data.iter().zip(&back) {
                assert!((a - b).abs() < 1e-12, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn spectrum_product_is_circular_convolution() {
        // Reference: direct circular convolution on a small grid.
        let (w, h) = (6, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a: Vec<f64> = (0..w * h).map(|_| rng.random::<f64>()).collect();
        let b: Vec<f64> = (0..w * h).map(|_| rng.random::<f64>()).collect();

        let mut want = vec![0.0; w * h];
        for y in 0..h {
            for x in 0..w {
                let mut acc = 0.0;
                for j in 0..h {
                    for i in 0..w {
                        let sy = (y + h - j) % h;
                        let sx = (x + w - i) % w;
                        acc += b[j * w + i] * a[sy * w + sx];
                    }
                }
                want[y * w + x] = acc;
            }
        }

        let fft = plan(w, h);
        let sa = fft.forward(&a);
        let sb = fft.forward(&b);
        let prod: Vec<Complex64> = sa.iter().zip(&sb).map(|(&x, &y)| x * y).collect();
        let got = fft.inverse(&prod);
        for (g, w_) in got.iter().zip(&want) {
            assert!((g - w_).abs() < 1e-10);
        }
    }
}
