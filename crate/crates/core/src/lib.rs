//! Simulation pipeline for text detection and recognition through a lensless
//! (mask-based) camera.
//!
//! The crate covers the full desk-scale loop:
//!
//! 1. [`scene`] — synthesize white-on-black text scenes with exact
//!    word-level ground truth, or compose scenes from existing word crops.
//! 2. [`optics`] — simulate capture through a diffuser-style point spread
//!    function with the crop-convolve forward model `b = crop(h * x)`, plus
//!    the matching adjoint operator.
//! 3. [`recon`] — recover the scene with ADMM (TV + nonnegativity), FISTA,
//!    or a Wiener filter baseline.
//! 4. [`textdet`] / [`ocr`] — classical word detection (threshold,
//!    connected components, gap merging) and template-matching recognition
//!    over the 36-symbol alphabet A-Z, 0-9.
//! 5. [`eval`] / [`sweep`] — IoU-matched detection metrics, edit distance,
//!    word accuracy, and seeded robustness sweeps over optical conditions.
//!
//! Everything is deterministic for a fixed seed, including runs split across
//! worker threads.

mod error;
mod fft2;

pub mod dataset;
pub mod eval;
pub mod glyphs;
pub mod img;
pub mod ocr;
pub mod optics;
pub mod recon;
pub mod scene;
pub mod seed;
pub mod sweep;
pub mod textdet;

pub use error::{Error, Result};
pub use img::Image;
