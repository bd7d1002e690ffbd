//! Single-image super-resolution and perceptual quality evaluation.
//!
//! The crate covers the whole pipeline: bicubic degradation, a small CPU
//! convolutional engine running ESPCN and SRGAN-style graphs, the objective
//! image-quality metrics (PSNR, SSIM, LPIPS-style, DISTS, FID) and the
//! statistics used to compare them against mean opinion scores.

pub mod convnet;
pub mod eval;
pub mod image;
pub mod metrics;
pub mod models;
pub mod resample;
