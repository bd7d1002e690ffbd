//! Deterministic procedural test images.
//!
//! Used wherever a reproducible "natural" image or texture is needed without
//! shipping binary fixtures.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::ImageTensor;

/// Smooth shading, a few soft-edged shapes and mild fine detail. Loosely
/// resembles a photograph: mostly low-frequency content with some edges.
pub fn natural(channels: usize, height: usize, width: usize) -> ImageTensor {
    let mut samples = Vec::with_capacity(channels * height * width);
    for c in 0..channels {
        let phase = c as f64 * 0.7;
        for y in 0..height {
            for x in 0..width {
                let u = x as f64 / width as f64;
                let v = y as f64 / height as f64;
                let mut s = 0.25 + 0.35 * u + 0.15 * v;
                // disc
                let d = ((u - 0.35).powi(2) + (v - 0.4).powi(2)).sqrt();
                s += 0.3 * smoothstep(0.22, 0.18, d);
                // bar
                if (0.6..0.8).contains(&u) && (0.15..0.85).contains(&v) {
                    s -= 0.25;
                }
                s += 0.06 * (2.0 * PI * (5.0 * u + 3.0 * v) + phase).sin();
                s += 0.03 * (2.0 * PI * (11.0 * u - 7.0 * v)).cos();
                samples.push(s);
            }
        }
    }
    ImageTensor::from_clamped(channels, height, width, samples)
}

fn smoothstep(e0: f64, e1: f64, x: f64) -> f64 {
    let t = ((x - e0) / (e1 - e0)).clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

/// Uniform i.i.d. samples in `[0, 1]`.
pub fn noise(channels: usize, height: usize, width: usize, seed: u64) -> ImageTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..channels * height * width).map(|_| rng.random::<f64>()).collect();
    ImageTensor::from_clamped(channels, height, width, samples)
}

/// Adds zero-mean Gaussian noise of standard deviation `sigma`, clamped.
pub fn add_gaussian_noise(img: &ImageTensor, sigma: f64, seed: u64) -> ImageTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let samples = img
        .samples()
        .iter()
        .map(|s| s + sigma * normal.sample(&mut rng))
        .collect();
    ImageTensor::from_clamped(img.channels(), img.height(), img.width(), samples)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Texture {
    Checker,
    Stripes,
    Weave,
    Grain,
    Dots,
}

impl Texture {
    pub const ALL: [Texture; 5] = [
        Texture::Checker,
        Texture::Stripes,
        Texture::Weave,
        Texture::Grain,
        Texture::Dots,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Texture::Checker => "checker",
            Texture::Stripes => "stripes",
            Texture::Weave => "weave",
            Texture::Grain => "grain",
            Texture::Dots => "dots",
        }
    }
}

/// Fine-grained periodic or stochastic texture whose period is a few pixels,
/// so a small translation decorrelates it locally.
pub fn texture(kind: Texture, channels: usize, height: usize, width: usize, seed: u64) -> ImageTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grain: Vec<f64> = (0..height * width).map(|_| rng.random::<f64>()).collect();
    let mut samples = Vec::with_capacity(channels * height * width);
    for c in 0..channels {
        let tint = 0.9 + 0.05 * c as f64;
        for y in 0..height {
            for x in 0..width {
                let (fx, fy) = (x as f64, y as f64);
                let v = match kind {
                    Texture::Checker => {
                        if ((x / 3) + (y / 3)) % 2 == 0 {
                            0.8
                        } else {
                            0.2
                        }
                    }
                    Texture::Stripes => 0.5 + 0.4 * (2.0 * PI * (fx + 0.5 * fy) / 5.0).sin(),
                    Texture::Weave => {
                        0.5 + 0.2 * (2.0 * PI * fx / 4.0).sin() + 0.2 * (2.0 * PI * fy / 6.0).cos()
                    }
                    Texture::Grain => {
                        // 2x2 box-filtered noise
                        let at = |yy: usize, xx: usize| grain[(yy % height) * width + (xx % width)];
                        0.1 + 0.8 * (at(y, x) + at(y + 1, x) + at(y, x + 1) + at(y + 1, x + 1)) / 4.0
                    }
                    Texture::Dots => {
                        let (dx, dy) = ((fx % 6.0) - 2.5, (fy % 6.0) - 2.5);
                        if dx * dx + dy * dy < 3.0 {
                            0.85
                        } else {
                            0.15 + 0.1 * grain[y * width + x]
                        }
                    }
                };
                samples.push(v * tint);
            }
        }
    }
    ImageTensor::from_clamped(channels, height, width, samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        assert_eq!(noise(1, 4, 4, 3), noise(1, 4, 4, 3));
        assert_ne!(noise(1, 4, 4, 3), noise(1, 4, 4, 4));
        for t in Texture::ALL {
            assert_eq!(texture(t, 3, 12, 12, 1), texture(t, 3, 12, 12, 1));
        }
    }

    #[test]
    fn natural_in_range_and_not_flat() {
        let img = natural(3, 32, 32);
        let (lo, hi) = img
            .samples()
            .iter()
            .fold((1.0f64, 0.0f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
        assert!(hi - lo > 0.3);
    }
}
