//! Planar image representation shared by the resampler, the networks and the
//! quality metrics.

mod codec;
pub mod synth;

pub use codec::{decode_image, encode_image, read_image, write_image, ImageFormat};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ImageError {
    #[error("malformed image file: {0}")]
    MalformedFile(String),
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("unsupported channel count {0} (expected 1 or 3)")]
    UnsupportedChannelCount(usize),
    #[error("expected {expected} channels, found {found}")]
    ChannelMismatch { expected: usize, found: usize },
    #[error("invalid image: {0}")]
    Invalid(String),
    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

/// Planar `channels × height × width` image with samples in `[0, 1]`.
///
/// Sample `(c, y, x)` lives at `c·H·W + y·W + x`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageTensor {
    channels: usize,
    height: usize,
    width: usize,
    samples: Vec<f64>,
}

impl ImageTensor {
    pub fn new(
        channels: usize,
        height: usize,
        width: usize,
        samples: Vec<f64>,
    ) -> Result<Self, ImageError> {
        if channels == 0 || height == 0 || width == 0 {
            return Err(ImageError::Invalid(format!(
                "degenerate dims {channels}x{height}x{width}"
            )));
        }
        if samples.len() != channels * height * width {
            return Err(ImageError::Invalid(format!(
                "{} samples for dims {channels}x{height}x{width}",
                samples.len()
            )));
        }
        if let Some(bad) = samples.iter().find(|s| !(0.0..=1.0).contains(*s)) {
            return Err(ImageError::Invalid(format!("sample {bad} outside [0,1]")));
        }
        Ok(Self {
            channels,
            height,
            width,
            samples,
        })
    }

    /// Builds an image, clamping every sample into `[0, 1]` (NaN maps to 0).
    pub fn from_clamped(channels: usize, height: usize, width: usize, mut samples: Vec<f64>) -> Self {
        assert!(channels > 0 && height > 0 && width > 0, "degenerate image dims");
        assert_eq!(samples.len(), channels * height * width, "sample count mismatch");
        for s in &mut samples {
            *s = if s.is_nan() { 0.0 } else { s.clamp(0.0, 1.0) };
        }
        Self {
            channels,
            height,
            width,
            samples,
        }
    }

    pub fn filled(channels: usize, height: usize, width: usize, value: f64) -> Self {
        Self::from_clamped(channels, height, width, vec![value; channels * height * width])
    }

    /// Rounds every sample to the nearest 8-bit level, as a write/read
    /// through an image file would.
    pub fn quantized(&self) -> ImageTensor {
        let samples = self.samples.iter().map(|v| (v * 255.0).round() / 255.0).collect();
        Self::from_clamped(self.channels, self.height, self.width, samples)
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn plane_len(&self) -> usize {
        self.height * self.width
    }

    #[inline]
    pub fn get(&self, c: usize, y: usize, x: usize) -> f64 {
        self.samples[c * self.height * self.width + y * self.width + x]
    }

    pub fn plane(&self, c: usize) -> &[f64] {
        let n = self.plane_len();
        &self.samples[c * n..(c + 1) * n]
    }

    /// Single-channel image holding channel `c`.
    pub fn channel(&self, c: usize) -> ImageTensor {
        ImageTensor {
            channels: 1,
            height: self.height,
            width: self.width,
            samples: self.plane(c).to_vec(),
        }
    }

    /// Stacks single-channel planes of identical size into one image.
    pub fn stack(planes: &[ImageTensor]) -> Result<ImageTensor, ImageError> {
        let first = planes
            .first()
            .ok_or_else(|| ImageError::Invalid("no planes to stack".into()))?;
        let mut samples = Vec::with_capacity(planes.len() * first.plane_len());
        for p in planes {
            if p.height != first.height || p.width != first.width {
                return Err(ImageError::Invalid("plane size mismatch".into()));
            }
            samples.extend_from_slice(&p.samples);
        }
        ImageTensor::new(
            planes.iter().map(|p| p.channels).sum(),
            first.height,
            first.width,
            samples,
        )
    }

    /// Top-left crop.
    pub fn crop(&self, height: usize, width: usize) -> ImageTensor {
        self.crop_at(0, 0, height, width)
    }

    pub fn crop_at(&self, top: usize, left: usize, height: usize, width: usize) -> ImageTensor {
        assert!(top + height <= self.height && left + width <= self.width, "crop out of bounds");
        let mut samples = Vec::with_capacity(self.channels * height * width);
        for c in 0..self.channels {
            for y in top..top + height {
                let row = c * self.plane_len() + y * self.width;
                samples.extend_from_slice(&self.samples[row + left..row + left + width]);
            }
        }
        ImageTensor {
            channels: self.channels,
            height,
            width,
            samples,
        }
    }

    /// Cyclic translation by `(dy, dx)` pixels.
    pub fn roll(&self, dy: isize, dx: isize) -> ImageTensor {
        let (h, w) = (self.height as isize, self.width as isize);
        let mut samples = vec![0.0; self.samples.len()];
        for c in 0..self.channels {
            let base = c * self.plane_len();
            for y in 0..h {
                let sy = (y - dy).rem_euclid(h);
                for x in 0..w {
                    let sx = (x - dx).rem_euclid(w);
                    samples[base + (y * w + x) as usize] =
                        self.samples[base + (sy * w + sx) as usize];
                }
            }
        }
        ImageTensor {
            channels: self.channels,
            height: self.height,
            width: self.width,
            samples,
        }
    }
}

/// Rec.601 luma: `Y = 0.299 R + 0.587 G + 0.114 B`.
pub fn rgb_to_luma(img: &ImageTensor) -> Result<ImageTensor, ImageError> {
    if img.channels != 3 {
        return Err(ImageError::ChannelMismatch {
            expected: 3,
            found: img.channels,
        });
    }
    let (r, g, b) = (img.plane(0), img.plane(1), img.plane(2));
    let samples = r
        .iter()
        .zip(g)
        .zip(b)
        // g + 0.299(r−g) + 0.114(b−g) is exact on grays, unlike the direct sum
        .map(|((r, g), b)| (g + 0.299 * (r - g) + 0.114 * (b - g)).clamp(0.0, 1.0))
        .collect();
    Ok(ImageTensor {
        channels: 1,
        height: img.height,
        width: img.width,
        samples,
    })
}

/// Luma for colour images, the image itself when already single-channel.
pub fn to_luma(img: &ImageTensor) -> ImageTensor {
    match img.channels {
        3 => rgb_to_luma(img).expect("3-channel image"),
        _ => img.channel(0),
    }
}

const CB_CR: [[f64; 3]; 2] = [
    [-0.168_735_891_647_856, -0.331_264_108_352_144, 0.5],
    [0.5, -0.418_687_589_158_345, -0.081_312_410_841_655],
];

/// Splits an RGB image into Y and centred Cb/Cr planes (Cb, Cr offset by 0.5).
pub fn rgb_to_ycbcr(img: &ImageTensor) -> Result<[ImageTensor; 3], ImageError> {
    let y = rgb_to_luma(img)?;
    let (r, g, b) = (img.plane(0), img.plane(1), img.plane(2));
    let chroma = |k: [f64; 3]| {
        let samples = (0..img.plane_len())
            .map(|i| (k[0] * r[i] + k[1] * g[i] + k[2] * b[i] + 0.5).clamp(0.0, 1.0))
            .collect();
        ImageTensor {
            channels: 1,
            height: img.height,
            width: img.width,
            samples,
        }
    };
    Ok([y, chroma(CB_CR[0]), chroma(CB_CR[1])])
}

/// Inverse of [`rgb_to_ycbcr`]; the output is clamped into `[0, 1]`.
pub fn ycbcr_to_rgb(y: &ImageTensor, cb: &ImageTensor, cr: &ImageTensor) -> Result<ImageTensor, ImageError> {
    if y.dims() != cb.dims() || y.dims() != cr.dims() || y.channels != 1 {
        return Err(ImageError::Invalid("Y/Cb/Cr planes must be single-channel and equal size".into()));
    }
    let n = y.plane_len();
    let mut samples = vec![0.0; 3 * n];
    for i in 0..n {
        let (yy, u, v) = (y.samples[i], cb.samples[i] - 0.5, cr.samples[i] - 0.5);
        samples[i] = yy + 1.402 * v;
        samples[n + i] = yy - 0.344_136_286_201_022 * u - 0.714_136_286_201_022 * v;
        samples[2 * n + i] = yy + 1.772 * u;
    }
    Ok(ImageTensor::from_clamped(3, y.height, y.width, samples))
}

impl ImageTensor {
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.channels, self.height, self.width)
    }
}
