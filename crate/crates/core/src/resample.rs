//! Separable bicubic resampling with antialiased downscaling.
//!
//! Keys cubic kernel (`a = -0.5` by default), half-pixel-centred coordinate
//! mapping, clamp-to-edge borders and per-pixel weight renormalization. When
//! shrinking, the kernel is stretched by `1/scale` so it also acts as the
//! low-pass prefilter.

use thiserror::Error;

use crate::image::ImageTensor;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResampleError {
    #[error("target dimensions {0}x{1} are degenerate")]
    DegenerateTarget(usize, usize),
    #[error("image {height}x{width} is not divisible by factor {factor}")]
    NotDivisible {
        height: usize,
        width: usize,
        factor: usize,
    },
}

pub const DEFAULT_KERNEL_A: f64 = -0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResampleSpec {
    pub out_height: usize,
    pub out_width: usize,
    /// Only takes effect along axes that shrink.
    pub antialias: bool,
    pub kernel_a: f64,
}

impl ResampleSpec {
    pub fn new(out_height: usize, out_width: usize) -> Self {
        Self {
            out_height,
            out_width,
            antialias: true,
            kernel_a: DEFAULT_KERNEL_A,
        }
    }

    pub fn with_antialias(mut self, antialias: bool) -> Self {
        self.antialias = antialias;
        self
    }
}

/// Keys piecewise cubic.
pub fn cubic_kernel(t: f64, a: f64) -> f64 {
    let t = t.abs();
    if t <= 1.0 {
        ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0
    } else if t < 2.0 {
        ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a
    } else {
        0.0
    }
}

/// Contributions `(source index, weight)` for one output sample.
pub type Taps = Vec<(usize, f64)>;

/// Renormalized tap lists for resampling one axis from `in_len` to `out_len`.
pub fn axis_weights(in_len: usize, out_len: usize, a: f64, antialias: bool) -> Vec<Taps> {
    let scale = out_len as f64 / in_len as f64;
    let stretch = if antialias && scale < 1.0 { scale } else { 1.0 };
    let radius = 2.0 / stretch;
    (0..out_len)
        .map(|i| {
            let center = (i as f64 + 0.5) / scale - 0.5;
            let lo = (center - radius).floor() as isize;
            let hi = (center + radius).ceil() as isize;
            let mut taps: Taps = (lo..=hi)
                .filter_map(|j| {
                    let w = cubic_kernel(stretch * (center - j as f64), a);
                    (w != 0.0).then(|| (j.clamp(0, in_len as isize - 1) as usize, w))
                })
                .collect();
            let total: f64 = taps.iter().map(|(_, w)| w).sum();
            for (_, w) in &mut taps {
                *w /= total;
            }
            taps
        })
        .collect()
}

/// Unclamped planar buffer used between the two separable passes.
struct Planes {
    channels: usize,
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl Planes {
    fn from_image(img: &ImageTensor) -> Self {
        Planes {
            channels: img.channels(),
            height: img.height(),
            width: img.width(),
            data: img.samples().to_vec(),
        }
    }

    fn resize_width(&self, taps: &[Taps]) -> Planes {
        let out_w = taps.len();
        let mut data = vec![0.0; self.channels * self.height * out_w];
        for c in 0..self.channels {
            for y in 0..self.height {
                let src = &self.data[(c * self.height + y) * self.width..][..self.width];
                let dst = &mut data[(c * self.height + y) * out_w..][..out_w];
                for (d, t) in dst.iter_mut().zip(taps) {
                    *d = t.iter().map(|&(j, w)| w * src[j]).sum();
                }
            }
        }
        Planes {
            channels: self.channels,
            height: self.height,
            width: out_w,
            data,
        }
    }

    fn resize_height(&self, taps: &[Taps]) -> Planes {
        let out_h = taps.len();
        let w = self.width;
        let mut data = vec![0.0; self.channels * out_h * w];
        for c in 0..self.channels {
            let plane = &self.data[c * self.height * w..][..self.height * w];
            for (i, t) in taps.iter().enumerate() {
                let dst = &mut data[(c * out_h + i) * w..][..w];
                for &(j, wt) in t {
                    for (d, s) in dst.iter_mut().zip(&plane[j * w..(j + 1) * w]) {
                        *d += wt * s;
                    }
                }
            }
        }
        Planes {
            channels: self.channels,
            height: out_h,
            width: w,
            data,
        }
    }

    fn into_image(self) -> ImageTensor {
        ImageTensor::from_clamped(self.channels, self.height, self.width, self.data)
    }
}

/// Which axis the separable resize processes first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PassOrder {
    RowsFirst,
    ColumnsFirst,
}

pub fn resize(img: &ImageTensor, spec: &ResampleSpec) -> Result<ImageTensor, ResampleError> {
    resize_ordered(img, spec, PassOrder::RowsFirst)
}

/// [`resize`] with an explicit pass order; both orders agree to rounding error.
pub fn resize_ordered(
    img: &ImageTensor,
    spec: &ResampleSpec,
    order: PassOrder,
) -> Result<ImageTensor, ResampleError> {
    if spec.out_height == 0 || spec.out_width == 0 {
        return Err(ResampleError::DegenerateTarget(spec.out_height, spec.out_width));
    }
    let wx = axis_weights(img.width(), spec.out_width, spec.kernel_a, spec.antialias);
    let wy = axis_weights(img.height(), spec.out_height, spec.kernel_a, spec.antialias);
    let planes = Planes::from_image(img);
    let out = match order {
        PassOrder::RowsFirst => planes.resize_width(&wx).resize_height(&wy),
        PassOrder::ColumnsFirst => planes.resize_height(&wy).resize_width(&wx),
    };
    Ok(out.into_image())
}

/// Antialiased bicubic shrink by an integer factor. Dimensions must divide.
pub fn degrade(hr: &ImageTensor, factor: usize) -> Result<ImageTensor, ResampleError> {
    if factor == 0 || !hr.height().is_multiple_of(factor) || !hr.width().is_multiple_of(factor) {
        return Err(ResampleError::NotDivisible {
            height: hr.height(),
            width: hr.width(),
            factor,
        });
    }
    resize(hr, &ResampleSpec::new(hr.height() / factor, hr.width() / factor))
}

/// The ×4 low-resolution generation step.
pub fn degrade_x4(hr: &ImageTensor) -> Result<ImageTensor, ResampleError> {
    degrade(hr, 4)
}

/// Bicubic enlargement by an integer factor (the interpolation baseline).
pub fn upscale_bicubic(lr: &ImageTensor, factor: usize) -> Result<ImageTensor, ResampleError> {
    resize(
        lr,
        &ResampleSpec::new(lr.height() * factor, lr.width() * factor),
    )
}
