//! Training sub-image extraction.
//!
//! LR patches are 17×17 and HR patches 17r×17r. Consecutive patches are
//! spaced `17 − Σ (f mod 2)` LR pixels apart, so the central
//! `stride × stride` region of each patch (its ground-truth core) tiles the
//! image with every pixel appearing in exactly one core.

use crate::image::ImageTensor;
use crate::resample::{resize, ResampleSpec};

/// LR patch side.
pub const PATCH: usize = 17;

#[derive(Debug, Clone, PartialEq)]
pub struct PatchPair {
    pub lr: ImageTensor,
    pub hr: ImageTensor,
    /// Top-left corner in LR pixels.
    pub lr_origin: (usize, usize),
    /// Top-left corner in HR pixels.
    pub hr_origin: (usize, usize),
}

/// `(LR stride, HR stride)` for the given layer kernel sizes.
pub fn patch_strides(factor: usize, kernels: &[usize]) -> (usize, usize) {
    let odd: usize = kernels.iter().map(|f| f % 2).sum();
    let lr = PATCH.saturating_sub(odd).max(1);
    (lr, lr * factor)
}

impl PatchPair {
    /// HR rectangle `(top, left, height, width)` this patch is responsible for.
    pub fn core(&self, factor: usize, kernels: &[usize]) -> (usize, usize, usize, usize) {
        let (lr_stride, hr_stride) = patch_strides(factor, kernels);
        let margin = (PATCH - lr_stride) / 2 * factor;
        (self.hr_origin.0 + margin, self.hr_origin.1 + margin, hr_stride, hr_stride)
    }
}

/// Cuts aligned LR/HR patch pairs from `hr`. The LR image is the
/// antialiased bicubic shrink of `hr` (cropped to a multiple of `factor`).
/// Images smaller than one HR patch yield no pairs.
pub fn extract_training_patches(hr: &ImageTensor, factor: usize, kernels: &[usize]) -> Vec<PatchPair> {
    let hr_patch = PATCH * factor;
    if factor == 0 || hr.height() < hr_patch || hr.width() < hr_patch {
        log::warn!(
            "image {}x{} is smaller than one {hr_patch}x{hr_patch} training patch",
            hr.height(),
            hr.width()
        );
        return Vec::new();
    }
    let hr = hr.crop(hr.height() / factor * factor, hr.width() / factor * factor);
    let lr = resize(&hr, &ResampleSpec::new(hr.height() / factor, hr.width() / factor))
        .expect("non-degenerate target");
    let (stride, _) = patch_strides(factor, kernels);
    let positions = |len: usize| (0..=len - PATCH).step_by(stride);
    let mut out = Vec::new();
    for y in positions(lr.height()) {
        for x in positions(lr.width()) {
            out.push(PatchPair {
                lr: lr.crop_at(y, x, PATCH, PATCH),
                hr: hr.crop_at(y * factor, x * factor, hr_patch, hr_patch),
                lr_origin: (y, x),
                hr_origin: (y * factor, x * factor),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::ESPCN_KERNELS;

    #[test]
    fn espcn_strides() {
        for r in 1..=4 {
            assert_eq!(patch_strides(r, &ESPCN_KERNELS), (14, 14 * r));
        }
    }

    #[test]
    fn exact_patch_gives_one_pair() {
        for r in [2, 3] {
            let img = crate::image::synth::natural(1, 17 * r, 17 * r);
            let p = extract_training_patches(&img, r, &ESPCN_KERNELS);
            assert_eq!(p.len(), 1);
            assert_eq!(p[0].lr.dims(), (1, 17, 17));
            assert_eq!(p[0].hr.dims(), (1, 17 * r, 17 * r));
        }
    }

    #[test]
    fn too_small_is_empty() {
        let img = ImageTensor::filled(1, 30, 60, 0.5);
        assert!(extract_training_patches(&img, 2, &ESPCN_KERNELS).is_empty());
    }

    #[test]
    fn constant_input_constant_patches() {
        let img = ImageTensor::filled(3, 80, 70, 0.42);
        for p in extract_training_patches(&img, 2, &ESPCN_KERNELS) {
            assert!(p.lr.samples().iter().all(|s| (s - 0.42).abs() < 1e-12));
        }
    }
}
