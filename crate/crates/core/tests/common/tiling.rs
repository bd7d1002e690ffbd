//! Exhaustive check that patch cores tile the image interior once.

use std::collections::HashSet;

use survx_core::image::synth;
use survx_core::models::{extract_training_patches, patch_strides, ESPCN_KERNELS, PATCH};

/// Extracts patches from a `170r × 170r` image and returns the patch count,
/// or a description of the first violated property.
pub fn check_patch_tiling(r: usize) -> Result<usize, String> {
    let side = 170 * r;
    let hr = synth::natural(1, side, side);
    let patches = extract_training_patches(&hr, r, &ESPCN_KERNELS);
    let (lr_stride, hr_stride) = patch_strides(r, &ESPCN_KERNELS);
    if (lr_stride, hr_stride) != (PATCH - 3, (PATCH - 3) * r) {
        return Err(format!("r={r}: strides {lr_stride}, {hr_stride}"));
    }
    let mut covered = vec![0u8; side * side];
    for p in &patches {
        if p.hr_origin.0 + PATCH * r > side || p.hr_origin.1 + PATCH * r > side {
            return Err(format!("r={r}: patch at {:?} leaves the image", p.hr_origin));
        }
        if p.hr_origin != (p.lr_origin.0 * r, p.lr_origin.1 * r) {
            return Err(format!("r={r}: misaligned origins {:?} {:?}", p.lr_origin, p.hr_origin));
        }
        let (top, left, h, w) = p.core(r, &ESPCN_KERNELS);
        for y in top..top + h {
            for x in left..left + w {
                covered[y * side + x] += 1;
            }
        }
    }
    // 170 LR pixels, 17-wide windows every 14: origins 0..=153, so the
    // cores span LR rows 1..155
    let n = (170 - PATCH) / lr_stride + 1;
    if patches.len() != n * n {
        return Err(format!("r={r}: {} patches, expected {}", patches.len(), n * n));
    }
    let end = r + n * hr_stride;
    for y in 0..side {
        for x in 0..side {
            let inside = (r..end).contains(&y) && (r..end).contains(&x);
            let c = covered[y * side + x];
            if c > 1 || (c == 1) != inside {
                return Err(format!("r={r}: pixel ({y},{x}) covered {c} times"));
            }
        }
    }
    let origins: HashSet<_> = patches.iter().map(|p| p.lr_origin).collect();
    if origins.len() != patches.len() {
        return Err(format!("r={r}: repeated origins"));
    }
    Ok(patches.len())
}
