//! WebAssembly bindings for the browser demo. Images cross the boundary as
//! RGBA bytes straight from a canvas `ImageData`; alpha is dropped on the way
//! in and set opaque on the way out.
//!
//! Each exported function wraps a plain Rust function of the same shape so
//! the logic can be tested natively.

use serde::Serialize;
use survx_core::image::{synth, ImageTensor};
use survx_core::metrics::{FeatureExtractor, Metric, MetricSuite};
use survx_core::resample::{degrade, upscale_bicubic};
use wasm_bindgen::prelude::*;

pub fn rgba_to_image(rgba: &[u8], width: usize, height: usize) -> Result<ImageTensor, String> {
    if width == 0 || height == 0 || rgba.len() != 4 * width * height {
        return Err(format!("{} bytes is not a {width}x{height} RGBA buffer", rgba.len()));
    }
    let n = width * height;
    let mut samples = vec![0.0; 3 * n];
    for (i, px) in rgba.chunks_exact(4).enumerate() {
        for c in 0..3 {
            samples[c * n + i] = f64::from(px[c]) / 255.0;
        }
    }
    ImageTensor::new(3, height, width, samples).map_err(|e| e.to_string())
}

pub fn image_to_rgba(img: &ImageTensor) -> Vec<u8> {
    let n = img.plane_len();
    let mut out = vec![255u8; 4 * n];
    for c in 0..3 {
        let plane = img.plane(c.min(img.channels() - 1));
        for (i, v) in plane.iter().enumerate() {
            out[4 * i + c] = (v * 255.0).round() as u8;
        }
    }
    out
}

/// Shrinks by `factor` and enlarges back with bicubic interpolation. The
/// image is first cropped to a multiple of `factor`; the result has the
/// cropped size.
pub fn round_trip(rgba: &[u8], width: usize, height: usize, factor: usize) -> Result<(Vec<u8>, usize, usize), String> {
    if factor == 0 || factor > width.min(height) {
        return Err(format!("factor {factor} does not fit a {width}x{height} image"));
    }
    let img = rgba_to_image(rgba, width, height)?;
    let (h, w) = (height / factor * factor, width / factor * factor);
    let lr = degrade(&img.crop(h, w), factor).map_err(|e| e.to_string())?;
    let sr = upscale_bicubic(&lr.quantized(), factor).map_err(|e| e.to_string())?;
    Ok((image_to_rgba(&sr), w, h))
}

pub fn noisy(rgba: &[u8], width: usize, height: usize, sigma: f64, seed: u64) -> Result<Vec<u8>, String> {
    if !(0.0..=1.0).contains(&sigma) {
        return Err(format!("sigma {sigma} outside [0, 1]"));
    }
    let img = rgba_to_image(rgba, width, height)?;
    Ok(image_to_rgba(&synth::add_gaussian_noise(&img, sigma, seed)))
}

#[derive(Debug, Serialize)]
pub struct Scores {
    pub mse: f64,
    /// `null` for identical images.
    pub psnr: Option<f64>,
    pub ssim: f64,
    pub lpips: f64,
    pub dists: f64,
}

/// Scores `candidate` against `reference` with the seeded default extractor.
/// Images smaller than 16×16 get `NaN` for the deep metrics.
pub fn score(reference: &[u8], candidate: &[u8], width: usize, height: usize) -> Result<Scores, String> {
    let (a, b) = (rgba_to_image(reference, width, height)?, rgba_to_image(candidate, width, height)?);
    let suite = MetricSuite::new(FeatureExtractor::shipped());
    let pixel = suite
        .score(&a, &b, &[Metric::Mse, Metric::Psnr, Metric::Ssim])
        .map_err(|e| e.to_string())?;
    let deep = suite
        .score(&a, &b, &[Metric::Lpips, Metric::Dists])
        .unwrap_or_else(|_| vec![f64::NAN, f64::NAN]);
    Ok(Scores {
        mse: pixel[0],
        psnr: pixel[1].is_finite().then_some(pixel[1]),
        ssim: pixel[2],
        lpips: deep[0],
        dists: deep[1],
    })
}

fn js_err(e: String) -> JsError {
    JsError::new(&e)
}

/// A synthetic RGBA test image: `"natural"` or one of the texture names.
#[wasm_bindgen(js_name = testImage)]
pub fn test_image(kind: &str, size: usize) -> Result<Vec<u8>, JsError> {
    if !(16..=1024).contains(&size) {
        return Err(js_err(format!("size {size} outside 16..=1024")));
    }
    let img = match kind {
        "natural" => synth::natural(3, size, size),
        other => {
            let t = synth::Texture::ALL
                .into_iter()
                .find(|t| t.name() == other)
                .ok_or_else(|| js_err(format!("unknown image kind {other:?}")))?;
            synth::texture(t, 3, size, size, 7)
        }
    };
    Ok(image_to_rgba(&img))
}

/// Shrink and re-enlarge; the output size comes from `roundTripSize`.
#[wasm_bindgen(js_name = roundTrip)]
pub fn round_trip_js(rgba: &[u8], width: usize, height: usize, factor: usize) -> Result<Vec<u8>, JsError> {
    round_trip(rgba, width, height, factor).map(|(px, _, _)| px).map_err(js_err)
}

/// Width and height of the `roundTrip` output.
#[wasm_bindgen(js_name = roundTripSize)]
pub fn round_trip_size(width: usize, height: usize, factor: usize) -> Vec<usize> {
    if factor == 0 {
        return vec![0, 0];
    }
    vec![width / factor * factor, height / factor * factor]
}

#[wasm_bindgen(js_name = addNoise)]
pub fn add_noise_js(rgba: &[u8], width: usize, height: usize, sigma: f64, seed: u32) -> Result<Vec<u8>, JsError> {
    noisy(rgba, width, height, sigma, u64::from(seed)).map_err(js_err)
}

/// Metric scores as a JSON object string.
#[wasm_bindgen(js_name = scoreImages)]
pub fn score_js(reference: &[u8], candidate: &[u8], width: usize, height: usize) -> Result<String, JsError> {
    let s = score(reference, candidate, width, height).map_err(js_err)?;
    serde_json::to_string(&s).map_err(|e| js_err(e.to_string()))
}
