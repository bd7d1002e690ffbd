//! Pixel-domain measures: MSE/PSNR and SSIM.

use super::MetricError;
use crate::image::{to_luma, ImageTensor};

fn same_dims(x: &ImageTensor, y: &ImageTensor) -> Result<(), MetricError> {
    if x.dims() != y.dims() {
        return Err(MetricError::DimMismatch(format!("{:?} vs {:?}", x.dims(), y.dims())));
    }
    Ok(())
}

/// Mean squared error and PSNR in dB for a peak of 1.0. PSNR is
/// `f64::INFINITY` for identical images.
pub fn mse_psnr(x: &ImageTensor, y: &ImageTensor) -> Result<(f64, f64), MetricError> {
    same_dims(x, y)?;
    let n = x.samples().len() as f64;
    let mse = x.samples().iter().zip(y.samples()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / n;
    let psnr = if mse == 0.0 { f64::INFINITY } else { -10.0 * mse.log10() };
    Ok((mse, psnr))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SsimParams {
    pub k1: f64,
    pub k2: f64,
    /// Dynamic range of the samples.
    pub range: f64,
    pub window: usize,
    pub sigma: f64,
}

impl Default for SsimParams {
    fn default() -> Self {
        Self {
            k1: 0.01,
            k2: 0.03,
            range: 1.0,
            window: 11,
            sigma: 1.5,
        }
    }
}

impl SsimParams {
    pub fn c1(&self) -> f64 {
        (self.k1 * self.range).powi(2)
    }

    pub fn c2(&self) -> f64 {
        (self.k2 * self.range).powi(2)
    }

    /// Normalised 1-D Gaussian taps; the 2-D window is their outer product.
    pub fn taps(&self) -> Vec<f64> {
        let half = (self.window / 2) as f64;
        let raw: Vec<f64> = (0..self.window)
            .map(|i| {
                let d = i as f64 - half;
                (-d * d / (2.0 * self.sigma * self.sigma)).exp()
            })
            .collect();
        let sum: f64 = raw.iter().sum();
        raw.into_iter().map(|w| w / sum).collect()
    }
}

/// Mean SSIM plus the per-position map over the valid (unpadded) region.
#[derive(Debug, Clone, PartialEq)]
pub struct SsimMap {
    pub score: f64,
    pub height: usize,
    pub width: usize,
    pub values: Vec<f64>,
}

/// Valid-region separable filtering of one plane.
fn filter_valid(plane: &[f64], h: usize, w: usize, taps: &[f64]) -> Vec<f64> {
    let k = taps.len();
    let (oh, ow) = (h + 1 - k, w + 1 - k);
    let mut rows = vec![0.0; h * ow];
    for y in 0..h {
        let src = &plane[y * w..(y + 1) * w];
        for x in 0..ow {
            rows[y * ow + x] = taps.iter().zip(&src[x..x + k]).map(|(t, v)| t * v).sum();
        }
    }
    let mut out = vec![0.0; oh * ow];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = taps.iter().enumerate().map(|(i, t)| t * rows[(y + i) * ow + x]).sum();
        }
    }
    out
}

/// SSIM of two single-channel images using Gaussian-weighted local moments.
pub fn ssim(x: &ImageTensor, y: &ImageTensor, p: &SsimParams) -> Result<SsimMap, MetricError> {
    same_dims(x, y)?;
    if x.channels() != 1 {
        return Err(MetricError::DimMismatch(format!(
            "ssim takes one channel, got {}; convert to luma first",
            x.channels()
        )));
    }
    let (h, w) = (x.height(), x.width());
    if h < p.window || w < p.window {
        return Err(MetricError::TooSmall {
            height: h,
            width: w,
            min: p.window,
        });
    }
    let taps = p.taps();
    let (xs, ys) = (x.samples(), y.samples());
    let prod = |f: &dyn Fn(f64, f64) -> f64| xs.iter().zip(ys).map(|(&a, &b)| f(a, b)).collect::<Vec<f64>>();
    let mx = filter_valid(xs, h, w, &taps);
    let my = filter_valid(ys, h, w, &taps);
    let mxx = filter_valid(&prod(&|a, _| a * a), h, w, &taps);
    let myy = filter_valid(&prod(&|_, b| b * b), h, w, &taps);
    let mxy = filter_valid(&prod(&|a, b| a * b), h, w, &taps);
    let (c1, c2) = (p.c1(), p.c2());
    let values: Vec<f64> = (0..mx.len())
        .map(|i| {
            let (ux, uy) = (mx[i], my[i]);
            let vx = mxx[i] - ux * ux;
            let vy = myy[i] - uy * uy;
            let cxy = mxy[i] - ux * uy;
            ((2.0 * ux * uy + c1) * (2.0 * cxy + c2)) / ((ux * ux + uy * uy + c1) * (vx + vy + c2))
        })
        .collect();
    let score = values.iter().sum::<f64>() / values.len() as f64;
    Ok(SsimMap {
        score,
        height: h + 1 - p.window,
        width: w + 1 - p.window,
        values,
    })
}

/// SSIM on luma, converting colour inputs first.
pub fn ssim_luma(x: &ImageTensor, y: &ImageTensor, p: &SsimParams) -> Result<f64, MetricError> {
    same_dims(x, y)?;
    Ok(ssim(&to_luma(x), &to_luma(y), p)?.score)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::synth;

    #[test]
    fn psnr_of_uniform_offset() {
        let a = ImageTensor::filled(1, 4, 4, 0.3);
        let b = ImageTensor::filled(1, 4, 4, 0.4);
        let (mse, psnr) = mse_psnr(&a, &b).unwrap();
        assert!((mse - 0.01).abs() < 1e-15);
        assert!((psnr - 20.0).abs() < 1e-12);
        assert_eq!(mse_psnr(&a, &a).unwrap(), (0.0, f64::INFINITY));
    }

    #[test]
    fn window_sums_to_one() {
        let t = SsimParams::default().taps();
        assert_eq!(t.len(), 11);
        assert!((t.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constants_collapse_to_luminance() {
        let p = SsimParams::default();
        let (a, b) = (0.2, 0.7);
        let s = ssim(&ImageTensor::filled(1, 12, 13, a), &ImageTensor::filled(1, 12, 13, b), &p).unwrap();
        let expect = (2.0 * a * b + p.c1()) / (a * a + b * b + p.c1());
        assert!((s.score - expect).abs() < 1e-12);
        assert_eq!((s.height, s.width), (2, 3));
    }

    #[test]
    fn self_similarity_and_errors() {
        let x = synth::noise(1, 20, 20, 3);
        assert!((ssim(&x, &x, &SsimParams::default()).unwrap().score - 1.0).abs() < 1e-9);
        let small = ImageTensor::filled(1, 10, 20, 0.5);
        assert!(matches!(
            ssim(&small, &small, &SsimParams::default()),
            Err(MetricError::TooSmall { .. })
        ));
        assert!(matches!(
            mse_psnr(&x, &small),
            Err(MetricError::DimMismatch(_))
        ));
    }
}
