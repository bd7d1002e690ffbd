//! Objective image-quality measures.

mod deep;
mod features;
mod fid;
mod pixel;

pub use deep::{
    dists_distance, dists_score, lpips_distance, lpips_score, DistsWeights, LpipsWeights, DISTS_C1, DISTS_C2,
};
pub use features::{
    extract_features, FeatureExtractor, FeatureExtractorSpec, FeatureMaps, Stage, DEFAULT_EXTRACTOR_SEED,
    DEFAULT_STAGES,
};
pub use fid::{fid, gaussian_stats, sqrtm_psd, GaussianStats};
pub use pixel::{mse_psnr, ssim, ssim_luma, SsimMap, SsimParams};

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::convnet::ConvnetError;
use crate::image::ImageTensor;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("image {height}x{width} is smaller than the {min}x{min} window")]
    TooSmall { height: usize, width: usize, min: usize },
    #[error("metric weights do not fit the extractor: {0}")]
    WeightShapeMismatch(String),
    #[error("DISTS weights sum to {0}, expected 1")]
    WeightNormalization(f64),
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("matrix is not symmetric (max deviation {0})")]
    NotSymmetric(f64),
    #[error("matrix has eigenvalue {0}, too negative to clip")]
    SignificantlyNegativeEigenvalue(f64),
    #[error("extractor weights do not match its spec: {0}")]
    WeightMismatch(String),
    #[error("invalid extractor: {0}")]
    InvalidExtractor(String),
    #[error(transparent)]
    Network(#[from] ConvnetError),
}

/// Per-pair metrics, each oriented so that its value is what gets reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Mse,
    Psnr,
    Ssim,
    Lpips,
    Dists,
}

impl Metric {
    pub const ALL: [Metric; 5] = [Metric::Mse, Metric::Psnr, Metric::Ssim, Metric::Lpips, Metric::Dists];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Mse => "mse",
            Metric::Psnr => "psnr",
            Metric::Ssim => "ssim",
            Metric::Lpips => "lpips",
            Metric::Dists => "dists",
        }
    }

    /// Whether a larger value means better quality.
    pub fn higher_is_better(self) -> bool {
        !matches!(self, Metric::Mse)
    }

    pub fn needs_features(self) -> bool {
        matches!(self, Metric::Lpips | Metric::Dists)
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown metric {s:?}"))
    }
}

/// Everything needed to score image pairs.
#[derive(Debug, Clone)]
pub struct MetricSuite {
    pub ssim: SsimParams,
    pub extractor: FeatureExtractor,
    pub lpips: LpipsWeights,
    pub dists: DistsWeights,
}

impl MetricSuite {
    pub fn new(extractor: FeatureExtractor) -> Self {
        Self {
            ssim: SsimParams::default(),
            lpips: LpipsWeights::for_extractor(&extractor),
            dists: DistsWeights::for_extractor(&extractor),
            extractor,
        }
    }

    /// Scores `candidate` against `reference` on the requested metrics, in
    /// the order given. Deep features are computed once per image.
    pub fn score(&self, reference: &ImageTensor, candidate: &ImageTensor, metrics: &[Metric]) -> Result<Vec<f64>, MetricError> {
        if reference.dims() != candidate.dims() {
            return Err(MetricError::DimMismatch(format!(
                "{:?} vs {:?}",
                reference.dims(),
                candidate.dims()
            )));
        }
        let feats = if metrics.iter().any(|m| m.needs_features()) {
            Some((self.extractor.extract(reference)?, self.extractor.extract(candidate)?))
        } else {
            None
        };
        let (mse, psnr) = mse_psnr(reference, candidate)?;
        metrics
            .iter()
            .map(|m| {
                Ok(match m {
                    Metric::Mse => mse,
                    Metric::Psnr => psnr,
                    Metric::Ssim => ssim_luma(reference, candidate, &self.ssim)?,
                    Metric::Lpips => {
                        let (a, b) = feats.as_ref().expect("computed above");
                        1.0 - lpips_distance(a, b, &self.lpips)?
                    }
                    Metric::Dists => {
                        let (a, b) = feats.as_ref().expect("computed above");
                        1.0 - dists_distance(a, b, &self.dists)?
                    }
                })
            })
            .collect()
    }
}

/// FID between two image sets using pooled deepest-tap features.
pub fn fid_images(a: &[ImageTensor], b: &[ImageTensor], fx: &FeatureExtractor) -> Result<f64, MetricError> {
    let pooled = |set: &[ImageTensor]| -> Result<Vec<Vec<f64>>, MetricError> {
        set.iter().map(|img| Ok(fx.extract(img)?.pooled())).collect()
    };
    fid(&gaussian_stats(&pooled(a)?)?, &gaussian_stats(&pooled(b)?)?)
}
