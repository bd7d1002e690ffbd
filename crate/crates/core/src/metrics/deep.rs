//! LPIPS-style and DISTS similarities over extractor feature maps.

use super::features::{FeatureExtractor, FeatureMaps};
use super::MetricError;
use crate::convnet::{Tensor, WeightStore};
use crate::image::ImageTensor;

const NORM_EPS: f64 = 1e-10;
/// Stabilisers of the DISTS texture and structure terms.
pub const DISTS_C1: f64 = 1e-6;
pub const DISTS_C2: f64 = 1e-6;

fn check_pair(a: &FeatureMaps, b: &FeatureMaps) -> Result<(), MetricError> {
    let same = a.taps().len() == b.taps().len() && a.taps().iter().zip(b.taps()).all(|(x, y)| x.dims() == y.dims());
    if !same {
        return Err(MetricError::DimMismatch("feature maps differ in shape".into()));
    }
    Ok(())
}

/// Per-channel LPIPS weights for each non-input tap.
#[derive(Debug, Clone, PartialEq)]
pub struct LpipsWeights(pub Vec<Vec<f64>>);

impl LpipsWeights {
    /// All ones for the given per-tap channel counts (input tap excluded).
    pub fn unit(channels: &[usize]) -> Self {
        Self(channels.iter().map(|&c| vec![1.0; c]).collect())
    }

    pub fn for_extractor(fx: &FeatureExtractor) -> Self {
        Self::unit(&fx.spec.tap_channels()[1..])
    }

    /// Reads `lpips.{tap}` vectors (tap counted from 1) out of a weight store.
    pub fn from_store(store: &WeightStore, taps: usize) -> Result<Self, MetricError> {
        (1..=taps)
            .map(|t| {
                store
                    .get(&format!("lpips.{t}"))
                    .map(|w| w.values().to_vec())
                    .ok_or_else(|| MetricError::WeightShapeMismatch(format!("missing lpips.{t}")))
            })
            .collect::<Result<_, _>>()
            .map(Self)
    }
}

fn unit_normalise(t: &Tensor) -> (usize, usize, Vec<f64>) {
    let (c, h, w) = t.chw().expect("rank-3 activations");
    let hw = h * w;
    let v = t.values();
    let mut out = v.to_vec();
    for p in 0..hw {
        let norm = (0..c).map(|k| v[k * hw + p] * v[k * hw + p]).sum::<f64>().sqrt() + NORM_EPS;
        for k in 0..c {
            out[k * hw + p] /= norm;
        }
    }
    (c, hw, out)
}

/// LPIPS distance over the non-input taps of two feature stacks: channel
/// vectors are unit-normalised per position, squared differences weighted
/// per channel, averaged spatially, summed over channels and taps.
pub fn lpips_distance(a: &FeatureMaps, b: &FeatureMaps, weights: &LpipsWeights) -> Result<f64, MetricError> {
    check_pair(a, b)?;
    let taps = &a.taps()[1..];
    if weights.0.len() != taps.len() {
        return Err(MetricError::WeightShapeMismatch(format!(
            "{} weight vectors for {} taps",
            weights.0.len(),
            taps.len()
        )));
    }
    let mut dist = 0.0;
    for ((ta, tb), w) in taps.iter().zip(&b.taps()[1..]).zip(&weights.0) {
        let (c, hw, na) = unit_normalise(ta);
        let (_, _, nb) = unit_normalise(tb);
        if w.len() != c {
            return Err(MetricError::WeightShapeMismatch(format!("{} weights for {c} channels", w.len())));
        }
        for (k, wk) in w.iter().enumerate() {
            let sq: f64 = na[k * hw..(k + 1) * hw]
                .iter()
                .zip(&nb[k * hw..(k + 1) * hw])
                .map(|(x, y)| (x - y) * (x - y))
                .sum();
            dist += wk * sq / hw as f64;
        }
    }
    Ok(dist)
}

/// `1 − LPIPS distance`; 1 for identical inputs.
pub fn lpips_score(x: &ImageTensor, y: &ImageTensor, fx: &FeatureExtractor, weights: &LpipsWeights) -> Result<f64, MetricError> {
    Ok(1.0 - lpips_distance(&fx.extract(x)?, &fx.extract(y)?, weights)?)
}

/// DISTS texture (`alpha`) and structure (`beta`) weights, one per channel
/// of every tap including the input.
#[derive(Debug, Clone, PartialEq)]
pub struct DistsWeights {
    pub alpha: Vec<Vec<f64>>,
    pub beta: Vec<Vec<f64>>,
}

impl DistsWeights {
    /// `1 / (2 · total maps)` everywhere.
    pub fn uniform(channels: &[usize]) -> Self {
        let total: usize = channels.iter().sum();
        let v = 1.0 / (2 * total) as f64;
        let per = channels.iter().map(|&c| vec![v; c]).collect::<Vec<_>>();
        Self {
            alpha: per.clone(),
            beta: per,
        }
    }

    pub fn for_extractor(fx: &FeatureExtractor) -> Self {
        Self::uniform(&fx.spec.tap_channels())
    }

    /// Reads `dists.alpha.{tap}` / `dists.beta.{tap}` (tap 0 = input).
    pub fn from_store(store: &WeightStore, taps: usize) -> Result<Self, MetricError> {
        let read = |kind: &str| {
            (0..taps)
                .map(|t| {
                    store
                        .get(&format!("dists.{kind}.{t}"))
                        .map(|w| w.values().to_vec())
                        .ok_or_else(|| MetricError::WeightShapeMismatch(format!("missing dists.{kind}.{t}")))
                })
                .collect::<Result<Vec<_>, _>>()
        };
        let w = Self {
            alpha: read("alpha")?,
            beta: read("beta")?,
        };
        w.check_sum()?;
        Ok(w)
    }

    fn check_sum(&self) -> Result<(), MetricError> {
        let total: f64 = self.alpha.iter().chain(&self.beta).flatten().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(MetricError::WeightNormalization(total));
        }
        Ok(())
    }
}

/// Population mean, variance and covariance of two equally sized slices.
pub(crate) fn global_moments(x: &[f64], y: &[f64]) -> (f64, f64, f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut vx, mut vy, mut cxy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        vx += da * da;
        vy += db * db;
        cxy += da * db;
    }
    (mx, my, vx / n, vy / n, cxy / n)
}

/// DISTS distance between two feature stacks.
pub fn dists_distance(a: &FeatureMaps, b: &FeatureMaps, weights: &DistsWeights) -> Result<f64, MetricError> {
    check_pair(a, b)?;
    weights.check_sum()?;
    if weights.alpha.len() != a.taps().len() || weights.beta.len() != a.taps().len() {
        return Err(MetricError::WeightShapeMismatch(format!(
            "{}/{} weight vectors for {} taps",
            weights.alpha.len(),
            weights.beta.len(),
            a.taps().len()
        )));
    }
    let mut sim = 0.0;
    for (t, (ta, tb)) in a.taps().iter().zip(b.taps()).enumerate() {
        let (c, h, w) = ta.chw()?;
        let hw = h * w;
        let (al, be) = (&weights.alpha[t], &weights.beta[t]);
        if al.len() != c || be.len() != c {
            return Err(MetricError::WeightShapeMismatch(format!("tap {t} has {c} maps")));
        }
        for k in 0..c {
            let (mx, my, vx, vy, cxy) = global_moments(&ta.values()[k * hw..(k + 1) * hw], &tb.values()[k * hw..(k + 1) * hw]);
            let texture = (2.0 * mx * my + DISTS_C1) / (mx * mx + my * my + DISTS_C1);
            let structure = (2.0 * cxy + DISTS_C2) / (vx + vy + DISTS_C2);
            sim += al[k] * texture + be[k] * structure;
        }
    }
    Ok(1.0 - sim)
}

/// `1 − DISTS distance`; 1 for identical inputs.
pub fn dists_score(x: &ImageTensor, y: &ImageTensor, fx: &FeatureExtractor, weights: &DistsWeights) -> Result<f64, MetricError> {
    Ok(1.0 - dists_distance(&fx.extract(x)?, &fx.extract(y)?, weights)?)
}
