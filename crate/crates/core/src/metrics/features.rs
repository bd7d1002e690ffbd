//! VGG-style feature extraction shared by the deep metrics.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::MetricError;
use crate::convnet::{forward, ModelBundle, NetworkSpec, Node, NodeOp, Tensor, WeightStore, INPUT};
use crate::image::ImageTensor;

/// One stage: `convs` × (3×3 conv + ReLU) at `width` channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub convs: usize,
    pub width: usize,
}

/// Stage layout of the default extractor.
pub const DEFAULT_STAGES: [Stage; 5] = [
    Stage { convs: 2, width: 16 },
    Stage { convs: 2, width: 32 },
    Stage { convs: 2, width: 64 },
    Stage { convs: 2, width: 64 },
    Stage { convs: 2, width: 64 },
];

/// Seed of the shipped random-weight extractor.
pub const DEFAULT_EXTRACTOR_SEED: u64 = 0;

/// A network whose declared outputs are the feature taps. Tap 0 is the raw
/// input and is not part of the network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureExtractorSpec {
    pub network: NetworkSpec,
}

impl FeatureExtractorSpec {
    /// Stages separated by 2×2 max-pooling, tapped after each stage's last
    /// ReLU.
    pub fn vgg(input_channels: usize, stages: &[Stage]) -> Result<Self, MetricError> {
        if stages.is_empty() || stages.iter().any(|s| s.convs == 0 || s.width == 0) {
            return Err(MetricError::InvalidExtractor("need at least one non-empty stage".into()));
        }
        let mut nodes = Vec::new();
        let mut taps = Vec::new();
        let mut prev = INPUT.to_string();
        let mut cin = input_channels;
        for (s, stage) in stages.iter().enumerate() {
            if s > 0 {
                let pool = format!("pool{s}");
                nodes.push(Node::new(&pool, NodeOp::Maxpool2, &[&prev]));
                prev = pool;
            }
            for k in 0..stage.convs {
                let conv = format!("stage{}.conv{}", s + 1, k + 1);
                let relu = format!("stage{}.relu{}", s + 1, k + 1);
                nodes.push(Node::new(
                    &conv,
                    NodeOp::Conv2d {
                        in_channels: cin,
                        out_channels: stage.width,
                        kernel: 3,
                        stride: 1,
                        padding: 1,
                    },
                    &[&prev],
                ));
                nodes.push(Node::new(&relu, NodeOp::Relu, &[&conv]));
                prev = relu;
                cin = stage.width;
            }
            taps.push(prev.clone());
        }
        let spec = Self {
            network: NetworkSpec {
                name: format!("vgg{}", stages.len()),
                input_channels,
                nodes,
                outputs: taps,
            },
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn default_for(input_channels: usize) -> Self {
        Self::vgg(input_channels, &DEFAULT_STAGES).expect("default stages are valid")
    }

    pub fn validate(&self) -> Result<(), MetricError> {
        self.network.validate()?;
        if self.network.outputs.is_empty() {
            return Err(MetricError::InvalidExtractor("an extractor needs at least one tap beyond the input".into()));
        }
        Ok(())
    }

    /// Number of taps including the input.
    pub fn tap_count(&self) -> usize {
        self.network.outputs.len() + 1
    }

    /// Channel count per tap, input first.
    pub fn tap_channels(&self) -> Vec<usize> {
        let counts = self.network.channel_counts();
        std::iter::once(self.network.input_channels)
            .chain(self.network.outputs.iter().map(|o| {
                let i = self.network.node_index(o).expect("validated output");
                counts[i]
            }))
            .collect()
    }
}

/// Extractor spec together with its weights.
#[derive(Debug, Clone)]
pub struct FeatureExtractor {
    pub spec: FeatureExtractorSpec,
    pub weights: WeightStore,
}

impl FeatureExtractor {
    pub fn new(spec: FeatureExtractorSpec, weights: WeightStore) -> Result<Self, MetricError> {
        spec.validate()?;
        spec.network
            .check_weights(&weights)
            .map_err(|e| MetricError::WeightMismatch(e.to_string()))?;
        Ok(Self { spec, weights })
    }

    /// The default layout with seeded He-normal weights.
    pub fn random(input_channels: usize, seed: u64) -> Self {
        let spec = FeatureExtractorSpec::default_for(input_channels);
        let weights = spec.network.init_weights(seed);
        Self { spec, weights }
    }

    pub fn shipped() -> Self {
        Self::random(3, DEFAULT_EXTRACTOR_SEED)
    }

    pub fn load(stem: &Path) -> Result<Self, MetricError> {
        let bundle = ModelBundle::load(stem)?;
        Self::new(FeatureExtractorSpec { network: bundle.spec }, bundle.weights)
    }

    pub fn save(&self, stem: &Path) -> Result<(), MetricError> {
        ModelBundle::new(self.spec.network.clone(), self.weights.clone())?.save(stem)?;
        Ok(())
    }

    pub fn input_channels(&self) -> usize {
        self.spec.network.input_channels
    }

    /// Feature maps for one image, tap 0 being the input itself. Grey images
    /// are replicated when the extractor expects colour.
    pub fn extract(&self, img: &ImageTensor) -> Result<FeatureMaps, MetricError> {
        let input = self.adapt(img)?;
        let run = forward(&self.spec.network, &self.weights, &input, false)?;
        let mut maps = Vec::with_capacity(run.outputs.len() + 1);
        maps.push(input);
        maps.extend(run.outputs);
        Ok(FeatureMaps(maps))
    }

    fn adapt(&self, img: &ImageTensor) -> Result<Tensor, MetricError> {
        let want = self.input_channels();
        match img.channels() {
            c if c == want => Ok(Tensor::from_image(img)),
            1 => Ok(Tensor::from_image(&ImageTensor::stack(&vec![img.clone(); want]).expect("same dims"))),
            c => Err(MetricError::DimMismatch(format!("extractor takes {want} channels, image has {c}"))),
        }
    }
}

/// Activations at each tap, input first.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMaps(pub Vec<Tensor>);

impl FeatureMaps {
    pub fn taps(&self) -> &[Tensor] {
        &self.0
    }

    /// Global spatial mean of the deepest tap.
    pub fn pooled(&self) -> Vec<f64> {
        let last = self.0.last().expect("at least the input tap");
        let (c, h, w) = last.chw().expect("rank-3 activations");
        let n = (h * w) as f64;
        (0..c)
            .map(|k| last.values()[k * h * w..(k + 1) * h * w].iter().sum::<f64>() / n)
            .collect()
    }
}

/// Convenience wrapper used by the metric functions.
pub fn extract_features(img: &ImageTensor, extractor: &FeatureExtractor) -> Result<FeatureMaps, MetricError> {
    extractor.extract(img)
}
