//! Small CPU convolutional network engine: graph description, inference,
//! reverse-mode gradients and the `NNWB` weight container.

mod engine;
mod graph;
pub mod ops;
mod tensor;
mod weights;

pub use engine::{forward, Forward, Gradients, Tape};
pub use graph::{NetworkSpec, Node, NodeOp, ParamRole, ParamSpec, INPUT};
pub use ops::{apply_activation, conv2d, pixel_shuffle, pixel_unshuffle, ActivationKind};
pub use tensor::Tensor;
pub use weights::WeightStore;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::image::ImageTensor;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConvnetError {
    #[error("shape mismatch at {node:?}: {detail}")]
    ShapeMismatch { node: String, detail: String },
    #[error("convolution produces an empty output")]
    EmptyOutput,
    #[error("{channels} channels not divisible by shuffle factor² ({factor}²)")]
    ChannelNotDivisible { channels: usize, factor: usize },
    #[error("activation slope has {found} values, expected {expected}")]
    SlopeShapeMismatch { expected: usize, found: usize },
    #[error("missing weight {0:?}")]
    MissingWeight(String),
    #[error("backward requires a forward pass recorded with a tape")]
    NoTape,
    #[error("bad magic: not an NNWB weight file")]
    BadMagic,
    #[error("unsupported NNWB version {0}")]
    VersionUnsupported(u32),
    #[error("weight file header truncated")]
    TruncatedHeader,
    #[error("weight file truncated inside tensor {0:?}")]
    TruncatedTensor(String),
    #[error("duplicate tensor name {0:?}")]
    DuplicateName(String),
    #[error("invalid tensor: {0}")]
    InvalidTensor(String),
    #[error("invalid network spec: {0}")]
    InvalidSpec(String),
    #[error("io: {0}")]
    Io(String),
}

impl Tensor {
    /// `[C, H, W]` view of an image.
    pub fn from_image(img: &ImageTensor) -> Tensor {
        Tensor::from_parts(vec![img.channels(), img.height(), img.width()], img.samples().to_vec())
    }

    /// Clamps a `[C, H, W]` tensor into an image.
    pub fn to_image(&self) -> Result<ImageTensor, ConvnetError> {
        let (c, h, w) = self.chw()?;
        Ok(ImageTensor::from_clamped(c, h, w, self.values().to_vec()))
    }
}

/// A network spec paired with its weights; on disk `<stem>.json` + `<stem>.nnwb`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelBundle {
    pub spec: NetworkSpec,
    pub weights: WeightStore,
}

impl ModelBundle {
    pub fn new(spec: NetworkSpec, weights: WeightStore) -> Result<Self, ConvnetError> {
        spec.validate()?;
        spec.check_weights(&weights)?;
        Ok(Self { spec, weights })
    }

    pub fn paths(stem: &Path) -> (PathBuf, PathBuf) {
        (stem.with_extension("json"), stem.with_extension("nnwb"))
    }

    pub fn load(stem: &Path) -> Result<Self, ConvnetError> {
        let (json, nnwb) = Self::paths(stem);
        let text = std::fs::read_to_string(&json).map_err(|e| ConvnetError::Io(format!("{}: {e}", json.display())))?;
        Self::new(NetworkSpec::from_json(&text)?, WeightStore::load(&nnwb)?)
    }

    pub fn save(&self, stem: &Path) -> Result<(), ConvnetError> {
        let (json, nnwb) = Self::paths(stem);
        std::fs::write(&json, self.spec.to_json()).map_err(|e| ConvnetError::Io(format!("{}: {e}", json.display())))?;
        self.weights.save(&nnwb)
    }

    pub fn run(&self, input: &Tensor) -> Result<Vec<Tensor>, ConvnetError> {
        Ok(forward(&self.spec, &self.weights, input, false)?.outputs)
    }
}
