//! Super-resolution network topologies, training data and the upscale entry
//! point.

mod espcn;
mod patches;
mod srgan;
mod train;

pub use espcn::{build_espcn, EspcnConfig, HiddenActivation, ESPCN_FEATURES, ESPCN_KERNELS};
pub use patches::{extract_training_patches, patch_strides, PatchPair, PATCH};
pub use srgan::{build_srgan_discriminator, build_srgan_generator, generator_node_count, DISCRIMINATOR_WIDTHS};
pub use train::{dataset_loss, train_espcn, EpochRecord, Optimizer, StopReason, TrainConfig, TrainOutcome};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::convnet::{ConvnetError, ModelBundle, Tensor};
use crate::image::{rgb_to_ycbcr, ycbcr_to_rgb, ImageTensor};
use crate::resample::upscale_bicubic;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("unsupported upscale factor {0}")]
    UnsupportedFactor(usize),
    #[error("no training patches")]
    EmptyDataset,
    #[error("training loss became non-finite at epoch {epoch}")]
    DivergedLoss { epoch: usize },
    #[error("weights do not match the network: {0}")]
    WeightMismatch(String),
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Network(#[from] ConvnetError),
}

/// Which channels the network sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InputMode {
    /// Network upscales Y; chroma is upscaled bicubically.
    #[default]
    Luma,
    /// Network consumes and produces all three colour channels.
    Rgb,
}

impl InputMode {
    pub fn channels(self) -> usize {
        match self {
            InputMode::Luma => 1,
            InputMode::Rgb => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            InputMode::Luma => "luma",
            InputMode::Rgb => "rgb",
        }
    }
}

impl std::str::FromStr for InputMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "luma" | "y" => Ok(InputMode::Luma),
            "rgb" => Ok(InputMode::Rgb),
            other => Err(format!("unknown input mode {other:?} (luma|rgb)")),
        }
    }
}

fn run_network(bundle: &ModelBundle, img: &ImageTensor) -> Result<ImageTensor, ModelError> {
    let out = bundle.run(&Tensor::from_image(img))?;
    Ok(out[0].to_image()?)
}

/// Upscales `img` by `factor` with a trained network. In luma mode, colour
/// images are split into YCbCr; only Y goes through the network.
pub fn upscale(img: &ImageTensor, bundle: &ModelBundle, factor: usize, mode: InputMode) -> Result<ImageTensor, ModelError> {
    let expected = mode.channels();
    if bundle.spec.input_channels != expected {
        return Err(ModelError::WeightMismatch(format!(
            "{} mode needs a {expected}-channel network, bundle {:?} takes {}",
            mode.name(),
            bundle.spec.name,
            bundle.spec.input_channels
        )));
    }
    let out = match (mode, img.channels()) {
        (InputMode::Luma, 3) => {
            let [y, cb, cr] = rgb_to_ycbcr(img).expect("3-channel input");
            let y_up = run_network(bundle, &y)?;
            let cb_up = upscale_bicubic(&cb, factor).expect("factor ≥ 1");
            let cr_up = upscale_bicubic(&cr, factor).expect("factor ≥ 1");
            check_dims(&y_up, &cb_up)?;
            ycbcr_to_rgb(&y_up, &cb_up, &cr_up).expect("planes checked")
        }
        (InputMode::Luma, 1) | (InputMode::Rgb, 3) => run_network(bundle, img)?,
        (_, c) => {
            return Err(ModelError::WeightMismatch(format!(
                "{}-channel image cannot be upscaled in {} mode",
                c,
                mode.name()
            )))
        }
    };
    if out.height() != img.height() * factor || out.width() != img.width() * factor {
        return Err(ModelError::WeightMismatch(format!(
            "network produced {}x{}, expected x{factor} of {}x{}",
            out.height(),
            out.width(),
            img.height(),
            img.width()
        )));
    }
    Ok(out)
}

fn check_dims(a: &ImageTensor, b: &ImageTensor) -> Result<(), ModelError> {
    if a.dims() != b.dims() {
        return Err(ModelError::WeightMismatch(format!(
            "network output {:?} differs from bicubic chroma {:?}",
            a.dims(),
            b.dims()
        )));
    }
    Ok(())
}

/// A ready-to-run upscaling method.
#[derive(Debug, Clone)]
pub enum Upscaler {
    Bicubic { factor: usize },
    Network { bundle: ModelBundle, factor: usize, mode: InputMode },
}

impl Upscaler {
    pub fn factor(&self) -> usize {
        match self {
            Upscaler::Bicubic { factor } | Upscaler::Network { factor, .. } => *factor,
        }
    }

    pub fn upscale(&self, img: &ImageTensor) -> Result<ImageTensor, ModelError> {
        match self {
            Upscaler::Bicubic { factor } => {
                upscale_bicubic(img, *factor).map_err(|e| ModelError::InvalidConfig(e.to_string()))
            }
            Upscaler::Network { bundle, factor, mode } => upscale(img, bundle, *factor, *mode),
        }
    }
}
