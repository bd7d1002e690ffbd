use serde::{Deserialize, Serialize};

use super::InputMode;
use crate::convnet::{NetworkSpec, Node, NodeOp, INPUT};

/// Kernel sizes of the three ESPCN convolutions.
pub const ESPCN_KERNELS: [usize; 3] = [5, 3, 3];
/// Feature maps of the two hidden layers.
pub const ESPCN_FEATURES: [usize; 2] = [64, 32];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum HiddenActivation {
    #[default]
    Tanh,
    Relu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EspcnConfig {
    pub factor: usize,
    pub input_mode: InputMode,
    pub activation: HiddenActivation,
}

impl EspcnConfig {
    pub fn new(factor: usize, input_mode: InputMode) -> Self {
        assert!(factor >= 1, "upscale factor must be ≥ 1");
        Self {
            factor,
            input_mode,
            activation: HiddenActivation::default(),
        }
    }

    pub fn channels(&self) -> usize {
        self.input_mode.channels()
    }
}

/// `conv(5, 64) → act → conv(3, 32) → act → conv(3, c·r²) → shuffle(r)`, all
/// convolutions "same"-padded so the LR grid is preserved until the shuffle.
pub fn build_espcn(cfg: &EspcnConfig) -> NetworkSpec {
    let c = cfg.channels();
    let r = cfg.factor;
    let act = || match cfg.activation {
        HiddenActivation::Tanh => NodeOp::Tanh,
        HiddenActivation::Relu => NodeOp::Relu,
    };
    let conv = |cin, cout, k: usize| NodeOp::Conv2d {
        in_channels: cin,
        out_channels: cout,
        kernel: k,
        stride: 1,
        padding: k / 2,
    };
    let [f1, f2, f3] = ESPCN_KERNELS;
    let [n1, n2] = ESPCN_FEATURES;
    NetworkSpec {
        name: format!("espcn_x{r}_{}", cfg.input_mode.name()),
        input_channels: c,
        nodes: vec![
            Node::new("conv1", conv(c, n1, f1), &[INPUT]),
            Node::new("act1", act(), &["conv1"]),
            Node::new("conv2", conv(n1, n2, f2), &["act1"]),
            Node::new("act2", act(), &["conv2"]),
            Node::new("conv3", conv(n2, c * r * r, f3), &["act2"]),
            Node::new("shuffle", NodeOp::PixelShuffle { factor: r }, &["conv3"]),
        ],
        outputs: vec!["shuffle".into()],
    }
}
