//! SRGAN generator and discriminator graphs (inference only).

use super::ModelError;
use crate::convnet::{NetworkSpec, Node, NodeOp, INPUT};

const FEATURES: usize = 64;
const LEAKY_SLOPE: f64 = 0.2;

/// Conv widths of the discriminator, doubling every second layer.
pub const DISCRIMINATOR_WIDTHS: [usize; 8] = [64, 64, 128, 128, 256, 256, 512, 512];
const DISCRIMINATOR_HIDDEN: usize = 1024;

fn conv(cin: usize, cout: usize, kernel: usize, stride: usize) -> NodeOp {
    NodeOp::Conv2d {
        in_channels: cin,
        out_channels: cout,
        kernel,
        stride,
        padding: kernel / 2,
    }
}

fn bn(channels: usize) -> NodeOp {
    NodeOp::BatchnormInference { channels, eps: 1e-5 }
}

/// Number of nodes [`build_srgan_generator`] emits.
pub fn generator_node_count(residual_blocks: usize, factor: usize) -> usize {
    let stages = factor.trailing_zeros() as usize;
    // head (2) + blocks (6 each) + trunk skip (3) + upsampling (3 each) + output conv
    2 + 6 * residual_blocks + 3 + 3 * stages + 1
}

/// ResNet generator: 9×9 head conv + PReLU, `residual_blocks` ×
/// (conv-BN-PReLU-conv-BN + skip), trunk conv-BN with a global skip, one
/// conv + shuffle(2) + PReLU stage per doubling, then a 9×9 output conv.
pub fn build_srgan_generator(residual_blocks: usize, factor: usize, channels: usize) -> Result<NetworkSpec, ModelError> {
    if !matches!(factor, 2 | 4) {
        return Err(ModelError::UnsupportedFactor(factor));
    }
    let mut nodes = vec![
        Node::new("head.conv", conv(channels, FEATURES, 9, 1), &[INPUT]),
        Node::new("head.act", NodeOp::Prelu { channels: FEATURES }, &["head.conv"]),
    ];
    let mut prev = "head.act".to_string();
    for b in 0..residual_blocks {
        let n = |s: &str| format!("block{b}.{s}");
        nodes.push(Node::new(n("conv1"), conv(FEATURES, FEATURES, 3, 1), &[&prev]));
        nodes.push(Node::new(n("bn1"), bn(FEATURES), &[&n("conv1")]));
        nodes.push(Node::new(n("act"), NodeOp::Prelu { channels: FEATURES }, &[&n("bn1")]));
        nodes.push(Node::new(n("conv2"), conv(FEATURES, FEATURES, 3, 1), &[&n("act")]));
        nodes.push(Node::new(n("bn2"), bn(FEATURES), &[&n("conv2")]));
        nodes.push(Node::new(n("add"), NodeOp::Add, &[&n("bn2"), &prev]));
        prev = n("add");
    }
    nodes.push(Node::new("trunk.conv", conv(FEATURES, FEATURES, 3, 1), &[&prev]));
    nodes.push(Node::new("trunk.bn", bn(FEATURES), &["trunk.conv"]));
    nodes.push(Node::new("trunk.add", NodeOp::Add, &["trunk.bn", "head.act"]));
    prev = "trunk.add".into();
    for s in 0..factor.trailing_zeros() {
        let n = |x: &str| format!("up{s}.{x}");
        nodes.push(Node::new(n("conv"), conv(FEATURES, FEATURES * 4, 3, 1), &[&prev]));
        nodes.push(Node::new(n("shuffle"), NodeOp::PixelShuffle { factor: 2 }, &[&n("conv")]));
        nodes.push(Node::new(n("act"), NodeOp::Prelu { channels: FEATURES }, &[&n("shuffle")]));
        prev = n("act");
    }
    nodes.push(Node::new("output.conv", conv(FEATURES, channels, 9, 1), &[&prev]));
    Ok(NetworkSpec {
        name: format!("srgan_generator_b{residual_blocks}_x{factor}"),
        input_channels: channels,
        nodes,
        outputs: vec!["output.conv".into()],
    })
}

/// Eight 3×3 convs (stride 2 on every second one) with LeakyReLU(0.2) and
/// batch norm after all but the first, then global pooling, two dense
/// layers and a sigmoid. Besides the probability, the last conv activation
/// is exposed as a second output.
pub fn build_srgan_discriminator(channels: usize) -> NetworkSpec {
    let mut nodes = Vec::new();
    let mut prev = INPUT.to_string();
    let mut cin = channels;
    for (i, &width) in DISCRIMINATOR_WIDTHS.iter().enumerate() {
        let stride = if i % 2 == 1 { 2 } else { 1 };
        let n = |s: &str| format!("conv{}.{s}", i + 1);
        nodes.push(Node::new(n("conv"), conv(cin, width, 3, stride), &[&prev]));
        prev = n("conv");
        if i > 0 {
            nodes.push(Node::new(n("bn"), bn(width), &[&prev]));
            prev = n("bn");
        }
        nodes.push(Node::new(n("act"), NodeOp::LeakyRelu { slope: LEAKY_SLOPE }, &[&prev]));
        prev = n("act");
        cin = width;
    }
    let features = prev.clone();
    nodes.push(Node::new("pool", NodeOp::GlobalMean, &[&features]));
    nodes.push(Node::new(
        "dense1",
        NodeOp::Dense {
            in_features: cin,
            out_features: DISCRIMINATOR_HIDDEN,
        },
        &["pool"],
    ));
    nodes.push(Node::new("dense1.act", NodeOp::LeakyRelu { slope: LEAKY_SLOPE }, &["dense1"]));
    nodes.push(Node::new(
        "dense2",
        NodeOp::Dense {
            in_features: DISCRIMINATOR_HIDDEN,
            out_features: 1,
        },
        &["dense1.act"],
    ));
    nodes.push(Node::new("prob", NodeOp::Sigmoid, &["dense2"]));
    NetworkSpec {
        name: "srgan_discriminator".into(),
        input_channels: channels,
        nodes,
        outputs: vec!["prob".into(), features],
    }
}
