//! Network description: an ordered DAG of named layer nodes.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{ConvnetError, Tensor, WeightStore};

/// Name by which nodes refer to the network input.
pub const INPUT: &str = "input";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum NodeOp {
    Conv2d {
        in_channels: usize,
        out_channels: usize,
        kernel: usize,
        #[serde(default = "one")]
        stride: usize,
        #[serde(default)]
        padding: usize,
    },
    Prelu {
        channels: usize,
    },
    LeakyRelu {
        slope: f64,
    },
    Relu,
    Tanh,
    Sigmoid,
    BatchnormInference {
        channels: usize,
        #[serde(default = "bn_eps")]
        eps: f64,
    },
    PixelShuffle {
        factor: usize,
    },
    Add,
    Maxpool2,
    GlobalMean,
    Dense {
        in_features: usize,
        out_features: usize,
    },
}

fn one() -> usize {
    1
}

fn bn_eps() -> f64 {
    1e-5
}

impl NodeOp {
    pub fn kind(&self) -> &'static str {
        match self {
            NodeOp::Conv2d { .. } => "conv2d",
            NodeOp::Prelu { .. } => "prelu",
            NodeOp::LeakyRelu { .. } => "leaky_relu",
            NodeOp::Relu => "relu",
            NodeOp::Tanh => "tanh",
            NodeOp::Sigmoid => "sigmoid",
            NodeOp::BatchnormInference { .. } => "batchnorm_inference",
            NodeOp::PixelShuffle { .. } => "pixel_shuffle",
            NodeOp::Add => "add",
            NodeOp::Maxpool2 => "maxpool2",
            NodeOp::GlobalMean => "global_mean",
            NodeOp::Dense { .. } => "dense",
        }
    }

    fn arity(&self) -> usize {
        if matches!(self, NodeOp::Add) {
            2
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub name: String,
    #[serde(flatten)]
    pub op: NodeOp,
    pub inputs: Vec<String>,
    /// Frozen nodes contribute no parameter gradients.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub frozen: bool,
}

impl Node {
    pub fn new(name: impl Into<String>, op: NodeOp, inputs: &[&str]) -> Self {
        Self {
            name: name.into(),
            op,
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            frozen: false,
        }
    }
}

/// Role of a named parameter tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamRole {
    Trainable,
    /// Stored statistics (batch-norm running mean/variance).
    Buffer,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpec {
    pub name: String,
    pub dims: Vec<usize>,
    pub role: ParamRole,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSpec {
    pub name: String,
    pub input_channels: usize,
    pub nodes: Vec<Node>,
    pub outputs: Vec<String>,
}

impl NetworkSpec {
    pub fn from_json(text: &str) -> Result<Self, ConvnetError> {
        let spec: NetworkSpec =
            serde_json::from_str(text).map_err(|e| ConvnetError::InvalidSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn node(&self, name: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.name == name)
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.name == name)
    }

    /// Checks names, ordering (which implies acyclicity), arity and channel
    /// counts along every edge.
    pub fn validate(&self) -> Result<(), ConvnetError> {
        let invalid = |msg: String| Err(ConvnetError::InvalidSpec(msg));
        if self.input_channels == 0 {
            return invalid("input_channels must be ≥ 1".into());
        }
        let mut channels: HashMap<&str, usize> = HashMap::from([(INPUT, self.input_channels)]);
        for node in &self.nodes {
            if channels.contains_key(node.name.as_str()) {
                return invalid(format!("duplicate or reserved node name {:?}", node.name));
            }
            if node.inputs.len() != node.op.arity() {
                return invalid(format!(
                    "node {:?} ({}) takes {} inputs, has {}",
                    node.name,
                    node.op.kind(),
                    node.op.arity(),
                    node.inputs.len()
                ));
            }
            let mut ins = Vec::with_capacity(node.inputs.len());
            for i in &node.inputs {
                match channels.get(i.as_str()) {
                    Some(&c) => ins.push(c),
                    None => {
                        return invalid(format!(
                            "node {:?} reads {i:?}, which is not an earlier node",
                            node.name
                        ))
                    }
                }
            }
            let c = ins[0];
            let mismatch = |want: usize| {
                Err(ConvnetError::ShapeMismatch {
                    node: node.name.clone(),
                    detail: format!("expects {want} input channels, receives {c}"),
                })
            };
            let out = match &node.op {
                NodeOp::Conv2d {
                    in_channels,
                    out_channels,
                    kernel,
                    stride,
                    ..
                } => {
                    if *in_channels != c {
                        return mismatch(*in_channels);
                    }
                    if *kernel == 0 || *stride == 0 || *out_channels == 0 {
                        return invalid(format!("node {:?}: zero kernel/stride/channels", node.name));
                    }
                    *out_channels
                }
                NodeOp::Prelu { channels } | NodeOp::BatchnormInference { channels, .. } => {
                    if *channels != c {
                        return mismatch(*channels);
                    }
                    c
                }
                NodeOp::PixelShuffle { factor } => {
                    if *factor == 0 || c % (factor * factor) != 0 {
                        return Err(ConvnetError::ChannelNotDivisible {
                            channels: c,
                            factor: *factor,
                        });
                    }
                    c / (factor * factor)
                }
                NodeOp::Add => {
                    if ins[1] != c {
                        return mismatch(ins[1]);
                    }
                    c
                }
                NodeOp::Dense { out_features, .. } => *out_features,
                NodeOp::LeakyRelu { .. }
                | NodeOp::Relu
                | NodeOp::Tanh
                | NodeOp::Sigmoid
                | NodeOp::Maxpool2
                | NodeOp::GlobalMean => c,
            };
            channels.insert(node.name.as_str(), out);
        }
        if self.outputs.is_empty() {
            return invalid("network has no outputs".into());
        }
        for o in &self.outputs {
            if !channels.contains_key(o.as_str()) {
                return invalid(format!("output {o:?} is not a node"));
            }
        }
        Ok(())
    }

    /// Channel count produced by each node, in node order.
    pub fn channel_counts(&self) -> Vec<usize> {
        let mut by_name: HashMap<&str, usize> = HashMap::from([(INPUT, self.input_channels)]);
        let mut out = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let c = by_name[node.inputs[0].as_str()];
            let k = match &node.op {
                NodeOp::Conv2d { out_channels, .. } => *out_channels,
                NodeOp::PixelShuffle { factor } => c / (factor * factor),
                NodeOp::Dense { out_features, .. } => *out_features,
                _ => c,
            };
            by_name.insert(node.name.as_str(), k);
            out.push(k);
        }
        out
    }

    /// Every parameter tensor the network reads, in node order.
    pub fn params(&self) -> Vec<ParamSpec> {
        let mut out = Vec::new();
        let mut push = |node: &str, suffix: &str, dims: Vec<usize>, role| {
            out.push(ParamSpec {
                name: format!("{node}.{suffix}"),
                dims,
                role,
            })
        };
        for node in &self.nodes {
            let n = node.name.as_str();
            match &node.op {
                NodeOp::Conv2d {
                    in_channels,
                    out_channels,
                    kernel,
                    ..
                } => {
                    push(n, "weight", vec![*out_channels, *in_channels, *kernel, *kernel], ParamRole::Trainable);
                    push(n, "bias", vec![*out_channels], ParamRole::Trainable);
                }
                NodeOp::Prelu { channels } => push(n, "slope", vec![*channels], ParamRole::Trainable),
                NodeOp::BatchnormInference { channels, .. } => {
                    push(n, "gamma", vec![*channels], ParamRole::Trainable);
                    push(n, "beta", vec![*channels], ParamRole::Trainable);
                    push(n, "running_mean", vec![*channels], ParamRole::Buffer);
                    push(n, "running_var", vec![*channels], ParamRole::Buffer);
                }
                NodeOp::Dense {
                    in_features,
                    out_features,
                } => {
                    push(n, "weight", vec![*out_features, *in_features], ParamRole::Trainable);
                    push(n, "bias", vec![*out_features], ParamRole::Trainable);
                }
                _ => {}
            }
        }
        out
    }

    /// Total number of scalar parameters (trainable and buffers).
    pub fn parameter_count(&self) -> usize {
        self.params().iter().map(|p| p.dims.iter().product::<usize>()).sum()
    }

    /// Verifies that `weights` holds every parameter with matching dims.
    pub fn check_weights(&self, weights: &WeightStore) -> Result<(), ConvnetError> {
        for p in self.params() {
            let t = weights
                .get(&p.name)
                .ok_or_else(|| ConvnetError::MissingWeight(p.name.clone()))?;
            if t.dims() != p.dims.as_slice() {
                return Err(ConvnetError::ShapeMismatch {
                    node: p.name.clone(),
                    detail: format!("weight dims {:?}, expected {:?}", t.dims(), p.dims),
                });
            }
        }
        Ok(())
    }

    /// He-normal conv/dense weights, zero biases, PReLU slopes of 0.25 and
    /// identity batch-norm statistics. Values are rounded to `f32`.
    pub fn init_weights(&self, seed: u64) -> WeightStore {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut store = WeightStore::new();
        for p in self.params() {
            let n: usize = p.dims.iter().product();
            let suffix = p.name.rsplit('.').next().unwrap_or_default();
            let values = match suffix {
                "weight" => {
                    let fan_in: usize = p.dims[1..].iter().product();
                    let normal = Normal::new(0.0, (2.0 / fan_in as f64).sqrt()).expect("finite std");
                    (0..n).map(|_| normal.sample(&mut rng)).collect()
                }
                "slope" => vec![0.25; n],
                "gamma" | "running_var" => vec![1.0; n],
                _ => vec![0.0; n],
            };
            let mut t = Tensor::from_parts(p.dims.clone(), values);
            t.round_to_f32();
            store.insert(p.name, t);
        }
        store
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> NetworkSpec {
        NetworkSpec {
            name: "tiny".into(),
            input_channels: 1,
            nodes: vec![
                Node::new(
                    "conv1",
                    NodeOp::Conv2d {
                        in_channels: 1,
                        out_channels: 4,
                        kernel: 3,
                        stride: 1,
                        padding: 1,
                    },
                    &[INPUT],
                ),
                Node::new("act1", NodeOp::Prelu { channels: 4 }, &["conv1"]),
                Node::new("up", NodeOp::PixelShuffle { factor: 2 }, &["act1"]),
            ],
            outputs: vec!["up".into()],
        }
    }

    #[test]
    fn json_round_trip() {
        let spec = tiny();
        let back = NetworkSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(back, spec);
        assert!(spec.to_json().contains("\"op\": \"pixel_shuffle\""));
    }

    #[test]
    fn rejects_forward_reference() {
        let mut spec = tiny();
        spec.nodes.swap(0, 1);
        assert!(matches!(spec.validate(), Err(ConvnetError::InvalidSpec(_))));
    }

    #[test]
    fn rejects_channel_mismatch() {
        let mut spec = tiny();
        spec.nodes[1].op = NodeOp::Prelu { channels: 3 };
        assert!(matches!(spec.validate(), Err(ConvnetError::ShapeMismatch { .. })));
    }

    #[test]
    fn params_and_init() {
        let spec = tiny();
        let names: Vec<_> = spec.params().into_iter().map(|p| p.name).collect();
        assert_eq!(names, ["conv1.weight", "conv1.bias", "act1.slope"]);
        let w = spec.init_weights(7);
        spec.check_weights(&w).unwrap();
        assert_eq!(w, spec.init_weights(7));
        assert_eq!(spec.parameter_count(), 36 + 4 + 4);
    }
}
