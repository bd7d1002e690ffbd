//! Topological evaluation and reverse-mode differentiation.

use std::collections::HashMap;

use super::graph::{NetworkSpec, Node, NodeOp, ParamRole, INPUT};
use super::ops::{self, ActivationKind, BatchNormParams};
use super::{ConvnetError, Tensor, WeightStore};

/// Result of [`forward`]: one tensor per declared output, plus the tape when
/// recording was requested.
pub struct Forward<'a> {
    pub outputs: Vec<Tensor>,
    tape: Option<Tape<'a>>,
}

/// Per-node activations kept for the backward pass.
pub struct Tape<'a> {
    spec: &'a NetworkSpec,
    weights: &'a WeightStore,
    input: Tensor,
    activations: Vec<Tensor>,
    pool_indices: Vec<Option<Vec<usize>>>,
}

/// Gradients with respect to trainable parameters of non-frozen nodes and
/// with respect to the network input.
#[derive(Debug, Clone)]
pub struct Gradients {
    pub params: WeightStore,
    pub input: Tensor,
}

fn with_node(err: ConvnetError, node: &str) -> ConvnetError {
    match err {
        ConvnetError::ShapeMismatch { node: n, detail } if n.is_empty() => ConvnetError::ShapeMismatch {
            node: node.to_string(),
            detail,
        },
        other => other,
    }
}

fn param<'w>(weights: &'w WeightStore, node: &Node, suffix: &str) -> Result<&'w Tensor, ConvnetError> {
    weights.require(&format!("{}.{suffix}", node.name))
}

fn bn_params<'w>(weights: &'w WeightStore, node: &Node, eps: f64) -> Result<BatchNormParams<'w>, ConvnetError> {
    Ok(BatchNormParams {
        gamma: param(weights, node, "gamma")?.values(),
        beta: param(weights, node, "beta")?.values(),
        mean: param(weights, node, "running_mean")?.values(),
        var: param(weights, node, "running_var")?.values(),
        eps,
    })
}

fn activation_of(op: &NodeOp) -> Option<ActivationKind> {
    Some(match op {
        NodeOp::Relu => ActivationKind::Relu,
        NodeOp::LeakyRelu { .. } => ActivationKind::LeakyRelu,
        NodeOp::Prelu { .. } => ActivationKind::Prelu,
        NodeOp::Tanh => ActivationKind::Tanh,
        NodeOp::Sigmoid => ActivationKind::Sigmoid,
        _ => return None,
    })
}

fn slope_values<'w>(weights: &'w WeightStore, node: &'w Node) -> Result<std::borrow::Cow<'w, [f64]>, ConvnetError> {
    Ok(match &node.op {
        NodeOp::Prelu { .. } => std::borrow::Cow::Borrowed(param(weights, node, "slope")?.values()),
        NodeOp::LeakyRelu { slope } => std::borrow::Cow::Owned(vec![*slope]),
        _ => std::borrow::Cow::Owned(Vec::new()),
    })
}

fn eval_node(
    node: &Node,
    inputs: &[&Tensor],
    weights: &WeightStore,
) -> Result<(Tensor, Option<Vec<usize>>), ConvnetError> {
    let x = inputs[0];
    let out = match &node.op {
        NodeOp::Conv2d { stride, padding, .. } => ops::conv2d(
            x,
            param(weights, node, "weight")?,
            param(weights, node, "bias")?,
            *stride,
            *padding,
        )?,
        NodeOp::BatchnormInference { eps, .. } => ops::batchnorm_inference(x, &bn_params(weights, node, *eps)?)?,
        NodeOp::PixelShuffle { factor } => ops::pixel_shuffle(x, *factor)?,
        NodeOp::Add => x.add(inputs[1])?,
        NodeOp::Maxpool2 => {
            let (out, idx) = ops::maxpool2(x)?;
            return Ok((out, Some(idx)));
        }
        NodeOp::GlobalMean => ops::global_mean(x)?,
        NodeOp::Dense { .. } => ops::dense(x, param(weights, node, "weight")?, param(weights, node, "bias")?)?,
        op => {
            let kind = activation_of(op).expect("remaining ops are activations");
            ops::apply_activation(x, kind, &slope_values(weights, node)?)?
        }
    };
    Ok((out, None))
}

/// Evaluates `spec` on a `[C, H, W]` input in node order.
pub fn forward<'a>(
    spec: &'a NetworkSpec,
    weights: &'a WeightStore,
    input: &Tensor,
    record_tape: bool,
) -> Result<Forward<'a>, ConvnetError> {
    spec.check_weights(weights)?;
    let (c, _, _) = input.chw()?;
    if c != spec.input_channels {
        return Err(ConvnetError::ShapeMismatch {
            node: INPUT.into(),
            detail: format!("network takes {} channels, input has {c}", spec.input_channels),
        });
    }
    let index: HashMap<&str, usize> = spec.nodes.iter().enumerate().map(|(i, n)| (n.name.as_str(), i)).collect();
    // last consumer of each node, so activations can be released early when
    // no tape is kept
    let mut last_use = vec![0usize; spec.nodes.len()];
    for (i, node) in spec.nodes.iter().enumerate() {
        for name in &node.inputs {
            if let Some(&j) = index.get(name.as_str()) {
                last_use[j] = i;
            }
        }
    }
    for o in &spec.outputs {
        last_use[index[o.as_str()]] = usize::MAX;
    }

    let mut acts: Vec<Option<Tensor>> = vec![None; spec.nodes.len()];
    let mut pool_indices = vec![None; spec.nodes.len()];
    for (i, node) in spec.nodes.iter().enumerate() {
        let inputs = node
            .inputs
            .iter()
            .map(|name| match index.get(name.as_str()) {
                Some(&j) => Ok(acts[j].as_ref().expect("producer evaluated and retained")),
                None if name == INPUT => Ok(input),
                None => Err(ConvnetError::InvalidSpec(format!("unknown input {name:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let (out, pool) = eval_node(node, &inputs, weights).map_err(|e| with_node(e, &node.name))?;
        acts[i] = Some(out);
        pool_indices[i] = pool;
        if !record_tape {
            for name in &node.inputs {
                if let Some(&j) = index.get(name.as_str()) {
                    if last_use[j] == i {
                        acts[j] = None;
                    }
                }
            }
        }
    }
    let outputs = spec
        .outputs
        .iter()
        .map(|o| acts[index[o.as_str()]].clone().expect("outputs retained"))
        .collect();
    let tape = record_tape.then(|| Tape {
        spec,
        weights,
        input: input.clone(),
        activations: acts.into_iter().map(|a| a.expect("tape keeps every activation")).collect(),
        pool_indices,
    });
    Ok(Forward { outputs, tape })
}

impl<'a> Forward<'a> {
    pub fn output(&self) -> &Tensor {
        &self.outputs[0]
    }

    pub fn tape(&self) -> Option<&Tape<'a>> {
        self.tape.as_ref()
    }

    /// Backpropagates `output_gradient` from the first (usually only) output.
    pub fn backward(&self, output_gradient: &Tensor) -> Result<Gradients, ConvnetError> {
        let tape = self.tape.as_ref().ok_or(ConvnetError::NoTape)?;
        let mut grads = vec![None; tape.spec.outputs.len()];
        grads[0] = Some(output_gradient.clone());
        tape.backward(&grads)
    }

    /// Backpropagates one optional gradient per declared output.
    pub fn backward_outputs(&self, output_gradients: &[Option<Tensor>]) -> Result<Gradients, ConvnetError> {
        self.tape.as_ref().ok_or(ConvnetError::NoTape)?.backward(output_gradients)
    }
}

fn accumulate(slot: &mut Option<Tensor>, g: Tensor) {
    match slot {
        Some(acc) => acc.add_assign(&g),
        None => *slot = Some(g),
    }
}

impl Tape<'_> {
    pub fn activation(&self, node: &str) -> Option<&Tensor> {
        self.spec.node_index(node).map(|i| &self.activations[i])
    }

    fn backward(&self, output_gradients: &[Option<Tensor>]) -> Result<Gradients, ConvnetError> {
        let spec = self.spec;
        if output_gradients.len() != spec.outputs.len() {
            return Err(ConvnetError::ShapeMismatch {
                node: String::new(),
                detail: format!("{} output gradients for {} outputs", output_gradients.len(), spec.outputs.len()),
            });
        }
        let index: HashMap<&str, usize> = spec.nodes.iter().enumerate().map(|(i, n)| (n.name.as_str(), i)).collect();
        let mut node_grads: Vec<Option<Tensor>> = vec![None; spec.nodes.len()];
        for (name, g) in spec.outputs.iter().zip(output_gradients) {
            if let Some(g) = g {
                let i = index[name.as_str()];
                if g.dims() != self.activations[i].dims() {
                    return Err(ConvnetError::ShapeMismatch {
                        node: name.clone(),
                        detail: format!("gradient {:?} for output {:?}", g.dims(), self.activations[i].dims()),
                    });
                }
                accumulate(&mut node_grads[i], g.clone());
            }
        }
        let mut input_grad: Option<Tensor> = None;
        let mut params = WeightStore::new();
        let trainable: HashMap<String, ParamRole> = spec.params().into_iter().map(|p| (p.name, p.role)).collect();

        for (i, node) in spec.nodes.iter().enumerate().rev() {
            let Some(g) = node_grads[i].take() else { continue };
            let inputs: Vec<&Tensor> = node
                .inputs
                .iter()
                .map(|n| match index.get(n.as_str()) {
                    Some(&j) => &self.activations[j],
                    None => &self.input,
                })
                .collect();
            let (in_grads, pgrads) = self
                .node_backward(node, &inputs, &self.activations[i], &g, i)
                .map_err(|e| with_node(e, &node.name))?;
            if !node.frozen {
                for (suffix, t) in pgrads {
                    let name = format!("{}.{suffix}", node.name);
                    if trainable.get(&name) == Some(&ParamRole::Trainable) {
                        params.insert(name, t);
                    }
                }
            }
            for (name, gi) in node.inputs.iter().zip(in_grads) {
                match index.get(name.as_str()) {
                    Some(&j) => accumulate(&mut node_grads[j], gi),
                    None => accumulate(&mut input_grad, gi),
                }
            }
        }
        Ok(Gradients {
            params,
            input: input_grad.unwrap_or_else(|| Tensor::zeros(self.input.dims())),
        })
    }

    #[allow(clippy::type_complexity)]
    fn node_backward(
        &self,
        node: &Node,
        inputs: &[&Tensor],
        output: &Tensor,
        g: &Tensor,
        index: usize,
    ) -> Result<(Vec<Tensor>, Vec<(&'static str, Tensor)>), ConvnetError> {
        let w = self.weights;
        let x = inputs[0];
        Ok(match &node.op {
            NodeOp::Conv2d { stride, padding, .. } => {
                let cg = ops::conv2d_backward(x, param(w, node, "weight")?, g, *stride, *padding)?;
                (vec![cg.input], vec![("weight", cg.weight), ("bias", cg.bias)])
            }
            NodeOp::Dense { .. } => {
                let cg = ops::dense_backward(x, param(w, node, "weight")?, g)?;
                (vec![cg.input], vec![("weight", cg.weight), ("bias", cg.bias)])
            }
            NodeOp::BatchnormInference { eps, .. } => {
                let (gi, gg, gb) = ops::batchnorm_backward(x, g, &bn_params(w, node, *eps)?)?;
                let c = gg.len();
                (
                    vec![gi],
                    vec![
                        ("gamma", Tensor::from_parts(vec![c], gg)),
                        ("beta", Tensor::from_parts(vec![c], gb)),
                    ],
                )
            }
            NodeOp::PixelShuffle { factor } => (vec![ops::pixel_unshuffle(g, *factor)?], vec![]),
            NodeOp::Add => (vec![g.clone(), g.clone()], vec![]),
            NodeOp::Maxpool2 => {
                let idx = self.pool_indices[index].as_ref().expect("maxpool indices recorded");
                (vec![ops::maxpool2_backward(x.dims(), idx, g)], vec![])
            }
            NodeOp::GlobalMean => (vec![ops::global_mean_backward(x.dims(), g)], vec![]),
            op => {
                let kind = activation_of(op).expect("remaining ops are activations");
                let (gi, gs) = ops::activation_backward(x, output, g, kind, &slope_values(w, node)?)?;
                let pg = if kind == ActivationKind::Prelu {
                    let n = gs.len();
                    vec![("slope", Tensor::from_parts(vec![n], gs))]
                } else {
                    vec![]
                };
                (vec![gi], pg)
            }
        })
    }
}
