//! Finite-difference gradient check on a conv + PReLU + conv + shuffle net.

use super::{rng, uniform_vec};
use survx_core::convnet::{forward, NetworkSpec, Node, NodeOp, Tensor, WeightStore, INPUT};

pub const EPS: f64 = 1e-4;

pub fn toy_net() -> NetworkSpec {
    NetworkSpec {
        name: "toy".into(),
        input_channels: 2,
        nodes: vec![
            Node::new(
                "conv1",
                NodeOp::Conv2d {
                    in_channels: 2,
                    out_channels: 4,
                    kernel: 3,
                    stride: 1,
                    padding: 1,
                },
                &[INPUT],
            ),
            Node::new("act", NodeOp::Prelu { channels: 4 }, &["conv1"]),
            Node::new(
                "conv2",
                NodeOp::Conv2d {
                    in_channels: 4,
                    out_channels: 8,
                    kernel: 3,
                    stride: 1,
                    padding: 1,
                },
                &["act"],
            ),
            Node::new("shuffle", NodeOp::PixelShuffle { factor: 2 }, &["conv2"]),
        ],
        outputs: vec!["shuffle".into()],
    }
}

/// Loss `Σ out · proj` so every output element carries a distinct weight.
pub fn loss(spec: &NetworkSpec, w: &WeightStore, x: &Tensor, proj: &[f64]) -> f64 {
    let out = forward(spec, w, x, false).unwrap();
    out.output().values().iter().zip(proj).map(|(a, b)| a * b).sum()
}

pub fn rel_err(a: f64, n: f64) -> f64 {
    (a - n).abs() / a.abs().max(n.abs()).max(1e-6)
}

/// Worst relative error between reverse-mode and central-difference
/// gradients over every parameter and input element of the toy net.
pub fn max_gradient_error(seed: u64) -> f64 {
    let spec = toy_net();
    let mut r = rng(seed);
    let mut weights = spec.init_weights(seed);
    // slopes away from 1 so the PReLU branch matters
    weights.insert("act.slope", Tensor::new(vec![4], uniform_vec(&mut r, 4, 0.05, 0.6)).unwrap());
    for name in ["conv1.bias", "conv2.bias"] {
        let n = weights.get(name).unwrap().len();
        weights.insert(name, Tensor::new(vec![n], uniform_vec(&mut r, n, -0.2, 0.2)).unwrap());
    }
    let x = Tensor::new(vec![2, 5, 6], uniform_vec(&mut r, 60, -1.0, 1.0)).unwrap();
    let proj = uniform_vec(&mut r, 2 * 10 * 12, -1.0, 1.0);

    let run = forward(&spec, &weights, &x, true).unwrap();
    let grads = run.backward(&Tensor::new(vec![2, 10, 12], proj.clone()).unwrap()).unwrap();

    let mut worst: f64 = 0.0;
    let names: Vec<String> = weights.names().map(String::from).collect();
    for name in &names {
        let analytic = grads.params.get(name).unwrap().values().to_vec();
        for i in 0..analytic.len() {
            let mut plus = weights.clone();
            plus.get_mut(name).unwrap().values_mut()[i] += EPS;
            let mut minus = weights.clone();
            minus.get_mut(name).unwrap().values_mut()[i] -= EPS;
            let numeric = (loss(&spec, &plus, &x, &proj) - loss(&spec, &minus, &x, &proj)) / (2.0 * EPS);
            worst = worst.max(rel_err(analytic[i], numeric));
        }
    }
    for i in 0..x.len() {
        let mut xp = x.clone();
        xp.values_mut()[i] += EPS;
        let mut xm = x.clone();
        xm.values_mut()[i] -= EPS;
        let numeric = (loss(&spec, &weights, &xp, &proj) - loss(&spec, &weights, &xm, &proj)) / (2.0 * EPS);
        worst = worst.max(rel_err(grads.input.values()[i], numeric));
    }
    worst
}
