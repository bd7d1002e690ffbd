//! Mean-squared-error training for ESPCN.
//!
//! The learning rate starts at `lr_initial` and is multiplied by `lr_decay`
//! (never going below `lr_final`) after any epoch whose relative loss
//! improvement falls under `improvement_threshold`. Training stops once the
//! best loss has not improved for `patience_epochs` epochs, or after
//! `max_epochs`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::espcn::{build_espcn, EspcnConfig};
use super::patches::PatchPair;
use super::ModelError;
use crate::convnet::{forward, NetworkSpec, Tensor, WeightStore};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Optimizer {
    Sgd,
    Adam { beta1: f64, beta2: f64, eps: f64 },
}

impl Optimizer {
    pub fn adam() -> Self {
        Optimizer::Adam {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub lr_initial: f64,
    pub lr_final: f64,
    pub lr_decay: f64,
    /// Relative epoch-over-epoch improvement below which the rate decays.
    pub improvement_threshold: f64,
    pub patience_epochs: usize,
    pub max_epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    pub optimizer: Optimizer,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lr_initial: 0.01,
            lr_final: 0.0001,
            lr_decay: 0.5,
            improvement_threshold: 1e-4,
            patience_epochs: 100,
            max_epochs: 500,
            batch_size: 4,
            seed: 0,
            optimizer: Optimizer::Sgd,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: &str| Err(ModelError::InvalidConfig(m.into()));
        if !(self.lr_final > 0.0 && self.lr_final <= self.lr_initial) {
            return bad("need 0 < lr_final ≤ lr_initial");
        }
        if !(self.lr_decay > 0.0 && self.lr_decay < 1.0) {
            return bad("lr_decay must lie in (0, 1)");
        }
        if self.patience_epochs == 0 || self.batch_size == 0 || self.max_epochs == 0 {
            return bad("patience, batch size and max epochs must be ≥ 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: f64,
    pub best_loss: f64,
    pub learning_rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Patience,
    MaxEpochs,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub spec: NetworkSpec,
    /// Weights at the best epoch.
    pub weights: WeightStore,
    /// Dataset loss of the initial weights.
    pub initial_loss: f64,
    pub log: Vec<EpochRecord>,
    pub stop: StopReason,
}

impl TrainOutcome {
    pub fn best_loss(&self) -> f64 {
        self.log.last().map_or(self.initial_loss, |r| r.best_loss)
    }
}

fn to_tensor(img: &crate::image::ImageTensor) -> Tensor {
    Tensor::from_image(img)
}

/// Mean squared error over the dataset.
pub fn dataset_loss(spec: &NetworkSpec, weights: &WeightStore, patches: &[PatchPair]) -> Result<f64, ModelError> {
    let mut total = 0.0;
    for p in patches {
        let out = forward(spec, weights, &to_tensor(&p.lr), false)?;
        let target = p.hr.samples();
        let se: f64 = out.output().values().iter().zip(target).map(|(a, b)| (a - b) * (a - b)).sum();
        total += se / target.len() as f64;
    }
    Ok(total / patches.len() as f64)
}

struct OptimizerState {
    step: u64,
    m: WeightStore,
    v: WeightStore,
}

fn apply_update(
    weights: &mut WeightStore,
    grads: &WeightStore,
    lr: f64,
    optimizer: Optimizer,
    state: &mut OptimizerState,
) {
    state.step += 1;
    for (name, g) in grads.iter() {
        let w = weights.get_mut(name).expect("gradient names come from the weight store");
        match optimizer {
            Optimizer::Sgd => {
                for (wv, gv) in w.values_mut().iter_mut().zip(g.values()) {
                    *wv -= lr * gv;
                }
            }
            Optimizer::Adam { beta1, beta2, eps } => {
                if state.m.get(name).is_none() {
                    state.m.insert(name.clone(), Tensor::zeros(g.dims()));
                    state.v.insert(name.clone(), Tensor::zeros(g.dims()));
                }
                let m = state.m.get_mut(name).expect("inserted");
                let t = state.step as i32;
                let (c1, c2) = (1.0 - beta1.powi(t), 1.0 - beta2.powi(t));
                for (mv, gv) in m.values_mut().iter_mut().zip(g.values()) {
                    *mv = beta1 * *mv + (1.0 - beta1) * gv;
                }
                let v = state.v.get_mut(name).expect("inserted");
                for (vv, gv) in v.values_mut().iter_mut().zip(g.values()) {
                    *vv = beta2 * *vv + (1.0 - beta2) * gv * gv;
                }
                let m = state.m.get(name).expect("inserted");
                let v = state.v.get(name).expect("inserted");
                for ((wv, mv), vv) in w.values_mut().iter_mut().zip(m.values()).zip(v.values()) {
                    *wv -= lr * (mv / c1) / ((vv / c2).sqrt() + eps);
                }
            }
        }
    }
}

/// Trains a fresh ESPCN on `patches`. Deterministic for a given seed.
pub fn train_espcn(patches: &[PatchPair], espcn: &EspcnConfig, cfg: &TrainConfig) -> Result<TrainOutcome, ModelError> {
    if patches.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    cfg.validate()?;
    let spec = build_espcn(espcn);
    for p in patches {
        if p.lr.channels() != espcn.channels() || p.hr.dims() != (espcn.channels(), p.lr.height() * espcn.factor, p.lr.width() * espcn.factor) {
            return Err(ModelError::WeightMismatch(format!(
                "patch {:?}/{:?} does not fit a x{} network on {} channels",
                p.lr.dims(),
                p.hr.dims(),
                espcn.factor,
                espcn.channels()
            )));
        }
    }
    let mut weights = spec.init_weights(cfg.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5e_ed0f_e5c0);
    let initial_loss = dataset_loss(&spec, &weights, patches)?;
    if !initial_loss.is_finite() {
        return Err(ModelError::DivergedLoss { epoch: 0 });
    }

    let mut order: Vec<usize> = (0..patches.len()).collect();
    let mut lr = cfg.lr_initial;
    let mut best = (initial_loss, weights.clone());
    let mut previous = initial_loss;
    let mut since_best = 0;
    let mut log = Vec::new();
    let mut state = OptimizerState {
        step: 0,
        m: WeightStore::new(),
        v: WeightStore::new(),
    };
    let mut stop = StopReason::MaxEpochs;

    for epoch in 1..=cfg.max_epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(cfg.batch_size) {
            let mut acc: Option<WeightStore> = None;
            for &i in batch {
                let p = &patches[i];
                let run = forward(&spec, &weights, &to_tensor(&p.lr), true)?;
                let out = run.output();
                // d/dout of mean((out − hr)²), averaged over the batch
                let k = 2.0 / (out.len() as f64 * batch.len() as f64);
                let grad: Vec<f64> = out.values().iter().zip(p.hr.samples()).map(|(a, b)| k * (a - b)).collect();
                let g = run.backward(&Tensor::new(out.dims().to_vec(), grad)?)?;
                match &mut acc {
                    None => acc = Some(g.params),
                    Some(a) => {
                        for (name, t) in g.params.iter() {
                            let slot = a.get_mut(name).expect("same parameter set per patch");
                            for (x, y) in slot.values_mut().iter_mut().zip(t.values()) {
                                *x += y;
                            }
                        }
                    }
                }
            }
            if let Some(g) = acc {
                apply_update(&mut weights, &g, lr, cfg.optimizer, &mut state);
            }
        }
        let loss = dataset_loss(&spec, &weights, patches)?;
        if !loss.is_finite() {
            return Err(ModelError::DivergedLoss { epoch });
        }
        if loss < best.0 {
            best = (loss, weights.clone());
            since_best = 0;
        } else {
            since_best += 1;
        }
        if (previous - loss) / previous < cfg.improvement_threshold {
            lr = (lr * cfg.lr_decay).max(cfg.lr_final);
        }
        previous = loss;
        log.push(EpochRecord {
            epoch,
            loss,
            best_loss: best.0,
            learning_rate: lr,
        });
        if since_best >= cfg.patience_epochs {
            stop = StopReason::Patience;
            break;
        }
    }
    Ok(TrainOutcome {
        spec,
        weights: best.1,
        initial_loss,
        log,
        stop,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::synth;
    use crate::models::{extract_training_patches, InputMode, ESPCN_KERNELS};

    fn small_set() -> Vec<PatchPair> {
        let hr = synth::natural(1, 40, 40);
        extract_training_patches(&hr, 2, &ESPCN_KERNELS)
    }

    #[test]
    fn empty_dataset() {
        let err = train_espcn(&[], &EspcnConfig::new(2, InputMode::Luma), &TrainConfig::default()).unwrap_err();
        assert_eq!(err, ModelError::EmptyDataset);
    }

    #[test]
    fn config_validation() {
        let cfg = TrainConfig {
            lr_final: 0.1,
            ..TrainConfig::default()
        };
        assert!(matches!(
            train_espcn(&small_set(), &EspcnConfig::new(2, InputMode::Luma), &cfg),
            Err(ModelError::InvalidConfig(_))
        ));
    }

    #[test]
    fn short_run_is_deterministic_and_monotone_best() {
        let cfg = TrainConfig {
            max_epochs: 4,
            ..TrainConfig::default()
        };
        let espcn = EspcnConfig::new(2, InputMode::Luma);
        let patches = small_set();
        let a = train_espcn(&patches, &espcn, &cfg).unwrap();
        let b = train_espcn(&patches, &espcn, &cfg).unwrap();
        assert_eq!(a.weights, b.weights);
        assert_eq!(a.log, b.log);
        assert!(a.log.windows(2).all(|w| w[1].best_loss <= w[0].best_loss));
        assert!(a.log.iter().all(|r| r.learning_rate >= cfg.lr_final));
    }

    #[test]
    fn adam_runs() {
        let cfg = TrainConfig {
            max_epochs: 2,
            lr_initial: 1e-3,
            optimizer: Optimizer::adam(),
            ..TrainConfig::default()
        };
        let out = train_espcn(&small_set(), &EspcnConfig::new(2, InputMode::Luma), &cfg).unwrap();
        assert!(out.best_loss() <= out.initial_loss);
    }
}
