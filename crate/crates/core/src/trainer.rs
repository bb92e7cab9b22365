//! Margin-ranking training with uniform negative sampling.
//!
//! Each epoch shuffles the factory, cuts it into batches, and for every
//! positive `p` and each of its corruptions `n` adds the hinge term
//! `max(0, γ - f(p) + f(n))`. Gradients of the active terms are summed over
//! the batch and applied once as a plain SGD step, after which the model's
//! constraints are re-projected.
//!
//! Epoch `e` draws from its own generator seeded with `seed + e`, so training
//! ten epochs and resuming for ten more yields the same bits as training
//! twenty in one go.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::checkpoint::Checkpoint;
use crate::error::{Error, Result};
use crate::kge::{init_params, Gradient, ModelKind, ModelParams, Norm};
use crate::triple_factory::{batches, sample_negatives, TripleFactory};

/// Training hyperparameters. The defaults are the usual benchmark settings:
/// 200 dimensions, 20 epochs, batches of 64 with 5 negatives each, and
/// 128-row similarity blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingConfig {
    pub model: ModelKind,
    pub dim: usize,
    pub epochs: usize,
    pub batch_size: usize,
    pub num_negatives: usize,
    /// Row-block size for the similarity matrix; not used by training itself.
    pub eval_batch_size: usize,
    pub learning_rate: f64,
    pub margin: f64,
    pub seed: u64,
    /// Distance used by TransE; ignored by other models.
    pub norm: Norm,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            model: ModelKind::TransE,
            dim: 200,
            epochs: 20,
            batch_size: 64,
            num_negatives: 5,
            eval_batch_size: 128,
            learning_rate: 0.01,
            margin: 1.0,
            seed: 7,
            norm: Norm::L2,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("dim", self.dim),
            ("epochs", self.epochs),
            ("batch_size", self.batch_size),
            ("num_negatives", self.num_negatives),
            ("eval_batch_size", self.eval_batch_size),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(Error::InvalidConfig(format!("{name} must be at least 1")));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::InvalidConfig("learning_rate must be positive".into()));
        }
        if !(self.margin.is_finite() && self.margin >= 0.0) {
            return Err(Error::InvalidConfig("margin must be non-negative".into()));
        }
        let multiple = self.model.dim_multiple();
        if self.dim % multiple != 0 {
            return Err(Error::Dimension {
                model: self.model.name().to_string(),
                dim: self.dim,
                multiple,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingTrace {
    /// Mean hinge loss over every (positive, negative) term of each epoch.
    pub epoch_losses: Vec<f64>,
    pub wall_clock_seconds: f64,
}

fn init_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn epoch_rng(seed: u64, epoch: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(epoch as u64));
    // Stream 0 of `seed` is used for initialization.
    rng.set_stream(1);
    rng
}

pub fn train(factory: &TripleFactory, config: &TrainingConfig) -> Result<(ModelParams, TrainingTrace)> {
    config.validate()?;
    if factory.triples().is_empty() {
        return Err(Error::EmptyFactory);
    }
    let start = Instant::now();
    let mut params = init_params(
        config.model,
        factory.num_entities(),
        factory.num_relations(),
        config.dim,
        &mut init_rng(config.seed),
    )?;
    params.norm = config.norm;
    let epoch_losses = run_epochs(&mut params, factory, config, 0, config.epochs)?;
    Ok((
        params,
        TrainingTrace {
            epoch_losses,
            wall_clock_seconds: start.elapsed().as_secs_f64(),
        },
    ))
}

/// Continues training from a checkpoint for `extra_epochs` more epochs.
pub fn resume(
    checkpoint: &Checkpoint,
    factory: &TripleFactory,
    extra_epochs: usize,
) -> Result<(ModelParams, TrainingTrace)> {
    let params = &checkpoint.params;
    if params.num_entities != factory.num_entities() {
        return Err(Error::SizeMismatch {
            what: "entities",
            checkpoint: params.num_entities,
            factory: factory.num_entities(),
        });
    }
    if params.num_relations != factory.num_relations() {
        return Err(Error::SizeMismatch {
            what: "relations",
            checkpoint: params.num_relations,
            factory: factory.num_relations(),
        });
    }
    checkpoint.config.validate()?;
    let start = Instant::now();
    let mut params = params.clone();
    let epoch_losses = run_epochs(
        &mut params,
        factory,
        &checkpoint.config,
        checkpoint.completed_epochs,
        extra_epochs,
    )?;
    Ok((
        params,
        TrainingTrace {
            epoch_losses,
            wall_clock_seconds: start.elapsed().as_secs_f64(),
        },
    ))
}

fn run_epochs(
    params: &mut ModelParams,
    factory: &TripleFactory,
    config: &TrainingConfig,
    first_epoch: usize,
    count: usize,
) -> Result<Vec<f64>> {
    let mut losses = Vec::with_capacity(count);
    for epoch in first_epoch..first_epoch + count {
        let mut rng = epoch_rng(config.seed, epoch);
        let mut total = 0.0;
        let mut terms = 0usize;
        for (b, batch) in batches(factory, config.batch_size, &mut rng).iter().enumerate() {
            let negatives =
                sample_negatives(factory.num_entities(), batch, config.num_negatives, &mut rng)?;
            let mut grad = Gradient::default();
            let mut batch_loss = 0.0;
            for (pos, negs) in negatives.positives.iter().zip(&negatives.negatives) {
                let f_pos = params.score_unchecked(pos.head, pos.relation, pos.tail);
                let mut active = 0usize;
                for neg in negs {
                    let f_neg = params.score_unchecked(neg.head, neg.relation, neg.tail);
                    let term = config.margin - f_pos + f_neg;
                    if !term.is_finite() {
                        return Err(Error::Divergence { epoch, batch: b });
                    }
                    if term > 0.0 {
                        batch_loss += term;
                        active += 1;
                        params.grad_into(neg.head, neg.relation, neg.tail, 1.0, &mut grad);
                    }
                }
                if active > 0 {
                    params.grad_into(pos.head, pos.relation, pos.tail, -(active as f64), &mut grad);
                }
                terms += negs.len();
            }
            total += batch_loss;
            params.apply_descent(&grad, config.learning_rate);
            params.constrain();
        }
        if !params.all_finite() || !total.is_finite() {
            return Err(Error::Divergence {
                epoch,
                batch: factory.triples().len().div_ceil(config.batch_size),
            });
        }
        losses.push(total / terms as f64);
    }
    Ok(losses)
}
