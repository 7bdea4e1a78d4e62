use alloc::vec::Vec;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::mlp::{loss, AdamConfig, LossKind, Mlp};
use crate::numerics::RealMatrix;
use crate::rng::{derive_seed, rng_from_seed};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub batch_size: usize,
    pub epochs: usize,
    /// Fraction of rows, taken from the end, held out for validation.
    pub validation_split: f64,
    pub loss: LossKind,
    pub adam: AdamConfig,
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            batch_size: 128,
            epochs: 200,
            validation_split: 0.2,
            loss: LossKind::Mae,
            adam: AdamConfig::default(),
            seed: 0,
        }
    }
}

/// Loss curves; one entry per epoch.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FitReport {
    pub train_loss: Vec<f64>,
    /// Inference-mode loss on the held-out rows (training loss when the
    /// split is empty).
    pub val_loss: Vec<f64>,
    /// Epoch whose snapshot was restored.
    pub best_epoch: Option<usize>,
}

/// Mini-batch Adam training. Shuffling and dropout draw from streams
/// derived from `seed`, so the result is deterministic. The parameters
/// with the lowest validation loss are restored at the end.
pub fn fit(model: &mut Mlp, x: &RealMatrix, y: &RealMatrix, opts: &FitOptions) -> Result<FitReport> {
    if x.rows() == 0 {
        return Err(Error::InvalidArgument("empty training set".into()));
    }
    if x.rows() != y.rows() {
        return Err(Error::Dimension(alloc::format!("{} inputs vs {} targets", x.rows(), y.rows())));
    }
    if opts.batch_size == 0 || !(0.0..1.0).contains(&opts.validation_split) {
        return Err(Error::InvalidArgument("batch size must be >= 1 and validation split in [0, 1)".into()));
    }
    let n = x.rows();
    let n_train = (((n as f64) * (1.0 - opts.validation_split)) as usize).max(1);
    let n_train = n_train.min(n);
    let val_idx: Vec<usize> = (n_train..n).collect();
    let (xv, yv) = (x.select_rows(&val_idx), y.select_rows(&val_idx));

    let mut report = FitReport::default();
    let mut best: Option<(f64, Mlp)> = None;
    let mut order: Vec<usize> = (0..n_train).collect();
    for epoch in 0..opts.epochs {
        let mut shuffle_rng = rng_from_seed(derive_seed(opts.seed, 2 * epoch as u64));
        let mut dropout_rng = rng_from_seed(derive_seed(opts.seed, 2 * epoch as u64 + 1));
        order.shuffle(&mut shuffle_rng);
        let mut acc = 0.0;
        for chunk in order.chunks(opts.batch_size) {
            let xb = x.select_rows(chunk);
            let yb = y.select_rows(chunk);
            let l = model
                .train_step(&xb, &yb, opts.loss, &opts.adam, Some(&mut dropout_rng))
                .map_err(|e| match e {
                    Error::NonFinite(msg) => Error::NonFinite(alloc::format!("epoch {epoch}: {msg}")),
                    other => other,
                })?;
            acc += l * chunk.len() as f64;
        }
        let train_loss = acc / n_train as f64;
        let val = if val_idx.is_empty() {
            train_loss
        } else {
            loss(&model.predict(&xv)?, &yv, opts.loss)?
        };
        report.train_loss.push(train_loss);
        report.val_loss.push(val);
        if best.as_ref().map_or(true, |(b, _)| val < *b) {
            best = Some((val, model.clone()));
            report.best_epoch = Some(epoch);
        }
    }
    if let Some((_, snapshot)) = best {
        *model = snapshot;
    }
    Ok(report)
}
