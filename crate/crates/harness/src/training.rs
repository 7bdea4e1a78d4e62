//! Training the three surrogate networks and their checkpoints.

use ris_mec_core::numerics::RealMatrix;
use ris_mec_core::rng::derive_seed;
use ris_mec_core::surrogate::{fit, FitOptions, FitReport, LossKind, MinMaxScaler, Mlp, MlpSpec, SurrogateNet, Surrogates};
use ris_mec_core::SystemConfig;
use serde::{Deserialize, Serialize};

use crate::dataset::{Corruption, Dataset, Scenario};
use crate::error::{HarnessError, Result};

pub const CHECKPOINT_KIND: &str = "checkpoint";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NetKind {
    /// CSI features → `[θ̃; a]`.
    Csi,
    /// Locations → CSI features.
    Loc1,
    /// Locations → `[θ̃; a]`.
    Loc2,
}

impl NetKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csi" => Some(Self::Csi),
            "loc1" => Some(Self::Loc1),
            "loc2" => Some(Self::Loc2),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Csi => "csi",
            Self::Loc1 => "loc1",
            Self::Loc2 => "loc2",
        }
    }

    pub fn spec(self, config: &SystemConfig) -> MlpSpec {
        let (m, n, k) = (config.m_ap, config.n_ue, config.k());
        match self {
            Self::Csi => MlpSpec::dnn_csi(m, n, k),
            Self::Loc1 => MlpSpec::dnn_loc1(m, n, k),
            Self::Loc2 => MlpSpec::dnn_loc2(n, k),
        }
    }

    /// MSE for the channel regression, MAE for the solution maps.
    pub fn loss(self) -> LossKind {
        match self {
            Self::Loc1 => LossKind::Mse,
            _ => LossKind::Mae,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainOptions {
    pub fit: FitOptions,
    /// Train on the corrupted features stored in the dataset.
    pub noisy_inputs: bool,
    /// Min-max scale the inputs. Turning it off leaves raw features (the
    /// CSI entries are ~1e-3) and exists for ablation.
    pub scale_inputs: bool,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self {
            fit: FitOptions::default(),
            noisy_inputs: false,
            scale_inputs: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub net: NetKind,
    pub model: SurrogateNet,
    pub config: SystemConfig,
    pub scenario: Scenario,
    pub noisy_inputs: bool,
    pub corruption: Option<Corruption>,
    pub train_samples: usize,
    pub options: TrainOptions,
    pub report: FitReport,
}

/// Raw (unscaled) inputs and targets for `kind`.
pub fn training_matrices(ds: &Dataset, kind: NetKind, noisy: bool) -> Result<(RealMatrix, RealMatrix)> {
    if noisy && ds.corruption.is_none() {
        return Err(HarnessError::Invalid("dataset has no corrupted features".into()));
    }
    let mut xs = Vec::with_capacity(ds.len());
    let mut ys = Vec::with_capacity(ds.len());
    for s in &ds.samples {
        let pick = |clean: &Vec<f64>, dirty: &Option<Vec<f64>>| if noisy { dirty.clone().unwrap() } else { clean.clone() };
        match kind {
            NetKind::Csi => {
                xs.push(pick(&s.csi, &s.csi_noisy));
                ys.push(s.label.clone());
            }
            NetKind::Loc1 => {
                xs.push(pick(&s.location, &s.location_noisy));
                ys.push(s.csi.clone());
            }
            NetKind::Loc2 => {
                xs.push(pick(&s.location, &s.location_noisy));
                ys.push(s.label.clone());
            }
        }
    }
    let spec = kind.spec(&ds.config);
    Ok((
        RealMatrix::from_rows(&xs, spec.input_dim)?,
        RealMatrix::from_rows(&ys, spec.output_dim())?,
    ))
}

fn identity_scaler(dim: usize) -> MinMaxScaler {
    MinMaxScaler {
        min: vec![0.0; dim],
        max: vec![1.0; dim],
    }
}

/// Fit one network on `ds`. Weights are initialized from
/// `derive_seed(opts.fit.seed, 0)`; shuffling and dropout draw from
/// `derive_seed(opts.fit.seed, 1)`.
pub fn train_net(ds: &Dataset, kind: NetKind, opts: &TrainOptions) -> Result<Checkpoint> {
    if ds.is_empty() {
        return Err(HarnessError::Invalid("cannot train on an empty dataset".into()));
    }
    let (x, y) = training_matrices(ds, kind, opts.noisy_inputs)?;
    let spec = kind.spec(&ds.config);
    let input_scaler = if opts.scale_inputs {
        MinMaxScaler::fit(&x)?
    } else {
        identity_scaler(spec.input_dim)
    };
    // channel targets live around 1e-3 and must be mapped into the sigmoid range
    let output_scaler = match kind {
        NetKind::Loc1 => Some(MinMaxScaler::fit(&y)?),
        _ => None,
    };
    let xs = input_scaler.transform(&x)?;
    let ys = match &output_scaler {
        Some(s) => s.transform(&y)?,
        None => y,
    };
    let mut net = Mlp::new(spec, derive_seed(opts.fit.seed, 0))?;
    let fit_opts = FitOptions {
        loss: kind.loss(),
        seed: derive_seed(opts.fit.seed, 1),
        ..opts.fit
    };
    log::info!(
        "training {} ({} parameters) on {} samples for {} epochs",
        kind.as_str(),
        net.num_params(),
        ds.len(),
        fit_opts.epochs
    );
    let report = fit(&mut net, &xs, &ys, &fit_opts)?;
    Ok(Checkpoint {
        net: kind,
        model: SurrogateNet {
            net,
            input_scaler,
            output_scaler,
        },
        config: ds.config.clone(),
        scenario: ds.scenario,
        noisy_inputs: opts.noisy_inputs,
        corruption: ds.corruption,
        train_samples: ds.len(),
        options: TrainOptions {
            fit: fit_opts,
            ..*opts
        },
        report,
    })
}

/// Checkpoints for the two inference pipelines.
#[derive(Debug, Clone, Default)]
pub struct ModelSet {
    pub csi: Option<Checkpoint>,
    pub loc1: Option<Checkpoint>,
    pub loc2: Option<Checkpoint>,
}

impl ModelSet {
    pub fn surrogates(&self) -> Surrogates {
        Surrogates {
            csi: self.csi.as_ref().map(|c| c.model.clone()),
            loc1: self.loc1.as_ref().map(|c| c.model.clone()),
            loc2: self.loc2.as_ref().map(|c| c.model.clone()),
        }
    }

    pub fn has_csi(&self) -> bool {
        self.csi.is_some()
    }

    pub fn has_location(&self) -> bool {
        self.loc1.is_some() && self.loc2.is_some()
    }

    /// Whether the location pipeline uses corrupted coordinates. Mixed
    /// pairs are rejected.
    pub fn location_noisy(&self) -> Result<bool> {
        match (&self.loc1, &self.loc2) {
            (Some(a), Some(b)) if a.noisy_inputs != b.noisy_inputs => Err(HarnessError::Invalid(
                "loc1 and loc2 were trained on different input corruption".into(),
            )),
            (Some(a), Some(_)) => Ok(a.noisy_inputs),
            _ => Ok(false),
        }
    }

    /// Every present checkpoint must have been trained for `config`.
    pub fn check_config(&self, config: &SystemConfig) -> Result<()> {
        let want = config_hash(config);
        for c in [&self.csi, &self.loc1, &self.loc2].into_iter().flatten() {
            let got = config_hash(&c.config);
            if got != want {
                return Err(HarnessError::Invalid(format!(
                    "{} model was trained for config {got:016x}, data uses {want:016x}",
                    c.net.as_str()
                )));
            }
        }
        Ok(())
    }
}

/// FNV-1a over the canonical JSON form of the configuration.
pub fn config_hash(config: &SystemConfig) -> u64 {
    let text = serde_json::to_string(config).expect("config serializes");
    text.bytes()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}
