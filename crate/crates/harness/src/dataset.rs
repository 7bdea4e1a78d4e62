//! Teacher-labeled datasets for the surrogate networks.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use ris_mec_core::bcd::{bcd_solve, BcdOptions};
use ris_mec_core::rng::{derive_seed, rng_from_seed};
use ris_mec_core::surrogate::{channels_from_features, corrupt, csi_dim, csi_features, location_features, solution_label};
use ris_mec_core::{gen_channels, ChannelSet, SystemConfig};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

pub const DATASET_KIND: &str = "dataset";
pub const CHANNELS_KIND: &str = "channels";

/// Direct-link regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "zeta_d", rename_all = "kebab-case")]
pub enum Scenario {
    /// Rayleigh direct links, `ζ_d = 0`.
    Nlos,
    /// Pure LoS direct links, `ζ_d = 1`.
    Los,
    Custom(f64),
}

impl Scenario {
    pub fn zeta_d(self) -> f64 {
        match self {
            Self::Nlos => 0.0,
            Self::Los => 1.0,
            Self::Custom(z) => z,
        }
    }

    /// `nlos`, `los`, or a number in `[0, 1]`.
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "nlos" => Some(Self::Nlos),
            "los" => Some(Self::Los),
            _ => s.parse::<f64>().ok().filter(|z| (0.0..=1.0).contains(z)).map(Self::Custom),
        }
    }
}

/// Standard deviations of the additive input noise: CSI features (same
/// units as the channel entries) and UE coordinates (meters).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Corruption {
    pub sigma_dx: f64,
    pub sigma_dz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub index: usize,
    /// Regenerates the channels: `gen_channels(config, seed)`.
    pub seed: u64,
    /// Clean CSI features `x`; lossless encoding of the channels.
    pub csi: Vec<f64>,
    /// Clean UE coordinates `z`.
    pub location: Vec<f64>,
    pub csi_noisy: Option<Vec<f64>>,
    pub location_noisy: Option<Vec<f64>>,
    /// `[θ̃; a]` from the teacher solution on the clean channels.
    pub label: Vec<f64>,
    pub teacher_bits: f64,
    pub outer_iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub index: usize,
    pub seed: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub scenario: Scenario,
    pub config: SystemConfig,
    pub seed: u64,
    pub corruption: Option<Corruption>,
    pub samples: Vec<Sample>,
    pub skipped: Vec<Skipped>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn channels(&self, i: usize) -> Result<ChannelSet> {
        let s = &self.samples[i];
        let positions = ris_mec_core::surrogate::positions_from_features(&s.location);
        Ok(channels_from_features(&s.csi, &self.config, positions)?)
    }

    /// First `n` samples and the rest, sharing the metadata.
    pub fn split_at(&self, n: usize) -> (Dataset, Dataset) {
        let n = n.min(self.len());
        let mut head = self.clone();
        let tail_samples = head.samples.split_off(n);
        let tail = Dataset {
            samples: tail_samples,
            ..head.clone()
        };
        (head, tail)
    }

    /// Shape and range checks applied after loading.
    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        let (m, n, k) = (self.config.m_ap, self.config.n_ue, self.config.k());
        for s in &self.samples {
            let bad = |what: &str| HarnessError::Invalid(format!("sample {}: {what}", s.index));
            if s.csi.len() != csi_dim(m, n, k) || s.location.len() != 2 * n || s.label.len() != k + n {
                return Err(bad("feature or label length does not match the config"));
            }
            if s.label.iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(bad("label outside [0, 1]"));
            }
            let noisy_ok = s.csi_noisy.as_ref().map_or(true, |v| v.len() == s.csi.len())
                && s.location_noisy.as_ref().map_or(true, |v| v.len() == s.location.len());
            if !noisy_ok || self.corruption.is_some() != s.csi_noisy.is_some() {
                return Err(bad("corrupted features inconsistent with the dataset header"));
            }
        }
        Ok(())
    }
}

/// Label `count` instances with `bcd_solve`. Sample `i` uses seed
/// `derive_seed(seed, i)`; samples are solved in parallel and kept in index
/// order, so the result does not depend on the thread count. Instances the
/// solver rejects are logged and listed in `skipped`.
pub fn gen_dataset(
    config: &SystemConfig,
    count: usize,
    scenario: Scenario,
    corruption: Option<Corruption>,
    seed: u64,
    options: &BcdOptions,
) -> Result<Dataset> {
    let config = config.clone().with_zeta_d(scenario.zeta_d());
    config.validate()?;
    if let Some(c) = corruption {
        if !(c.sigma_dx >= 0.0 && c.sigma_dz >= 0.0) {
            return Err(HarnessError::Invalid("noise levels must be >= 0".into()));
        }
    }
    let done = AtomicUsize::new(0);
    let results: Vec<std::result::Result<Sample, Skipped>> = (0..count)
        .into_par_iter()
        .map(|index| {
            let sample_seed = derive_seed(seed, index as u64);
            let out = label_one(&config, index, sample_seed, corruption, options).map_err(|e| {
                log::warn!("sample {index} (seed {sample_seed}) skipped: {e}");
                Skipped {
                    index,
                    seed: sample_seed,
                    reason: e.to_string(),
                }
            });
            let d = done.fetch_add(1, Ordering::Relaxed) + 1;
            if d % 500 == 0 || d == count {
                log::info!("labeled {d}/{count}");
            }
            out
        })
        .collect();
    let mut samples = Vec::with_capacity(count);
    let mut skipped = Vec::new();
    for r in results {
        match r {
            Ok(s) => samples.push(s),
            Err(s) => skipped.push(s),
        }
    }
    Ok(Dataset {
        scenario,
        config,
        seed,
        corruption,
        samples,
        skipped,
    })
}

fn label_one(
    config: &SystemConfig,
    index: usize,
    seed: u64,
    corruption: Option<Corruption>,
    options: &BcdOptions,
) -> std::result::Result<Sample, ris_mec_core::Error> {
    let ch = gen_channels(config, seed)?;
    let run = bcd_solve(&ch, config, None, options)?;
    let csi = csi_features(&ch);
    let location = location_features(&ch.ue_positions);
    // noise is drawn after labeling and touches the inputs only
    let (csi_noisy, location_noisy) = match corruption {
        Some(c) => (
            Some(corrupt(&csi, c.sigma_dx, &mut rng_from_seed(derive_seed(seed, 1)))?),
            Some(corrupt(&location, c.sigma_dz, &mut rng_from_seed(derive_seed(seed, 2)))?),
        ),
        None => (None, None),
    };
    Ok(Sample {
        index,
        seed,
        label: solution_label(&run.solution.phi, &run.solution.a),
        teacher_bits: run.solution.objective_bits,
        outer_iterations: run.diagnostics.outer_iterations,
        csi,
        location,
        csi_noisy,
        location_noisy,
    })
}

/// Output of `gen-channels`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelFile {
    pub config: SystemConfig,
    pub seed: u64,
    pub records: Vec<ChannelRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelRecord {
    pub index: usize,
    pub seed: u64,
    pub channels: ChannelSet,
}

pub fn gen_channel_file(config: &SystemConfig, count: usize, seed: u64) -> Result<ChannelFile> {
    config.validate()?;
    let records = (0..count)
        .map(|index| {
            let s = derive_seed(seed, index as u64);
            Ok(ChannelRecord {
                index,
                seed: s,
                channels: gen_channels(config, s)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ChannelFile {
        config: config.clone(),
        seed,
        records,
    })
}
