//! Parameter sweeps: one CSV row per (value, replication, scheme).

use std::time::Instant;

use rayon::prelude::*;
use ris_mec_core::baselines::Scheme;
use ris_mec_core::objective::tctb_parts;
use ris_mec_core::rng::{derive_seed, rng_from_seed};
use ris_mec_core::surrogate::{corrupt, csi_features, infer_solution, location_features, SurrogateInput};
use ris_mec_core::{gen_channels, SystemConfig};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::training::ModelSet;

pub const SWEEP_KIND: &str = "sweep";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    /// Uniform energy budget (J).
    #[serde(rename = "E")]
    Energy,
    #[serde(rename = "M")]
    Antennas,
    #[serde(rename = "N")]
    Users,
    #[serde(rename = "zeta_d")]
    ZetaD,
    /// CSI feature noise; affects the learned CSI pipeline only.
    #[serde(rename = "sigma_dx")]
    SigmaDx,
    /// Location noise (m); affects the learned location pipeline only.
    #[serde(rename = "sigma_dz")]
    SigmaDz,
}

impl SweepVariable {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "E" | "e" | "energy" => Some(Self::Energy),
            "M" | "m" => Some(Self::Antennas),
            "N" | "n" => Some(Self::Users),
            "zeta_d" | "zeta-d" => Some(Self::ZetaD),
            "sigma_dx" | "sigma-dx" => Some(Self::SigmaDx),
            "sigma_dz" | "sigma-dz" => Some(Self::SigmaDz),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Energy => "E",
            Self::Antennas => "M",
            Self::Users => "N",
            Self::ZetaD => "zeta_d",
            Self::SigmaDx => "sigma_dx",
            Self::SigmaDz => "sigma_dz",
        }
    }

    /// The scenario at one swept value.
    pub fn apply(self, base: &SystemConfig, value: f64) -> Result<SystemConfig> {
        let count = || -> Result<usize> {
            if value >= 1.0 && value.fract() == 0.0 {
                Ok(value as usize)
            } else {
                Err(HarnessError::Invalid(format!("{} must be a positive integer, got {value}", self.as_str())))
            }
        };
        Ok(match self {
            Self::Energy => base.clone().with_energy(value),
            Self::Antennas => base.clone().with_counts(base.n_ue, count()?, base.k_y, base.k_z),
            Self::Users => base.clone().with_counts(count()?, base.m_ap, base.k_y, base.k_z),
            Self::ZetaD => base.clone().with_zeta_d(value),
            Self::SigmaDx | Self::SigmaDz => base.clone(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepScheme {
    Solver(Scheme),
    /// Learned CSI pipeline.
    DnnCsi,
    /// Learned location-only pipeline.
    DnnLoc,
}

impl SweepScheme {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "dnn-csi" => Some(Self::DnnCsi),
            "dnn-loc" => Some(Self::DnnLoc),
            other => Scheme::parse(other).map(Self::Solver),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Solver(s) => s.as_str(),
            Self::DnnCsi => "dnn-csi",
            Self::DnnLoc => "dnn-loc",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub config: SystemConfig,
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub replications: usize,
    pub schemes: Vec<SweepScheme>,
    pub seed: u64,
}

/// `error` is empty on success; failed cells have `tctb_bits = NaN`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub variable: String,
    pub value: f64,
    pub replication: usize,
    pub scheme: String,
    pub tctb_bits: f64,
    pub runtime_s: f64,
    /// `gen_channels(config at value, seed)` regenerates the instance.
    pub seed: u64,
    pub error: String,
}

/// Replication `r` uses seed `derive_seed(spec.seed, r)` at every value,
/// so points along the sweep are paired. Cells run in parallel and are
/// returned in (value, replication, scheme) order.
pub fn run_sweep(spec: &SweepSpec, models: &ModelSet) -> Result<Vec<SweepRow>> {
    if spec.replications == 0 {
        return Err(HarnessError::Invalid("replications must be >= 1".into()));
    }
    if spec.values.is_empty() || spec.schemes.is_empty() {
        return Err(HarnessError::Invalid("a sweep needs at least one value and one scheme".into()));
    }
    let configs = spec
        .values
        .iter()
        .map(|&v| spec.variable.apply(&spec.config, v))
        .collect::<Result<Vec<_>>>()?;
    for c in &configs {
        c.validate()?;
    }
    let cells: Vec<(usize, usize)> = (0..spec.values.len())
        .flat_map(|v| (0..spec.replications).map(move |r| (v, r)))
        .collect();
    let surrogates = models.surrogates();
    let rows: Vec<Vec<SweepRow>> = cells
        .par_iter()
        .map(|&(vi, rep)| {
            let value = spec.values[vi];
            let config = &configs[vi];
            let seed = derive_seed(spec.seed, rep as u64);
            let row = |scheme: SweepScheme, out: std::result::Result<f64, String>, runtime_s: f64| {
                let (tctb_bits, error) = match out {
                    Ok(v) => (v, String::new()),
                    Err(e) => {
                        log::warn!("{}={value} rep {rep} {}: {e}", spec.variable.as_str(), scheme.as_str());
                        (f64::NAN, e)
                    }
                };
                SweepRow {
                    variable: spec.variable.as_str().into(),
                    value,
                    replication: rep,
                    scheme: scheme.as_str().into(),
                    tctb_bits,
                    runtime_s,
                    seed,
                    error,
                }
            };
            let channels = match gen_channels(config, seed) {
                Ok(c) => c,
                Err(e) => return spec.schemes.iter().map(|&s| row(s, Err(e.to_string()), 0.0)).collect(),
            };
            spec.schemes
                .iter()
                .map(|&scheme| {
                    let t = Instant::now();
                    let out: std::result::Result<f64, String> = (|| -> Result<f64> {
                        match scheme {
                            SweepScheme::Solver(s) => Ok(ris_mec_core::baselines::solve(s, &channels, config)?.objective_bits),
                            SweepScheme::DnnCsi => {
                                if !models.has_csi() {
                                    return Err(HarnessError::Invalid("no csi model given".into()));
                                }
                                ModelSet { csi: models.csi.clone(), ..Default::default() }.check_config(config)?;
                                let mut x = csi_features(&channels);
                                if spec.variable == SweepVariable::SigmaDx {
                                    x = corrupt(&x, value, &mut rng_from_seed(derive_seed(seed, 1)))?;
                                }
                                let sol = infer_solution(&surrogates, SurrogateInput::Csi { features: &x, channels: &channels }, config)?;
                                Ok(tctb_parts(&sol.phi, &sol.a, &sol.w, &channels, config)?)
                            }
                            SweepScheme::DnnLoc => {
                                if !models.has_location() {
                                    return Err(HarnessError::Invalid("no loc1/loc2 models given".into()));
                                }
                                ModelSet { loc1: models.loc1.clone(), loc2: models.loc2.clone(), ..Default::default() }
                                    .check_config(config)?;
                                let mut z = location_features(&channels.ue_positions);
                                if spec.variable == SweepVariable::SigmaDz {
                                    z = corrupt(&z, value, &mut rng_from_seed(derive_seed(seed, 2)))?;
                                }
                                let sol = infer_solution(&surrogates, SurrogateInput::Location { features: &z }, config)?;
                                Ok(tctb_parts(&sol.phi, &sol.a, &sol.w, &channels, config)?)
                            }
                        }
                    })()
                    .map_err(|e| e.to_string());
                    row(scheme, out, t.elapsed().as_secs_f64())
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// Mean TCTB per (value, scheme) over the successful replications.
pub fn mean_by_point(rows: &[SweepRow]) -> Vec<(f64, String, f64)> {
    let mut out: Vec<(f64, String, f64, usize)> = Vec::new();
    for r in rows.iter().filter(|r| r.tctb_bits.is_finite()) {
        match out.iter_mut().find(|(v, s, _, _)| *v == r.value && *s == r.scheme) {
            Some(e) => {
                e.2 += r.tctb_bits;
                e.3 += 1;
            }
            None => out.push((r.value, r.scheme.clone(), r.tctb_bits, 1)),
        }
    }
    out.into_iter().map(|(v, s, sum, n)| (v, s, sum / n as f64)).collect()
}
