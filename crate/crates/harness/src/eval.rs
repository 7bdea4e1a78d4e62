//! Paired evaluation of surrogate pipelines against the teacher.

use std::time::Instant;

use ris_mec_core::baselines::{solve, Scheme};
use ris_mec_core::objective::{tctb_parts, Solution};
use ris_mec_core::surrogate::{infer_solution, SurrogateInput, Surrogates};
use ris_mec_core::{ChannelSet, SystemConfig};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{HarnessError, Result};
use crate::training::ModelSet;

pub const REPORT_KIND: &str = "eval-report";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    /// Also solve the ZF, equal-energy and no-RIS baselines per sample.
    pub baselines: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self { baselines: true }
    }
}

/// TCTB (bits) of every scheme on one test instance, on its true channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleEval {
    pub index: usize,
    pub seed: u64,
    pub teacher_bits: f64,
    pub csi_bits: Option<f64>,
    pub loc_bits: Option<f64>,
    pub zf_bits: Option<f64>,
    pub equal_bits: Option<f64>,
    pub no_ris_bits: Option<f64>,
}

/// Per-sample ratios `scheme / teacher`, summarized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSummary {
    pub count: usize,
    pub mean_bits: f64,
    pub mean_ratio: f64,
    pub median_ratio: f64,
    pub p10_ratio: f64,
    /// `mean(scheme) / mean(teacher)`.
    pub ratio_of_means: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub samples: Vec<SampleEval>,
    pub teacher_mean_bits: f64,
    pub csi: Option<RatioSummary>,
    pub location: Option<RatioSummary>,
    pub zf: Option<RatioSummary>,
    pub equal: Option<RatioSummary>,
    pub no_ris: Option<RatioSummary>,
    /// Mean single-sample inference time, seconds.
    pub csi_latency_s: Option<f64>,
    pub location_latency_s: Option<f64>,
    pub csi_noisy_inputs: bool,
    pub location_noisy_inputs: bool,
}

impl EvalReport {
    /// Largest mean TCTB among the non-learned baselines.
    pub fn best_baseline_mean_bits(&self) -> Option<f64> {
        [&self.zf, &self.equal, &self.no_ris]
            .into_iter()
            .flatten()
            .map(|s| s.mean_bits)
            .reduce(f64::max)
    }
}

pub fn summarize(values: &[f64], teacher: &[f64]) -> RatioSummary {
    let n = values.len();
    let mut ratios: Vec<f64> = values.iter().zip(teacher).map(|(v, t)| v / t).collect();
    ratios.sort_by(|a, b| a.total_cmp(b));
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let median = if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        ratios[n / 2]
    } else {
        0.5 * (ratios[n / 2 - 1] + ratios[n / 2])
    };
    // nearest-rank percentile
    let p10 = if n == 0 { f64::NAN } else { ratios[((0.1 * n as f64).ceil() as usize).max(1) - 1] };
    RatioSummary {
        count: n,
        mean_bits: mean(values),
        mean_ratio: mean(&ratios),
        median_ratio: median,
        p10_ratio: p10,
        ratio_of_means: mean(values) / mean(teacher),
    }
}

/// TCTB of an inferred solution on the true channels. On the location path
/// the solution's own `objective_bits` is measured on predicted channels,
/// so it is always recomputed here.
fn true_bits(sol: &Solution, channels: &ChannelSet, config: &SystemConfig) -> Result<f64> {
    Ok(tctb_parts(&sol.phi, &sol.a, &sol.w, channels, config)?)
}

/// Evaluate every pipeline present in `models` on `test`. Each model reads
/// the inputs it was trained on: corrupted features for models trained on
/// corrupted features, clean ones otherwise. Labels and true channels are
/// always clean.
pub fn evaluate_surrogates(models: &ModelSet, test: &Dataset, opts: &EvalOptions) -> Result<EvalReport> {
    models.check_config(&test.config)?;
    let cfg = &test.config;
    let csi_noisy = models.csi.as_ref().is_some_and(|c| c.noisy_inputs);
    let loc_noisy = models.location_noisy()?;
    if (csi_noisy || loc_noisy) && test.corruption.is_none() {
        return Err(HarnessError::Invalid(
            "models trained on corrupted inputs need a test set with corrupted features".into(),
        ));
    }
    let surrogates: Surrogates = models.surrogates();
    let mut samples = Vec::with_capacity(test.len());
    let (mut csi_time, mut loc_time) = (0.0, 0.0);
    for (i, s) in test.samples.iter().enumerate() {
        let channels = test.channels(i)?;
        let csi_bits = if models.has_csi() {
            let features = if csi_noisy { s.csi_noisy.as_ref().unwrap() } else { &s.csi };
            let t = Instant::now();
            let sol = infer_solution(
                &surrogates,
                SurrogateInput::Csi {
                    features,
                    channels: &channels,
                },
                cfg,
            )?;
            csi_time += t.elapsed().as_secs_f64();
            Some(true_bits(&sol, &channels, cfg)?)
        } else {
            None
        };
        let loc_bits = if models.has_location() {
            let features = if loc_noisy { s.location_noisy.as_ref().unwrap() } else { &s.location };
            let t = Instant::now();
            let sol = infer_solution(&surrogates, SurrogateInput::Location { features }, cfg)?;
            loc_time += t.elapsed().as_secs_f64();
            Some(true_bits(&sol, &channels, cfg)?)
        } else {
            None
        };
        let base = |scheme: Scheme| -> Result<Option<f64>> {
            if !opts.baselines {
                return Ok(None);
            }
            Ok(Some(solve(scheme, &channels, cfg)?.objective_bits))
        };
        samples.push(SampleEval {
            index: s.index,
            seed: s.seed,
            teacher_bits: s.teacher_bits,
            csi_bits,
            loc_bits,
            zf_bits: base(Scheme::Zf)?,
            equal_bits: base(Scheme::Equal)?,
            no_ris_bits: base(Scheme::NoRis)?,
        });
    }
    let teacher: Vec<f64> = samples.iter().map(|s| s.teacher_bits).collect();
    let column = |f: fn(&SampleEval) -> Option<f64>| -> Option<RatioSummary> {
        let v: Option<Vec<f64>> = samples.iter().map(f).collect();
        v.filter(|v| !v.is_empty()).map(|v| summarize(&v, &teacher))
    };
    let n = test.len().max(1) as f64;
    Ok(EvalReport {
        teacher_mean_bits: teacher.iter().sum::<f64>() / n,
        csi: column(|s| s.csi_bits),
        location: column(|s| s.loc_bits),
        zf: column(|s| s.zf_bits),
        equal: column(|s| s.equal_bits),
        no_ris: column(|s| s.no_ris_bits),
        csi_latency_s: models.has_csi().then_some(csi_time / n),
        location_latency_s: models.has_location().then_some(loc_time / n),
        csi_noisy_inputs: csi_noisy,
        location_noisy_inputs: loc_noisy,
        samples,
    })
}
