use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use ris_mec_core::baselines::Scheme;
use ris_mec_core::bcd::BcdOptions;
use ris_mec_core::objective::Solution;
use ris_mec_core::surrogate::FitOptions;
use ris_mec_core::{gen_channels, SystemConfig};
use serde::{Deserialize, Serialize};

use crate::config_file::load_config;
use crate::dataset::{gen_channel_file, gen_dataset, ChannelFile, Corruption, Dataset, Scenario, CHANNELS_KIND, DATASET_KIND};
use crate::error::{HarnessError, Result};
use crate::eval::{evaluate_surrogates, EvalOptions, RatioSummary, REPORT_KIND};
use crate::io::{emit_json, loss_rows, read_json, write_csv, write_csv_file, write_json};
use crate::sweep::{run_sweep, SweepScheme, SweepSpec, SweepVariable, SWEEP_KIND};
use crate::training::{train_net, Checkpoint, ModelSet, NetKind, TrainOptions, CHECKPOINT_KIND};

pub const SOLUTION_KIND: &str = "solution";

/// RIS-aided MEC resource allocation: channels, solvers, datasets, surrogates.
#[derive(Debug, Parser)]
#[command(name = "ris-mec", version)]
pub struct Cli {
    /// TOML configuration; omitted keys take the 8-UE reference values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file (stdout when omitted, except for `train`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw UE positions and channels.
    GenChannels {
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Solve one instance with a scheme.
    Solve {
        #[arg(long, default_value = "bcd", value_parser = parse_scheme)]
        scheme: Scheme,
        /// Channels from `gen-channels`; otherwise generated from --seed.
        #[arg(long)]
        channels: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        index: usize,
    },
    /// Label instances with the BCD teacher.
    GenDataset {
        #[arg(long)]
        count: usize,
        /// nlos, los, or a ζ_d value in [0, 1].
        #[arg(long, default_value = "nlos", value_parser = parse_scenario)]
        scenario: Scenario,
        /// Also store features corrupted with this CSI noise level
        /// (the location level defaults to 1 m).
        #[arg(long)]
        sigma_dx: Option<f64>,
        /// Also store locations corrupted with this noise level in meters
        /// (the CSI level defaults to 0.001).
        #[arg(long)]
        sigma_dz: Option<f64>,
    },
    /// Train one network on a dataset.
    Train(TrainArgs),
    /// Evaluate surrogate pipelines on a test dataset.
    Eval {
        #[arg(long)]
        dataset: PathBuf,
        #[command(flatten)]
        models: ModelArgs,
        /// Skip the baseline solvers.
        #[arg(long)]
        no_baselines: bool,
        /// Per-sample TCTB table.
        #[arg(long)]
        samples_csv: Option<PathBuf>,
    },
    /// Sweep one parameter and record the TCTB of each scheme.
    Sweep {
        /// E, M, N, zeta_d, sigma_dx or sigma_dz.
        #[arg(long, value_parser = parse_variable)]
        variable: SweepVariable,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        reps: usize,
        /// Any of bcd, zf, equal, no-ris, dnn-csi, dnn-loc.
        #[arg(long, value_delimiter = ',', default_value = "bcd,zf,equal,no-ris", value_parser = parse_sweep_scheme)]
        schemes: Vec<SweepScheme>,
        #[command(flatten)]
        models: ModelArgs,
    },
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long, value_parser = parse_net)]
    pub net: NetKind,
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    #[arg(long, default_value_t = 128)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub lr: f64,
    #[arg(long, default_value_t = 0.2)]
    pub validation_split: f64,
    /// Train on the dataset's corrupted features.
    #[arg(long)]
    pub noisy: bool,
    /// Feed raw features instead of min-max scaled ones.
    #[arg(long)]
    pub no_input_scaling: bool,
    /// Loss curves (epoch, train_loss, val_loss).
    #[arg(long)]
    pub loss_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub csi: Option<PathBuf>,
    #[arg(long)]
    pub loc1: Option<PathBuf>,
    #[arg(long)]
    pub loc2: Option<PathBuf>,
}

impl ModelArgs {
    fn load(&self) -> Result<ModelSet> {
        let load = |p: &Option<PathBuf>, want: NetKind| -> Result<Option<Checkpoint>> {
            let Some(p) = p else { return Ok(None) };
            let c: Checkpoint = read_json(p, CHECKPOINT_KIND)?;
            if c.net != want {
                return Err(HarnessError::Invalid(format!(
                    "{}: is a {} checkpoint, expected {}",
                    p.display(),
                    c.net.as_str(),
                    want.as_str()
                )));
            }
            Ok(Some(c))
        };
        Ok(ModelSet {
            csi: load(&self.csi, NetKind::Csi)?,
            loc1: load(&self.loc1, NetKind::Loc1)?,
            loc2: load(&self.loc2, NetKind::Loc2)?,
        })
    }
}

fn parse_scheme(s: &str) -> std::result::Result<Scheme, String> {
    Scheme::parse(s).ok_or_else(|| format!("unknown scheme `{s}` (bcd, zf, equal, no-ris)"))
}

fn parse_sweep_scheme(s: &str) -> std::result::Result<SweepScheme, String> {
    SweepScheme::parse(s).ok_or_else(|| format!("unknown scheme `{s}` (bcd, zf, equal, no-ris, dnn-csi, dnn-loc)"))
}

fn parse_scenario(s: &str) -> std::result::Result<Scenario, String> {
    Scenario::parse(s).ok_or_else(|| format!("scenario must be nlos, los or a number in [0, 1], got `{s}`"))
}

fn parse_net(s: &str) -> std::result::Result<NetKind, String> {
    NetKind::parse(s).ok_or_else(|| format!("unknown net `{s}` (csi, loc1, loc2)"))
}

fn parse_variable(s: &str) -> std::result::Result<SweepVariable, String> {
    SweepVariable::parse(s).ok_or_else(|| format!("unknown variable `{s}` (E, M, N, zeta_d, sigma_dx, sigma_dz)"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutput {
    pub scheme: Scheme,
    pub seed: Option<u64>,
    pub solution: Solution,
    pub outer_iterations: usize,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
struct EvalSummary<'a> {
    samples: usize,
    teacher_mean_bits: f64,
    csi: &'a Option<RatioSummary>,
    location: &'a Option<RatioSummary>,
    zf: &'a Option<RatioSummary>,
    equal: &'a Option<RatioSummary>,
    no_ris: &'a Option<RatioSummary>,
}

pub fn run(cli: Cli) -> Result<()> {
    let config = match &cli.config {
        Some(p) => load_config(p)?,
        None => SystemConfig::reference(),
    };
    let out = cli.out.as_deref();
    match cli.command {
        Command::GenChannels { count } => emit_json(out, CHANNELS_KIND, &gen_channel_file(&config, count, cli.seed)?),
        Command::Solve { scheme, channels, index } => {
            let (cfg, ch, seed) = match channels {
                Some(path) => {
                    let file: ChannelFile = read_json(&path, CHANNELS_KIND)?;
                    let rec = file.records.get(index).ok_or_else(|| {
                        HarnessError::Invalid(format!("{}: no record {index} ({} stored)", path.display(), file.records.len()))
                    })?;
                    (file.config.clone(), rec.channels.clone(), Some(rec.seed))
                }
                None => (config.clone(), gen_channels(&config, cli.seed)?, Some(cli.seed)),
            };
            let run = scheme.solve(&ch, &cfg)?;
            emit_json(
                out,
                SOLUTION_KIND,
                &SolveOutput {
                    scheme,
                    seed,
                    outer_iterations: run.diagnostics.outer_iterations,
                    warnings: run.diagnostics.warnings,
                    solution: run.solution,
                },
            )
        }
        Command::GenDataset {
            count,
            scenario,
            sigma_dx,
            sigma_dz,
        } => {
            let corruption = (sigma_dx.is_some() || sigma_dz.is_some()).then(|| Corruption {
                sigma_dx: sigma_dx.unwrap_or(1e-3),
                sigma_dz: sigma_dz.unwrap_or(1.0),
            });
            let ds = gen_dataset(&config, count, scenario, corruption, cli.seed, &BcdOptions::default())?;
            if !ds.skipped.is_empty() {
                log::warn!("{} of {count} samples skipped", ds.skipped.len());
            }
            emit_json(out, DATASET_KIND, &ds)
        }
        Command::Train(args) => {
            let out = out.ok_or_else(|| HarnessError::Invalid("train needs --out for the checkpoint".into()))?;
            let ds = load_dataset(&args.dataset)?;
            let opts = TrainOptions {
                fit: FitOptions {
                    batch_size: args.batch_size,
                    epochs: args.epochs,
                    validation_split: args.validation_split,
                    adam: ris_mec_core::surrogate::AdamConfig {
                        lr: args.lr,
                        ..Default::default()
                    },
                    seed: cli.seed,
                    ..FitOptions::default()
                },
                noisy_inputs: args.noisy,
                scale_inputs: !args.no_input_scaling,
            };
            let ckpt = train_net(&ds, args.net, &opts)?;
            if let Some(p) = &args.loss_csv {
                write_csv_file(p, "loss", &loss_rows(&ckpt.report))?;
            }
            write_json(out, CHECKPOINT_KIND, &ckpt)
        }
        Command::Eval {
            dataset,
            models,
            no_baselines,
            samples_csv,
        } => {
            let ds = load_dataset(&dataset)?;
            let models = models.load()?;
            let report = evaluate_surrogates(&models, &ds, &EvalOptions { baselines: !no_baselines })?;
            if let Some(p) = &samples_csv {
                write_csv_file(p, "eval-samples", &report.samples)?;
            }
            match out {
                Some(p) => write_json(p, REPORT_KIND, &report),
                None => emit_json(
                    None,
                    "eval-summary",
                    &EvalSummary {
                        samples: report.samples.len(),
                        teacher_mean_bits: report.teacher_mean_bits,
                        csi: &report.csi,
                        location: &report.location,
                        zf: &report.zf,
                        equal: &report.equal,
                        no_ris: &report.no_ris,
                    },
                ),
            }
        }
        Command::Sweep {
            variable,
            values,
            reps,
            schemes,
            models,
        } => {
            let spec = SweepSpec {
                config,
                variable,
                values,
                replications: reps,
                schemes,
                seed: cli.seed,
            };
            let rows = run_sweep(&spec, &models.load()?)?;
            match out {
                Some(p) => write_csv_file(p, SWEEP_KIND, &rows),
                None => write_csv(std::io::stdout().lock(), SWEEP_KIND, &rows),
            }
        }
    }
}

pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let ds: Dataset = read_json(path, DATASET_KIND)?;
    ds.validate()?;
    Ok(ds)
}
