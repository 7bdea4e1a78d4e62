//! Three-step block coordinate descent: RIS phases (DC programming on the
//! lifted phase matrix), receive beamforming (generalized eigenvectors) and
//! energy partition (DC programming), repeated until the TCTB settles.

mod beamforming;
mod energy;
mod phase;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use beamforming::{beamforming_gains, beamforming_step, interference_covariance};
pub use energy::{dc_energy_step, golden_section_max, interference_free_split, EnergyModel, EnergyStep};
pub use phase::{
    build_q_matrices, dc_phase_step, extract_phi, f2_linearized, f_terms, rank_constraint_residual, solve_p11,
    LiftedPhase, PhaseOptions, PhaseSolver, PhaseStep, QMatrices,
};

use crate::objective::{effective_channels, mrc_beamformers, tctb_parts, Solution};
use crate::{ChannelSet, Error, Result, SystemConfig, C64};

/// How Step 2 picks the receive filters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BeamformerRule {
    /// SINR-optimal generalized eigenvectors.
    Eigen,
    /// `H(H^H H)^{-1}`, pseudo-inverse when rank deficient.
    ZeroForcing,
}

/// How Step 3 picks the energy split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnergyRule {
    /// DC programming on the full interference-coupled objective.
    Dc,
    /// Keep every `a_n` at the given value; Step 3 is skipped.
    Fixed(f64),
    /// Per-UE split against the interference-free rate of the current filters.
    InterferenceFree,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BcdOptions {
    pub max_outer: usize,
    pub phase: PhaseOptions,
    pub max_energy_inner: usize,
    /// Run Step 1; off for schemes without a reflected path.
    pub optimize_phase: bool,
    pub beamformer: BeamformerRule,
    pub energy: EnergyRule,
    /// Initial offloading fraction for every UE.
    pub a_init: f64,
}

impl Default for BcdOptions {
    fn default() -> Self {
        Self {
            max_outer: 50,
            phase: PhaseOptions::default(),
            max_energy_inner: 500,
            optimize_phase: true,
            beamformer: BeamformerRule::Eigen,
            energy: EnergyRule::Dc,
            a_init: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    Init,
    Phase,
    Beamforming,
    Energy,
    Outer,
}

impl StepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Init => "init",
            Self::Phase => "phase",
            Self::Beamforming => "beamforming",
            Self::Energy => "energy",
            Self::Outer => "outer",
        }
    }
}

/// One diagnostic row. Phase rows carry `B·T·Σ(F1 − F2)` (the offloaded
/// bits at fixed `W`, `a`); all other rows carry the TCTB.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub outer_iter: usize,
    pub step: StepKind,
    pub inner_iter: usize,
    pub objective_bits: f64,
    pub rank_residual: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BcdDiagnostics {
    pub records: Vec<TraceRecord>,
    /// Inner phase trace of every outer iteration.
    pub phase_traces: Vec<Vec<f64>>,
    /// Inner energy trace of every outer iteration.
    pub energy_traces: Vec<Vec<f64>>,
    /// Rank-one residual at each phase-step exit.
    pub rank_residuals: Vec<f64>,
    pub phase_stagnations: usize,
    pub outer_iterations: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BcdRun {
    pub solution: Solution,
    pub diagnostics: BcdDiagnostics,
}

fn initial_point(channels: &ChannelSet, config: &SystemConfig, options: &BcdOptions) -> Result<(Vec<C64>, Vec<f64>, crate::numerics::ComplexMatrix)> {
    let phi = vec![C64::new(1.0, 0.0); config.k()];
    let a0 = match options.energy {
        EnergyRule::Fixed(v) => v,
        _ => options.a_init.min(config.a_cap),
    };
    let a = vec![a0; config.n_ue];
    let w = mrc_beamformers(&effective_channels(channels, &phi)?);
    Ok((phi, a, w))
}

/// Three-step BCD: beamforming, phases, energy split, repeated until the
/// outer objective stalls. Returns the best iterate seen (the last one for the
/// monotone default rules) with its full trace; hitting `max_outer` is
/// reported as a warning, not an error.
pub fn bcd_solve(channels: &ChannelSet, config: &SystemConfig, init: Option<&Solution>, options: &BcdOptions) -> Result<BcdRun> {
    config.validate()?;
    channels.check_dims(config)?;
    if let EnergyRule::Fixed(v) = options.energy {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidArgument(format!("fixed energy split {v} outside [0, 1]")));
        }
    }
    let (mut phi, mut a, mut w) = match init {
        Some(s) => (s.phi.clone(), s.a.clone(), s.w.clone()),
        None => initial_point(channels, config, options)?,
    };
    let eps = config.eps_bits();
    let mut diag = BcdDiagnostics::default();
    let r0 = tctb_parts(&phi, &a, &w, channels, config)?;
    let mut trace = vec![r0];
    diag.records.push(TraceRecord {
        outer_iter: 0,
        step: StepKind::Init,
        inner_iter: 0,
        objective_bits: r0,
        rank_residual: 0.0,
    });
    let mut best = (r0, phi.clone(), a.clone(), w.clone());
    let mut converged = false;

    for chi in 1..=options.max_outer {
        diag.outer_iterations = chi;
        if options.optimize_phase {
            let step = dc_phase_step(&phi, &w, &a, channels, config, &options.phase)?;
            for (l, v) in step.trace.iter().enumerate() {
                diag.records.push(TraceRecord {
                    outer_iter: chi,
                    step: StepKind::Phase,
                    inner_iter: l,
                    objective_bits: *v,
                    rank_residual: step.rank_residual,
                });
            }
            if step.hit_max {
                diag.warnings.push(format!("outer {chi}: phase step hit {} inner iterations", options.phase.max_inner));
            }
            diag.phase_stagnations += usize::from(step.stagnated);
            diag.rank_residuals.push(step.rank_residual);
            diag.phase_traces.push(step.trace);
            phi = step.phi;
        }

        let h_eff = effective_channels(channels, &phi)?;
        w = match options.beamformer {
            BeamformerRule::Eigen => beamforming_step(&h_eff, &a, config)?,
            BeamformerRule::ZeroForcing => {
                let (w, _) = crate::baselines::zf_beamformers(&h_eff)?;
                w
            }
        };
        diag.records.push(TraceRecord {
            outer_iter: chi,
            step: StepKind::Beamforming,
            inner_iter: 0,
            objective_bits: tctb_parts(&phi, &a, &w, channels, config)?,
            rank_residual: 0.0,
        });

        match options.energy {
            EnergyRule::Dc => {
                let step = dc_energy_step(&h_eff, &w, &a, config, options.max_energy_inner)?;
                for (m, v) in step.trace.iter().enumerate() {
                    diag.records.push(TraceRecord {
                        outer_iter: chi,
                        step: StepKind::Energy,
                        inner_iter: m,
                        objective_bits: *v,
                        rank_residual: 0.0,
                    });
                }
                if step.hit_max {
                    diag.warnings.push(format!("outer {chi}: energy step hit {} inner iterations", options.max_energy_inner));
                }
                diag.energy_traces.push(step.trace);
                a = step.a;
            }
            EnergyRule::Fixed(_) => {}
            EnergyRule::InterferenceFree => {
                let gains = crate::baselines::interference_free_gains(&h_eff, &w, config);
                a = interference_free_split(&gains, config, 1e-6);
            }
        }

        let r = tctb_parts(&phi, &a, &w, channels, config)?;
        diag.records.push(TraceRecord {
            outer_iter: chi,
            step: StepKind::Outer,
            inner_iter: 0,
            objective_bits: r,
            rank_residual: 0.0,
        });
        trace.push(r);
        if r > best.0 {
            best = (r, phi.clone(), a.clone(), w.clone());
        }
        if chi > 1 && (trace[chi] - trace[chi - 1]).abs() < eps {
            converged = true;
            break;
        }
    }
    if !converged {
        diag.warnings.push(format!("outer loop did not converge in {} iterations", options.max_outer));
    }
    let (objective_bits, phi, a, w) = best;
    Ok(BcdRun {
        solution: Solution {
            phi,
            a,
            w,
            objective_bits,
            trace,
            converged,
        },
        diagnostics: diag,
    })
}
