//! Comparison schemes: no RIS, zero-forcing receive beamforming, and equal
//! energy allocation.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::bcd::{bcd_solve, BcdOptions, BcdRun, BeamformerRule, EnergyRule};
use crate::numerics::{dot_conj, hermitian_pinv, norm2, ComplexMatrix};
use crate::objective::Solution;
use crate::{ChannelSet, Result, SystemConfig, C64};

/// Eigenvalues of `H^H H` below this fraction of the largest are dropped.
pub const ZF_RANK_CUTOFF: f64 = 1e-10;

/// `W = H (H^H H)^+`. The flag is `false` when `H` is numerically
/// rank deficient (for example `M < N`) and the pseudo-inverse was used.
/// Columns that come out zero fall back to the first basis vector so every
/// UE keeps a valid filter.
pub fn zf_beamformers(h_eff: &ComplexMatrix) -> Result<(ComplexMatrix, bool)> {
    let gram = h_eff.adjoint().matmul(h_eff)?.hermitian_part();
    let (inv, rank) = hermitian_pinv(&gram, ZF_RANK_CUTOFF)?;
    let mut w = h_eff.matmul(&inv)?;
    for j in 0..w.cols() {
        if norm2(&w.column(j)) == 0.0 {
            w[(0, j)] = C64::new(1.0, 0.0);
        }
    }
    Ok((w, rank == h_eff.cols()))
}

/// `|w_n^H h_n|² / (σ²‖w_n‖²)` per UE.
pub fn interference_free_gains(h_eff: &ComplexMatrix, w: &ComplexMatrix, config: &SystemConfig) -> Vec<f64> {
    (0..h_eff.cols())
        .map(|n| {
            let wn = w.column(n);
            let num = dot_conj(&wn, &h_eff.column(n)).norm_sqr();
            num / (config.noise_w * norm2(&wn).powi(2))
        })
        .collect()
}

/// Per-UE energy split for ZF filters against the interference-free rate,
/// golden-section search to `1e-6`.
pub fn zf_energy_split(h_eff: &ComplexMatrix, w_zf: &ComplexMatrix, config: &SystemConfig) -> Vec<f64> {
    crate::bcd::interference_free_split(&interference_free_gains(h_eff, w_zf, config), config, 1e-6)
}

/// BCD with Step 2 replaced by ZF and Step 3 by the per-UE split.
pub fn solve_zf(channels: &ChannelSet, config: &SystemConfig) -> Result<BcdRun> {
    let options = BcdOptions {
        beamformer: BeamformerRule::ZeroForcing,
        energy: EnergyRule::InterferenceFree,
        ..BcdOptions::default()
    };
    bcd_solve(channels, config, None, &options)
}

/// Direct offloading only: the reflected path is removed and Step 1 is
/// skipped; `phi` is reported as all ones.
pub fn solve_no_ris(channels: &ChannelSet, config: &SystemConfig) -> Result<BcdRun> {
    let options = BcdOptions {
        optimize_phase: false,
        ..BcdOptions::default()
    };
    bcd_solve(&channels.without_ris(), config, None, &options)
}

/// `a_n = 0.5` for all UEs; Steps 1 and 2 only.
pub fn solve_equal_energy(channels: &ChannelSet, config: &SystemConfig) -> Result<BcdRun> {
    let options = BcdOptions {
        energy: EnergyRule::Fixed(0.5),
        ..BcdOptions::default()
    };
    bcd_solve(channels, config, None, &options)
}

/// Dispatch by scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Bcd,
    Zf,
    Equal,
    NoRis,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Bcd, Scheme::Zf, Scheme::Equal, Scheme::NoRis];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Bcd => "bcd",
            Self::Zf => "zf",
            Self::Equal => "equal",
            Self::NoRis => "no-ris",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "bcd" => Some(Self::Bcd),
            "zf" => Some(Self::Zf),
            "equal" | "equal-energy" | "equal_energy" => Some(Self::Equal),
            "no-ris" | "no_ris" | "noris" => Some(Self::NoRis),
            _ => None,
        }
    }

    pub fn solve(self, channels: &ChannelSet, config: &SystemConfig) -> Result<BcdRun> {
        match self {
            Self::Bcd => bcd_solve(channels, config, None, &BcdOptions::default()),
            Self::Zf => solve_zf(channels, config),
            Self::Equal => solve_equal_energy(channels, config),
            Self::NoRis => solve_no_ris(channels, config),
        }
    }
}

/// Convenience for callers that only need the solution.
pub fn solve(scheme: Scheme, channels: &ChannelSet, config: &SystemConfig) -> Result<Solution> {
    Ok(scheme.solve(channels, config)?.solution)
}
