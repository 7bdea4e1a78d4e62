//! SINR, offloading and local-computing rates, and the TCTB objective.

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::numerics::{dot_conj, norm2, ComplexMatrix};
use crate::{ChannelSet, Error, Result, SystemConfig, C64};

/// Allowed deviation of `|φ_k|` from one.
pub const UNIT_MODULUS_TOL: f64 = 1e-9;

/// A candidate resource allocation and its objective value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    /// RIS reflection coefficients, unit modulus, length `K`.
    pub phi: Vec<C64>,
    /// Offloading energy fractions, length `N`.
    pub a: Vec<f64>,
    /// Receive beamformers, `M×N`, one column per UE.
    pub w: ComplexMatrix,
    /// TCTB in bits.
    pub objective_bits: f64,
    /// Objective after each outer iteration, starting with the initial point.
    pub trace: Vec<f64>,
    /// Whether the outer loop met its tolerance.
    pub converged: bool,
}

/// Column `n` is `H_AP·diag(φ)·h_r,n + h_d,n`.
pub fn effective_channels(channels: &ChannelSet, phi: &[C64]) -> Result<ComplexMatrix> {
    let (m, n, k) = (channels.m_ap(), channels.n_ue(), channels.k());
    if phi.len() != k || channels.h_ap.cols() != k || channels.h_ap.rows() != m || channels.h_r.cols() != n {
        return Err(Error::Dimension(format!(
            "phi of length {} for K={k}, H_AP {}x{}, h_r {}x{}",
            phi.len(),
            channels.h_ap.rows(),
            channels.h_ap.cols(),
            channels.h_r.rows(),
            channels.h_r.cols()
        )));
    }
    let mut out = channels.h_d.clone();
    for j in 0..n {
        for kk in 0..k {
            let c = phi[kk] * channels.h_r[(kk, j)];
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            for i in 0..m {
                out[(i, j)] += channels.h_ap[(i, kk)] * c;
            }
        }
    }
    Ok(out)
}

fn check_shapes(a: &[f64], w: &ComplexMatrix, h_eff: &ComplexMatrix, config: &SystemConfig) -> Result<()> {
    let (m, n) = (h_eff.rows(), h_eff.cols());
    if a.len() != n || w.rows() != m || w.cols() != n || config.n_ue != n {
        return Err(Error::Dimension(format!(
            "a has {} entries, W is {}x{}, H is {m}x{n}, config N={}",
            a.len(),
            w.rows(),
            w.cols(),
            config.n_ue
        )));
    }
    Ok(())
}

/// Uplink SINR of UE `n` after receive filter `w_n`.
pub fn sinr(n: usize, a: &[f64], w: &ComplexMatrix, h_eff: &ComplexMatrix, config: &SystemConfig) -> Result<f64> {
    check_shapes(a, w, h_eff, config)?;
    if n >= a.len() {
        return Err(Error::Dimension(format!("UE index {n} out of range")));
    }
    let wn = w.column(n);
    let wnorm2 = norm2(&wn).powi(2);
    if !(wnorm2 > 0.0) {
        return Err(Error::InvalidArgument(format!("beamformer of UE {n} is zero")));
    }
    let mut signal = 0.0;
    let mut interference = 0.0;
    for i in 0..a.len() {
        let g = dot_conj(&wn, &h_eff.column(i)).norm_sqr() * config.tx_power(i, a[i]);
        if i == n {
            signal = g;
        } else {
            interference += g;
        }
    }
    Ok(signal / (interference + config.noise_w * wnorm2))
}

/// SINR of every UE.
pub fn sinr_all(a: &[f64], w: &ComplexMatrix, h_eff: &ComplexMatrix, config: &SystemConfig) -> Result<Vec<f64>> {
    (0..a.len()).map(|n| sinr(n, a, w, h_eff, config)).collect()
}

/// Bits offloaded in the slot at spectral efficiency `log2(1 + sinr)`.
pub fn offload_bits(sinr: f64, config: &SystemConfig) -> f64 {
    config.bt() * log2_1p(sinr)
}

pub fn rate_offload(n: usize, a: &[f64], w: &ComplexMatrix, h_eff: &ComplexMatrix, config: &SystemConfig) -> Result<f64> {
    Ok(offload_bits(sinr(n, a, w, h_eff, config)?, config))
}

/// Bits computed locally with energy `(1 − a_n)E_n` at the DVFS-optimal
/// constant CPU frequency.
pub fn rate_local(a_n: f64, n: usize, config: &SystemConfig) -> f64 {
    let rest = (1.0 - a_n).max(0.0);
    if rest == 0.0 {
        return 0.0;
    }
    let f = (rest * config.power_budget(n) / config.kappa[n]).cbrt();
    config.slot_s / config.cycles_per_bit[n] * f
}

/// `log2(1 + x)`, accurate for small `x`.
pub fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / core::f64::consts::LN_2
}

/// Check unit modulus, box constraints and shapes.
pub fn validate_solution(phi: &[C64], a: &[f64], w: &ComplexMatrix, channels: &ChannelSet, config: &SystemConfig) -> Result<()> {
    channels.check_dims(config)?;
    if phi.len() != config.k() {
        return Err(Error::Dimension(format!("phi has {} entries for K={}", phi.len(), config.k())));
    }
    if let Some((k, z)) = phi.iter().enumerate().find(|(_, z)| !((z.norm() - 1.0).abs() <= UNIT_MODULUS_TOL)) {
        return Err(Error::Infeasible(format!("|phi_{k}| = {} is not unit modulus", z.norm())));
    }
    if let Some((n, v)) = a.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
        return Err(Error::Infeasible(format!("a_{n} = {v} outside [0, 1]")));
    }
    if !w.is_finite() {
        return Err(Error::NonFinite("beamformers".into()));
    }
    check_shapes(a, w, &channels.h_d, config)
}

/// Total completed task-input bits of `(φ, a, W)`.
pub fn tctb_parts(phi: &[C64], a: &[f64], w: &ComplexMatrix, channels: &ChannelSet, config: &SystemConfig) -> Result<f64> {
    validate_solution(phi, a, w, channels, config)?;
    let h_eff = effective_channels(channels, phi)?;
    let mut total = 0.0;
    for n in 0..config.n_ue {
        total += rate_offload(n, a, w, &h_eff, config)? + rate_local(a[n], n, config);
    }
    Ok(total)
}

pub fn tctb(solution: &Solution, channels: &ChannelSet, config: &SystemConfig) -> Result<f64> {
    tctb_parts(&solution.phi, &solution.a, &solution.w, channels, config)
}

/// A phase-independent upper bound on the TCTB: every UE offloads its whole
/// budget with no interference over the strongest possible channel, and also
/// computes locally with its whole budget.
pub fn upper_envelope(channels: &ChannelSet, config: &SystemConfig) -> f64 {
    let k = channels.k();
    let col_norms: Vec<f64> = (0..k).map(|kk| norm2(&channels.h_ap.column(kk))).collect();
    (0..config.n_ue)
        .map(|n| {
            let reflected: f64 = (0..k).map(|kk| col_norms[kk] * channels.h_r[(kk, n)].norm()).sum();
            let gain = (norm2(&channels.h_d.column(n)) + reflected).powi(2);
            let snr = config.power_budget(n) * gain / config.noise_w;
            offload_bits(snr, config) + rate_local(0.0, n, config)
        })
        .sum()
}

/// Unit-norm columns `h_n/‖h_n‖`; a zero channel gets the first basis vector.
pub fn mrc_beamformers(h_eff: &ComplexMatrix) -> ComplexMatrix {
    let mut w = ComplexMatrix::zeros(h_eff.rows(), h_eff.cols());
    for j in 0..h_eff.cols() {
        let col = h_eff.column(j);
        match crate::numerics::normalized(&col) {
            Some(v) => w.set_column(j, &v),
            None => w[(0, j)] = C64::new(1.0, 0.0),
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn local_rate_reference_value() {
        let cfg = SystemConfig::reference();
        let r = rate_local(0.0, 0, &cfg);
        assert!((r - 6.786e7).abs() / 6.786e7 < 1e-3, "{r}");
        assert_eq!(rate_local(1.0, 0, &cfg), 0.0);
        let mut c4 = cfg.clone();
        c4.kappa[0] *= 4.0;
        assert!((rate_local(0.3, 0, &c4) / rate_local(0.3, 0, &cfg) - 4f64.powf(-1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn offload_bits_examples() {
        let mut cfg = SystemConfig::reference();
        assert_eq!(offload_bits(0.0, &cfg), 0.0);
        assert!((offload_bits(1.0, &cfg) - 2e8).abs() < 1e-6);
        cfg.bandwidth_hz = 1.0;
        cfg.slot_s = 1.0;
        assert!((offload_bits(3.0, &cfg) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn two_user_scalar_sinr() {
        let mut cfg = SystemConfig::desk().with_counts(2, 1, 1, 1);
        cfg.noise_w = 1.0;
        cfg.energy_j = alloc::vec![cfg.slot_s; 2];
        let one = C64::new(1.0, 0.0);
        let h = ComplexMatrix::from_row_major(1, 2, alloc::vec![one, one]).unwrap();
        let w = ComplexMatrix::from_row_major(1, 2, alloc::vec![one, one]).unwrap();
        let s = sinr(0, &[1.0, 1.0], &w, &h, &cfg).unwrap();
        assert!((s - 0.5).abs() < 1e-15);
        assert_eq!(sinr(0, &[0.0, 1.0], &w, &h, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn zero_beamformer_rejected() {
        let cfg = SystemConfig::desk().with_counts(1, 2, 1, 1);
        let h = ComplexMatrix::from_fn(2, 1, |_, _| C64::new(1.0, 0.0));
        let w = ComplexMatrix::zeros(2, 1);
        assert!(matches!(sinr(0, &[1.0], &w, &h, &cfg), Err(Error::InvalidArgument(_))));
    }
}
