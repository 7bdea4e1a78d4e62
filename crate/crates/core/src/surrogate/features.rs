use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand::Rng;

use super::mlp::csi_dim;
use crate::numerics::ComplexMatrix;
use crate::rng::normal;
use crate::{ChannelSet, Error, Result, SystemConfig, C64};

const TAU: f64 = core::f64::consts::TAU;

/// Real and imaginary parts of `h_d` (M×N), `h_r` (K×N) and `H_AP` (M×K),
/// each row-major, interleaved `[re, im]` per entry.
pub fn csi_features(channels: &ChannelSet) -> Vec<f64> {
    let mut out = Vec::with_capacity(csi_dim(channels.m_ap(), channels.n_ue(), channels.k()));
    for m in [&channels.h_d, &channels.h_r, &channels.h_ap] {
        for z in m.as_slice() {
            out.push(z.re);
            out.push(z.im);
        }
    }
    out
}

/// Inverse of [`csi_features`]; `positions` is carried over unchanged.
pub fn channels_from_features(features: &[f64], config: &SystemConfig, positions: Vec<[f64; 2]>) -> Result<ChannelSet> {
    let (m, n, k) = (config.m_ap, config.n_ue, config.k());
    if features.len() != csi_dim(m, n, k) {
        return Err(Error::Dimension(format!(
            "{} CSI features, expected {}",
            features.len(),
            csi_dim(m, n, k)
        )));
    }
    let mut it = features.chunks_exact(2).map(|p| C64::new(p[0], p[1]));
    let mut take = |rows: usize, cols: usize| ComplexMatrix::from_row_major(rows, cols, it.by_ref().take(rows * cols).collect());
    Ok(ChannelSet {
        h_d: take(m, n)?,
        h_r: take(k, n)?,
        h_ap: take(m, k)?,
        ue_positions: positions,
    })
}

/// `[x_1, y_1, …, x_N, y_N]` in meters.
pub fn location_features(positions: &[[f64; 2]]) -> Vec<f64> {
    positions.iter().flat_map(|p| [p[0], p[1]]).collect()
}

pub fn positions_from_features(features: &[f64]) -> Vec<[f64; 2]> {
    features.chunks_exact(2).map(|p| [p[0], p[1]]).collect()
}

/// Label `[θ̃; a]` with `θ̃_k = arg(φ_k)/2π ∈ [0, 1)`. The phases are used
/// as extracted (relative to the auxiliary entry), without a global
/// rotation: the direct link fixes the absolute phase reference.
pub fn solution_label(phi: &[C64], a: &[f64]) -> Vec<f64> {
    phi.iter()
        .map(|z| {
            let mut t = z.arg() / TAU;
            if t < 0.0 {
                t += 1.0;
            }
            // -0.0 + 1 and tiny negatives round up to exactly 1
            if t >= 1.0 {
                0.0
            } else {
                t
            }
        })
        .chain(a.iter().copied())
        .collect()
}

/// Split a network output into unit-modulus `φ` and `a ∈ [0, a_cap]`.
pub fn decode_label(y: &[f64], config: &SystemConfig) -> Result<(Vec<C64>, Vec<f64>)> {
    let k = config.k();
    if y.len() != k + config.n_ue {
        return Err(Error::Dimension(format!("{} outputs, expected K+N = {}", y.len(), k + config.n_ue)));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("network output".into()));
    }
    let phi = y[..k].iter().map(|&t| C64::from_polar(1.0, TAU * t)).collect();
    let a = y[k..].iter().map(|&v| v.clamp(0.0, config.a_cap)).collect();
    Ok((phi, a))
}

/// `x̂ = x + Δ`, `Δ` i.i.d. `N(0, σ²)` per component.
pub fn corrupt<R: Rng + ?Sized>(x: &[f64], sigma: f64, rng: &mut R) -> Result<Vec<f64>> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("noise level {sigma} must be finite and >= 0")));
    }
    if sigma == 0.0 {
        return Ok(x.to_vec());
    }
    Ok(x.iter().map(|&v| v + normal(rng, sigma)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::gen_channels;

    #[test]
    fn csi_round_trip() {
        let cfg = SystemConfig::desk();
        let ch = gen_channels(&cfg, 4).unwrap();
        let f = csi_features(&ch);
        assert_eq!(f.len(), csi_dim(4, 4, 8));
        let back = channels_from_features(&f, &cfg, ch.ue_positions.clone()).unwrap();
        assert_eq!(back, ch);
    }

    #[test]
    fn label_round_trip() {
        let cfg = SystemConfig::desk().with_counts(2, 2, 2, 1);
        let phi = [C64::from_polar(1.0, -0.5), C64::from_polar(1.0, 3.0)];
        let y = solution_label(&phi, &[0.25, 1.0]);
        assert!(y.iter().all(|v| (0.0..=1.0).contains(v)));
        let (p, a) = decode_label(&y, &cfg).unwrap();
        for (u, v) in p.iter().zip(&phi) {
            assert!((u - v).norm() < 1e-12);
        }
        assert_eq!(a, [0.25, cfg.a_cap]);
    }
}
