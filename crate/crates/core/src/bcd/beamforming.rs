//! Step 2: per-UE SINR-maximizing receive filters.

use alloc::vec::Vec;

use crate::numerics::{generalized_max_eigvec, ComplexMatrix};
use crate::{Error, Result, SystemConfig, C64};

/// Interference-plus-noise covariance `Θ_{-n} = Σ_{i≠n} p_i h_i h_i^H + σ²I`.
pub fn interference_covariance(h_eff: &ComplexMatrix, p: &[f64], n: usize, noise_w: f64) -> ComplexMatrix {
    let m = h_eff.rows();
    let mut theta = ComplexMatrix::identity(m).scale(noise_w);
    for (i, &pi) in p.iter().enumerate() {
        if i == n || pi == 0.0 {
            continue;
        }
        let h = h_eff.column(i);
        theta.add_scaled(C64::new(pi, 0.0), &ComplexMatrix::outer(&h, &h));
    }
    theta
}

/// Column `n` is the leading generalized eigenvector of
/// `(Θ_n, Θ_{-n})`, normalized to unit norm. The direction does not depend
/// on `p_n`, so it is computed from `h_n h_n^H`; the UE's SINR is then
/// `p_n` times the returned eigenvalue (see [`beamforming_gains`]).
pub fn beamforming_step(h_eff: &ComplexMatrix, a: &[f64], config: &SystemConfig) -> Result<ComplexMatrix> {
    Ok(beamforming_gains(h_eff, a, config)?.0)
}

/// Beamformers and the per-UE generalized eigenvalues `λ_n` with
/// `SINR_n = p_n λ_n`.
pub fn beamforming_gains(h_eff: &ComplexMatrix, a: &[f64], config: &SystemConfig) -> Result<(ComplexMatrix, Vec<f64>)> {
    let (m, n_ue) = (h_eff.rows(), h_eff.cols());
    if a.len() != n_ue {
        return Err(Error::Dimension(alloc::format!("a has {} entries for {n_ue} UEs", a.len())));
    }
    let p: Vec<f64> = (0..n_ue).map(|n| config.tx_power(n, a[n])).collect();
    let mut w = ComplexMatrix::zeros(m, n_ue);
    let mut values = Vec::with_capacity(n_ue);
    for n in 0..n_ue {
        let h = h_eff.column(n);
        let signal = ComplexMatrix::outer(&h, &h);
        let pair = generalized_max_eigvec(&signal, &interference_covariance(h_eff, &p, n, config.noise_w))?;
        w.set_column(n, &pair.vector);
        values.push(pair.value.max(0.0));
    }
    Ok((w, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::gen_channels;
    use crate::numerics::dot_conj;
    use crate::objective::{effective_channels, sinr};

    #[test]
    fn single_ue_is_matched_filter() {
        let cfg = SystemConfig::desk().with_counts(1, 4, 2, 2);
        let ch = gen_channels(&cfg, 2).unwrap();
        let h = effective_channels(&ch, &alloc::vec![C64::new(1.0, 0.0); 4]).unwrap();
        let w = beamforming_step(&h, &[0.5], &cfg).unwrap();
        let hv = h.column(0);
        let overlap = dot_conj(&w.column(0), &hv).norm();
        assert!((overlap - crate::numerics::norm2(&hv)).abs() < 1e-10 * overlap);
    }

    #[test]
    fn sinr_equals_scaled_eigenvalue() {
        let cfg = SystemConfig::desk();
        let ch = gen_channels(&cfg, 4).unwrap();
        let h = effective_channels(&ch, &alloc::vec![C64::new(1.0, 0.0); cfg.k()]).unwrap();
        let a = [0.2, 0.5, 0.7, 0.9];
        let (w, lambda) = beamforming_gains(&h, &a, &cfg).unwrap();
        for n in 0..cfg.n_ue {
            let s = sinr(n, &a, &w, &h, &cfg).unwrap();
            let want = cfg.tx_power(n, a[n]) * lambda[n];
            assert!((s - want).abs() <= 1e-8 * want.max(1.0));
        }
    }
}
