//! Geometric Rician channel generation for the UE→AP direct links, the
//! UE→RIS links and the RIS→AP link.
//!
//! Angle convention: for a link seen from an array at `p` toward a far end
//! at `q`, with `d = q − p`, elevation is `β = acos(d_z/|d|)` (from the
//! z-axis) and azimuth is `γ = atan2(d_y, d_x)` (in the x-y plane from the
//! x-axis).

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::numerics::ComplexMatrix;
use crate::rng::{complex_normal, rng_from_seed};
use crate::{Error, Result, SystemConfig, C64};

/// One realization of every channel block plus the UE positions that
/// produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSet {
    /// Direct UE→AP channels, `M×N`.
    pub h_d: ComplexMatrix,
    /// UE→RIS channels, `K×N`.
    pub h_r: ComplexMatrix,
    /// RIS→AP channel, `M×K`.
    pub h_ap: ComplexMatrix,
    /// Ground positions (x, y) in metres.
    pub ue_positions: Vec<[f64; 2]>,
}

impl ChannelSet {
    pub fn n_ue(&self) -> usize {
        self.h_d.cols()
    }

    pub fn m_ap(&self) -> usize {
        self.h_d.rows()
    }

    pub fn k(&self) -> usize {
        self.h_r.rows()
    }

    /// Check block shapes against each other and against `config`.
    pub fn check_dims(&self, config: &SystemConfig) -> Result<()> {
        let (n, m, k) = (config.n_ue, config.m_ap, config.k());
        let shapes = [
            ("h_d", self.h_d.rows(), self.h_d.cols(), m, n),
            ("h_r", self.h_r.rows(), self.h_r.cols(), k, n),
            ("h_ap", self.h_ap.rows(), self.h_ap.cols(), m, k),
        ];
        for (name, r, c, er, ec) in shapes {
            if (r, c) != (er, ec) {
                return Err(Error::Dimension(format!(
                    "{name} is {r}x{c}, expected {er}x{ec}"
                )));
            }
        }
        if !self.ue_positions.is_empty() && self.ue_positions.len() != n {
            return Err(Error::Dimension(format!(
                "{} UE positions for {n} UEs",
                self.ue_positions.len()
            )));
        }
        Ok(())
    }

    /// Copy with the reflected path removed.
    pub fn without_ris(&self) -> Self {
        Self {
            h_ap: ComplexMatrix::zeros(self.h_ap.rows(), self.h_ap.cols()),
            ..self.clone()
        }
    }
}

/// Half-wavelength ULA response `exp(jπ(m−1)·sin_angle)`.
pub fn steering_ula(sin_angle: f64, m: usize) -> Result<Vec<C64>> {
    if !(-1.0..=1.0).contains(&sin_angle) {
        return Err(Error::InvalidArgument(format!(
            "sin(angle) = {sin_angle} outside [-1, 1]"
        )));
    }
    Ok((0..m)
        .map(|i| C64::from_polar(1.0, core::f64::consts::PI * i as f64 * sin_angle))
        .collect())
}

/// Half-wavelength URA response `e_y ⊗ e_z`.
pub fn steering_ura(elev: f64, azim: f64, k_y: usize, k_z: usize) -> Vec<C64> {
    let pi = core::f64::consts::PI;
    let uy = elev.sin() * azim.sin();
    let uz = elev.cos() * azim.sin();
    let mut out = Vec::with_capacity(k_y * k_z);
    for iy in 0..k_y {
        for iz in 0..k_z {
            out.push(C64::from_polar(1.0, pi * (iy as f64 * uy + iz as f64 * uz)));
        }
    }
    out
}

/// `extra_gain · L0 · (d/d0)^(−alpha)`.
pub fn path_loss(d: f64, alpha: f64, l0: f64, d0: f64, extra_gain: f64) -> Result<f64> {
    if !(d0 > 0.0) || !(d >= d0) {
        return Err(Error::InvalidArgument(format!(
            "link distance {d} m is below the reference distance {d0} m"
        )));
    }
    Ok(extra_gain * l0 * (d / d0).powf(-alpha))
}

fn sub3(q: [f64; 3], p: [f64; 3]) -> [f64; 3] {
    [q[0] - p[0], q[1] - p[1], q[2] - p[2]]
}

fn norm3(d: [f64; 3]) -> f64 {
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

/// (elevation, azimuth, distance) of `to` as seen from `from`.
pub fn link_angles(from: [f64; 3], to: [f64; 3]) -> (f64, f64, f64) {
    let d = sub3(to, from);
    let r = norm3(d);
    let elev = if r > 0.0 { (d[2] / r).clamp(-1.0, 1.0).acos() } else { 0.0 };
    (elev, d[1].atan2(d[0]), r)
}

/// Draw UE positions uniformly in the serving square, then the channels.
pub fn gen_channels(config: &SystemConfig, seed: u64) -> Result<ChannelSet> {
    config.validate()?;
    let mut rng = rng_from_seed(seed);
    let positions = draw_positions(config, &mut rng);
    gen_channels_at(config, &positions, &mut rng)
}

pub fn draw_positions<R: Rng + ?Sized>(config: &SystemConfig, rng: &mut R) -> Vec<[f64; 2]> {
    let [x0, y0] = config.area_origin;
    let side = config.area_side;
    (0..config.n_ue)
        .map(|_| {
            let x = x0 + side * rng.gen::<f64>();
            let y = y0 + side * rng.gen::<f64>();
            [x, y]
        })
        .collect()
}

/// Channels for fixed UE positions. The Rayleigh parts are drawn in the
/// order h_r (per UE), H_AP (row-major), h_d (per UE) and are always drawn,
/// whatever the Rician fractions, so a seed maps to the same fading for
/// every ζ.
pub fn gen_channels_at<R: Rng + ?Sized>(
    config: &SystemConfig,
    positions: &[[f64; 2]],
    rng: &mut R,
) -> Result<ChannelSet> {
    config.validate()?;
    let (n, m, k) = (config.n_ue, config.m_ap, config.k());
    if positions.len() != n {
        return Err(Error::Dimension(format!("{} positions for {n} UEs", positions.len())));
    }
    let pl = |d: f64, alpha: f64, gain: f64| path_loss(d, alpha, config.l0, config.d0, gain);
    let mix = |zeta: f64, los: C64, nlos: C64| los * zeta.sqrt() + nlos * (1.0 - zeta).sqrt();
    let ues: Vec<[f64; 3]> = positions.iter().map(|p| [p[0], p[1], 0.0]).collect();

    let mut h_r = ComplexMatrix::zeros(k, n);
    for (j, ue) in ues.iter().enumerate() {
        let (elev, azim, dist) = link_angles(config.ris_pos, *ue);
        let gain = pl(dist, config.alpha_r, config.ris_element_gain)?.sqrt();
        let los = steering_ura(elev, azim, config.k_y, config.k_z);
        for (i, e) in los.iter().enumerate() {
            h_r[(i, j)] = mix(config.zeta_r, *e, complex_normal(rng)) * gain;
        }
    }

    let (elev_ap, _, d_ap) = link_angles(config.ap_pos, config.ris_pos);
    let (elev_ris, azim_ris, _) = link_angles(config.ris_pos, config.ap_pos);
    let gain_ap = pl(d_ap, config.alpha_ap, config.ris_element_gain)?.sqrt();
    let e_rx = steering_ula(elev_ap.sin(), m)?;
    let e_tx = steering_ura(elev_ris, azim_ris, config.k_y, config.k_z);
    let mut h_ap = ComplexMatrix::zeros(m, k);
    for i in 0..m {
        for j in 0..k {
            let los = e_rx[i] * e_tx[j].conj();
            h_ap[(i, j)] = mix(config.zeta_ap, los, complex_normal(rng)) * gain_ap;
        }
    }

    let mut h_d = ComplexMatrix::zeros(m, n);
    for (j, ue) in ues.iter().enumerate() {
        let (elev, _, dist) = link_angles(config.ap_pos, *ue);
        let gain = pl(dist, config.alpha_d, 1.0)?.sqrt();
        let los = steering_ula(elev.sin(), m)?;
        for (i, e) in los.iter().enumerate() {
            h_d[(i, j)] = mix(config.zeta_d, *e, complex_normal(rng)) * gain;
        }
    }

    Ok(ChannelSet {
        h_d,
        h_r,
        h_ap,
        ue_positions: positions.to_vec(),
    })
}

/// Path losses `(L_d,n, L_r,n)` per UE and `L_AP`, for diagnostics and tests.
pub fn link_path_losses(config: &SystemConfig, positions: &[[f64; 2]]) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let mut ld = Vec::with_capacity(positions.len());
    let mut lr = Vec::with_capacity(positions.len());
    for p in positions {
        let ue = [p[0], p[1], 0.0];
        let (_, _, dd) = link_angles(config.ap_pos, ue);
        let (_, _, dr) = link_angles(config.ris_pos, ue);
        ld.push(path_loss(dd, config.alpha_d, config.l0, config.d0, 1.0)?);
        lr.push(path_loss(dr, config.alpha_r, config.l0, config.d0, config.ris_element_gain)?);
    }
    let (_, _, da) = link_angles(config.ap_pos, config.ris_pos);
    let la = path_loss(da, config.alpha_ap, config.l0, config.d0, config.ris_element_gain)?;
    Ok((ld, lr, la))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn ula_examples() {
        assert!(steering_ula(0.0, 4).unwrap().iter().all(|z| close(*z, C64::new(1.0, 0.0))));
        assert_eq!(steering_ula(0.3, 1).unwrap(), [C64::new(1.0, 0.0)]);
        let v = steering_ula(1.0, 2).unwrap();
        assert!(close(v[0], C64::new(1.0, 0.0)) && close(v[1], C64::new(-1.0, 0.0)));
        assert!(steering_ula(1.5, 2).is_err());
    }

    #[test]
    fn ura_examples() {
        assert!(steering_ura(0.7, 0.0, 3, 2).iter().all(|z| close(*z, C64::new(1.0, 0.0))));
        assert_eq!(steering_ura(0.7, 0.3, 1, 1).len(), 1);
        let h = core::f64::consts::FRAC_PI_2;
        let v = steering_ura(h, h, 2, 2);
        let want = [1.0, 1.0, -1.0, -1.0];
        for (z, w) in v.iter().zip(want) {
            assert!(close(*z, C64::new(w, 0.0)));
        }
    }

    #[test]
    fn path_loss_examples() {
        assert!((path_loss(1.0, 2.0, 0.1, 1.0, 1.0).unwrap() - 0.1).abs() < 1e-15);
        assert!((path_loss(10.0, 2.0, 0.1, 1.0, 1.0).unwrap() - 1e-3).abs() < 1e-15);
        let g = path_loss(1.0, 2.5, 0.1, 1.0, 10f64.powf(0.3)).unwrap();
        assert!((g - 0.199526).abs() < 1e-5);
        assert!(path_loss(0.5, 2.0, 0.1, 1.0, 1.0).is_err());
    }

    #[test]
    fn pure_los_entries_have_path_loss_modulus() {
        let mut cfg = SystemConfig::desk();
        cfg.zeta_d = 1.0;
        let ch = gen_channels(&cfg, 11).unwrap();
        let (ld, lr, la) = link_path_losses(&cfg, &ch.ue_positions).unwrap();
        for j in 0..cfg.n_ue {
            for i in 0..cfg.m_ap {
                assert!((ch.h_d[(i, j)].norm() - ld[j].sqrt()).abs() < 1e-12 * ld[j].sqrt());
            }
            for i in 0..cfg.k() {
                assert!((ch.h_r[(i, j)].norm() - lr[j].sqrt()).abs() < 1e-12 * lr[j].sqrt());
            }
        }
        assert!(ch.h_ap.as_slice().iter().all(|z| (z.norm() - la.sqrt()).abs() < 1e-12 * la.sqrt()));
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = SystemConfig::desk();
        assert_eq!(gen_channels(&cfg, 5).unwrap(), gen_channels(&cfg, 5).unwrap());
        assert_ne!(gen_channels(&cfg, 5).unwrap(), gen_channels(&cfg, 6).unwrap());
    }

    #[test]
    fn positions_inside_square() {
        let cfg = SystemConfig::reference();
        let ch = gen_channels(&cfg, 1).unwrap();
        assert!(ch.ue_positions.iter().all(|p| (20.0..=60.0).contains(&p[0]) && (20.0..=60.0).contains(&p[1])));
        ch.check_dims(&cfg).unwrap();
    }
}
