//! Scenario constants and solver tolerances.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Solver stopping tolerances. `eps`, `eps_1` and `eps_3` are expressed in
/// units of `B·T` bits, so they track the scale of the objective;
/// `eps_psi` bounds the rank-one residual `tr(Ψ) − ‖Ψ‖_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub eps: f64,
    pub eps_1: f64,
    pub eps_3: f64,
    pub eps_psi: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps: 1e-3,
            eps_1: 1e-3,
            eps_3: 1e-3,
            eps_psi: 1e-4,
        }
    }
}

/// Everything that defines one simulated scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Number of UEs `N`.
    pub n_ue: usize,
    /// AP antennas `M`.
    pub m_ap: usize,
    /// RIS rows along y.
    pub k_y: usize,
    /// RIS rows along z.
    pub k_z: usize,
    /// Slot length `T` (s).
    pub slot_s: f64,
    /// Bandwidth `B` (Hz).
    pub bandwidth_hz: f64,
    /// Noise power `σ²` (W).
    pub noise_w: f64,
    /// Energy budget per UE (J).
    pub energy_j: Vec<f64>,
    /// CPU cycles per bit per UE.
    pub cycles_per_bit: Vec<f64>,
    /// Effective capacitance coefficient per UE.
    pub kappa: Vec<f64>,
    pub ap_pos: [f64; 3],
    pub ris_pos: [f64; 3],
    /// Lower-left corner (x, y) of the serving square (m).
    pub area_origin: [f64; 2],
    /// Side length of the serving square (m).
    pub area_side: f64,
    /// Path gain at the reference distance (linear).
    pub l0: f64,
    /// Reference distance (m).
    pub d0: f64,
    pub alpha_d: f64,
    pub alpha_r: f64,
    pub alpha_ap: f64,
    /// Per-element RIS gain applied to both reflected hops (linear).
    pub ris_element_gain: f64,
    pub zeta_r: f64,
    pub zeta_ap: f64,
    pub zeta_d: f64,
    pub tolerances: Tolerances,
    /// Upper clip for the offloading fraction `a_n`.
    pub a_cap: f64,
}

impl SystemConfig {
    /// Reference scenario: 8 UEs, 8 AP antennas, 8×3 RIS.
    pub fn reference() -> Self {
        let n = 8;
        Self {
            n_ue: n,
            m_ap: 8,
            k_y: 8,
            k_z: 3,
            slot_s: 5.0,
            bandwidth_hz: 40e6,
            noise_w: 1e-9,
            energy_j: vec![10.0; n],
            cycles_per_bit: vec![200.0; n],
            kappa: vec![1e-28; n],
            ap_pos: [0.0, 20.0, 5.0],
            ris_pos: [40.0, 0.0, 20.0],
            area_origin: [20.0, 20.0],
            area_side: 40.0,
            l0: 0.1,
            d0: 1.0,
            alpha_d: 3.5,
            alpha_r: 2.5,
            alpha_ap: 2.0,
            ris_element_gain: 10f64.powf(0.3),
            zeta_r: 1.0,
            zeta_ap: 1.0,
            zeta_d: 0.0,
            tolerances: Tolerances::default(),
            a_cap: 1.0 - 1e-6,
        }
    }

    /// Reduced scenario used for dataset generation: N=4, M=4, 4×2 RIS.
    pub fn desk() -> Self {
        Self::reference().with_counts(4, 4, 4, 2)
    }

    /// Same physics with different counts; per-UE vectors are refilled
    /// from their first entry.
    pub fn with_counts(mut self, n_ue: usize, m_ap: usize, k_y: usize, k_z: usize) -> Self {
        let fill = |v: &Vec<f64>| vec![v.first().copied().unwrap_or(0.0); n_ue];
        self.energy_j = fill(&self.energy_j);
        self.cycles_per_bit = fill(&self.cycles_per_bit);
        self.kappa = fill(&self.kappa);
        self.n_ue = n_ue;
        self.m_ap = m_ap;
        self.k_y = k_y;
        self.k_z = k_z;
        self
    }

    pub fn with_zeta_d(mut self, zeta_d: f64) -> Self {
        self.zeta_d = zeta_d;
        self
    }

    /// Uniform energy budget for every UE.
    pub fn with_energy(mut self, energy_j: f64) -> Self {
        self.energy_j = vec![energy_j; self.n_ue];
        self
    }

    /// RIS element count `K`.
    pub fn k(&self) -> usize {
        self.k_y * self.k_z
    }

    /// `B·T`, the bits carried per unit of spectral efficiency.
    pub fn bt(&self) -> f64 {
        self.bandwidth_hz * self.slot_s
    }

    /// Average power budget `Ẽ_n = E_n / T`.
    pub fn power_budget(&self, n: usize) -> f64 {
        self.energy_j[n] / self.slot_s
    }

    /// Transmit power for offloading fraction `a_n`.
    pub fn tx_power(&self, n: usize, a_n: f64) -> f64 {
        a_n * self.power_budget(n)
    }

    pub fn eps_bits(&self) -> f64 {
        self.tolerances.eps * self.bt()
    }

    pub fn eps_1_bits(&self) -> f64 {
        self.tolerances.eps_1 * self.bt()
    }

    pub fn eps_3_bits(&self) -> f64 {
        self.tolerances.eps_3 * self.bt()
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: alloc::string::String| Err(Error::Config(msg));
        if self.n_ue == 0 || self.m_ap == 0 || self.k_y == 0 || self.k_z == 0 {
            return fail(format!(
                "counts must be >= 1 (N={}, M={}, K_y={}, K_z={})",
                self.n_ue, self.m_ap, self.k_y, self.k_z
            ));
        }
        for (name, v) in [
            ("energy_j", &self.energy_j),
            ("cycles_per_bit", &self.cycles_per_bit),
            ("kappa", &self.kappa),
        ] {
            if v.len() != self.n_ue {
                return fail(format!("{name} has {} entries for {} UEs", v.len(), self.n_ue));
            }
            if v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                return fail(format!("{name} entries must be finite and > 0"));
            }
        }
        for (name, v) in [
            ("slot_s", self.slot_s),
            ("bandwidth_hz", self.bandwidth_hz),
            ("noise_w", self.noise_w),
            ("l0", self.l0),
            ("d0", self.d0),
            ("ris_element_gain", self.ris_element_gain),
            ("area_side", self.area_side),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return fail(format!("{name} must be finite and > 0, got {v}"));
            }
        }
        for (name, v) in [
            ("zeta_r", self.zeta_r),
            ("zeta_ap", self.zeta_ap),
            ("zeta_d", self.zeta_d),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return fail(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        for (name, v) in [
            ("alpha_d", self.alpha_d),
            ("alpha_r", self.alpha_r),
            ("alpha_ap", self.alpha_ap),
        ] {
            if !v.is_finite() {
                return fail(format!("{name} must be finite"));
            }
        }
        if !(self.a_cap > 0.0 && self.a_cap <= 1.0) {
            return fail(format!("a_cap must lie in (0, 1], got {}", self.a_cap));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("eps", t.eps),
            ("eps_1", t.eps_1),
            ("eps_3", t.eps_3),
            ("eps_psi", t.eps_psi),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return fail(format!("tolerance {name} must be finite and > 0"));
            }
        }
        Ok(())
    }
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self::reference()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        SystemConfig::reference().validate().unwrap();
        SystemConfig::desk().validate().unwrap();
        assert_eq!(SystemConfig::reference().k(), 24);
        assert_eq!(SystemConfig::desk().k(), 8);
    }

    #[test]
    fn noise_is_minus_sixty_dbm() {
        let w = 10f64.powf(-60.0 / 10.0) * 1e-3;
        assert!((SystemConfig::reference().noise_w - w).abs() < 1e-24);
    }

    #[test]
    fn rejects_bad_zeta_and_lengths() {
        let mut c = SystemConfig::desk();
        c.zeta_d = 1.5;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = SystemConfig::desk();
        c.energy_j.pop();
        assert!(c.validate().is_err());
    }
}
