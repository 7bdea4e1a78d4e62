//! Step 3: energy partition by DC programming over the box `[0, a_cap]^N`.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::numerics::{dot_conj, norm2, ComplexMatrix};
use crate::objective::{log2_1p, rate_local};
use crate::{Error, Result, SystemConfig};

const LN_2: f64 = core::f64::consts::LN_2;
const INNER_MAX: usize = 500;

/// Received gains `G[n][j] = |w_n^H h_j|²` and noise terms `σ²‖w_n‖²` for a
/// fixed phase and beamformer.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyModel {
    n_ue: usize,
    gain: Vec<f64>,
    noise: Vec<f64>,
    /// `Ẽ_j`.
    budget: Vec<f64>,
    bt: f64,
    /// `(T/C_n)·cbrt(Ẽ_n/κ_n)`, the local rate at `a_n = 0`.
    local_scale: Vec<f64>,
    a_cap: f64,
}

impl EnergyModel {
    pub fn new(h_eff: &ComplexMatrix, w: &ComplexMatrix, config: &SystemConfig) -> Result<Self> {
        let n_ue = h_eff.cols();
        if w.cols() != n_ue || w.rows() != h_eff.rows() || config.n_ue != n_ue {
            return Err(Error::Dimension(alloc::format!(
                "W is {}x{}, H is {}x{}",
                w.rows(),
                w.cols(),
                h_eff.rows(),
                n_ue
            )));
        }
        let mut gain = Vec::with_capacity(n_ue * n_ue);
        let mut noise = Vec::with_capacity(n_ue);
        for n in 0..n_ue {
            let wn = w.column(n);
            noise.push(config.noise_w * norm2(&wn).powi(2));
            for j in 0..n_ue {
                gain.push(dot_conj(&wn, &h_eff.column(j)).norm_sqr());
            }
        }
        Ok(Self {
            n_ue,
            gain,
            noise,
            budget: (0..n_ue).map(|n| config.power_budget(n)).collect(),
            bt: config.bt(),
            local_scale: (0..n_ue).map(|n| rate_local(0.0, n, config)).collect(),
            a_cap: config.a_cap,
        })
    }

    fn g(&self, n: usize, j: usize) -> f64 {
        self.gain[n * self.n_ue + j]
    }

    /// Interference-plus-noise `D_n(a)` and total `A_n(a)` at filter `n`.
    fn powers(&self, a: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut total = self.noise.clone();
        let mut interference = self.noise.clone();
        for n in 0..self.n_ue {
            for j in 0..self.n_ue {
                let v = a[j] * self.budget[j] * self.g(n, j);
                total[n] += v;
                if j != n {
                    interference[n] += v;
                }
            }
        }
        (total, interference)
    }

    fn local(&self, a_n: f64, n: usize) -> f64 {
        let rest = (1.0 - a_n).max(0.0);
        if rest == 0.0 {
            0.0
        } else {
            self.local_scale[n] * rest.cbrt()
        }
    }

    /// True objective `Σ_n R^off_n(a) + R^loc_n(a_n)` in bits.
    pub fn value(&self, a: &[f64]) -> f64 {
        let (total, interference) = self.powers(a);
        (0..self.n_ue)
            .map(|n| self.bt * (total[n].log2() - interference[n].log2()) + self.local(a[n], n))
            .sum()
    }

    /// `R^off_{n,2}(a_{-n}) = BT log2(D_n(a))`.
    pub fn r_off_2(&self, a: &[f64]) -> Vec<f64> {
        let (_, interference) = self.powers(a);
        interference.iter().map(|d| self.bt * d.log2()).collect()
    }

    /// First-order upper bound `R̂^off_{n,2}(a; a_m)`.
    pub fn r_off_2_linearized(&self, a: &[f64], anchor: &[f64]) -> Vec<f64> {
        let (_, d_anchor) = self.powers(anchor);
        (0..self.n_ue)
            .map(|n| {
                let slope: f64 = (0..self.n_ue)
                    .filter(|&i| i != n)
                    .map(|i| self.budget[i] * self.g(n, i) * (a[i] - anchor[i]))
                    .sum();
                self.bt * d_anchor[n].log2() + self.bt / LN_2 * slope / d_anchor[n]
            })
            .collect()
    }

    /// Surrogate of (P3.1) at anchor interference `d_anchor`; equals the true
    /// objective at the anchor.
    fn surrogate(&self, a: &[f64], anchor: &[f64], d_anchor: &[f64]) -> f64 {
        let (total, _) = self.powers(a);
        let mut s = 0.0;
        for n in 0..self.n_ue {
            let slope: f64 = (0..self.n_ue)
                .filter(|&i| i != n)
                .map(|i| self.budget[i] * self.g(n, i) * (a[i] - anchor[i]))
                .sum();
            s += self.bt * (total[n].log2() - d_anchor[n].log2()) - self.bt / LN_2 * slope / d_anchor[n];
            s += self.local(a[n], n);
        }
        s
    }

    fn surrogate_gradient(&self, a: &[f64], d_anchor: &[f64]) -> Vec<f64> {
        let (total, _) = self.powers(a);
        let c = self.bt / LN_2;
        (0..self.n_ue)
            .map(|k| {
                let mut g = 0.0;
                for n in 0..self.n_ue {
                    let pg = self.budget[k] * self.g(n, k);
                    g += c * pg / total[n];
                    if n != k {
                        g -= c * pg / d_anchor[n];
                    }
                }
                let rest = (1.0 - a[k]).max(1e-300);
                g - self.local_scale[k] / 3.0 * rest.powf(-2.0 / 3.0)
            })
            .collect()
    }

    fn project(&self, a: &mut [f64]) {
        for x in a {
            *x = x.clamp(0.0, self.a_cap);
        }
    }

    /// Maximize the concave surrogate at `anchor` by projected gradient
    /// ascent with Barzilai–Borwein steps and Armijo backtracking, starting
    /// from the anchor so the result never scores below it.
    pub fn solve_p31(&self, anchor: &[f64]) -> Vec<f64> {
        let (_, d_anchor) = self.powers(anchor);
        let mut a = anchor.to_vec();
        self.project(&mut a);
        let mut value = self.surrogate(&a, anchor, &d_anchor);
        let mut grad = self.surrogate_gradient(&a, &d_anchor);
        let gmax = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if !(gmax > 0.0) || !gmax.is_finite() {
            return a;
        }
        let mut step = 0.1 / gmax;
        for _ in 0..INNER_MAX {
            let mut accepted = None;
            let mut t = step;
            for _ in 0..50 {
                let mut cand: Vec<f64> = a.iter().zip(&grad).map(|(x, g)| x + t * g).collect();
                self.project(&mut cand);
                let moved: f64 = cand.iter().zip(&a).zip(&grad).map(|((c, x), g)| g * (c - x)).sum();
                if moved <= 0.0 {
                    break;
                }
                let v = self.surrogate(&cand, anchor, &d_anchor);
                if v >= value + 1e-4 * moved {
                    accepted = Some((cand, v));
                    break;
                }
                t *= 0.5;
            }
            let Some((cand, v)) = accepted else { break };
            let new_grad = self.surrogate_gradient(&cand, &d_anchor);
            let s: Vec<f64> = cand.iter().zip(&a).map(|(x, y)| x - y).collect();
            let y: Vec<f64> = grad.iter().zip(&new_grad).map(|(g0, g1)| g0 - g1).collect();
            let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
            let ss: f64 = s.iter().map(|x| x * x).sum();
            step = if sy > 0.0 { ss / sy } else { t * 2.0 };
            let gain = v - value;
            a = cand;
            value = v;
            grad = new_grad;
            if gain <= 1e-12 * value.abs().max(1.0) {
                break;
            }
        }
        a
    }
}

/// Result of Step 3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyStep {
    pub a: Vec<f64>,
    /// True objective at the start and after every DC iteration (bits).
    pub trace: Vec<f64>,
    pub hit_max: bool,
}

/// Run the DC loop of Step 3 from `a_prev` until the objective change
/// drops below `eps_3`.
pub fn dc_energy_step(h_eff: &ComplexMatrix, w: &ComplexMatrix, a_prev: &[f64], config: &SystemConfig, max_inner: usize) -> Result<EnergyStep> {
    if a_prev.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::Infeasible("energy split outside [0, 1]".into()));
    }
    let model = EnergyModel::new(h_eff, w, config)?;
    let eps_3 = config.eps_3_bits();
    let mut a = a_prev.to_vec();
    model.project(&mut a);
    let mut trace = vec![model.value(&a)];
    let mut hit_max = true;
    for m in 1..=max_inner {
        let next = model.solve_p31(&a);
        let v = model.value(&next);
        // DC ascent guarantees v ≥ previous; keep the anchor on roundoff ties
        if v >= trace[m - 1] {
            a = next;
            trace.push(v);
        } else {
            trace.push(trace[m - 1]);
        }
        if m > 1 && (trace[m] - trace[m - 1]).abs() < eps_3 {
            hit_max = false;
            break;
        }
    }
    Ok(EnergyStep { a, trace, hit_max })
}

/// Per-UE interference-free split: maximize
/// `BT log2(1 + a Ẽ_n g_n) + R^loc_n(a)` over `[0, a_cap]` by golden-section
/// search, where `g_n = |w_n^H h_n|²/(σ²‖w_n‖²)`.
pub fn interference_free_split(gains: &[f64], config: &SystemConfig, tol: f64) -> Vec<f64> {
    gains
        .iter()
        .enumerate()
        .map(|(n, &g)| {
            let f = |a: f64| config.bt() * log2_1p(a * config.power_budget(n) * g) + rate_local(a, n, config);
            golden_section_max(f, 0.0, config.a_cap, tol)
        })
        .collect()
}

/// Maximizer of a unimodal function on `[lo, hi]`, endpoints included.
pub fn golden_section_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    [(lo, f(lo)), (hi, f(hi)), (mid, f(mid))]
        .into_iter()
        .fold((mid, f64::NEG_INFINITY), |best, cand| if cand.1 > best.1 { cand } else { best })
        .0
}
