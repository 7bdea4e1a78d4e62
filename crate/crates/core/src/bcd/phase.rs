//! Step 1: RIS phase design by DC programming on the lifted variable
//! `Ψ = φ̃φ̃^H`, `φ̃ = [φ; ξ]`.
//!
//! Each inner iteration linearizes the interference term `F2` at the anchor
//! `Ψ_l` and maximizes the concave surrogate subject to unit diagonal, PSD
//! and the rank-one trust region `tr(Ψ) − Υ(Ψ; Ψ_l) ≤ ε_Ψ`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::numerics::{
    dot_conj, hermitian_eig, leading_eigenpair, norm2, project_psd_unit_diag, ComplexMatrix,
};
use crate::{ChannelSet, Error, Result, SystemConfig, C64};

const LN_2: f64 = core::f64::consts::LN_2;

/// Lifted phase matrix, `(K+1)×(K+1)`, Hermitian PSD with unit diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftedPhase {
    pub psi: ComplexMatrix,
}

impl LiftedPhase {
    /// `v v^H`.
    pub fn from_vector(v: &[C64]) -> Self {
        Self {
            psi: ComplexMatrix::outer(v, v),
        }
    }

    /// Lift `φ` with auxiliary `ξ = 1`.
    pub fn from_phi(phi: &[C64]) -> Self {
        Self::from_vector(&lift(phi))
    }

    pub fn dim(&self) -> usize {
        self.psi.rows()
    }

    /// `tr(Ψ) − ‖Ψ‖_s`.
    pub fn rank_residual(&self) -> Result<f64> {
        let top = leading_eigenpair(&self.psi)?.value;
        Ok(self.psi.trace().re - top)
    }
}

fn lift(phi: &[C64]) -> Vec<C64> {
    let mut v = phi.to_vec();
    v.push(C64::new(1.0, 0.0));
    v
}

/// `tr(Ψ) − Υ(Ψ; Ψ_l)`, where `Υ` is the linear lower bound of the spectral
/// norm at the anchor built from its leading eigenvector `z`. Because
/// `‖Ψ_l‖_s = z^H Ψ_l z` this reduces to `tr(Ψ) − z^H Ψ z`.
pub fn rank_constraint_residual(psi: &LiftedPhase, anchor: &LiftedPhase) -> Result<f64> {
    let z = leading_eigenpair(&anchor.psi)?.vector;
    Ok(psi.psi.trace().re - psi.psi.quad_form(&z))
}

/// The `Q_{n,i}` matrices of every receiver/transmitter pair plus the
/// scalars needed to evaluate `F1`, `F2` from `Ψ` alone.
#[derive(Debug, Clone, PartialEq)]
pub struct QMatrices {
    n_ue: usize,
    q: Vec<ComplexMatrix>,
    /// `h_{d,n,i} = w_n^H h_{d,i}`.
    hd: Vec<C64>,
    /// `σ²‖w_n‖²`.
    noise: Vec<f64>,
}

impl QMatrices {
    pub fn n_ue(&self) -> usize {
        self.n_ue
    }

    /// `Q_{n,i}`: receiver `n`, transmitter `i`.
    pub fn q(&self, n: usize, i: usize) -> &ComplexMatrix {
        &self.q[n * self.n_ue + i]
    }

    pub fn direct(&self, n: usize, i: usize) -> C64 {
        self.hd[n * self.n_ue + i]
    }

    pub fn noise(&self, n: usize) -> f64 {
        self.noise[n]
    }

    /// `tr(Q_{n,i} Ψ) + |h_{d,n,i}|²`, the received power gain of UE `i` at
    /// filter `n`.
    fn gain(&self, n: usize, i: usize, psi: &ComplexMatrix) -> f64 {
        self.q(n, i).trace_product(psi).re + self.direct(n, i).norm_sqr()
    }
}

/// Per-pair reflected rows `h^RIS_{r,n,i} = w_n^H H_AP diag(h_{r,i})` and
/// direct scalars `h_{d,n,i} = w_n^H h_{d,i}`.
fn pair_factors(channels: &ChannelSet, w: &ComplexMatrix) -> Result<(Vec<Vec<C64>>, Vec<C64>, Vec<f64>)> {
    let (n_ue, k) = (channels.n_ue(), channels.k());
    if w.rows() != channels.m_ap() || w.cols() != n_ue {
        return Err(Error::Dimension(format!(
            "W is {}x{}, expected {}x{n_ue}",
            w.rows(),
            w.cols(),
            channels.m_ap()
        )));
    }
    let mut rows = Vec::with_capacity(n_ue * n_ue);
    let mut direct = Vec::with_capacity(n_ue * n_ue);
    let mut wnorm = Vec::with_capacity(n_ue);
    for n in 0..n_ue {
        let wn = w.column(n);
        wnorm.push(norm2(&wn).powi(2));
        let g = channels.h_ap.adjoint_mat_vec(&wn)?;
        for i in 0..n_ue {
            rows.push((0..k).map(|kk| g[kk].conj() * channels.h_r[(kk, i)]).collect());
            direct.push(dot_conj(&wn, &channels.h_d.column(i)));
        }
    }
    Ok((rows, direct, wnorm))
}

pub fn build_q_matrices(channels: &ChannelSet, w: &ComplexMatrix, config: &SystemConfig) -> Result<QMatrices> {
    let (rows, hd, wnorm) = pair_factors(channels, w)?;
    let k = channels.k();
    let q = rows
        .iter()
        .zip(&hd)
        .map(|(r, &d)| {
            ComplexMatrix::from_fn(k + 1, k + 1, |a, b| match (a < k, b < k) {
                (true, true) => r[a].conj() * r[b],
                (true, false) => r[a].conj() * d,
                (false, true) => d.conj() * r[b],
                (false, false) => C64::new(0.0, 0.0),
            })
        })
        .collect();
    Ok(QMatrices {
        n_ue: channels.n_ue(),
        q,
        hd,
        noise: wnorm.iter().map(|x| x * config.noise_w).collect(),
    })
}

/// `(F1_n, F2_n)` in log2 units: log-total-power and log-interference-plus-noise.
pub fn f_terms(psi: &LiftedPhase, q: &QMatrices, p: &[f64]) -> Vec<(f64, f64)> {
    let n_ue = q.n_ue();
    (0..n_ue)
        .map(|n| {
            let mut total = q.noise(n);
            let mut interference = q.noise(n);
            for i in 0..n_ue {
                let g = p[i] * q.gain(n, i, &psi.psi);
                total += g;
                if i != n {
                    interference += g;
                }
            }
            assert!(total > 0.0 && interference > 0.0, "nonpositive log argument");
            (total.log2(), interference.log2())
        })
        .collect()
}

/// Linear upper bound `F̂2_n(Ψ; Ψ_l)`, using `∇_Ψ tr(QΨ) = Q` under the real
/// inner product `⟨A, B⟩ = Re tr(A^H B)`.
pub fn f2_linearized(psi: &LiftedPhase, anchor: &LiftedPhase, q: &QMatrices, p: &[f64]) -> Vec<f64> {
    let n_ue = q.n_ue();
    let delta = psi.psi.sub(&anchor.psi);
    (0..n_ue)
        .map(|n| {
            let mut d_anchor = q.noise(n);
            let mut slope = 0.0;
            for i in (0..n_ue).filter(|&i| i != n) {
                d_anchor += p[i] * q.gain(n, i, &anchor.psi);
                slope += p[i] * q.q(n, i).inner(&delta);
            }
            d_anchor.log2() + slope / (LN_2 * d_anchor)
        })
        .collect()
}

/// Inner solver for the convex per-iteration phase subproblem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseSolver {
    /// Feasible ascent restricted to rank-one `Ψ = ψψ^H` with unit-modulus
    /// `ψ`: PSD, unit diagonal and rank one hold by construction, and the
    /// step length enforces the trust region exactly.
    #[default]
    RankOne,
    /// Projected gradient on the full lifted matrix with an exact penalty
    /// for the trust region and a final feasibility restoration.
    Lifted,
}

/// Compact evaluation of the phase objective from per-pair factors:
/// `t_{n,j}(ψ) = |r_{n,j}·φ + d_{n,j} ξ|²`.
#[derive(Debug, Clone)]
pub(crate) struct PhaseModel {
    n_ue: usize,
    k: usize,
    /// Transmit powers `p_j`.
    p: Vec<f64>,
    rows: Vec<Vec<C64>>,
    direct: Vec<C64>,
    noise: Vec<f64>,
}

/// Linearization data at an anchor: interference-plus-noise `D_n^l` and the
/// constant that makes the surrogate exact at the anchor.
struct Anchor {
    interference: Vec<f64>,
    offset: f64,
}

impl PhaseModel {
    pub(crate) fn new(channels: &ChannelSet, w: &ComplexMatrix, p: &[f64], config: &SystemConfig) -> Result<Self> {
        let (rows, direct, wnorm) = pair_factors(channels, w)?;
        Ok(Self {
            n_ue: channels.n_ue(),
            k: channels.k(),
            p: p.to_vec(),
            rows,
            direct,
            noise: wnorm.iter().map(|x| x * config.noise_w).collect(),
        })
    }

    /// Whether the reflected path carries any power at all.
    pub(crate) fn has_reflection(&self) -> bool {
        self.rows.iter().any(|r| r.iter().any(|z| *z != C64::new(0.0, 0.0)))
    }

    /// `u_{n,j} = r_{n,j}·φ` for every pair.
    fn reflected(&self, psi: &[C64]) -> Vec<C64> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(&psi[..self.k]).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Pair gains `t_{n,j}` and the reflected parts they were built from.
    fn gains(&self, psi: &[C64]) -> (Vec<f64>, Vec<C64>) {
        let xi = psi[self.k];
        let u = self.reflected(psi);
        let t = u.iter().zip(&self.direct).map(|(u, d)| (u + d * xi).norm_sqr()).collect();
        (t, u)
    }

    fn totals(&self, t: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n_ue = self.n_ue;
        let mut total = self.noise.clone();
        let mut interference = self.noise.clone();
        for n in 0..n_ue {
            for j in 0..n_ue {
                let g = self.p[j] * t[n * n_ue + j];
                total[n] += g;
                if j != n {
                    interference[n] += g;
                }
            }
        }
        (total, interference)
    }

    /// `Σ_n log2(1 + SINR_n)`.
    pub(crate) fn value(&self, psi: &[C64]) -> f64 {
        let (t, _) = self.gains(psi);
        let (total, interference) = self.totals(&t);
        total.iter().zip(&interference).map(|(a, d)| a.log2() - d.log2()).sum()
    }

    fn anchor(&self, psi: &[C64]) -> Anchor {
        let (t, _) = self.gains(psi);
        let (_, interference) = self.totals(&t);
        let n_ue = self.n_ue;
        let mut offset = 0.0;
        for n in 0..n_ue {
            let lin: f64 = (0..n_ue).filter(|&j| j != n).map(|j| self.p[j] * t[n * n_ue + j]).sum();
            offset += lin / (LN_2 * interference[n]) - interference[n].log2();
        }
        Anchor { interference, offset }
    }

    fn surrogate(&self, psi: &[C64], anchor: &Anchor) -> f64 {
        let (t, _) = self.gains(psi);
        let (total, _) = self.totals(&t);
        let n_ue = self.n_ue;
        let mut s = anchor.offset;
        for n in 0..n_ue {
            s += total[n].log2();
            let lin: f64 = (0..n_ue).filter(|&j| j != n).map(|j| self.p[j] * t[n * n_ue + j]).sum();
            s -= lin / (LN_2 * anchor.interference[n]);
        }
        s
    }

    /// Gradient of the surrogate with respect to the phases `θ` of `ψ`.
    fn surrogate_phase_gradient(&self, psi: &[C64], anchor: &Anchor) -> Vec<f64> {
        let (n_ue, k) = (self.n_ue, self.k);
        let xi = psi[k];
        let (t, u) = self.gains(psi);
        let (total, _) = self.totals(&t);
        let mut g_psi = vec![C64::new(0.0, 0.0); k + 1];
        for n in 0..n_ue {
            for j in 0..n_ue {
                let idx = n * n_ue + j;
                let mut c = 1.0 / total[n];
                if j != n {
                    c -= 1.0 / anchor.interference[n];
                }
                let c = c * self.p[j] / LN_2;
                if c == 0.0 {
                    continue;
                }
                let d = self.direct[idx];
                let field = (u[idx] + d * xi) * c;
                for (gk, r) in g_psi[..k].iter_mut().zip(&self.rows[idx]) {
                    *gk += r.conj() * field;
                }
                g_psi[k] += d.conj() * u[idx] * c;
            }
        }
        psi.iter().zip(&g_psi).map(|(z, g)| 2.0 * (z.conj() * g).im).collect()
    }
}

fn rotate(psi: &[C64], g: &[f64], t: f64) -> Vec<C64> {
    psi.iter()
        .zip(g)
        .map(|(z, gk)| {
            let v = z * C64::from_polar(1.0, t * gk);
            v / v.norm()
        })
        .collect()
}

/// `(K+1) − |z^H ψ|²` with `z = ψ_l/‖ψ_l‖`.
fn torus_residual(psi: &[C64], anchor: &[C64]) -> f64 {
    let k1 = anchor.len() as f64;
    k1 - dot_conj(anchor, psi).norm_sqr() / k1
}

/// Inner iterations spent on each convex subproblem.
const P11_MAX_ITERS: usize = 50;

/// Maximize the surrogate on the unit-modulus torus inside the trust region
/// by gradient ascent in the phases with Barzilai–Borwein steps; every
/// accepted iterate satisfies the trust region and the Armijo condition.
/// Returns `None` when no feasible improving point is found.
fn p11_rank_one(model: &PhaseModel, anchor_psi: &[C64], eps_psi: f64) -> Option<Vec<C64>> {
    let anchor = model.anchor(anchor_psi);
    let base = model.surrogate(anchor_psi, &anchor);
    let mut x = anchor_psi.to_vec();
    let mut fx = base;
    let mut g = model.surrogate_phase_gradient(&x, &anchor);
    let k1 = g.len() as f64;
    let spread = g.iter().map(|v| v * v).sum::<f64>() - g.iter().sum::<f64>().powi(2) / k1;
    if !(spread > 0.0) || !spread.is_finite() {
        return None;
    }
    // first trial lands on the trust-region boundary
    let mut t = (eps_psi / spread).sqrt();
    for _ in 0..P11_MAX_ITERS {
        let gsq: f64 = g.iter().map(|v| v * v).sum();
        if !(gsq > 0.0) {
            break;
        }
        let mut step = t;
        let mut accepted = None;
        for _ in 0..40 {
            let cand = rotate(&x, &g, step);
            if torus_residual(&cand, anchor_psi) <= eps_psi {
                let fc = model.surrogate(&cand, &anchor);
                if fc - fx > 1e-4 * step * gsq {
                    accepted = Some((cand, fc));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((cand, fc)) = accepted else { break };
        let g_new = model.surrogate_phase_gradient(&cand, &anchor);
        // ascent on a locally concave function: s·y < 0
        let sy: f64 = g.iter().zip(&g_new).map(|(a, b)| step * a * (b - a)).sum();
        let ss = step * step * gsq;
        t = if sy < 0.0 { ss / -sy } else { 2.0 * step };
        let gain = fc - fx;
        x = cand;
        fx = fc;
        g = g_new;
        if gain <= 1e-12 * (1.0 + fx.abs()) {
            break;
        }
    }
    (fx > base).then_some(x)
}

/// Dense surrogate on the lifted matrix, for the [`PhaseSolver::Lifted`] path.
struct LiftedSurrogate<'a> {
    q: &'a QMatrices,
    p: &'a [f64],
    interference: Vec<f64>,
    offset: f64,
}

impl<'a> LiftedSurrogate<'a> {
    fn new(q: &'a QMatrices, p: &'a [f64], anchor: &LiftedPhase) -> Self {
        let terms = f_terms(anchor, q, p);
        let n_ue = q.n_ue();
        let mut interference = Vec::with_capacity(n_ue);
        let mut offset = 0.0;
        for (n, (_, f2)) in terms.iter().enumerate() {
            let d = 2f64.powf(*f2);
            let lin: f64 = (0..n_ue)
                .filter(|&i| i != n)
                .map(|i| p[i] * q.q(n, i).trace_product(&anchor.psi).re)
                .sum();
            offset += lin / (LN_2 * d) - f2;
            interference.push(d);
        }
        Self { q, p, interference, offset }
    }

    fn value(&self, psi: &ComplexMatrix) -> f64 {
        let n_ue = self.q.n_ue();
        let mut s = self.offset;
        for n in 0..n_ue {
            let mut total = self.q.noise(n);
            let mut lin = 0.0;
            for i in 0..n_ue {
                total += self.p[i] * self.q.gain(n, i, psi);
                if i != n {
                    lin += self.p[i] * self.q.q(n, i).trace_product(psi).re;
                }
            }
            if !(total > 0.0) {
                return f64::NEG_INFINITY;
            }
            s += total.log2() - lin / (LN_2 * self.interference[n]);
        }
        s
    }

    fn gradient(&self, psi: &ComplexMatrix) -> ComplexMatrix {
        let n_ue = self.q.n_ue();
        let dim = psi.rows();
        let mut g = ComplexMatrix::zeros(dim, dim);
        for n in 0..n_ue {
            let total: f64 = self.q.noise(n) + (0..n_ue).map(|i| self.p[i] * self.q.gain(n, i, psi)).sum::<f64>();
            for i in 0..n_ue {
                let mut c = 1.0 / total;
                if i != n {
                    c -= 1.0 / self.interference[n];
                }
                g.add_scaled(C64::new(c * self.p[i] / LN_2, 0.0), self.q.q(n, i));
            }
        }
        g
    }
}

const LIFTED_ITERS: usize = 60;

/// Projected gradient with an exact penalty on the trust region.
fn p11_lifted(q: &QMatrices, p: &[f64], anchor: &LiftedPhase, eps_psi: f64) -> Result<Option<LiftedPhase>> {
    let sur = LiftedSurrogate::new(q, p, anchor);
    let z = leading_eigenpair(&anchor.psi)?.vector;
    let zz = ComplexMatrix::outer(&z, &z);
    let dim = anchor.dim();
    let violation = |psi: &ComplexMatrix| psi.trace().re - psi.quad_form(&z) - eps_psi;
    let base = sur.value(&anchor.psi);
    let anchor_violation = violation(&anchor.psi);

    let mut psi = anchor.psi.clone();
    let mut best: Option<(f64, ComplexMatrix)> = None;
    let mut mu = sur.gradient(&psi).frobenius_norm().max(f64::MIN_POSITIVE);
    let mut step = (eps_psi * dim as f64).sqrt();
    for _ in 0..LIFTED_ITERS {
        let mut dir = sur.gradient(&psi);
        if violation(&psi) > 0.0 {
            // ∇(tr Ψ − z^H Ψ z) = I − z z^H
            dir.add_scaled(C64::new(-mu, 0.0), &ComplexMatrix::identity(dim).sub(&zz));
            mu *= 2.0;
        }
        let norm = dir.frobenius_norm();
        if !(norm > 0.0) || !norm.is_finite() {
            break;
        }
        let mut next = psi.clone();
        next.add_scaled(C64::new(step / norm, 0.0), &dir);
        psi = project_psd_unit_diag(&next.hermitian_part())?;
        // restore the trust region along the segment from the anchor
        let v = violation(&psi);
        let feasible = if v > 0.0 {
            let lambda = anchor_violation / (anchor_violation - v);
            let mut seg = anchor.psi.scale(1.0 - lambda);
            seg.add_scaled(C64::new(lambda, 0.0), &psi);
            seg
        } else {
            psi.clone()
        };
        let value = sur.value(&feasible);
        if value > best.as_ref().map_or(base, |b| b.0) {
            best = Some((value, feasible));
        }
        step *= 0.9;
    }
    Ok(best.map(|(_, psi)| LiftedPhase { psi }))
}

/// Solve one DC subproblem from `anchor`. The returned flag is `true` when
/// the inner solver could not improve the surrogate and the anchor itself is
/// returned.
pub fn solve_p11(
    channels: &ChannelSet,
    w: &ComplexMatrix,
    p: &[f64],
    anchor: &LiftedPhase,
    config: &SystemConfig,
    solver: PhaseSolver,
    eps_psi: f64,
) -> Result<(LiftedPhase, bool)> {
    match solver {
        PhaseSolver::RankOne => {
            let model = PhaseModel::new(channels, w, p, config)?;
            let v = leading_eigenpair(&anchor.psi)?;
            let psi: Vec<C64> = v.vector.iter().map(|z| z / z.norm()).collect();
            Ok(match p11_rank_one(&model, &psi, eps_psi) {
                Some(next) => (LiftedPhase::from_vector(&next), false),
                None => (anchor.clone(), true),
            })
        }
        PhaseSolver::Lifted => {
            let q = build_q_matrices(channels, w, config)?;
            Ok(match p11_lifted(&q, p, anchor, eps_psi)? {
                Some(next) => (next, false),
                None => (anchor.clone(), true),
            })
        }
    }
}

/// Element-wise `φ_0/ξ_0` from the leading eigenvector, renormalized to
/// unit modulus. Rejects matrices that are not numerically rank one.
pub fn extract_phi(psi: &LiftedPhase, eps_psi: f64) -> Result<Vec<C64>> {
    let pairs = hermitian_eig(&psi.psi)?;
    let top = &pairs[0];
    let residual = psi.psi.trace().re - top.value;
    if residual > eps_psi {
        return Err(Error::Infeasible(format!(
            "lifted phase is not rank one: tr - ||.||_s = {residual:e}"
        )));
    }
    let scale = top.value.max(0.0).sqrt();
    let v: Vec<C64> = top.vector.iter().map(|z| z * scale).collect();
    let (phi0, xi) = v.split_at(v.len() - 1);
    let xi = xi[0];
    if xi.norm() < 1e-6 {
        return Err(Error::Infeasible(format!("auxiliary entry |xi| = {:e} too small", xi.norm())));
    }
    Ok(phi0
        .iter()
        .map(|z| {
            let r = z / xi;
            if r.norm() > 0.0 {
                r / r.norm()
            } else {
                C64::new(1.0, 0.0)
            }
        })
        .collect())
}

/// Trust-region schedule and inner solver for Step 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseOptions {
    pub solver: PhaseSolver,
    pub max_inner: usize,
    /// Initial rank-one threshold. Each time an inner iteration gains less
    /// than `eps_1` the threshold is divided by `anneal_factor`, down to the
    /// configured `eps_psi`; the loop only stops at that floor. Setting it
    /// equal to `eps_psi` disables annealing.
    pub eps_psi_start: f64,
    pub anneal_factor: f64,
}

impl Default for PhaseOptions {
    fn default() -> Self {
        Self {
            solver: PhaseSolver::RankOne,
            max_inner: 5000,
            eps_psi_start: 1.0,
            anneal_factor: 10.0,
        }
    }
}

/// Outcome of one full phase step (the DC loop of Step 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseStep {
    pub phi: Vec<C64>,
    pub psi: LiftedPhase,
    /// `B·T·Σ(F1 − F2)` at the anchor and after every inner iteration (bits).
    pub trace: Vec<f64>,
    /// `tr(Ψ) − ‖Ψ‖_s` at exit.
    pub rank_residual: f64,
    /// Rank-one threshold in force at exit.
    pub eps_psi: f64,
    /// The last inner solve returned its anchor.
    pub stagnated: bool,
    /// Stopped by the inner iteration cap rather than the tolerance.
    pub hit_max: bool,
}

/// Run Step 1 from `phi` with `W` and `a` fixed.
pub fn dc_phase_step(
    phi: &[C64],
    w: &ComplexMatrix,
    a: &[f64],
    channels: &ChannelSet,
    config: &SystemConfig,
    options: &PhaseOptions,
) -> Result<PhaseStep> {
    let p: Vec<f64> = (0..config.n_ue).map(|n| config.tx_power(n, a[n])).collect();
    let bt = config.bt();
    let eps_1 = config.eps_1_bits();
    let floor = config.tolerances.eps_psi;
    let model = PhaseModel::new(channels, w, &p, config)?;
    let start = lift(phi);
    let mut trace = vec![bt * model.value(&start)];

    if !model.has_reflection() {
        return Ok(PhaseStep {
            phi: phi.to_vec(),
            psi: LiftedPhase::from_vector(&start),
            trace,
            rank_residual: 0.0,
            eps_psi: floor,
            stagnated: true,
            hit_max: false,
        });
    }

    let q = match options.solver {
        PhaseSolver::Lifted => Some(build_q_matrices(channels, w, config)?),
        PhaseSolver::RankOne => None,
    };
    let lifted_value = |psi: &LiftedPhase, q: &QMatrices| -> f64 {
        f_terms(psi, q, &p).iter().map(|(f1, f2)| f1 - f2).sum::<f64>() * bt
    };

    let mut vec_psi = start.clone();
    let mut mat_psi = LiftedPhase::from_vector(&start);
    let mut eps_psi = options.eps_psi_start.max(floor);
    let mut stagnated = false;
    let mut hit_max = true;
    for l in 1..=options.max_inner {
        let improved = match &q {
            None => p11_rank_one(&model, &vec_psi, eps_psi).map(|next| vec_psi = next).is_some(),
            Some(q) => p11_lifted(q, &p, &mat_psi, eps_psi)?.map(|next| mat_psi = next).is_some(),
        };
        let value = if !improved {
            trace[l - 1]
        } else if q.is_some() {
            lifted_value(&mat_psi, q.as_ref().unwrap())
        } else {
            bt * model.value(&vec_psi)
        };
        trace.push(value);
        let small = !improved || (trace[l] - trace[l - 1]).abs() < eps_1;
        if small {
            if eps_psi > floor {
                eps_psi = (eps_psi / options.anneal_factor).max(floor);
                continue;
            }
            if l > 1 || !improved {
                stagnated = !improved;
                hit_max = false;
                break;
            }
        }
    }

    match options.solver {
        PhaseSolver::RankOne => {
            let xi = vec_psi[vec_psi.len() - 1];
            let phi_out = vec_psi[..vec_psi.len() - 1]
                .iter()
                .map(|z| {
                    let r = z / xi;
                    r / r.norm()
                })
                .collect();
            Ok(PhaseStep {
                phi: phi_out,
                psi: LiftedPhase::from_vector(&vec_psi),
                trace,
                rank_residual: 0.0,
                eps_psi,
                stagnated,
                hit_max,
            })
        }
        PhaseSolver::Lifted => {
            let rank_residual = mat_psi.rank_residual()?;
            let mut phi_out = extract_phi(&mat_psi, eps_psi)?;
            // rounding to rank one must not lose ground against the anchor
            if bt * model.value(&lift(&phi_out)) < trace[0] {
                phi_out = phi.to_vec();
            }
            Ok(PhaseStep {
                phi: phi_out,
                psi: mat_psi,
                trace,
                rank_residual,
                eps_psi,
                stagnated,
                hit_max,
            })
        }
    }
}
