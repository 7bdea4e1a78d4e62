use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::ComplexMatrix;
use crate::{Error, Result, C64};

/// Hermitian validation tolerance, relative to the Frobenius norm.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Off-diagonal Jacobi stopping threshold, relative to the Frobenius norm.
const JACOBI_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Eigenvalue with its unit-norm eigenvector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<C64>,
}

pub(crate) fn ensure_hermitian(a: &ComplexMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Dimension(alloc::format!(
            "expected a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("matrix entries".into()));
    }
    if !a.is_hermitian(HERMITIAN_TOL) {
        return Err(Error::NotHermitian {
            asymmetry: a.hermitian_asymmetry(),
        });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Pairs are sorted by descending eigenvalue; exact ties keep
/// the lowest original index first.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<Vec<EigenPair>> {
    ensure_hermitian(a)?;
    let n = a.rows();
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = m.frobenius_norm();
    let threshold = (JACOBI_TOL * scale).powi(2);

    let mut converged = scale == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged || off_diagonal_sq(&m) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_sq(&m) > threshold {
        return Err(Error::NonConvergence {
            iterations: MAX_SWEEPS,
            residual_a: off_diagonal_sq(&m).sqrt(),
            residual_b: scale,
        });
    }

    let mut pairs: Vec<EigenPair> = (0..n)
        .map(|i| EigenPair {
            value: m[(i, i)].re,
            vector: v.column(i),
        })
        .collect();
    // stable: equal values stay in index order
    pairs.sort_by(|x, y| y.value.total_cmp(&x.value));
    Ok(pairs)
}

fn off_diagonal_sq(m: &ComplexMatrix) -> f64 {
    let n = m.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc
}

/// Zero `m[p][q]` with a unitary rotation in the (p, q) plane and
/// accumulate it into `v`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    // phase that makes the pivot real, then a real symmetric Jacobi rotation
    let phase = apq / r;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // V block: [[c, s], [-s e^{-i phase}, c e^{-i phase}]]
    let vpp = C64::new(c, 0.0);
    let vpq = C64::new(s, 0.0);
    let vqp = -phase.conj() * s;
    let vqq = phase.conj() * c;

    let n = m.rows();
    // columns: M <- M V
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * vpp + mkq * vqp;
        m[(k, q)] = mkp * vpq + mkq * vqq;
    }
    // rows: M <- V^H M
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = vpp.conj() * mpk + vqp.conj() * mqk;
        m[(q, k)] = vpq.conj() * mpk + vqq.conj() * mqk;
    }
    m[(p, q)] = C64::new(0.0, 0.0);
    m[(q, p)] = C64::new(0.0, 0.0);
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = C64::new(m[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * vpp + vkq * vqp;
        v[(k, q)] = vkp * vpq + vkq * vqq;
    }
}

/// `sum_i f(lambda_i) v_i v_i^H`.
pub fn reconstruct(pairs: &[EigenPair], mut f: impl FnMut(f64) -> f64) -> ComplexMatrix {
    let n = pairs.first().map_or(0, |p| p.vector.len());
    let mut out = ComplexMatrix::zeros(n, n);
    for pair in pairs {
        let w = f(pair.value);
        if w == 0.0 {
            continue;
        }
        for i in 0..n {
            let vi = pair.vector[i] * w;
            for j in 0..n {
                out[(i, j)] += vi * pair.vector[j].conj();
            }
        }
    }
    out
}

/// Largest eigenpair only.
pub fn leading_eigenpair(a: &ComplexMatrix) -> Result<EigenPair> {
    let mut pairs = hermitian_eig(a)?;
    if pairs.is_empty() {
        return Err(Error::Dimension("empty matrix".into()));
    }
    Ok(pairs.swap_remove(0))
}
