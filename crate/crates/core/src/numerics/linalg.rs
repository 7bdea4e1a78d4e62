#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use super::eig::{ensure_hermitian, hermitian_eig, reconstruct, EigenPair};
use super::{normalized, ComplexMatrix};
use crate::{Error, Result, C64};

/// Lower Cholesky factor `L` with `A = L L^H`.
pub fn cholesky(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_hermitian(a)?;
    let n = a.rows();
    let scale = (0..n).map(|i| a[(i, i)].re.abs()).fold(0.0, f64::max);
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > scale * 1e-14) || !d.is_finite() {
            return Err(Error::NotPositiveDefinite(alloc::format!(
                "pivot {j} is {d:e}"
            )));
        }
        let ljj = d.sqrt();
        l[(j, j)] = C64::new(ljj, 0.0);
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// Solve `L X = B` for lower-triangular `L`.
fn forward_substitute(l: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let n = l.rows();
    let mut x = b.clone();
    for c in 0..b.cols() {
        for i in 0..n {
            let mut s = x[(i, c)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
    }
    x
}

/// Solve `L^H x = y` for lower-triangular `L`.
fn back_substitute_adjoint(l: &ComplexMatrix, y: &[C64]) -> alloc::vec::Vec<C64> {
    let n = l.rows();
    let mut x = y.to_vec();
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in i + 1..n {
            s -= l[(k, i)].conj() * x[k];
        }
        x[i] = s / l[(i, i)].conj();
    }
    x
}

/// Leading eigenpair of `B^{-1} A` for Hermitian `A` and Hermitian
/// positive definite `B`. The returned vector has unit Euclidean norm and
/// `value = x^H A x / x^H B x`.
pub fn generalized_max_eigvec(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<EigenPair> {
    ensure_hermitian(a)?;
    if a.rows() != b.rows() {
        return Err(Error::Dimension(alloc::format!(
            "pencil sizes {} and {}",
            a.rows(),
            b.rows()
        )));
    }
    let l = cholesky(b)?;
    // C = L^{-1} A L^{-H}
    let x = forward_substitute(&l, a);
    let c = forward_substitute(&l, &x.adjoint()).adjoint().hermitian_part();
    let top = hermitian_eig(&c)?.swap_remove(0);
    let v = back_substitute_adjoint(&l, &top.vector);
    let vector = normalized(&v)
        .ok_or_else(|| Error::NonFinite("generalized eigenvector".into()))?;
    Ok(EigenPair {
        value: top.value,
        vector,
    })
}

/// Moore–Penrose pseudo-inverse of a Hermitian PSD matrix. Eigenvalues at
/// or below `rel_cutoff` times the largest are treated as zero. Returns the
/// inverse and the numerical rank.
pub fn hermitian_pinv(g: &ComplexMatrix, rel_cutoff: f64) -> Result<(ComplexMatrix, usize)> {
    let pairs = hermitian_eig(g)?;
    let top = pairs.first().map_or(0.0, |p| p.value.max(0.0));
    let cut = top * rel_cutoff;
    let rank = pairs.iter().filter(|p| p.value > cut && p.value > 0.0).count();
    let inv = reconstruct(&pairs, |v| if v > cut && v > 0.0 { 1.0 / v } else { 0.0 });
    Ok((inv, rank))
}
