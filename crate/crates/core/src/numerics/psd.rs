
use super::eig::{ensure_hermitian, hermitian_eig, leading_eigenpair, reconstruct};
use super::ComplexMatrix;
use crate::{Error, Result, C64};

/// Feasibility tolerance for both PSD and unit-diagonal violations.
pub const PSD_FEAS_TOL: f64 = 1e-9;
const MAX_ALTERNATIONS: usize = 2000;
/// Below this negative eigenvalue the final identity blend is refused.
const BLEND_LIMIT: f64 = 1e-3;

fn diag_violation(a: &ComplexMatrix) -> f64 {
    a.diagonal()
        .iter()
        .map(|d| (d - C64::new(1.0, 0.0)).norm())
        .fold(0.0, f64::max)
}

fn min_eigenvalue(a: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eig(a)?.last().map_or(0.0, |p| p.value))
}

fn reset_diag(a: &mut ComplexMatrix) {
    for i in 0..a.rows() {
        a[(i, i)] = C64::new(1.0, 0.0);
    }
}

/// Project a Hermitian matrix onto {PSD, unit diagonal} by alternating
/// eigenvalue clipping and diagonal reset. Inputs that already satisfy
/// both constraints are returned unchanged.
///
/// If the alternation stalls with a small residual negative eigenvalue
/// `-t`, the iterate is blended toward the identity, `(X + tI)/(1 + t)`,
/// which keeps the unit diagonal and restores PSD exactly.
pub fn project_psd_unit_diag(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_hermitian(a)?;
    let mut x = a.hermitian_part();
    let mut lambda_min = min_eigenvalue(&x)?;
    if diag_violation(&x) < PSD_FEAS_TOL && lambda_min >= -PSD_FEAS_TOL {
        return Ok(a.clone());
    }
    let mut diag_residual = diag_violation(&x);
    for _ in 0..MAX_ALTERNATIONS {
        let clipped = reconstruct(&hermitian_eig(&x)?, |v| v.max(0.0));
        diag_residual = diag_violation(&clipped);
        x = clipped;
        if diag_residual < PSD_FEAS_TOL {
            // clipped is PSD up to roundoff; still pin the diagonal below
            reset_diag(&mut x);
            return Ok(x);
        }
        reset_diag(&mut x);
        lambda_min = min_eigenvalue(&x)?;
        if lambda_min >= -PSD_FEAS_TOL {
            return Ok(x);
        }
    }
    if lambda_min > -BLEND_LIMIT {
        let t = -lambda_min;
        let mut blended = x.scale(1.0 / (1.0 + t));
        for i in 0..blended.rows() {
            blended[(i, i)] = C64::new(1.0, 0.0);
        }
        return Ok(blended);
    }
    Err(Error::NonConvergence {
        iterations: MAX_ALTERNATIONS,
        residual_a: -lambda_min,
        residual_b: diag_residual,
    })
}

/// `z z^H` for the leading eigenvector `z`; a subgradient of the spectral
/// norm at a PSD matrix. Degenerate leading eigenvalues take the first
/// eigenvector returned by [`hermitian_eig`](super::hermitian_eig).
pub fn spectral_norm_subgradient(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let z = leading_eigenpair(a)?.vector;
    Ok(ComplexMatrix::outer(&z, &z))
}
