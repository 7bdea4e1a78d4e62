use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::numerics::RealMatrix;
use crate::{Error, Result};

/// Per-feature affine map of the fitted data onto `[0, 1]`.
///
/// Columns with `max == min` map to 0 and invert to the stored minimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(data: &RealMatrix) -> Result<Self> {
        if data.rows() == 0 {
            return Err(Error::InvalidArgument("cannot fit a scaler on zero rows".into()));
        }
        let mut min = data.row(0).to_vec();
        let mut max = min.clone();
        for r in 1..data.rows() {
            for (j, &v) in data.row(r).iter().enumerate() {
                min[j] = min[j].min(v);
                max[j] = max[j].max(v);
            }
        }
        Ok(Self { min, max })
    }

    pub fn dim(&self) -> usize {
        self.min.len()
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::Dimension(alloc::format!("{len} features for a {}-feature scaler", self.dim())));
        }
        Ok(())
    }

    pub fn transform_row(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x.len())?;
        Ok(x.iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(&v, (&lo, &hi))| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 })
            .collect())
    }

    pub fn inverse_row(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check(y.len())?;
        Ok(y.iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(&v, (&lo, &hi))| if hi > lo { lo + v * (hi - lo) } else { lo })
            .collect())
    }

    pub fn transform(&self, data: &RealMatrix) -> Result<RealMatrix> {
        self.map_rows(data, Self::transform_row)
    }

    pub fn inverse_transform(&self, data: &RealMatrix) -> Result<RealMatrix> {
        self.map_rows(data, Self::inverse_row)
    }

    fn map_rows(&self, data: &RealMatrix, f: fn(&Self, &[f64]) -> Result<Vec<f64>>) -> Result<RealMatrix> {
        self.check(data.cols())?;
        let mut out = RealMatrix::zeros(data.rows(), data.cols());
        for r in 0..data.rows() {
            out.row_mut(r).copy_from_slice(&f(self, data.row(r))?);
        }
        Ok(out)
    }
}

/// Fit on `data` and return the scaled copy.
pub fn minmax_fit_transform(data: &RealMatrix) -> Result<(RealMatrix, MinMaxScaler)> {
    let s = MinMaxScaler::fit(data)?;
    Ok((s.transform(data)?, s))
}
