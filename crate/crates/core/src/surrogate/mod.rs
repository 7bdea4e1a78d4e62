//! Learned surrogates of the BCD solver: a CSI-driven network and a
//! location-only pair (one network maps locations to CSI, the other maps
//! locations to phases and energy split).

mod features;
mod mlp;
mod scaler;
mod train;

pub use features::{
    channels_from_features, corrupt, csi_features, decode_label, location_features, positions_from_features,
    solution_label,
};
pub use mlp::{
    column_moments, csi_dim, loss, Activation, AdamConfig, AdamState, BatchStats, LayerCount, LayerSpec, LossKind,
    Mlp, MlpSpec, Mode,
};
pub use scaler::{minmax_fit_transform, MinMaxScaler};
pub use train::{fit, FitOptions, FitReport};

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::bcd::beamforming_step;
use crate::objective::{effective_channels, tctb_parts, Solution};
use crate::{ChannelSet, Error, Result, SystemConfig};

/// A network with the scalers fitted on its training inputs and, for
/// networks with scaled targets, outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateNet {
    pub net: Mlp,
    pub input_scaler: MinMaxScaler,
    pub output_scaler: Option<MinMaxScaler>,
}

impl SurrogateNet {
    /// Raw features in, raw (inverse-scaled) outputs out.
    pub fn infer(&self, raw: &[f64]) -> Result<Vec<f64>> {
        let y = self.net.predict_one(&self.input_scaler.transform_row(raw)?)?;
        match &self.output_scaler {
            Some(s) => s.inverse_row(&y),
            None => Ok(y),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Surrogates {
    pub csi: Option<SurrogateNet>,
    pub loc1: Option<SurrogateNet>,
    pub loc2: Option<SurrogateNet>,
}

#[derive(Debug, Clone, Copy)]
pub enum SurrogateInput<'a> {
    /// CSI features (possibly corrupted) plus the channels used for the
    /// receive beamformers.
    Csi {
        features: &'a [f64],
        channels: &'a ChannelSet,
    },
    /// Location features (possibly corrupted) only.
    Location { features: &'a [f64] },
}

/// Map an input to a feasible solution. The phases and energy split come
/// from the network; `W` is the SINR-optimal beamformer for them on the
/// CSI-path channels or, on the location path, on the channels predicted
/// by the location-to-CSI network. `objective_bits` is evaluated on those
/// same channels, so for the location path it is the model's own estimate.
pub fn infer_solution(models: &Surrogates, input: SurrogateInput<'_>, config: &SystemConfig) -> Result<Solution> {
    let missing = |name: &str| Error::InvalidArgument(alloc::format!("missing {name} model"));
    let (y, channels) = match input {
        SurrogateInput::Csi { features, channels } => {
            let net = models.csi.as_ref().ok_or_else(|| missing("csi"))?;
            (net.infer(features)?, channels.clone())
        }
        SurrogateInput::Location { features } => {
            let loc1 = models.loc1.as_ref().ok_or_else(|| missing("loc1"))?;
            let loc2 = models.loc2.as_ref().ok_or_else(|| missing("loc2"))?;
            let predicted = loc1.infer(features)?;
            let ch = channels_from_features(&predicted, config, positions_from_features(features))?;
            (loc2.infer(features)?, ch)
        }
    };
    let (phi, a) = decode_label(&y, config)?;
    let h_eff = effective_channels(&channels, &phi)?;
    let w = beamforming_step(&h_eff, &a, config)?;
    let objective_bits = tctb_parts(&phi, &a, &w, &channels, config)?;
    Ok(Solution {
        phi,
        a,
        w,
        objective_bits,
        trace: alloc::vec![objective_bits],
        converged: true,
    })
}
