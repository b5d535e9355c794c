//! Transmit power-amplifier saturation (Rapp AM/AM).

use crate::channel::dbm_to_watts;
use crate::error::{Error, Result};

/// Maximum deliverable transmit power of the default amplifier, in dBm.
pub const DEFAULT_SATURATION_DBM: f64 = 25.0;
/// Default Rapp smoothness.
pub const DEFAULT_SMOOTHNESS: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum HpaModel {
    #[default]
    Ideal,
    Rapp {
        /// Knee sharpness `p > 0`.
        smoothness: f64,
        /// Output amplitude asymptote, `sqrt(watts)`.
        saturation_amplitude: f64,
    },
}

impl HpaModel {
    pub fn rapp(smoothness: f64, saturation_amplitude: f64) -> Result<Self> {
        if !(smoothness > 0.0 && smoothness.is_finite()) {
            return Err(Error::param(
                "hpa_p",
                format!("smoothness must be > 0, got {smoothness}"),
            ));
        }
        if !(saturation_amplitude > 0.0 && saturation_amplitude.is_finite()) {
            return Err(Error::param(
                "hpa_sat",
                format!("saturation amplitude must be > 0, got {saturation_amplitude}"),
            ));
        }
        Ok(HpaModel::Rapp {
            smoothness,
            saturation_amplitude,
        })
    }

    /// Rapp amplifier whose output power saturates at `dbm`.
    pub fn rapp_saturating_at_dbm(smoothness: f64, dbm: f64) -> Result<Self> {
        Self::rapp(smoothness, dbm_to_watts(dbm).sqrt())
    }

    /// p = 6, saturating at 25 dBm.
    pub fn default_rapp() -> Self {
        HpaModel::Rapp {
            smoothness: DEFAULT_SMOOTHNESS,
            saturation_amplitude: dbm_to_watts(DEFAULT_SATURATION_DBM).sqrt(),
        }
    }

    /// Radiated power for a requested transmit power, both in watts.
    ///
    /// The amplifier acts on the drive amplitude `sqrt(P_t)`; the waveform
    /// shape is untouched and only its power level saturates.
    pub fn output_power(&self, requested: f64) -> f64 {
        let a = hpa_apply(requested.sqrt(), self);
        a * a
    }
}

/// Memoryless AM/AM map: identity for [`HpaModel::Ideal`], otherwise
/// `x / (1 + |x / A_sat|^(2p))^(1/(2p))`.
#[inline]
pub fn hpa_apply(sample: f64, model: &HpaModel) -> f64 {
    match *model {
        HpaModel::Ideal => sample,
        HpaModel::Rapp {
            smoothness,
            saturation_amplitude,
        } => {
            let two_p = 2.0 * smoothness;
            let ratio = (sample / saturation_amplitude).abs();
            sample / (1.0 + ratio.powf(two_p)).powf(1.0 / two_p)
        }
    }
}
