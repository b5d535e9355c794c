//! Analog correlator, per-sample aggregation, the nonlinear rectenna map and
//! PAPR measurement at the harvester input.
//!
//! Scaling convention: the amplitude chain `sqrt(P_t) * |h| * r^(-alpha/2)`
//! is applied to the signal before moments are taken, and [`rectenna_dc`]
//! only multiplies by `k2 R_ant` and `k4 R_ant^2`. Callers fold the path
//! loss into the `h` argument.

use std::fmt;
use std::str::FromStr;

use crate::analysis;
use crate::error::{Error, Result};
use crate::waveform::{Frame, WaveformSpec};

/// Whether an ideal full-symbol correlator precedes the rectifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReceiverConfig {
    /// `psi = 1`: every chip reaches the rectifier on its own.
    NoCorrelator,
    /// `psi` equals the frame length: the symbol is summed first.
    Correlator,
}

impl ReceiverConfig {
    /// Correlator length `psi` for frames of `spec`.
    pub fn psi(&self, spec: &WaveformSpec) -> usize {
        match self {
            ReceiverConfig::NoCorrelator => 1,
            ReceiverConfig::Correlator => spec.frame_length(),
        }
    }

    /// Accepts `psi = 1` or `psi = frame length`.
    pub fn from_psi(psi: usize, spec: &WaveformSpec) -> Result<Self> {
        if psi == 1 {
            Ok(ReceiverConfig::NoCorrelator)
        } else if psi == spec.frame_length() {
            Ok(ReceiverConfig::Correlator)
        } else {
            Err(Error::param(
                "psi",
                format!(
                    "must be 1 or the frame length {}, got {psi}",
                    spec.frame_length()
                ),
            ))
        }
    }

    pub fn has_correlator(&self) -> bool {
        matches!(self, ReceiverConfig::Correlator)
    }
}

impl fmt::Display for ReceiverConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReceiverConfig::NoCorrelator => f.write_str("1"),
            ReceiverConfig::Correlator => f.write_str("full"),
        }
    }
}

impl FromStr for ReceiverConfig {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" | "none" | "nc" | "no" | "false" => Ok(ReceiverConfig::NoCorrelator),
            "full" | "c" | "correlator" | "yes" | "true" => Ok(ReceiverConfig::Correlator),
            other => Err(format!(
                "`{other}` is not a correlator setting (use 1 or full)"
            )),
        }
    }
}

/// Second and fourth moments of the harvester input for one symbol.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MomentPair {
    pub m2: f64,
    pub m4: f64,
}

/// Correlator output `sqrt(P_t) * h * sum(s_k)` for one symbol.
#[inline]
pub fn correlate(frame: &Frame, h: f64, tx_power: f64) -> f64 {
    correlate_samples(frame.samples(), h, tx_power)
}

#[inline]
pub(crate) fn correlate_samples(samples: &[f64], h: f64, tx_power: f64) -> f64 {
    tx_power.sqrt() * h * samples.iter().sum::<f64>()
}

/// Moments after the correlator: the squared and fourth-power output.
#[inline]
pub fn correlator_moments(frame: &Frame, h: f64, tx_power: f64) -> MomentPair {
    let y = correlate(frame, h, tx_power);
    let y2 = y * y;
    MomentPair {
        m2: y2,
        m4: y2 * y2,
    }
}

/// Per-sample aggregation without a correlator:
/// `m2 = P h^2 sum(s^2)`, `m4 = P^2 h^4 sum(s^4)`.
#[inline]
pub fn no_correlator_moments(frame: &Frame, h: f64, tx_power: f64) -> MomentPair {
    no_correlator_samples(frame.samples(), h, tx_power)
}

#[inline]
pub(crate) fn no_correlator_samples(samples: &[f64], h: f64, tx_power: f64) -> MomentPair {
    let (mut s2, mut s4) = (0.0, 0.0);
    for s in samples {
        let q = s * s;
        s2 += q;
        s4 += q * q;
    }
    let g2 = tx_power * h * h;
    MomentPair {
        m2: g2 * s2,
        m4: g2 * g2 * s4,
    }
}

pub fn harvester_moments(
    frame: &Frame,
    receiver: ReceiverConfig,
    h: f64,
    tx_power: f64,
) -> MomentPair {
    match receiver {
        ReceiverConfig::Correlator => correlator_moments(frame, h, tx_power),
        ReceiverConfig::NoCorrelator => no_correlator_moments(frame, h, tx_power),
    }
}

/// Truncated diode model: `z = k2 R_ant m2 + k4 R_ant^2 m4`, in amperes.
///
/// `second_coeff = k2 * R_ant`, `fourth_coeff = k4 * R_ant^2`; pass
/// `fourth_coeff = 0` for the linear harvester.
pub fn rectenna_dc(moments: MomentPair, second_coeff: f64, fourth_coeff: f64) -> Result<f64> {
    if !(moments.m2 >= 0.0) || !(moments.m4 >= 0.0) {
        return Err(Error::param(
            "moments",
            format!(
                "moments must be non-negative, got ({}, {})",
                moments.m2, moments.m4
            ),
        ));
    }
    Ok(second_coeff * moments.m2 + fourth_coeff * moments.m4)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PaprMeasurement {
    /// Largest observed instantaneous power over the peak bound's denominator.
    pub empirical: f64,
    /// Analytic peak bound over the expected power.
    pub theoretical: f64,
    /// Largest observed instantaneous power.
    pub peak_power: f64,
    /// Sample mean of the instantaneous power over the run.
    pub mean_power: f64,
    /// Expected instantaneous power for the given channel instance.
    pub expected_power: f64,
    /// Number of instantaneous power observations.
    pub count: u64,
}

impl PaprMeasurement {
    /// Observed peak over the sample-mean power. Fluctuates around the
    /// empirical value by the sampling error of the mean.
    pub fn sample_ratio(&self) -> f64 {
        self.peak_power / self.mean_power
    }
}

/// Analytic PAPR at the harvester input: 2 without a correlator, 4 beta for
/// DCSK with one, and the matching peak-over-mean ratio for the SR frames.
pub fn theoretical_papr(spec: &WaveformSpec, receiver: ReceiverConfig) -> f64 {
    match receiver {
        ReceiverConfig::NoCorrelator => 2.0,
        ReceiverConfig::Correlator => {
            let l = spec.frame_length() as f64;
            l * l / analysis::correlator_second_moment(spec)
        }
    }
}

/// PAPR of the harvester input over a run of frames for one channel
/// instance `h`.
///
/// Instantaneous power is `(h s_k)^2` per chip without a correlator and
/// `(h sum s_k)^2` per symbol with one. The empirical value divides the
/// observed maximum by the expected power for this `h`, so it can never
/// exceed the analytic bound; `h` cancels in both ratios.
pub fn measure_papr(frames: &[Frame], h: f64, receiver: ReceiverConfig) -> Result<PaprMeasurement> {
    let first = frames.first().ok_or(Error::Empty("PAPR frame list"))?;
    let spec = *first.spec();
    if frames.iter().any(|f| f.spec() != &spec) {
        return Err(Error::param(
            "frames",
            "all frames must share one waveform spec",
        ));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::param(
            "h",
            format!("channel amplitude must be > 0, got {h}"),
        ));
    }
    let h2 = h * h;
    let (peak, total, count) = match receiver {
        ReceiverConfig::NoCorrelator => {
            frames
                .iter()
                .flat_map(|f| f.samples())
                .fold((0.0f64, 0.0, 0usize), |(p, t, c), s| {
                    let q = h2 * s * s;
                    (p.max(q), t + q, c + 1)
                })
        }
        ReceiverConfig::Correlator => frames.iter().fold((0.0f64, 0.0, 0usize), |(p, t, c), f| {
            let y = correlate(f, h, 1.0);
            let q = y * y;
            (p.max(q), t + q, c + 1)
        }),
    };
    let expected_unit = match receiver {
        ReceiverConfig::NoCorrelator => 0.5,
        ReceiverConfig::Correlator => analysis::correlator_second_moment(&spec),
    };
    let expected_power = h2 * expected_unit;
    Ok(PaprMeasurement {
        empirical: peak / expected_power,
        theoretical: theoretical_papr(&spec, receiver),
        peak_power: peak,
        mean_power: total / count as f64,
        expected_power,
        count: count as u64,
    })
}
