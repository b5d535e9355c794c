//! In-phase multisine baseline.

use crate::analysis::HpaModel;
use crate::channel::{Fading, LinkBudget};
use crate::error::{Error, Result};
use crate::montecarlo::{estimate_mean, HarvestEstimate, DEFAULT_CONFIDENCE};

/// Minimum samples per period of the highest tone.
pub const MIN_SAMPLES_PER_TONE_PERIOD: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultisineConfig {
    pub tones: usize,
    /// Requested transmit power, watts.
    pub tx_power: f64,
    pub hpa: HpaModel,
    pub fading: Fading,
    pub budget: LinkBudget,
    /// Samples per fundamental period.
    pub samples_per_period: usize,
    pub periods: usize,
    /// Fading draws for the Monte Carlo average.
    pub draws: u64,
    pub seed: u64,
    pub confidence: f64,
}

impl MultisineConfig {
    /// `tones` in-phase tones at the reference budget, `m = 4`, ideal amplifier.
    pub fn new(tones: usize) -> Self {
        let budget = LinkBudget::default();
        Self {
            tones,
            tx_power: budget.tx_power,
            hpa: HpaModel::Ideal,
            fading: Fading::Nakagami(4.0),
            budget,
            samples_per_period: (MIN_SAMPLES_PER_TONE_PERIOD * tones).max(64),
            periods: 1,
            draws: 10_000,
            seed: 0,
            confidence: DEFAULT_CONFIDENCE,
        }
    }

    /// Radiated power after the amplifier, watts.
    pub fn radiated_power(&self) -> f64 {
        self.hpa.output_power(self.tx_power)
    }
}

/// Time averages of the transmitted multisine over the sampled window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultisineMoments {
    /// Mean of `s^2`.
    pub m2: f64,
    /// Mean of `s^4`.
    pub m4: f64,
    /// Largest `s^2`.
    pub peak: f64,
    /// `peak / m2`.
    pub papr: f64,
}

/// Moments of `s(t) = sqrt(2P/N) sum_{n=1..N} cos(2 pi n t)` sampled at
/// `samples_per_period` points over `periods` unit periods.
pub fn multisine_moments(
    tones: usize,
    power: f64,
    samples_per_period: usize,
    periods: usize,
) -> Result<MultisineMoments> {
    if tones == 0 {
        return Err(Error::param("N_tones", "need at least one tone"));
    }
    if !(power > 0.0 && power.is_finite()) {
        return Err(Error::param(
            "P_t",
            format!("must be finite and > 0, got {power}"),
        ));
    }
    if periods == 0 {
        return Err(Error::param("periods", "need at least one period"));
    }
    let required = MIN_SAMPLES_PER_TONE_PERIOD * tones;
    if samples_per_period < required {
        return Err(Error::Undersampled {
            samples_per_period,
            tones,
            required,
        });
    }
    let amp = (2.0 * power / tones as f64).sqrt();
    let total = samples_per_period * periods;
    let (mut s2, mut s4, mut peak) = (0.0, 0.0, 0.0f64);
    for k in 0..total {
        let t = (k % samples_per_period) as f64 / samples_per_period as f64;
        let s: f64 = amp
            * (1..=tones)
                .map(|n| (std::f64::consts::TAU * n as f64 * t).cos())
                .sum::<f64>();
        let q = s * s;
        s2 += q;
        s4 += q * q;
        peak = peak.max(q);
    }
    let m2 = s2 / total as f64;
    Ok(MultisineMoments {
        m2,
        m4: s4 / total as f64,
        peak,
        papr: peak / m2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultisineHarvest {
    pub estimate: HarvestEstimate,
    /// Moments of the radiated waveform.
    pub moments: MultisineMoments,
    /// Radiated power after the amplifier, watts.
    pub radiated_power: f64,
}

/// Harvested DC of the multisine over Nakagami fading.
///
/// The amplifier sets the radiated tone power; per fading draw the rectenna
/// sees `c2 g h^2 M2 + c4 g^2 h^4 M4` with `g = r^-alpha`. The analytic value
/// replaces `h^2, h^4` by `1, (1+m)/m`.
pub fn multisine_baseline(cfg: &MultisineConfig) -> Result<MultisineHarvest> {
    cfg.budget.validate()?;
    if cfg.draws == 0 {
        return Err(Error::param("n_symbols", "need at least one fading draw"));
    }
    if !(cfg.confidence > 0.0 && cfg.confidence < 1.0) {
        return Err(Error::param(
            "confidence",
            format!("must lie in (0, 1), got {}", cfg.confidence),
        ));
    }
    let power = cfg.radiated_power();
    let moments = multisine_moments(cfg.tones, power, cfg.samples_per_period, cfg.periods)?;
    let g = cfg.budget.path_gain();
    let a2 = cfg.budget.second_order_coeff() * g * moments.m2;
    let a4 = cfg.budget.fourth_order_coeff() * g * g * moments.m4;
    let sampler = cfg.fading.sampler()?;
    let stats = estimate_mean(
        cfg.draws,
        cfg.seed,
        || (),
        |_, rng| {
            let h2 = sampler.sample(rng).powi(2);
            a2 * h2 + a4 * h2 * h2
        },
    );
    let analytic = a2 + a4 * cfg.fading.fourth_moment();
    Ok(MultisineHarvest {
        estimate: HarvestEstimate::from_stats(&stats, cfg.seed, cfg.confidence, analytic),
        moments,
        radiated_power: power,
    })
}
