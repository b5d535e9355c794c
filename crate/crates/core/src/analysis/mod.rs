//! Closed-form harvested DC.
//!
//! Every expression is `eps1 * E{S^2} + eps2 * E{|h|^4} * E{S^4}` for the
//! relevant harvester-input sum `S`, with `E{|h|^4} = (1 + m) / m` (exactly 1
//! without fading). The named functions spell out the table of results term
//! by term; [`harvested_dc`] composes the same values from the per-frame chip
//! moments and is used to cross-check them.

pub mod hpa;
pub mod multisine;

pub use hpa::{hpa_apply, HpaModel};
pub use multisine::{
    multisine_baseline, multisine_moments, MultisineConfig, MultisineHarvest, MultisineMoments,
};

use crate::channel::{EffectiveGains, Fading};
use crate::error::{Error, Result};
use crate::receiver::ReceiverConfig;
use crate::waveform::{Scheme, WaveformSpec};

/// Parameters shared by the closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormInputs {
    pub gains: EffectiveGains,
    pub beta: usize,
    /// 0 selects the fully correlated SR limit.
    pub beta_r: usize,
    pub fading: Fading,
}

fn check_beta(beta: usize) -> Result<f64> {
    if beta == 0 {
        return Err(Error::param("beta", "spreading factor must be at least 1"));
    }
    Ok(beta as f64)
}

/// DCSK with a correlator: `eps1 beta + eps2 3(1+m)/m beta (2 beta - 1)`.
pub fn z_mc(gains: EffectiveGains, beta: usize, fading: Fading) -> Result<f64> {
    let b = check_beta(beta)?;
    let k = fading.fourth_moment();
    Ok(gains.eps1 * b + gains.eps2 * 3.0 * k * b * (2.0 * b - 1.0))
}

/// DCSK without a correlator: `eps1 beta + eps2 3(1+m)/(4m) beta`.
pub fn z_mnc(gains: EffectiveGains, beta: usize, fading: Fading) -> Result<f64> {
    let b = check_beta(beta)?;
    let k = fading.fourth_moment();
    Ok(gains.eps1 * b + gains.eps2 * 0.75 * k * b)
}

/// Unmodulated chaos with a correlator: `eps1 beta + eps2 3(1+m)/m beta (beta - 1/4)`.
pub fn z_um_c(gains: EffectiveGains, beta: usize, fading: Fading) -> Result<f64> {
    let b = check_beta(beta)?;
    let k = fading.fourth_moment();
    Ok(gains.eps1 * b + gains.eps2 * 3.0 * k * b * (b - 0.25))
}

/// Unmodulated chaos without a correlator; identical to [`z_mnc`].
pub fn z_um_nc(gains: EffectiveGains, beta: usize, fading: Fading) -> Result<f64> {
    z_mnc(gains, beta, fading)
}

/// `z_MC(m1) - z_UM,C(m2)` at a real-valued `beta`.
pub fn delta_gap(eps2: f64, beta: f64, m1: Fading, m2: Fading) -> f64 {
    let lin_mod = 2.0 * beta - 1.0;
    let lin_um = beta - 0.25;
    match (m1, m2) {
        (Fading::Nakagami(a), Fading::Nakagami(b)) => {
            // common denominator keeps rational roots exact
            let num = (1.0 + a) * b * lin_mod - (1.0 + b) * a * lin_um;
            3.0 * eps2 * beta * num / (a * b)
        }
        _ => 3.0 * eps2 * beta * (m1.fourth_moment() * lin_mod - m2.fourth_moment() * lin_um),
    }
}

/// Threshold on `beta` above which modulated DCSK (fading `m1`) out-harvests
/// unmodulated chaos (fading `m2`), clipped below at 0.
///
/// Returns [`Error::NoFiniteThreshold`] when the gap's slope in `beta` is not
/// positive, i.e. `2 (1+m1)/m1 <= (1+m2)/m2`.
pub fn beta_opt(m1: Fading, m2: Fading) -> Result<f64> {
    let raw = match (m1, m2) {
        (Fading::Nakagami(a), Fading::Nakagami(b)) => {
            let den = 4.0 * (2.0 * b + a * b - a);
            if !(den > 0.0) {
                return Err(Error::NoFiniteThreshold(den));
            }
            (4.0 * b + 3.0 * a * b - a) / den
        }
        _ => {
            let (k1, k2) = (m1.fourth_moment(), m2.fourth_moment());
            let den = 2.0 * k1 - k2;
            if !(den > 0.0) {
                return Err(Error::NoFiniteThreshold(den));
            }
            (k1 - 0.25 * k2) / den
        }
    };
    Ok(raw.max(0.0))
}

/// SR-DCSK with a correlator. `beta_r = 0` is the closed-form limit with no
/// reference; otherwise `beta_r` must divide `beta`.
pub fn z_sr(gains: EffectiveGains, beta: usize, beta_r: usize, fading: Fading) -> Result<f64> {
    let b = check_beta(beta)?;
    let k = fading.fourth_moment();
    let c4 = 3.0 * k / 8.0;
    if beta_r == 0 {
        return Ok(0.5 * gains.eps1 * b * b + c4 * gains.eps2 * b.powi(4));
    }
    if !beta.is_multiple_of(beta_r) {
        return Err(Error::NotDivisible { beta, beta_r });
    }
    let br = beta_r as f64;
    let zeta = (beta / beta_r) as f64;
    let z2 = zeta * zeta;
    Ok(gains.eps1 * (br * br + b * b) / (2.0 * br)
        + gains.eps2 * c4 * (1.0 + 6.0 * z2 + z2 * z2) * (2.0 * br * br - br))
}

/// WPT-optimal SR-DCSK (`beta_r = 1`):
/// `eps1 (1 + beta^2)/2 + 3(1+m)/(8m) eps2 (1 + 6 beta^2 + beta^4)`.
pub fn z_sr_opt(gains: EffectiveGains, beta: usize, fading: Fading) -> Result<f64> {
    let b = check_beta(beta)?;
    let k = fading.fourth_moment();
    let b2 = b * b;
    Ok(0.5 * gains.eps1 * (1.0 + b2) + 3.0 * k / 8.0 * gains.eps2 * (1.0 + 6.0 * b2 + b2 * b2))
}

/// `E{(sum s_k)^2}` over one frame for unit gain, i.i.d. arcsine chips.
pub fn correlator_second_moment(spec: &WaveformSpec) -> f64 {
    let b = spec.beta() as f64;
    match spec.scheme() {
        Scheme::Dcsk | Scheme::Unmodulated => b,
        Scheme::SrDcsk | Scheme::OptimalSr => {
            let br = spec.beta_r() as f64;
            (br * br + b * b) / (2.0 * br)
        }
    }
}

/// `E{(sum s_k)^4}` over one frame for unit gain, i.i.d. arcsine chips.
pub fn correlator_fourth_moment(spec: &WaveformSpec) -> f64 {
    let b = spec.beta() as f64;
    match spec.scheme() {
        Scheme::Dcsk => 3.0 * b * (2.0 * b - 1.0),
        Scheme::Unmodulated => 3.0 * b * (b - 0.25),
        Scheme::SrDcsk | Scheme::OptimalSr => {
            let br = spec.beta_r() as f64;
            let z2 = (spec.zeta() as f64).powi(2);
            3.0 / 8.0 * (1.0 + 6.0 * z2 + z2 * z2) * (2.0 * br * br - br)
        }
    }
}

/// `(E{sum s_k^2}, E{sum s_k^4})` over one frame: `L/2` and `3L/8`.
pub fn per_sample_moments(spec: &WaveformSpec) -> (f64, f64) {
    let l = spec.frame_length() as f64;
    (0.5 * l, 0.375 * l)
}

/// Harvested DC for any scheme and receiver, composed from frame moments.
///
/// Reproduces the named closed forms; for SR frames without a correlator it
/// gives the per-sample result `eps1 L/2 + eps2 (1+m)/m 3L/8`.
pub fn harvested_dc(
    spec: &WaveformSpec,
    receiver: ReceiverConfig,
    gains: EffectiveGains,
    fading: Fading,
) -> f64 {
    let (s2, s4) = match receiver {
        ReceiverConfig::Correlator => (
            correlator_second_moment(spec),
            correlator_fourth_moment(spec),
        ),
        ReceiverConfig::NoCorrelator => per_sample_moments(spec),
    };
    gains.eps1 * s2 + gains.eps2 * fading.fourth_moment() * s4
}

impl ClosedFormInputs {
    /// The named closed form matching `scheme` and `receiver`.
    pub fn evaluate(&self, scheme: Scheme, receiver: ReceiverConfig) -> Result<f64> {
        let ClosedFormInputs {
            gains,
            beta,
            beta_r,
            fading,
        } = *self;
        match (scheme, receiver) {
            (Scheme::Dcsk, ReceiverConfig::Correlator) => z_mc(gains, beta, fading),
            (Scheme::Dcsk, ReceiverConfig::NoCorrelator) => z_mnc(gains, beta, fading),
            (Scheme::Unmodulated, ReceiverConfig::Correlator) => z_um_c(gains, beta, fading),
            (Scheme::Unmodulated, ReceiverConfig::NoCorrelator) => z_um_nc(gains, beta, fading),
            (Scheme::SrDcsk, ReceiverConfig::Correlator) => z_sr(gains, beta, beta_r, fading),
            (Scheme::OptimalSr, ReceiverConfig::Correlator) => z_sr_opt(gains, beta, fading),
            (Scheme::SrDcsk | Scheme::OptimalSr, ReceiverConfig::NoCorrelator) => {
                let spec = WaveformSpec::new(scheme, beta, beta_r)?;
                Ok(harvested_dc(&spec, receiver, gains, fading))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{effective_gains, LinkBudget};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn gains() -> EffectiveGains {
        effective_gains(&LinkBudget::default())
    }

    const RAYLEIGH: Fading = Fading::Nakagami(1.0);

    #[test]
    fn default_budget_values() {
        let g = gains();
        // eps1*25 + eps2*6*25*49 and friends, by hand
        assert!((z_mc(g, 25, RAYLEIGH).unwrap() - 3.014e-4).abs() < 5e-8);
        assert_relative_eq!(
            z_mc(g, 25, RAYLEIGH).unwrap(),
            g.eps1 * 25.0 + g.eps2 * 6.0 * 25.0 * 49.0,
            max_relative = 1e-14
        );
        assert!((z_mnc(g, 25, RAYLEIGH).unwrap() - 2.796e-5).abs() < 5e-9);
        // eps1*25 + eps2*6*25*24.75; the nonlinear part alone is 1.388e-4
        assert!((z_um_c(g, 25, RAYLEIGH).unwrap() - 1.654e-4).abs() < 5e-8);
        assert!((g.eps2 * 6.0 * 25.0 * 24.75 - 1.388e-4).abs() < 5e-8);
        assert!((z_sr(g, 25, 1, RAYLEIGH).unwrap() - 1.139e-2).abs() < 5e-6);
    }

    #[test]
    fn beta_one_reductions() {
        let g = gains();
        for f in [RAYLEIGH, Fading::Nakagami(4.0), Fading::NoFading] {
            let k = f.fourth_moment();
            assert_relative_eq!(
                z_mc(g, 1, f).unwrap(),
                g.eps1 + g.eps2 * 3.0 * k,
                max_relative = 1e-14
            );
            assert_relative_eq!(
                z_sr_opt(g, 1, f).unwrap(),
                z_mc(g, 1, f).unwrap(),
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn no_fading_limit() {
        let g = gains();
        let inf = z_mc(g, 25, Fading::NoFading).unwrap();
        let big = z_mc(g, 25, Fading::Nakagami(1e6)).unwrap();
        assert!((inf - big).abs() / inf < 1e-4);
        assert_relative_eq!(
            z_mnc(g, 25, Fading::NoFading).unwrap(),
            g.eps1 * 25.0 + 0.75 * g.eps2 * 25.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn no_correlator_is_linear_in_beta() {
        let g = gains();
        for b in 1..40 {
            let d = z_mnc(g, 2 * b, RAYLEIGH).unwrap() - 2.0 * z_mnc(g, b, RAYLEIGH).unwrap();
            assert!(d.abs() <= 1e-15 * z_mnc(g, 2 * b, RAYLEIGH).unwrap());
        }
        let only_nl = EffectiveGains {
            eps1: 0.0,
            eps2: 1.0,
        };
        assert_relative_eq!(
            z_mnc(only_nl, 7, RAYLEIGH).unwrap() / z_mnc(only_nl, 7, Fading::NoFading).unwrap(),
            2.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn modulation_gain() {
        let g = gains();
        for f in [RAYLEIGH, Fading::Nakagami(4.0), Fading::NoFading] {
            for beta in 1..60 {
                let b = beta as f64;
                let gap = z_mc(g, beta, f).unwrap() - z_um_c(g, beta, f).unwrap();
                let expected = g.eps2 * 3.0 * f.fourth_moment() * b * (b - 0.75);
                assert!((gap - expected).abs() <= 1e-12 * z_mc(g, beta, f).unwrap());
                assert!(z_um_c(g, beta, f).unwrap() < z_mc(g, beta, f).unwrap());
                assert_eq!(z_um_nc(g, beta, f).unwrap(), z_mnc(g, beta, f).unwrap());
            }
        }
        assert_relative_eq!(
            z_um_nc(g, 10, Fading::Nakagami(4.0)).unwrap(),
            g.eps1 * 10.0 + g.eps2 * 0.9375 * 10.0,
            max_relative = 1e-14
        );
        assert!(z_um_nc(g, 0, RAYLEIGH).is_err());
    }

    #[test]
    fn gap_and_threshold() {
        let eps2 = gains().eps2;
        let m10 = Fading::Nakagami(10.0);
        assert_eq!(delta_gap(eps2, 3.0, m10, RAYLEIGH), 0.0);
        assert!(delta_gap(eps2, 1.0, m10, RAYLEIGH) < 0.0);
        assert!(delta_gap(eps2, 2.0, m10, RAYLEIGH) < 0.0);
        assert!(delta_gap(eps2, 4.0, m10, RAYLEIGH) > 0.0);
        assert_eq!(beta_opt(m10, RAYLEIGH).unwrap(), 3.0);
        for m in [1.0, 2.5, 4.0, 100.0] {
            assert_relative_eq!(
                beta_opt(Fading::Nakagami(m), Fading::Nakagami(m)).unwrap(),
                0.75,
                epsilon = 1e-14
            );
        }
        assert_relative_eq!(beta_opt(Fading::NoFading, Fading::NoFading).unwrap(), 0.75);
        assert_relative_eq!(
            delta_gap(eps2, 9.0, Fading::NoFading, RAYLEIGH),
            -1.5 * eps2 * 9.0,
            max_relative = 1e-14
        );
        // slope 2*1 - 2 = 0: the gap never turns positive
        assert!(matches!(
            beta_opt(Fading::NoFading, RAYLEIGH),
            Err(Error::NoFiniteThreshold(_))
        ));
    }

    #[test]
    fn sr_reduces_to_dcsk_and_optimum() {
        let g = gains();
        for f in [RAYLEIGH, Fading::Nakagami(4.0), Fading::NoFading] {
            for beta in 1..80 {
                let a = z_sr(g, beta, beta, f).unwrap();
                let b = z_mc(g, beta, f).unwrap();
                assert!((a - b).abs() <= 4.0 * f64::EPSILON * b, "beta {beta}");
                let c = z_sr(g, beta, 1, f).unwrap();
                let d = z_sr_opt(g, beta, f).unwrap();
                assert!((c - d).abs() <= 4.0 * f64::EPSILON * d, "beta {beta}");
            }
        }
        assert_eq!(
            z_sr(g, 20, 7, RAYLEIGH),
            Err(Error::NotDivisible {
                beta: 20,
                beta_r: 7
            })
        );
    }

    #[test]
    fn sr_argmax_at_unit_reference() {
        let g = gains();
        let divisors: Vec<usize> = (1..=60).filter(|d| 60 % d == 0).collect();
        let best = divisors
            .iter()
            .copied()
            .max_by(|a, b| {
                z_sr(g, 60, *a, RAYLEIGH)
                    .unwrap()
                    .partial_cmp(&z_sr(g, 60, *b, RAYLEIGH).unwrap())
                    .unwrap()
            })
            .unwrap();
        assert_eq!(best, 1);
        for w in divisors.windows(2) {
            assert!(z_sr(g, 60, w[0], RAYLEIGH).unwrap() > z_sr(g, 60, w[1], RAYLEIGH).unwrap());
        }
    }

    #[test]
    fn sr_opt_quartic_growth() {
        let only_nl = EffectiveGains {
            eps1: 0.0,
            eps2: 1.0,
        };
        let r = z_sr_opt(only_nl, 20_000, RAYLEIGH).unwrap()
            / z_sr_opt(only_nl, 10_000, RAYLEIGH).unwrap();
        assert!((r - 16.0).abs() < 1e-6);
    }

    #[test]
    fn second_difference_in_beta() {
        let g = gains();
        for f in [RAYLEIGH, Fading::Nakagami(20.0), Fading::NoFading] {
            let want = 12.0 * g.eps2 * f.fourth_moment();
            for b in 2..50 {
                let d2 = z_mc(g, b + 1, f).unwrap() - 2.0 * z_mc(g, b, f).unwrap()
                    + z_mc(g, b - 1, f).unwrap();
                assert!(
                    (d2 - want).abs() <= 1e-9 * z_mc(g, b + 1, f).unwrap(),
                    "b {b}"
                );
                let n2 = z_mnc(g, b + 1, f).unwrap() - 2.0 * z_mnc(g, b, f).unwrap()
                    + z_mnc(g, b - 1, f).unwrap();
                assert!(n2.abs() <= 1e-12 * z_mnc(g, b + 1, f).unwrap());
            }
        }
    }

    #[test]
    fn fading_helps_and_order_in_m() {
        let g = gains();
        let ms = [
            Fading::Nakagami(1.0),
            Fading::Nakagami(2.0),
            Fading::Nakagami(4.0),
            Fading::Nakagami(20.0),
            Fading::Nakagami(100.0),
            Fading::NoFading,
        ];
        for beta in 1..50 {
            for w in ms.windows(2) {
                assert!(z_mc(g, beta, w[0]).unwrap() > z_mc(g, beta, w[1]).unwrap());
                assert!(z_mnc(g, beta, w[0]).unwrap() > z_mnc(g, beta, w[1]).unwrap());
                assert!(z_um_c(g, beta, w[0]).unwrap() > z_um_c(g, beta, w[1]).unwrap());
                assert!(z_sr_opt(g, beta, w[0]).unwrap() > z_sr_opt(g, beta, w[1]).unwrap());
            }
        }
    }

    #[test]
    fn composed_moments_match_named_forms() {
        let g = gains();
        for f in [RAYLEIGH, Fading::Nakagami(4.0), Fading::NoFading] {
            for beta in [1usize, 2, 5, 12, 60] {
                for beta_r in (1..=beta).filter(|d| beta % d == 0) {
                    for scheme in [
                        Scheme::Dcsk,
                        Scheme::Unmodulated,
                        Scheme::SrDcsk,
                        Scheme::OptimalSr,
                    ] {
                        for rx in [ReceiverConfig::Correlator, ReceiverConfig::NoCorrelator] {
                            let spec = WaveformSpec::new(scheme, beta, beta_r).unwrap();
                            let inputs = ClosedFormInputs {
                                gains: g,
                                beta,
                                beta_r: spec.beta_r(),
                                fading: f,
                            };
                            let named = inputs.evaluate(scheme, rx).unwrap();
                            let composed = harvested_dc(&spec, rx, g, f);
                            assert!((named - composed).abs() <= 1e-13 * named, "{spec} {rx}");
                        }
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn gap_sign_follows_threshold(m1 in 1.0f64..200.0, m2 in 1.0f64..200.0, t in 0.05f64..3.0) {
            let (f1, f2) = (Fading::Nakagami(m1), Fading::Nakagami(m2));
            if let Ok(opt) = beta_opt(f1, f2) {
                if opt > 0.0 {
                    let below = opt * (1.0 - t / 4.0);
                    prop_assert!(delta_gap(1.0, below, f1, f2) < 0.0);
                }
                let above = opt * (1.0 + t) + t;
                prop_assert!(delta_gap(1.0, above, f1, f2) > 0.0);
            }
        }
    }
}
