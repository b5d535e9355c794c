//! Nakagami-m block fading and the link budget.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Fading state of the link. `E{|h|^2} = 1` in both cases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fading {
    /// Nakagami-m with shape `m >= 1` (finite).
    Nakagami(f64),
    /// Deterministic unit amplitude, the `m -> inf` limit.
    NoFading,
}

impl Fading {
    pub fn nakagami(m: f64) -> Result<Self> {
        if m.is_infinite() && m > 0.0 {
            return Ok(Fading::NoFading);
        }
        if !(m >= 1.0) {
            return Err(Error::param(
                "m",
                format!("Nakagami shape must be >= 1, got {m}"),
            ));
        }
        Ok(Fading::Nakagami(m))
    }

    /// Rician channel with factor `k`, mapped onto its Nakagami shape.
    pub fn rician(k: f64) -> Result<Self> {
        Self::nakagami(rice_to_nakagami(k)?)
    }

    /// `m` as a float; `f64::INFINITY` for no fading.
    pub fn m(&self) -> f64 {
        match self {
            Fading::Nakagami(m) => *m,
            Fading::NoFading => f64::INFINITY,
        }
    }

    /// `E{|h|^4} = (1 + m) / m`, exactly 1 without fading.
    pub fn fourth_moment(&self) -> f64 {
        match self {
            Fading::Nakagami(m) => (1.0 + m) / m,
            Fading::NoFading => 1.0,
        }
    }

    pub fn sampler(&self) -> Result<AmplitudeSampler> {
        AmplitudeSampler::new(*self)
    }
}

impl fmt::Display for Fading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fading::Nakagami(m) => write!(f, "{m}"),
            Fading::NoFading => f.write_str("inf"),
        }
    }
}

impl FromStr for Fading {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(Fading::NoFading);
        }
        let m: f64 = t
            .parse()
            .map_err(|_| format!("`{t}` is not a number or `inf`"))?;
        Fading::nakagami(m).map_err(|e| e.to_string())
    }
}

/// Draws `|h|` for one block.
#[derive(Debug, Clone)]
pub struct AmplitudeSampler {
    fading: Fading,
    gamma: Option<Gamma<f64>>,
}

impl AmplitudeSampler {
    pub fn new(fading: Fading) -> Result<Self> {
        let gamma = match fading {
            Fading::Nakagami(m) => {
                if !(m >= 1.0) || !m.is_finite() {
                    return Err(Error::param(
                        "m",
                        format!("Nakagami shape must be >= 1, got {m}"),
                    ));
                }
                Some(Gamma::new(m, 1.0 / m).map_err(|e| Error::param("m", e.to_string()))?)
            }
            Fading::NoFading => None,
        };
        Ok(Self { fading, gamma })
    }

    pub fn fading(&self) -> Fading {
        self.fading
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.gamma {
            Some(g) => g.sample(rng).sqrt(),
            None => 1.0,
        }
    }
}

/// `|h| = sqrt(G)` with `G ~ Gamma(m, 1/m)`, so `E{|h|^2} = 1`.
pub fn nakagami_amplitude<R: Rng + ?Sized>(m: f64, rng: &mut R) -> Result<f64> {
    Ok(AmplitudeSampler::new(Fading::nakagami(m)?)?.sample(rng))
}

/// Rice factor to the moment-matched Nakagami shape, `(K + 1)^2 / (2K + 1)`.
pub fn rice_to_nakagami(k: f64) -> Result<f64> {
    if !(k >= 0.0) {
        return Err(Error::param(
            "rice_k",
            format!("Rice factor must be >= 0, got {k}"),
        ));
    }
    if k.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok((k + 1.0).powi(2) / (2.0 * k + 1.0))
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

/// Transmit power, geometry and rectenna constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    /// Transmit power in watts.
    pub tx_power: f64,
    /// Tx-Rx distance in meters.
    pub distance: f64,
    pub path_loss_exponent: f64,
    pub k2: f64,
    pub k4: f64,
    /// Antenna resistance in ohms.
    pub r_ant: f64,
}

impl Default for LinkBudget {
    /// 30 dBm at 20 m, alpha = 4, k2 = 0.0034, k4 = 0.3829, R_ant = 50 ohm.
    fn default() -> Self {
        Self {
            tx_power: 1.0,
            distance: 20.0,
            path_loss_exponent: 4.0,
            k2: 0.0034,
            k4: 0.3829,
            r_ant: 50.0,
        }
    }
}

/// `(eps1, eps2)` folding power, path loss and rectenna constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveGains {
    pub eps1: f64,
    pub eps2: f64,
}

impl LinkBudget {
    pub fn validate(&self) -> Result<()> {
        let fields: [(&'static str, f64); 5] = [
            ("P_t", self.tx_power),
            ("r", self.distance),
            ("k2", self.k2),
            ("R_ant", self.r_ant),
            ("alpha", self.path_loss_exponent),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(
                    name,
                    format!("must be finite and > 0, got {v}"),
                ));
            }
        }
        // k4 = 0 selects the linear harvester model
        if !(self.k4 >= 0.0 && self.k4.is_finite()) {
            return Err(Error::param(
                "k4",
                format!("must be finite and >= 0, got {}", self.k4),
            ));
        }
        if self.path_loss_exponent < 2.0 {
            return Err(Error::param(
                "alpha",
                format!(
                    "path-loss exponent must be >= 2, got {}",
                    self.path_loss_exponent
                ),
            ));
        }
        Ok(())
    }

    /// `r^(-alpha)`, the large-scale power gain.
    pub fn path_gain(&self) -> f64 {
        self.distance.powf(-self.path_loss_exponent)
    }

    /// `k2 * R_ant`, the second-order rectenna coefficient.
    pub fn second_order_coeff(&self) -> f64 {
        self.k2 * self.r_ant
    }

    /// `k4 * R_ant^2`, the fourth-order rectenna coefficient.
    pub fn fourth_order_coeff(&self) -> f64 {
        self.k4 * self.r_ant * self.r_ant
    }

    pub fn with_tx_power(mut self, watts: f64) -> Self {
        self.tx_power = watts;
        self
    }
}

/// `eps1 = r^-alpha k2 R_ant P_t`, `eps2 = r^-2alpha k4 R_ant^2 P_t^2`.
pub fn effective_gains(budget: &LinkBudget) -> EffectiveGains {
    let g = budget.path_gain();
    EffectiveGains {
        eps1: g * budget.second_order_coeff() * budget.tx_power,
        eps2: g * g * budget.fourth_order_coeff() * budget.tx_power * budget.tx_power,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rice_mapping() {
        assert_eq!(rice_to_nakagami(0.0).unwrap(), 1.0);
        assert_relative_eq!(rice_to_nakagami(1.0).unwrap(), 4.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(
            rice_to_nakagami(10.0).unwrap(),
            121.0 / 21.0,
            epsilon = 1e-12
        );
        assert!((rice_to_nakagami(10.0).unwrap() - 5.7619).abs() < 1e-4);
        let mut last = 1.0;
        for k in 1..50 {
            let m = rice_to_nakagami(k as f64).unwrap();
            assert!(m > last);
            last = m;
        }
        assert!(rice_to_nakagami(-0.1).is_err());
    }

    #[test]
    fn default_gains() {
        let g = effective_gains(&LinkBudget::default());
        // 20^-4 * 0.0034 * 50 and 20^-8 * 0.3829 * 2500
        assert_relative_eq!(g.eps1, 1.0625e-6, max_relative = 1e-12);
        assert_relative_eq!(g.eps2, 0.3829 * 2500.0 / 2.56e10, max_relative = 1e-12);
        assert!((g.eps2 - 3.7393e-8).abs() < 5e-13);
    }

    #[test]
    fn doubling_distance() {
        let b = LinkBudget::default();
        let far = LinkBudget {
            distance: 2.0 * b.distance,
            ..b
        };
        let (g, h) = (effective_gains(&b), effective_gains(&far));
        assert_relative_eq!(g.eps1 / h.eps1, 16.0, max_relative = 1e-12);
        assert_relative_eq!(g.eps2 / h.eps2, 256.0, max_relative = 1e-12);
    }

    #[test]
    fn budget_validation() {
        assert!(LinkBudget::default().validate().is_ok());
        let bad = LinkBudget {
            distance: -1.0,
            ..LinkBudget::default()
        };
        assert!(matches!(
            bad.validate(),
            Err(Error::InvalidParameter { name: "r", .. })
        ));
        let linear = LinkBudget {
            k4: 0.0,
            ..LinkBudget::default()
        };
        assert!(linear.validate().is_ok());
    }

    #[test]
    fn dbm_conversion() {
        assert_relative_eq!(dbm_to_watts(30.0), 1.0, epsilon = 1e-15);
        assert_relative_eq!(watts_to_dbm(dbm_to_watts(25.0)), 25.0, epsilon = 1e-12);
    }

    #[test]
    fn fading_parsing() {
        assert_eq!("inf".parse::<Fading>().unwrap(), Fading::NoFading);
        assert_eq!("4".parse::<Fading>().unwrap(), Fading::Nakagami(4.0));
        assert!("0.5".parse::<Fading>().is_err());
        assert!(Fading::nakagami(0.9).is_err());
        assert_eq!(Fading::nakagami(f64::INFINITY).unwrap(), Fading::NoFading);
        assert_eq!(Fading::rician(0.0).unwrap(), Fading::Nakagami(1.0));
    }

    #[test]
    fn no_fading_is_constant() {
        let s = Fading::NoFading.sampler().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!((0..100).all(|_| s.sample(&mut rng) == 1.0));
    }

    #[test]
    fn large_m_concentrates() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = Fading::Nakagami(1e4).sampler().unwrap();
        let n = 100_000;
        let v: Vec<f64> = (0..n).map(|_| s.sample(&mut rng).powi(2)).collect();
        let mean = v.iter().sum::<f64>() / n as f64;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        // Var{|h|^2} = 1/m
        assert!(var < 2e-4, "var {var}");
    }

    #[test]
    fn fourth_moment_decreasing_in_m() {
        let ms = [1.0, 2.0, 4.0, 10.0, 20.0];
        for w in ms.windows(2) {
            assert!(
                Fading::Nakagami(w[0]).fourth_moment() > Fading::Nakagami(w[1]).fourth_moment()
            );
        }
        assert!(Fading::Nakagami(20.0).fourth_moment() > Fading::NoFading.fourth_moment());
    }
}
