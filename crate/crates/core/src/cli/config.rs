//! Flat `key = value` configuration with command-line overrides.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use thiserror::Error as ThisError;

use crate::analysis::HpaModel;
use crate::channel::{dbm_to_watts, Fading, LinkBudget};
use crate::chaos::{ChaosConfig, TrajectoryMode};
use crate::error::Error;
use crate::montecarlo::SimConfig;
use crate::receiver::ReceiverConfig;
use crate::waveform::{Scheme, WaveformSpec};

#[derive(Debug, ThisError, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("unknown key `{0}`")]
    UnknownKey(String),

    #[error("key `{key}`: {message}")]
    Invalid { key: String, message: String },

    #[error("{0}")]
    Io(String),
}

impl ConfigError {
    fn invalid(key: &str, message: impl fmt::Display) -> Self {
        ConfigError::Invalid {
            key: key.to_string(),
            message: message.to_string(),
        }
    }

    /// The key this error points at, if any.
    pub fn key(&self) -> Option<&str> {
        match self {
            ConfigError::UnknownKey(k) | ConfigError::Invalid { key: k, .. } => Some(k),
            _ => None,
        }
    }
}

/// Recognized keys with a short description each.
pub const KEYS: &[(&str, &str)] = &[
    ("scheme", "dcsk | unmodulated | srdcsk | optimal_sr"),
    ("receiver", "correlator setting: 1 (per chip) or full"),
    ("beta", "spreading factor"),
    ("beta_r", "SR-DCSK reference length, must divide beta"),
    ("m", "Nakagami shape >= 1 or inf"),
    ("m1", "fading of the modulated link in gap experiments"),
    ("m2", "fading of the unmodulated link in gap experiments"),
    ("p_t_dbm", "transmit power in dBm"),
    ("r", "distance in meters"),
    ("alpha", "path-loss exponent"),
    ("k2", "second-order diode coefficient"),
    (
        "k4",
        "fourth-order diode coefficient (0 = linear harvester)",
    ),
    ("r_ant", "antenna resistance in ohms"),
    ("hpa", "ideal | rapp"),
    ("hpa_p", "Rapp smoothness"),
    ("hpa_sat_dbm", "Rapp saturation power in dBm"),
    ("degree", "Chebyshev map degree"),
    ("chaos_mode", "trajectory | iid"),
    ("tones", "multisine tone count"),
    (
        "samples_per_period",
        "multisine samples per fundamental period",
    ),
    ("periods", "multisine periods"),
    ("n_symbols", "Monte Carlo symbols per point"),
    ("seed", "base seed"),
    ("confidence", "confidence level of reported intervals"),
    ("grid", "comma-separated sweep values"),
];

/// Canonical spelling of a key, or `None` when unknown.
pub fn canonical_key(raw: &str) -> Option<&'static str> {
    let k = raw.trim().to_ascii_lowercase().replace('-', "_");
    let k = match k.as_str() {
        "psi" | "correlator" => "receiver",
        "p_t" | "pt" | "pt_dbm" | "power_dbm" => "p_t_dbm",
        "distance" => "r",
        "n" | "n_tones" => "tones",
        "betar" => "beta_r",
        other => {
            return KEYS
                .iter()
                .find(|(name, _)| *name == other)
                .map(|(name, _)| *name)
        }
    };
    Some(k)
}

/// Ordered key/value overrides; later entries win.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    entries: Vec<(&'static str, String)>,
}

impl Overrides {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<(), ConfigError> {
        let k =
            canonical_key(key).ok_or_else(|| ConfigError::UnknownKey(key.trim().to_string()))?;
        self.entries.push((k, value.into().trim().to_string()));
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut out = Self::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            if v.trim().is_empty() {
                return Err(ConfigError::invalid(k.trim(), "missing value"));
            }
            out.set(k, v)?;
        }
        Ok(out)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Appends `other`, whose entries take precedence.
    pub fn extend(&mut self, other: Overrides) {
        self.entries.extend(other.entries);
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .rev()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Fully resolved parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub sim: SimConfig,
    pub m1: Fading,
    pub m2: Fading,
    pub tones: usize,
    /// `None` picks the minimum adequate sampling.
    pub samples_per_period: Option<usize>,
    pub periods: usize,
    pub grid: Option<Vec<f64>>,
    explicit: BTreeSet<&'static str>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            sim: SimConfig::new(
                WaveformSpec::dcsk(25).expect("valid default"),
                ReceiverConfig::Correlator,
            ),
            m1: Fading::Nakagami(10.0),
            m2: Fading::Nakagami(1.0),
            tones: 16,
            samples_per_period: None,
            periods: 1,
            grid: None,
            explicit: BTreeSet::new(),
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    v.parse::<T>()
        .map_err(|e| ConfigError::invalid(key, format!("cannot parse `{v}`: {e}")))
}

fn parse_with<T>(key: &str, v: &str) -> Result<T, ConfigError>
where
    T: std::str::FromStr<Err = String>,
{
    v.parse::<T>().map_err(|e| ConfigError::invalid(key, e))
}

/// Parses `a,b,c` into floats; `inf` is accepted.
pub fn parse_grid(v: &str) -> Result<Vec<f64>, ConfigError> {
    let vals = v
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            if s.eq_ignore_ascii_case("inf") {
                Ok(f64::INFINITY)
            } else {
                parse_num::<f64>("grid", s)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    if vals.is_empty() {
        return Err(ConfigError::invalid("grid", "no values"));
    }
    Ok(vals)
}

fn sim_error(e: Error) -> ConfigError {
    let key = match &e {
        Error::NotDivisible { .. } => "beta_r",
        Error::InvalidDegree(_) => "degree",
        Error::Undersampled { .. } => "samples_per_period",
        Error::InvalidParameter { name, .. } => match *name {
            "P_t" => "p_t_dbm",
            "R_ant" => "r_ant",
            "hpa_sat" => "hpa_sat_dbm",
            other => other,
        },
        _ => "config",
    };
    ConfigError::invalid(key, e)
}

impl Settings {
    /// Applies overrides on top of the defaults and validates the result.
    pub fn resolve(ov: &Overrides) -> Result<Self, ConfigError> {
        let mut s = Settings::default();
        let get = |k: &str| ov.get(k);
        for (k, _) in &ov.entries {
            s.explicit.insert(k);
        }

        let scheme = match get("scheme") {
            Some(v) => parse_with::<Scheme>("scheme", v)?,
            None => s.sim.waveform.scheme(),
        };
        let beta = match get("beta") {
            Some(v) => parse_num::<usize>("beta", v)?,
            None => s.sim.waveform.beta(),
        };
        let beta_r = match get("beta_r") {
            Some(v) => parse_num::<usize>("beta_r", v)?,
            None if scheme == Scheme::SrDcsk => 1,
            None => 0,
        };
        if get("beta_r").is_some() && scheme != Scheme::SrDcsk && get("scheme").is_some() {
            return Err(ConfigError::invalid(
                "beta_r",
                "only applies to the srdcsk scheme",
            ));
        }
        let scheme = if get("beta_r").is_some() && get("scheme").is_none() {
            Scheme::SrDcsk
        } else {
            scheme
        };
        s.sim.waveform = WaveformSpec::new(scheme, beta, beta_r).map_err(sim_error)?;
        if let Some(v) = get("receiver") {
            s.sim.receiver = parse_with::<ReceiverConfig>("receiver", v)?;
        }
        for (key, slot) in [
            ("m", &mut s.sim.channel),
            ("m1", &mut s.m1),
            ("m2", &mut s.m2),
        ] {
            if let Some(v) = get(key) {
                *slot = parse_with::<Fading>(key, v)?;
            }
        }

        let mut b = LinkBudget::default();
        if let Some(v) = get("p_t_dbm") {
            b.tx_power = dbm_to_watts(parse_num::<f64>("p_t_dbm", v)?);
        }
        for (key, slot) in [
            ("r", &mut b.distance),
            ("alpha", &mut b.path_loss_exponent),
            ("k2", &mut b.k2),
            ("k4", &mut b.k4),
            ("r_ant", &mut b.r_ant),
        ] {
            if let Some(v) = get(key) {
                *slot = parse_num::<f64>(key, v)?;
            }
        }
        b.validate().map_err(sim_error)?;
        s.sim.budget = b;

        let hpa_kind =
            get("hpa").unwrap_or(if get("hpa_p").is_some() || get("hpa_sat_dbm").is_some() {
                "rapp"
            } else {
                "ideal"
            });
        s.sim.hpa = match hpa_kind.to_ascii_lowercase().as_str() {
            "ideal" | "none" => HpaModel::Ideal,
            "rapp" => {
                let p = get("hpa_p")
                    .map(|v| parse_num::<f64>("hpa_p", v))
                    .transpose()?
                    .unwrap_or(crate::analysis::hpa::DEFAULT_SMOOTHNESS);
                let sat = get("hpa_sat_dbm")
                    .map(|v| parse_num::<f64>("hpa_sat_dbm", v))
                    .transpose()?
                    .unwrap_or(crate::analysis::hpa::DEFAULT_SATURATION_DBM);
                HpaModel::rapp_saturating_at_dbm(p, sat).map_err(sim_error)?
            }
            other => {
                return Err(ConfigError::invalid(
                    "hpa",
                    format!("`{other}` is not ideal or rapp"),
                ))
            }
        };

        let degree = get("degree")
            .map(|v| parse_num::<u32>("degree", v))
            .transpose()?
            .unwrap_or(s.sim.chaos.degree());
        let mode = match get("chaos_mode").map(|v| v.to_ascii_lowercase()) {
            None => s.sim.chaos.trajectory_mode,
            Some(v) if v == "trajectory" => TrajectoryMode::PerSymbolTrajectory,
            Some(v) if v == "iid" => TrajectoryMode::IidInvariant,
            Some(v) => {
                return Err(ConfigError::invalid(
                    "chaos_mode",
                    format!("`{v}` is not trajectory or iid"),
                ))
            }
        };
        s.sim.chaos = ChaosConfig::new(degree, mode).map_err(sim_error)?;

        if let Some(v) = get("tones") {
            s.tones = parse_num::<usize>("tones", v)?;
            if s.tones == 0 {
                return Err(ConfigError::invalid("tones", "need at least one tone"));
            }
        }
        if let Some(v) = get("samples_per_period") {
            s.samples_per_period = Some(parse_num::<usize>("samples_per_period", v)?);
        }
        if let Some(v) = get("periods") {
            s.periods = parse_num::<usize>("periods", v)?;
        }
        if let Some(v) = get("n_symbols") {
            s.sim.n_symbols = parse_num::<f64>("n_symbols", v).and_then(|x| {
                if x >= 1.0 && x.fract() == 0.0 && x <= u64::MAX as f64 {
                    Ok(x as u64)
                } else {
                    Err(ConfigError::invalid(
                        "n_symbols",
                        format!("must be a positive integer, got `{v}`"),
                    ))
                }
            })?;
        }
        if let Some(v) = get("seed") {
            s.sim.seed = parse_num::<u64>("seed", v)?;
        }
        if let Some(v) = get("confidence") {
            s.sim.confidence = parse_num::<f64>("confidence", v)?;
        }
        if let Some(v) = get("grid") {
            s.grid = Some(parse_grid(v)?);
        }
        s.sim.validate().map_err(sim_error)?;
        s.multisine(s.tones).map_err(sim_error)?;
        Ok(s)
    }

    /// Whether `key` was set explicitly.
    pub fn is_set(&self, key: &str) -> bool {
        self.explicit.contains(key)
    }

    /// Multisine configuration sharing this link, amplifier and fading.
    pub fn multisine(&self, tones: usize) -> crate::Result<crate::analysis::MultisineConfig> {
        let mut ms = crate::analysis::MultisineConfig::new(tones);
        ms.tx_power = self.sim.budget.tx_power;
        ms.budget = self.sim.budget;
        ms.hpa = self.sim.hpa;
        ms.fading = self.sim.channel;
        ms.draws = self.sim.n_symbols;
        ms.seed = self.sim.seed;
        ms.confidence = self.sim.confidence;
        ms.periods = self.periods;
        if let Some(k) = self.samples_per_period {
            ms.samples_per_period = k;
        }
        let required = crate::analysis::multisine::MIN_SAMPLES_PER_TONE_PERIOD * tones;
        if ms.samples_per_period < required {
            return Err(Error::Undersampled {
                samples_per_period: ms.samples_per_period,
                tones,
                required,
            });
        }
        Ok(ms)
    }
}

/// Reads an optional file, then applies flag overrides on top.
pub fn parse_config(path: Option<&Path>, flags: Overrides) -> Result<Settings, ConfigError> {
    let mut ov = match path {
        Some(p) => Overrides::from_file(p)?,
        None => Overrides::new(),
    };
    ov.extend(flags);
    Settings::resolve(&ov)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn empty_gives_defaults() {
        let s = Settings::resolve(&Overrides::new()).unwrap();
        assert_eq!(s.sim.budget, LinkBudget::default());
        assert_eq!(s.sim.hpa, HpaModel::Ideal);
        assert_eq!(s.sim.n_symbols, 10_000);
    }

    #[test]
    fn comments_and_precedence() {
        let mut ov =
            Overrides::parse("# header\nbeta = 10  # inline\n\nm=inf\np_t_dbm = 20\n").unwrap();
        let mut flags = Overrides::new();
        flags.set("beta", "12").unwrap();
        ov.extend(flags);
        let s = Settings::resolve(&ov).unwrap();
        assert_eq!(s.sim.waveform.beta(), 12);
        assert_eq!(s.sim.channel, Fading::NoFading);
        assert_relative_eq!(s.sim.budget.tx_power, 0.1, max_relative = 1e-12);
    }

    #[test]
    fn errors_name_the_key() {
        let e = Overrides::parse("betta = 3").unwrap_err();
        assert_eq!(e, ConfigError::UnknownKey("betta".into()));
        let e = Overrides::parse("beta 3").unwrap_err();
        assert!(matches!(e, ConfigError::Syntax { line: 1, .. }));

        let mut ov = Overrides::new();
        ov.set("beta-r", "7").unwrap();
        ov.set("beta", "20").unwrap();
        let e = Settings::resolve(&ov).unwrap_err();
        assert_eq!(e.key(), Some("beta_r"));
        assert!(e.to_string().contains("divide"), "{e}");

        let mut ov = Overrides::new();
        ov.set("m", "0.5").unwrap();
        assert_eq!(Settings::resolve(&ov).unwrap_err().key(), Some("m"));

        let mut ov = Overrides::new();
        ov.set("beta", "ten").unwrap();
        assert_eq!(Settings::resolve(&ov).unwrap_err().key(), Some("beta"));

        let mut ov = Overrides::new();
        ov.set("r", "-3").unwrap();
        assert_eq!(Settings::resolve(&ov).unwrap_err().key(), Some("r"));
    }

    #[test]
    fn hpa_keys() {
        let mut ov = Overrides::new();
        ov.set("hpa_p", "2").unwrap();
        let s = Settings::resolve(&ov).unwrap();
        assert!(matches!(s.sim.hpa, HpaModel::Rapp { smoothness, .. } if smoothness == 2.0));
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(
            parse_grid("1, 4,inf").unwrap(),
            vec![1.0, 4.0, f64::INFINITY]
        );
        assert!(parse_grid(" , ").is_err());
    }
}
