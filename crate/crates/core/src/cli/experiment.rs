//! Named experiments and their CSV output.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::analysis::{self, HpaModel};
use crate::channel::{effective_gains, Fading};
use crate::cli::config::{ConfigError, Settings};
use crate::error::Result;
use crate::montecarlo::{
    apply_param, child_seed, estimate_harvest, estimate_papr, normal_quantile, SimConfig,
    SweepParam,
};
use crate::receiver::ReceiverConfig;
use crate::waveform::{Scheme, WaveformSpec};

pub const CSV_HEADER: &str =
    "experiment,sweep_param,sweep_value,scheme,psi,m,beta,beta_r,n_symbols,seed,\
z_analytic,z_mc_mean,z_mc_se,ci_low,ci_high,papr_emp,papr_theory";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentName {
    Fig3BetaSweep,
    Fig4Modulation,
    Fig5DeltaVsBeta,
    Fig6SrdcskBetaR,
    Fig7WptOptDistance,
    Fig8JointBetaM,
    Fig9MultisineHpa,
    Custom,
}

impl ExperimentName {
    pub const ALL: [ExperimentName; 8] = [
        ExperimentName::Fig3BetaSweep,
        ExperimentName::Fig4Modulation,
        ExperimentName::Fig5DeltaVsBeta,
        ExperimentName::Fig6SrdcskBetaR,
        ExperimentName::Fig7WptOptDistance,
        ExperimentName::Fig8JointBetaM,
        ExperimentName::Fig9MultisineHpa,
        ExperimentName::Custom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentName::Fig3BetaSweep => "fig3_beta_sweep",
            ExperimentName::Fig4Modulation => "fig4_modulation",
            ExperimentName::Fig5DeltaVsBeta => "fig5_delta_vs_beta",
            ExperimentName::Fig6SrdcskBetaR => "fig6_srdcsk_betar",
            ExperimentName::Fig7WptOptDistance => "fig7_wpt_opt_distance",
            ExperimentName::Fig8JointBetaM => "fig8_joint_beta_m",
            ExperimentName::Fig9MultisineHpa => "fig9_multisine_hpa",
            ExperimentName::Custom => "custom",
        }
    }
}

impl fmt::Display for ExperimentName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase();
        ExperimentName::ALL
            .into_iter()
            .find(|e| e.name() == t || e.name().split('_').next() == Some(t.as_str()))
            .ok_or_else(|| {
                let names: Vec<_> = ExperimentName::ALL.iter().map(|e| e.name()).collect();
                format!(
                    "unknown experiment `{s}` (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: ExperimentName,
    pub settings: Settings,
    pub output_path: PathBuf,
}

/// One CSV row. Optional cells are written empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub experiment: String,
    pub sweep_param: String,
    pub sweep_value: f64,
    pub scheme: String,
    /// Correlator length, 1 without a correlator.
    pub psi: usize,
    /// Fading shape, or `m1/m2` for gap rows.
    pub m: String,
    pub beta: usize,
    pub beta_r: usize,
    pub n_symbols: u64,
    pub seed: u64,
    pub z_analytic: f64,
    pub z_mc_mean: f64,
    pub z_mc_se: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub papr_emp: Option<f64>,
    pub papr_theory: Option<f64>,
}

fn num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x}")
    }
}

fn sci(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else {
        num(x)
    }
}

impl Row {
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.experiment,
            self.sweep_param,
            num(self.sweep_value),
            self.scheme,
            self.psi,
            self.m,
            self.beta,
            self.beta_r,
            self.n_symbols,
            self.seed,
            sci(self.z_analytic),
            sci(self.z_mc_mean),
            sci(self.z_mc_se),
            sci(self.ci_low),
            sci(self.ci_high),
            opt(self.papr_emp),
            opt(self.papr_theory),
        )
    }

    /// `|mean - analytic| / |analytic|`.
    pub fn rel_dev(&self) -> f64 {
        (self.z_mc_mean - self.z_analytic).abs() / self.z_analytic.abs()
    }

    /// Monte Carlo mean within `max(2% |analytic|, 3 SE)` of the analytic value.
    pub fn agrees(&self) -> bool {
        let tol = (crate::montecarlo::REL_TOLERANCE * self.z_analytic.abs())
            .max(crate::montecarlo::SE_MULTIPLE * self.z_mc_se);
        (self.z_mc_mean - self.z_analytic).abs() <= tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    /// Experiment label written in the first CSV column.
    pub name: String,
    pub rows: Vec<Row>,
}

impl ExperimentReport {
    pub fn max_rel_dev(&self) -> f64 {
        self.rows
            .iter()
            .map(Row::rel_dev)
            .filter(|d| d.is_finite())
            .fold(0.0, f64::max)
    }

    pub fn breaches(&self) -> usize {
        self.rows.iter().filter(|r| !r.agrees()).count()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.to_csv());
            s.push('\n');
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(self.to_csv().as_bytes())
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} rows, max relative deviation {:.4}, {} outside tolerance",
            self.name,
            self.rows.len(),
            self.max_rel_dev(),
            self.breaches()
        )
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("simulation failed: {0}")]
    Sim(#[from] crate::error::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// A simulation point before it is run.
#[derive(Debug, Clone, Copy)]
struct Point {
    param: &'static str,
    value: f64,
    cfg: SimConfig,
}

fn harvest_row(label: &str, p: Point) -> Result<Row> {
    let est = estimate_harvest(&p.cfg)?;
    let papr = estimate_papr(&p.cfg)?;
    let w = p.cfg.waveform;
    Ok(Row {
        experiment: label.to_string(),
        sweep_param: p.param.to_string(),
        sweep_value: p.value,
        scheme: w.scheme().to_string(),
        psi: p.cfg.receiver.psi(&w),
        m: p.cfg.channel.to_string(),
        beta: w.beta(),
        beta_r: w.beta_r(),
        n_symbols: p.cfg.n_symbols,
        seed: p.cfg.seed,
        z_analytic: est.analytic,
        z_mc_mean: est.mean,
        z_mc_se: est.std_error,
        ci_low: est.ci_low,
        ci_high: est.ci_high,
        papr_emp: Some(papr.empirical),
        papr_theory: Some(papr.theoretical),
    })
}

fn fadings(s: &Settings, default: &[f64]) -> Result<Vec<Fading>> {
    if s.is_set("m") {
        Ok(vec![s.sim.channel])
    } else {
        default.iter().map(|&m| Fading::nakagami(m)).collect()
    }
}

fn grid_or(s: &Settings, default: &[f64]) -> Vec<f64> {
    s.grid.clone().unwrap_or_else(|| default.to_vec())
}

fn count(v: f64, key: &'static str) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 && v.is_finite() {
        Ok(v as usize)
    } else {
        Err(crate::error::Error::InvalidParameter {
            name: key,
            reason: format!("must be a positive integer, got {v}"),
        })
    }
}

const FIG3_BETAS: [f64; 10] = [1.0, 2.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 40.0, 50.0];
const FIG_MS: [f64; 4] = [1.0, 4.0, 20.0, f64::INFINITY];

fn points(name: ExperimentName, s: &Settings) -> Result<Vec<Point>> {
    let base = s.sim;
    let mut pts = Vec::new();
    let mut push = |param, value, cfg: SimConfig| pts.push(Point { param, value, cfg });
    match name {
        ExperimentName::Fig3BetaSweep | ExperimentName::Fig4Modulation => {
            let schemes: &[Scheme] = if name == ExperimentName::Fig3BetaSweep {
                &[Scheme::Dcsk]
            } else {
                &[Scheme::Dcsk, Scheme::Unmodulated]
            };
            let ms: &[f64] = if name == ExperimentName::Fig3BetaSweep {
                &FIG_MS
            } else {
                &[1.0, 4.0]
            };
            for fading in fadings(s, ms)? {
                for &scheme in schemes {
                    for rx in [ReceiverConfig::Correlator, ReceiverConfig::NoCorrelator] {
                        for b in grid_or(s, &FIG3_BETAS) {
                            let mut cfg = base;
                            cfg.waveform = WaveformSpec::new(scheme, count(b, "beta")?, 0)?;
                            cfg.receiver = rx;
                            cfg.channel = fading;
                            push("beta", b, cfg);
                        }
                    }
                }
            }
        }
        ExperimentName::Fig6SrdcskBetaR => {
            let beta = if s.is_set("beta") {
                base.waveform.beta()
            } else {
                60
            };
            let divisors: Vec<f64> = (1..=beta)
                .filter(|d| beta % d == 0)
                .map(|d| d as f64)
                .collect();
            for fading in fadings(s, &[1.0, 4.0])? {
                for br in grid_or(s, &divisors) {
                    let mut cfg = base;
                    cfg.waveform = WaveformSpec::srdcsk(beta, count(br, "beta_r")?)?;
                    cfg.receiver = ReceiverConfig::Correlator;
                    cfg.channel = fading;
                    push("beta_r", br, cfg);
                }
            }
        }
        ExperimentName::Fig7WptOptDistance => {
            let rs = if s.is_set("r") {
                vec![base.budget.distance]
            } else {
                vec![20.0, 30.0]
            };
            for r in rs {
                for b in grid_or(s, &[1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 16.0]) {
                    let mut cfg = base;
                    cfg.budget.distance = r;
                    cfg.waveform = WaveformSpec::optimal_sr(count(b, "beta")?)?;
                    cfg.receiver = ReceiverConfig::Correlator;
                    push("r", r, cfg);
                }
            }
        }
        ExperimentName::Fig8JointBetaM => {
            let betas: Vec<f64> = if s.is_set("beta") {
                vec![base.waveform.beta() as f64]
            } else {
                vec![1.0, 2.0, 4.0, 8.0, 16.0]
            };
            for b in betas {
                for m in grid_or(s, &[1.0, 2.0, 4.0, 10.0, 20.0, 50.0, f64::INFINITY]) {
                    let mut cfg = base;
                    cfg.waveform = WaveformSpec::optimal_sr(count(b, "beta")?)?;
                    cfg.receiver = ReceiverConfig::Correlator;
                    cfg.channel = Fading::nakagami(m)?;
                    push("m", m, cfg);
                }
            }
        }
        ExperimentName::Custom => match &s.grid {
            None => push("none", 0.0, base),
            Some(_) => {
                return Err(crate::error::Error::InvalidParameter {
                    name: "grid",
                    reason: "custom runs a single point; use `sweep <param>` for grids".into(),
                })
            }
        },
        ExperimentName::Fig5DeltaVsBeta | ExperimentName::Fig9MultisineHpa => unreachable!(),
    }
    Ok(pts)
}

fn delta_rows(s: &Settings) -> Result<Vec<Row>> {
    let name = ExperimentName::Fig5DeltaVsBeta;
    let m1s: Vec<Fading> = if s.is_set("m1") {
        vec![s.m1]
    } else {
        [40.0, 80.0, 100.0, 150.0]
            .iter()
            .map(|&m| Fading::nakagami(m))
            .collect::<Result<_>>()?
    };
    let betas = grid_or(
        s,
        &[
            1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0, 45.0, 50.0,
        ],
    );
    let z = normal_quantile(s.sim.confidence);
    let mut rows = Vec::new();
    for m1 in m1s {
        for &b in &betas {
            let beta = count(b, "beta")?;
            let seed = child_seed(s.sim.seed, rows.len() as u64);
            let mut modulated = s.sim.with_seed(seed);
            modulated.waveform = WaveformSpec::dcsk(beta)?;
            modulated.receiver = ReceiverConfig::Correlator;
            modulated.channel = m1;
            let mut um = modulated.with_seed(child_seed(seed, 1));
            um.waveform = WaveformSpec::unmodulated(beta)?;
            um.channel = s.m2;
            let (a, u) = (estimate_harvest(&modulated)?, estimate_harvest(&um)?);
            let mean = a.mean - u.mean;
            let se = (a.std_error.powi(2) + u.std_error.powi(2)).sqrt();
            let eps2 = effective_gains(&s.sim.budget.with_tx_power(s.sim.radiated_power())).eps2;
            rows.push(Row {
                experiment: name.to_string(),
                sweep_param: "beta".into(),
                sweep_value: b,
                scheme: "delta".into(),
                psi: 2 * beta,
                m: format!("{m1}/{}", s.m2),
                beta,
                beta_r: 0,
                n_symbols: s.sim.n_symbols,
                seed,
                z_analytic: analysis::delta_gap(eps2, b, m1, s.m2),
                z_mc_mean: mean,
                z_mc_se: se,
                ci_low: mean - z * se,
                ci_high: mean + z * se,
                papr_emp: None,
                papr_theory: None,
            });
        }
    }
    Ok(rows)
}

/// Optimal SR-DCSK against the `N = beta` multisine, both behind the same
/// amplifier, for each tone count and transmit power (dBm).
pub fn multisine_rows(s: &Settings, sizes: &[usize], powers: &[f64]) -> Result<Vec<Row>> {
    let name = ExperimentName::Fig9MultisineHpa;
    let mut base = s.clone();
    if !s.is_set("m") {
        base.sim.channel = Fading::Nakagami(4.0);
    }
    if !s.is_set("hpa") && !s.is_set("hpa_p") && !s.is_set("hpa_sat_dbm") {
        base.sim.hpa = HpaModel::default_rapp();
    }
    let mut rows = Vec::new();
    for &n in sizes {
        for &dbm in powers {
            let mut st = base.clone();
            st.sim.budget.tx_power = crate::channel::dbm_to_watts(dbm);
            st.sim.budget.validate()?;

            let seed = child_seed(s.sim.seed, rows.len() as u64);
            let mut cfg = st.sim.with_seed(seed);
            cfg.waveform = WaveformSpec::optimal_sr(n)?;
            cfg.receiver = ReceiverConfig::Correlator;
            rows.push(harvest_row(
                name.name(),
                Point {
                    param: "P_t_dbm",
                    value: dbm,
                    cfg,
                },
            )?);

            let seed = child_seed(s.sim.seed, rows.len() as u64);
            let mut ms = st.multisine(n)?;
            ms.seed = seed;
            let out = analysis::multisine_baseline(&ms)?;
            let e = out.estimate;
            rows.push(Row {
                experiment: name.to_string(),
                sweep_param: "P_t_dbm".into(),
                sweep_value: dbm,
                scheme: "multisine".into(),
                psi: 1,
                m: st.sim.channel.to_string(),
                beta: n,
                beta_r: 0,
                n_symbols: e.n,
                seed,
                z_analytic: e.analytic,
                z_mc_mean: e.mean,
                z_mc_se: e.std_error,
                ci_low: e.ci_low,
                ci_high: e.ci_high,
                papr_emp: Some(out.moments.papr),
                papr_theory: Some(2.0 * n as f64),
            });
        }
    }
    Ok(rows)
}

/// Runs the experiment's grid without writing anything.
pub fn run_rows(name: ExperimentName, settings: &Settings) -> Result<ExperimentReport> {
    let rows = match name {
        ExperimentName::Fig5DeltaVsBeta => delta_rows(settings)?,
        ExperimentName::Fig9MultisineHpa => {
            let sizes = if settings.is_set("tones") {
                vec![settings.tones]
            } else if settings.is_set("beta") {
                vec![settings.sim.waveform.beta()]
            } else {
                vec![4, 16]
            };
            let powers = grid_or(settings, &[10.0, 14.0, 18.0, 22.0, 25.0, 28.0, 31.0, 34.0]);
            multisine_rows(settings, &sizes, &powers)?
        }
        _ => points(name, settings)?
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                let cfg = p.cfg.with_seed(child_seed(settings.sim.seed, i as u64));
                harvest_row(name.name(), Point { cfg, ..p })
            })
            .collect::<Result<_>>()?,
    };
    Ok(ExperimentReport {
        name: name.to_string(),
        rows,
    })
}

/// Rows of `sweep <param>` over `grid`, plus the points that failed.
pub fn sweep_rows(
    param: SweepParam,
    grid: &[f64],
    settings: &Settings,
) -> Result<(ExperimentReport, Vec<(f64, crate::error::Error)>)> {
    let label = "sweep";
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (i, &value) in grid.iter().enumerate() {
        let seed = child_seed(settings.sim.seed, i as u64);
        let row = match param {
            SweepParam::Tones => count(value, "tones").and_then(|n| {
                let mut st = settings.clone();
                st.sim.seed = seed;
                let mut ms = st.multisine(n)?;
                ms.seed = seed;
                let out = analysis::multisine_baseline(&ms)?;
                let e = out.estimate;
                Ok(Row {
                    experiment: label.into(),
                    sweep_param: param.name().into(),
                    sweep_value: value,
                    scheme: "multisine".into(),
                    psi: 1,
                    m: st.sim.channel.to_string(),
                    beta: n,
                    beta_r: 0,
                    n_symbols: e.n,
                    seed,
                    z_analytic: e.analytic,
                    z_mc_mean: e.mean,
                    z_mc_se: e.std_error,
                    ci_low: e.ci_low,
                    ci_high: e.ci_high,
                    papr_emp: Some(out.moments.papr),
                    papr_theory: Some(2.0 * n as f64),
                })
            }),
            _ => apply_param(&settings.sim, param, value).and_then(|cfg| {
                harvest_row(
                    label,
                    Point {
                        param: param.name(),
                        value,
                        cfg: cfg.with_seed(seed),
                    },
                )
            }),
        };
        match row {
            Ok(r) => rows.push(r),
            Err(e) => failures.push((value, e)),
        }
    }
    Ok((
        ExperimentReport {
            name: label.into(),
            rows,
        },
        failures,
    ))
}

/// Runs the experiment and writes its CSV to `spec.output_path`.
pub fn run_experiment(spec: &ExperimentSpec) -> std::result::Result<ExperimentReport, RunError> {
    let report = run_rows(spec.name, &spec.settings)?;
    report
        .write_csv(&spec.output_path)
        .map_err(|source| RunError::Io {
            path: spec.output_path.display().to_string(),
            source,
        })?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::config::Overrides;

    fn settings(pairs: &[(&str, &str)]) -> Settings {
        let mut ov = Overrides::new();
        for (k, v) in pairs {
            ov.set(k, *v).unwrap();
        }
        Settings::resolve(&ov).unwrap()
    }

    #[test]
    fn names_round_trip() {
        for e in ExperimentName::ALL {
            assert_eq!(e.name().parse::<ExperimentName>().unwrap(), e);
        }
        assert_eq!(
            "fig6".parse::<ExperimentName>().unwrap(),
            ExperimentName::Fig6SrdcskBetaR
        );
        assert!("fig10".parse::<ExperimentName>().is_err());
    }

    #[test]
    fn custom_single_row() {
        let s = settings(&[("n_symbols", "500"), ("m", "inf"), ("beta", "5")]);
        let rep = run_rows(ExperimentName::Custom, &s).unwrap();
        assert_eq!(rep.rows.len(), 1);
        let line = rep.rows[0].to_csv();
        assert_eq!(line.split(',').count(), CSV_HEADER.split(',').count());
        assert!(
            line.starts_with("custom,none,0,dcsk,10,inf,5,0,500,"),
            "{line}"
        );
    }

    #[test]
    fn fig5_rows_are_gaps() {
        let s = settings(&[("n_symbols", "200"), ("m1", "10"), ("grid", "1,3,5")]);
        let rep = run_rows(ExperimentName::Fig5DeltaVsBeta, &s).unwrap();
        assert_eq!(rep.rows.len(), 3);
        assert_eq!(rep.rows[1].z_analytic, 0.0);
        assert!(rep.rows[0].z_analytic < 0.0 && rep.rows[2].z_analytic > 0.0);
        assert_eq!(rep.rows[0].m, "10/1");
    }

    #[test]
    fn fig9_pairs_rows() {
        let s = settings(&[("n_symbols", "100"), ("tones", "4"), ("grid", "30")]);
        let rep = run_rows(ExperimentName::Fig9MultisineHpa, &s).unwrap();
        let schemes: Vec<_> = rep.rows.iter().map(|r| r.scheme.as_str()).collect();
        assert_eq!(schemes, ["optimal_sr", "multisine"]);
        assert_eq!(rep.rows[1].papr_theory, Some(8.0));
    }
}
