//! Command-line driver: `run`, `sweep`, `papr`, `compare-multisine` and
//! `selftest`.
//!
//! Exit status: 0 when every point is within tolerance, 1 on a tolerance
//! breach under `--strict` (or a failing self-test), 2 on configuration or
//! I/O errors.

pub mod config;
pub mod experiment;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use config::{parse_config, ConfigError, Overrides, Settings};
pub use experiment::{
    run_experiment, ExperimentName, ExperimentReport, ExperimentSpec, Row, CSV_HEADER,
};

use crate::analysis;
use crate::channel::{watts_to_dbm, Fading};
use crate::chaos;
use crate::montecarlo::{estimate_harvest, estimate_papr, RunningStats, SweepParam};
use crate::receiver::ReceiverConfig;
use crate::waveform::WaveformSpec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_TOLERANCE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "chaoswpt",
    version,
    about = "Chaotic-waveform wireless power transfer simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a named experiment and write its CSV.
    Run {
        /// fig3_beta_sweep, fig4_modulation, fig5_delta_vs_beta,
        /// fig6_srdcsk_betar, fig7_wpt_opt_distance, fig8_joint_beta_m,
        /// fig9_multisine_hpa or custom.
        experiment: String,
        #[command(flatten)]
        common: Common,
    },
    /// Sweep one parameter over `--grid`.
    Sweep {
        /// beta, m, beta_r, P_t (dBm) or N_tones.
        param: String,
        #[command(flatten)]
        common: Common,
    },
    /// Empirical and analytic PAPR at the harvester input.
    Papr {
        #[command(flatten)]
        common: Common,
    },
    /// Optimal SR-DCSK against an in-phase multisine behind the same amplifier.
    CompareMultisine {
        #[command(flatten)]
        common: Common,
    },
    /// Quick closed-form and moment checks.
    Selftest {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub n_symbols: Option<String>,
    #[arg(long)]
    pub confidence: Option<String>,
    /// Exit with status 1 when any point misses its tolerance.
    #[arg(long)]
    pub strict: bool,
    /// Output CSV path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub physical: Physical,
    /// Any configuration key, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Physical {
    #[arg(long)]
    pub scheme: Option<String>,
    /// Correlator: 1 or full.
    #[arg(long, alias = "psi")]
    pub receiver: Option<String>,
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long)]
    pub beta_r: Option<String>,
    /// Nakagami shape, `inf` for no fading.
    #[arg(long)]
    pub m: Option<String>,
    #[arg(long)]
    pub m1: Option<String>,
    #[arg(long)]
    pub m2: Option<String>,
    /// Transmit power in dBm.
    #[arg(long = "p-t-dbm", alias = "pt")]
    pub p_t_dbm: Option<String>,
    /// Distance in meters.
    #[arg(long)]
    pub r: Option<String>,
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub k2: Option<String>,
    #[arg(long)]
    pub k4: Option<String>,
    #[arg(long)]
    pub r_ant: Option<String>,
    /// ideal or rapp.
    #[arg(long)]
    pub hpa: Option<String>,
    #[arg(long)]
    pub hpa_p: Option<String>,
    #[arg(long)]
    pub hpa_sat_dbm: Option<String>,
    #[arg(long)]
    pub degree: Option<String>,
    /// trajectory or iid.
    #[arg(long)]
    pub chaos_mode: Option<String>,
    #[arg(long)]
    pub tones: Option<String>,
    #[arg(long)]
    pub samples_per_period: Option<String>,
    #[arg(long)]
    pub periods: Option<String>,
    /// Comma-separated sweep values.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
}

impl Common {
    /// Flag values as overrides, in a fixed order.
    pub fn overrides(&self) -> Result<Overrides, ConfigError> {
        let p = &self.physical;
        let mut ov = Overrides::new();
        let pairs: [(&str, &Option<String>); 25] = [
            ("scheme", &p.scheme),
            ("receiver", &p.receiver),
            ("beta", &p.beta),
            ("beta_r", &p.beta_r),
            ("m", &p.m),
            ("m1", &p.m1),
            ("m2", &p.m2),
            ("p_t_dbm", &p.p_t_dbm),
            ("r", &p.r),
            ("alpha", &p.alpha),
            ("k2", &p.k2),
            ("k4", &p.k4),
            ("r_ant", &p.r_ant),
            ("hpa", &p.hpa),
            ("hpa_p", &p.hpa_p),
            ("hpa_sat_dbm", &p.hpa_sat_dbm),
            ("degree", &p.degree),
            ("chaos_mode", &p.chaos_mode),
            ("tones", &p.tones),
            ("samples_per_period", &p.samples_per_period),
            ("periods", &p.periods),
            ("grid", &p.grid),
            ("seed", &self.seed),
            ("n_symbols", &self.n_symbols),
            ("confidence", &self.confidence),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                ov.set(k, v.as_str())?;
            }
        }
        for kv in &self.set {
            let (k, v) = kv.split_once('=').ok_or_else(|| ConfigError::Invalid {
                key: kv.clone(),
                message: "expected KEY=VALUE".into(),
            })?;
            ov.set(k, v)?;
        }
        Ok(ov)
    }

    pub fn settings(&self) -> Result<Settings, ConfigError> {
        parse_config(self.config.as_deref(), self.overrides()?)
    }
}

/// Parses `args` (program name first) and runs the command, writing the
/// human-readable report to `out`. Returns the exit status.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = write!(out, "{e}");
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(out, "error: {msg}");
            EXIT_CONFIG
        }
    }
}

fn write_report(report: &ExperimentReport, path: &Path) -> Result<(), String> {
    report
        .write_csv(path)
        .map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn tolerance_status(report: &ExperimentReport, strict: bool, out: &mut dyn Write) -> i32 {
    let _ = writeln!(out, "{}", report.summary());
    if report.breaches() == 0 {
        EXIT_OK
    } else if strict {
        EXIT_TOLERANCE
    } else {
        let _ = writeln!(out, "warning: tolerance breached (pass --strict to fail)");
        EXIT_OK
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32, String> {
    match cmd {
        Command::Run { experiment, common } => {
            let name: ExperimentName = experiment.parse()?;
            let settings = common.settings().map_err(|e| e.to_string())?;
            let spec = ExperimentSpec {
                name,
                output_path: common
                    .out
                    .clone()
                    .unwrap_or_else(|| PathBuf::from(format!("{name}.csv"))),
                settings,
            };
            let report = run_experiment(&spec).map_err(|e| e.to_string())?;
            let _ = writeln!(out, "wrote {}", spec.output_path.display());
            Ok(tolerance_status(&report, common.strict, out))
        }
        Command::Sweep { param, common } => {
            let param: SweepParam = param.parse()?;
            let settings = common.settings().map_err(|e| e.to_string())?;
            let grid = settings
                .grid
                .clone()
                .ok_or_else(|| "key `grid`: sweep needs --grid v1,v2,...".to_string())?;
            let (report, failures) =
                experiment::sweep_rows(param, &grid, &settings).map_err(|e| e.to_string())?;
            let path = common
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from(format!("sweep_{param}.csv")));
            write_report(&report, &path)?;
            let _ = writeln!(out, "wrote {}", path.display());
            for (v, e) in &failures {
                let _ = writeln!(out, "error: {param} = {v}: {e}");
            }
            let code = tolerance_status(&report, common.strict, out);
            Ok(if failures.is_empty() {
                code
            } else {
                EXIT_CONFIG
            })
        }
        Command::Papr { common } => {
            let s = common.settings().map_err(|e| e.to_string())?;
            let p = estimate_papr(&s.sim).map_err(|e| e.to_string())?;
            let w = s.sim.waveform;
            let _ = writeln!(
                out,
                "{} beta={} beta_r={} psi={}: empirical {:.4}, theoretical {:.4}, peak/sample-mean {:.4} over {} observations",
                w.scheme(),
                w.beta(),
                w.beta_r(),
                s.sim.receiver.psi(&w),
                p.empirical,
                p.theoretical,
                p.sample_ratio(),
                p.count
            );
            Ok(if p.empirical <= p.theoretical {
                EXIT_OK
            } else {
                EXIT_TOLERANCE
            })
        }
        Command::CompareMultisine { common } => {
            let mut s = common.settings().map_err(|e| e.to_string())?;
            if !s.is_set("m") {
                s.sim.channel = Fading::Nakagami(4.0);
            }
            let n = if s.is_set("tones") {
                s.tones
            } else if s.is_set("beta") {
                s.sim.waveform.beta()
            } else {
                16
            };
            let powers = s
                .grid
                .clone()
                .unwrap_or_else(|| vec![watts_to_dbm(s.sim.budget.tx_power)]);
            let rows = experiment::multisine_rows(&s, &[n], &powers).map_err(|e| e.to_string())?;
            for pair in rows.chunks(2) {
                let (sr, ms) = (&pair[0], &pair[1]);
                let _ = writeln!(
                    out,
                    "P_t = {} dBm, beta = N = {n}, m = {}: optimal SR-DCSK {:.4e} A (analytic {:.4e}), multisine {:.4e} A (analytic {:.4e}), ratio {:.2}",
                    sr.sweep_value,
                    sr.m,
                    sr.z_mc_mean,
                    sr.z_analytic,
                    ms.z_mc_mean,
                    ms.z_analytic,
                    sr.z_analytic / ms.z_analytic
                );
            }
            let report = ExperimentReport {
                name: "compare_multisine".into(),
                rows,
            };
            if let Some(path) = &common.out {
                write_report(&report, path)?;
            }
            Ok(tolerance_status(&report, common.strict, out))
        }
        Command::Selftest { common } => {
            let s = common.settings().map_err(|e| e.to_string())?;
            let n = if s.is_set("n_symbols") {
                s.sim.n_symbols
            } else {
                100_000
            };
            let results = selftest(&s, n);
            let mut failed = 0;
            for (name, ok, detail) in &results {
                let _ = writeln!(
                    out,
                    "{} {name}: {detail}",
                    if *ok { "PASS" } else { "FAIL" }
                );
                failed += usize::from(!ok);
            }
            let _ = writeln!(
                out,
                "{} of {} checks passed",
                results.len() - failed,
                results.len()
            );
            Ok(if failed == 0 { EXIT_OK } else { EXIT_TOLERANCE })
        }
    }
}

/// Fast consistency checks: `(name, passed, detail)` per check.
pub fn selftest(settings: &Settings, n_symbols: u64) -> Vec<(String, bool, String)> {
    let mut out = Vec::new();
    let base = settings.sim.with_symbols(n_symbols);
    let cases = [
        (
            "dcsk correlator",
            WaveformSpec::dcsk(10),
            ReceiverConfig::Correlator,
        ),
        (
            "dcsk per chip",
            WaveformSpec::dcsk(10),
            ReceiverConfig::NoCorrelator,
        ),
        (
            "unmodulated correlator",
            WaveformSpec::unmodulated(10),
            ReceiverConfig::Correlator,
        ),
        (
            "unmodulated per chip",
            WaveformSpec::unmodulated(10),
            ReceiverConfig::NoCorrelator,
        ),
        (
            "srdcsk correlator",
            WaveformSpec::srdcsk(12, 3),
            ReceiverConfig::Correlator,
        ),
    ];
    for (name, w, rx) in cases {
        let mut cfg = base;
        cfg.waveform = w.expect("valid selftest waveform");
        cfg.receiver = rx;
        match estimate_harvest(&cfg) {
            Ok(e) => out.push((
                name.to_string(),
                e.agrees(),
                format!(
                    "mc {:.4e} vs analytic {:.4e} (rel {:.4})",
                    e.mean, e.analytic, e.rel_dev
                ),
            )),
            Err(e) => out.push((name.to_string(), false, e.to_string())),
        }
    }

    let mut cfg = base;
    cfg.waveform = WaveformSpec::dcsk(10).expect("valid");
    for rx in [ReceiverConfig::NoCorrelator, ReceiverConfig::Correlator] {
        cfg.receiver = rx;
        let name = format!("papr psi={}", rx.psi(&cfg.waveform));
        match estimate_papr(&cfg) {
            Ok(p) => out.push((
                name,
                p.empirical <= p.theoretical,
                format!(
                    "empirical {:.4} <= theoretical {:.4}",
                    p.empirical, p.theoretical
                ),
            )),
            Err(e) => out.push((name, false, e.to_string())),
        }
    }

    let d = analysis::delta_gap(1.0, 3.0, Fading::Nakagami(10.0), Fading::Nakagami(1.0));
    out.push((
        "gap root".into(),
        d == 0.0,
        format!("delta(beta = 3; m1 = 10, m2 = 1) = {d}"),
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(settings.sim.seed);
    let mut x2 = RunningStats::default();
    let mut x4 = RunningStats::default();
    for _ in 0..1_000_000 {
        let x = chaos::sample_invariant(&mut rng);
        x2.push(x * x);
        x4.push(x.powi(4));
    }
    let ok = (x2.mean() / 0.5 - 1.0).abs() < 0.005 && (x4.mean() / 0.375 - 1.0).abs() < 0.005;
    out.push((
        "chaos moments".into(),
        ok,
        format!("E x^2 = {:.5}, E x^4 = {:.5}", x2.mean(), x4.mean()),
    ));

    match analysis::multisine_moments(8, 1.0, 64, 1) {
        Ok(m) => out.push((
            "multisine papr".into(),
            (m.papr - 16.0).abs() < 1e-9,
            format!("peak/average {:.6} for 8 tones", m.papr),
        )),
        Err(e) => out.push(("multisine papr".into(), false, e.to_string())),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String) {
        let mut buf = Vec::new();
        let code = run_cli(
            std::iter::once("chaoswpt").chain(args.iter().copied()),
            &mut buf,
        );
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn config_errors_exit_2() {
        let (code, msg) = run(&["papr", "--beta", "20", "--beta-r", "7"]);
        assert_eq!(code, EXIT_CONFIG);
        assert!(msg.contains("beta_r"), "{msg}");
        let (code, msg) = run(&["run", "fig42"]);
        assert_eq!(code, EXIT_CONFIG);
        assert!(msg.contains("unknown experiment"), "{msg}");
        let (code, _) = run(&["papr", "--set", "bogus=1"]);
        assert_eq!(code, EXIT_CONFIG);
    }

    #[test]
    fn papr_command() {
        let (code, msg) = run(&[
            "papr",
            "--beta",
            "4",
            "--n-symbols",
            "2000",
            "--receiver",
            "1",
        ]);
        assert_eq!(code, EXIT_OK, "{msg}");
        assert!(msg.contains("theoretical 2.0000"), "{msg}");
    }
}
