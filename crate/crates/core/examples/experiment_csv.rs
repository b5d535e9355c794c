//! Running a named experiment programmatically and reading back its CSV.

use chaoswpt::cli::config::{Overrides, Settings};
use chaoswpt::cli::experiment::{run_experiment, ExperimentName, ExperimentSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut ov =
        Overrides::parse("n_symbols = 20000\nseed = 7\n# only the Rayleigh curve\nm = 1\n")?;
    ov.set("grid", "1,2,4,8,16,32")?;
    let spec = ExperimentSpec {
        name: ExperimentName::Fig3BetaSweep,
        settings: Settings::resolve(&ov)?,
        output_path: std::env::temp_dir().join("fig3_beta_sweep.csv"),
    };
    let report = run_experiment(&spec)?;
    println!("{}", report.summary());
    print!("{}", std::fs::read_to_string(&spec.output_path)?);
    Ok(())
}
