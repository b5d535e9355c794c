//! Choosing the SR-DCSK reference length: simulation against the closed form.

use chaoswpt::montecarlo::{sweep, SweepParam};
use chaoswpt::{Fading, ReceiverConfig, SimConfig, WaveformSpec};

fn main() -> chaoswpt::Result<()> {
    let mut base = SimConfig::new(WaveformSpec::srdcsk(60, 1)?, ReceiverConfig::Correlator)
        .with_symbols(100_000);
    base.channel = Fading::Nakagami(4.0);
    let grid = [
        1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 10.0, 12.0, 15.0, 20.0, 30.0, 60.0,
    ];
    for row in sweep(SweepParam::BetaR, &grid, &base)? {
        match row.result {
            Ok(p) => println!(
                "beta_r = {:>2}: mc {:.4e} +- {:.1e}  closed form {:.4e}",
                row.value, p.estimate.mean, p.estimate.std_error, p.estimate.analytic
            ),
            Err(e) => println!("beta_r = {:>2}: {e}", row.value),
        }
    }
    Ok(())
}
