//! Monte Carlo harvested DC against the closed form for DCSK with a correlator.

use chaoswpt::{estimate_harvest, Fading, ReceiverConfig, SimConfig, WaveformSpec};

fn main() -> chaoswpt::Result<()> {
    let n: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(200_000);
    for beta in [5, 10, 25, 50] {
        for fading in [
            Fading::Nakagami(1.0),
            Fading::Nakagami(4.0),
            Fading::Nakagami(20.0),
            Fading::NoFading,
        ] {
            let mut cfg = SimConfig::new(WaveformSpec::dcsk(beta)?, ReceiverConfig::Correlator)
                .with_symbols(n);
            cfg.channel = fading;
            let t = std::time::Instant::now();
            let est = estimate_harvest(&cfg)?;
            println!(
                "beta={beta:>2} m={fading:<4} mc={:.5e} se={:.2e} analytic={:.5e} rel={:.4} ok={} ({:.2?})",
                est.mean, est.std_error, est.analytic, est.rel_dev, est.agrees(), t.elapsed()
            );
        }
    }
    Ok(())
}
