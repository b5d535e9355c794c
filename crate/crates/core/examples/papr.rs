//! PAPR at the harvester input with and without the correlator.

use chaoswpt::{estimate_papr, ReceiverConfig, SimConfig, WaveformSpec};

fn main() -> chaoswpt::Result<()> {
    for w in [
        WaveformSpec::dcsk(5)?,
        WaveformSpec::dcsk(50)?,
        WaveformSpec::srdcsk(20, 4)?,
        WaveformSpec::optimal_sr(8)?,
    ] {
        for rx in [ReceiverConfig::NoCorrelator, ReceiverConfig::Correlator] {
            let cfg = SimConfig::new(w, rx).with_symbols(100_000);
            let p = estimate_papr(&cfg)?;
            println!(
                "{:<10} beta={:<3} psi={:<3} empirical {:>8.3}  bound {:>8.3}  peak/sample-mean {:>8.3}",
                w.scheme(),
                w.beta(),
                rx.psi(&w),
                p.empirical,
                p.theoretical,
                p.sample_ratio()
            );
        }
    }
    Ok(())
}
