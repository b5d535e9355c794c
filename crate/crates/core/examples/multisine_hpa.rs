//! In-phase multisine against the optimal chaotic symbol behind a saturating
//! amplifier.

use chaoswpt::analysis::{multisine_baseline, multisine_moments, MultisineConfig};
use chaoswpt::channel::dbm_to_watts;
use chaoswpt::{estimate_harvest, Fading, HpaModel, ReceiverConfig, SimConfig, WaveformSpec};

fn main() -> chaoswpt::Result<()> {
    for n in [1, 2, 4, 8, 16] {
        let m = multisine_moments(n, 1.0, 8 * n, 1)?;
        println!(
            "N = {n:>2}: mean s^2 {:.3}  mean s^4 {:.4}  peak/average {:.2}",
            m.m2, m.m4, m.papr
        );
    }

    let hpa = HpaModel::default_rapp();
    let n = 16;
    println!("\n P_t dBm   radiated dBm   optimal SR (A)   multisine (A)");
    for dbm in [10.0, 20.0, 25.0, 28.0, 31.0, 34.0] {
        let mut sim = SimConfig::new(WaveformSpec::optimal_sr(n)?, ReceiverConfig::Correlator)
            .with_symbols(50_000);
        sim.channel = Fading::Nakagami(4.0);
        sim.hpa = hpa;
        sim.budget.tx_power = dbm_to_watts(dbm);
        let chaotic = estimate_harvest(&sim)?;

        let mut ms = MultisineConfig::new(n);
        ms.hpa = hpa;
        ms.tx_power = sim.budget.tx_power;
        ms.draws = 50_000;
        let multi = multisine_baseline(&ms)?;
        println!(
            "{dbm:>8} {:>14.2} {:>16.4e} {:>15.4e}",
            chaoswpt::channel::watts_to_dbm(multi.radiated_power),
            chaotic.mean,
            multi.estimate.mean
        );
    }
    Ok(())
}
