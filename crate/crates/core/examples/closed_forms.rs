//! Harvested DC from the closed forms across schemes, receivers and fading.

use chaoswpt::analysis::{beta_opt, z_mc, z_mnc, z_sr, z_sr_opt, z_um_c};
use chaoswpt::{effective_gains, Fading, LinkBudget};

fn main() -> chaoswpt::Result<()> {
    let g = effective_gains(&LinkBudget::default());
    println!(
        "{:>4} {:>6} {:>11} {:>11} {:>11} {:>11}",
        "beta", "m", "z_MC", "z_MNC", "z_UM,C", "z_SR,opt"
    );
    for beta in [1, 5, 25, 50] {
        for fading in [Fading::Nakagami(1.0), Fading::NoFading] {
            println!(
                "{beta:>4} {fading:>6} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e}",
                z_mc(g, beta, fading)?,
                z_mnc(g, beta, fading)?,
                z_um_c(g, beta, fading)?,
                z_sr_opt(g, beta, fading)?
            );
        }
    }

    let beta = 60;
    print!("SR-DCSK, beta = 60, m = 1:");
    for br in [1, 5, 15, 60] {
        print!(
            "  beta_r={br}: {:.3e}",
            z_sr(g, beta, br, Fading::Nakagami(1.0))?
        );
    }
    println!();

    for (m1, m2) in [(10.0, 1.0), (40.0, 1.0), (150.0, 1.0)] {
        let t = beta_opt(Fading::nakagami(m1)?, Fading::nakagami(m2)?)?;
        println!("modulation pays off beyond beta = {t:.3} for m1 = {m1}, m2 = {m2}");
    }
    Ok(())
}
