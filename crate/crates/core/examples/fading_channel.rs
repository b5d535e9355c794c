//! Nakagami-m amplitudes, the Rician mapping and the link budget.

use chaoswpt::channel::{effective_gains, rice_to_nakagami, LinkBudget};
use chaoswpt::montecarlo::{chunk_rng, RunningStats};
use chaoswpt::Fading;

fn main() -> chaoswpt::Result<()> {
    for fading in [
        Fading::Nakagami(1.0),
        Fading::Nakagami(4.0),
        Fading::rician(10.0)?,
        Fading::NoFading,
    ] {
        let sampler = fading.sampler()?;
        let mut rng = chunk_rng(3, 0);
        let (mut h2, mut h4) = (RunningStats::default(), RunningStats::default());
        for _ in 0..500_000 {
            let g = sampler.sample(&mut rng).powi(2);
            h2.push(g);
            h4.push(g * g);
        }
        println!(
            "m = {fading:<8} E|h|^2 {:.4}  E|h|^4 {:.4} (exact {:.4})",
            h2.mean(),
            h4.mean(),
            fading.fourth_moment()
        );
    }
    println!("Rice K = 3 -> m = {:.4}", rice_to_nakagami(3.0)?);

    for r in [10.0, 20.0, 30.0] {
        let g = effective_gains(&LinkBudget {
            distance: r,
            ..LinkBudget::default()
        });
        println!("r = {r:>4} m: eps1 {:.4e}  eps2 {:.4e}", g.eps1, g.eps2);
    }
    Ok(())
}
