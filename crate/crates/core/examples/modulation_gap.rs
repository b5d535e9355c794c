//! Where modulated DCSK overtakes unmodulated chaos when the two links see
//! different fading.

use chaoswpt::analysis::{beta_opt, delta_gap};
use chaoswpt::{effective_gains, Fading, LinkBudget};

fn main() -> chaoswpt::Result<()> {
    let eps2 = effective_gains(&LinkBudget::default()).eps2;
    let m2 = Fading::Nakagami(1.0);
    for m1 in [10.0, 40.0, 80.0, 150.0] {
        let m1 = Fading::nakagami(m1)?;
        let t = beta_opt(m1, m2)?;
        let signs: String = (1..=40)
            .map(|b| {
                if delta_gap(eps2, b as f64, m1, m2) > 0.0 {
                    '+'
                } else if delta_gap(eps2, b as f64, m1, m2) < 0.0 {
                    '-'
                } else {
                    '0'
                }
            })
            .collect();
        println!("m1 = {m1:>4}: threshold {t:>6.2}  sign over beta = 1..40: {signs}");
    }
    Ok(())
}
