//! Building DCSK, unmodulated, SR-DCSK and optimal SR frames.

use chaoswpt::chaos::{generate_reference, Bit, ChaosConfig, ChipSequence};
use chaoswpt::montecarlo::chunk_rng;
use chaoswpt::waveform::{frame_dcsk, frame_optimal_sr, frame_srdcsk, frame_unmodulated};

fn main() -> chaoswpt::Result<()> {
    let x = ChipSequence::new(vec![0.5, -0.2, 0.9])?;
    println!(
        "dcsk, bit -1:   {:?}",
        frame_dcsk(&x, Bit::Minus)?.samples()
    );
    println!(
        "srdcsk beta=6:  {:?}",
        frame_srdcsk(&x, Bit::Plus, 6)?.samples()
    );
    println!(
        "optimal sr:     {:?}",
        frame_optimal_sr(0.7, Bit::Minus, 4)?.samples()
    );

    let mut rng = chunk_rng(2, 0);
    let chips = generate_reference(8, &ChaosConfig::default(), &mut rng)?;
    let um = frame_unmodulated(&chips, 4)?;
    println!(
        "unmodulated:    {:.3?} (energy {:.3})",
        um.samples(),
        um.energy()
    );

    if let Err(e) = frame_srdcsk(&x, Bit::Plus, 7) {
        println!("rejected:       {e}");
    }
    Ok(())
}
