//! Chebyshev chip sequences and their invariant-law moments.

use chaoswpt::chaos::{self, trajectory_from, ChaosConfig, TrajectoryMode};
use chaoswpt::montecarlo::{chunk_rng, RunningStats};

fn main() -> chaoswpt::Result<()> {
    let traj = trajectory_from(0.3, 8, 4)?;
    println!("T4 trajectory from 0.3: {:.4?}", traj.as_slice());

    for (label, cfg) in [
        ("trajectory, degree 4", ChaosConfig::default()),
        (
            "trajectory, degree 2",
            ChaosConfig::new(2, TrajectoryMode::PerSymbolTrajectory)?,
        ),
        ("i.i.d. arcsine", ChaosConfig::iid()),
    ] {
        let mut rng = chunk_rng(1, 0);
        let mut buf = vec![0.0; 25];
        let (mut m2, mut m4, mut sum4) = (
            RunningStats::default(),
            RunningStats::default(),
            RunningStats::default(),
        );
        for _ in 0..200_000 {
            chaos::fill_reference(&mut buf, &cfg, &mut rng);
            for &x in &buf {
                m2.push(x * x);
                m4.push(x.powi(4));
            }
            sum4.push(buf.iter().sum::<f64>().powi(4));
        }
        // i.i.d. chips give E{(sum x)^4} = 0.75 L^2 - 0.375 L = 459.375 for L = 25
        println!(
            "{label:<22} E x^2 {:.4}  E x^4 {:.4}  E (sum x)^4 {:.1}",
            m2.mean(),
            m4.mean(),
            sum4.mean()
        );
    }
    Ok(())
}
