use chaoswpt::channel::AmplitudeSampler;
use chaoswpt::chaos::{self, chebyshev_next, ChaosConfig, TrajectoryMode};
use chaoswpt::montecarlo::{chunk_rng, RunningStats};
use chaoswpt::Fading;

fn chip_moments(cfg: ChaosConfig, symbols: usize, len: usize) -> [f64; 3] {
    let mut rng = chunk_rng(11, 0);
    let mut buf = vec![0.0; len];
    let mut acc = [RunningStats::default(); 3];
    for _ in 0..symbols {
        chaos::fill_reference(&mut buf, &cfg, &mut rng);
        for &x in &buf {
            let q = x * x;
            acc[0].push(q);
            acc[1].push(q * q);
            acc[2].push(q * q * q);
        }
    }
    acc.map(|s| s.mean())
}

#[test]
fn arcsine_moments_both_modes() {
    for cfg in [ChaosConfig::default(), ChaosConfig::iid()] {
        let [m2, m4, m6] = chip_moments(cfg, 20_000, 50);
        assert!((m2 / 0.5 - 1.0).abs() < 0.01, "{m2}");
        assert!((m4 / 0.375 - 1.0).abs() < 0.01, "{m4}");
        assert!((m6 / 0.3125 - 1.0).abs() < 0.015, "{m6}");
    }
}

#[test]
fn trajectory_follows_the_map() {
    let cfg = ChaosConfig::new(3, TrajectoryMode::PerSymbolTrajectory).unwrap();
    let mut rng = chunk_rng(3, 0);
    let mut buf = vec![0.0; 40];
    chaos::fill_reference(&mut buf, &cfg, &mut rng);
    for w in buf.windows(2) {
        assert!((chebyshev_next(w[0], 3).unwrap() - w[1]).abs() < 1e-12);
    }
}

/// Lag-one products that vanish for i.i.d. arcsine chips.
fn lag_products(degree: u32) -> (f64, f64) {
    let cfg = ChaosConfig::new(degree, TrajectoryMode::PerSymbolTrajectory).unwrap();
    let mut rng = chunk_rng(5, 0);
    let mut buf = vec![0.0; 3];
    let (mut a, mut b) = (RunningStats::default(), RunningStats::default());
    for _ in 0..400_000 {
        chaos::fill_reference(&mut buf, &cfg, &mut rng);
        a.push(buf[0] * buf[1]);
        b.push(buf[0] * buf[0] * buf[1] * buf[2]);
    }
    (a.mean(), b.mean())
}

#[test]
fn default_degree_has_no_low_order_correlation() {
    let (a, b) = lag_products(4);
    assert!(a.abs() < 5e-3 && b.abs() < 5e-3, "{a} {b}");
    // the quadratic map correlates x_k^2 with x_{k+1} x_{k+2}
    let (_, b2) = lag_products(2);
    assert!((b2 - 0.125).abs() < 5e-3, "{b2}");
}

#[test]
fn nakagami_moments() {
    for m in [1.0, 2.0, 4.0, 10.0, 20.0] {
        let s = AmplitudeSampler::new(Fading::Nakagami(m)).unwrap();
        let mut rng = chunk_rng(21, 0);
        let (mut h2, mut h4) = (RunningStats::default(), RunningStats::default());
        for _ in 0..200_000 {
            let g = s.sample(&mut rng).powi(2);
            h2.push(g);
            h4.push(g * g);
        }
        assert!((h2.mean() - 1.0).abs() < 0.02, "m={m}");
        assert!((h4.mean() / ((1.0 + m) / m) - 1.0).abs() < 0.03, "m={m}");
    }
}

#[test]
fn bits_are_balanced() {
    let mut rng = chunk_rng(1, 0);
    let s: RunningStats = (0..100_000)
        .map(|_| chaos::random_bit(&mut rng).sign())
        .collect();
    assert!(s.mean().abs() < 0.015);
}
