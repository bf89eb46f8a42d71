use ctrw_core::analytic::{predict_moments, SumOptions};
use ctrw_core::dist::{IncrementModel, RepetitionLaw, WaitingTimeModel};
use ctrw_core::sim::{ensemble_moments, SimConfig, StartMode};

#[test]
fn inverted_moments_track_monte_carlo() {
    let waiting = WaitingTimeModel::exponential(1.0).unwrap();
    let increment = IncrementModel::gaussian(1.0, 1.0).unwrap();
    let repetition = RepetitionLaw::zeta(3.5).unwrap();
    let times = [10.0_f64, 20.0, 50.0, 100.0];
    let predicted = predict_moments(&times, &waiting, &increment, &repetition, &SumOptions::default()).unwrap();
    let cfg = SimConfig {
        repetition,
        waiting,
        increment,
        n_events: 100_000,
        n_trajectories: 20_000,
        seed: 11,
        start: StartMode::BlockBoundary,
    };
    let mc = ensemble_moments(&cfg, &times).unwrap();
    for (p, m) in predicted.iter().zip(&mc) {
        let z1 = (p.m1 - m.m1) / m.m1_se;
        let z2 = (p.m2 - m.m2) / m.m2_se;
        println!("t={} m1 {} vs {} (z {z1:.2}), m2 {} vs {} (z {z2:.2})", p.t, p.m1, m.m1, p.m2, m.m2);
        assert!(p.reliable);
        assert!(z1.abs() < 4.0 && z2.abs() < 4.0);
    }
}
