use proptest::prelude::*;

use ctrw_core::analytic::{time_propagator, TimePropagatorQuery};
use ctrw_core::data::{build_seasonal_profile, make_surrogate, read_ticks, stationarize, write_ticks, SessionRules, SurrogateKind};
use ctrw_core::dist::{laplace_psi, RepetitionLaw, WaitingTimeModel};
use ctrw_core::estim::{step_acf, StepAcfOptions};
use ctrw_core::series::{EventSeries, SessionData};

const DAY: f64 = 86_400.0;

/// Sessions on consecutive weekdays from Monday 1970-01-05, opening 09:00.
fn sessions(parts: Vec<Vec<(f64, f64)>>) -> EventSeries<f64> {
    let data = parts
        .into_iter()
        .enumerate()
        .map(|(k, events)| {
            let day = 4 + k + 2 * (k / 5);
            let open = day as f64 * DAY + 9.0 * 3600.0;
            SessionData {
                origin: open,
                open,
                weekday: (k % 5) as u8,
                waits: events.iter().map(|e| e.0).collect(),
                increments: events.iter().map(|e| e.1).collect(),
            }
        })
        .collect();
    EventSeries::from_waits(data).unwrap()
}

fn series_strategy() -> impl Strategy<Value = EventSeries<f64>> {
    let event = (0.01f64..30.0, -0.01f64..0.01);
    prop::collection::vec(prop::collection::vec(event, 2..60), 1..8).prop_map(sessions)
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn zeta_mass_and_survival_agree(rho in 2.05f64..6.0, k in 1u64..400) {
        let law = RepetitionLaw::zeta(rho).unwrap();
        let head: f64 = (1..k).map(|m| law.pmf(m).unwrap()).sum();
        let s = law.survival(k).unwrap();
        prop_assert!((s - (1.0 - head)).abs() < 1e-10);
        prop_assert!(law.survival(k + 1).unwrap() <= s);
    }

    #[test]
    fn omega1_is_a_sojourn_probability(rho in 2.05f64..6.0, n in 0u64..10_000) {
        let law = RepetitionLaw::zeta(rho).unwrap();
        let a = law.omega1(n).unwrap();
        let b = law.omega1(n + 1).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b <= a);
    }

    #[test]
    fn laplace_psi_is_completely_monotone_on_a_grid(rate in 0.1f64..10.0, sigma in 0.1f64..2.0, s in 1e-4f64..50.0) {
        for w in [WaitingTimeModel::exponential(rate).unwrap(), WaitingTimeModel::lognormal(0.0, sigma).unwrap()] {
            let a = laplace_psi(&w, s).unwrap();
            let b = laplace_psi(&w, 1.5 * s).unwrap();
            prop_assert!(a > 0.0 && a <= 1.0);
            prop_assert!(b <= a);
        }
    }

    #[test]
    fn propagator_conserves_mass(n in 0u64..500, dt0 in 0.01f64..5.0, rho in 2.1f64..5.0) {
        let q = TimePropagatorQuery {
            dt0,
            n,
            waiting: WaitingTimeModel::exponential(1.0).unwrap(),
            repetition: RepetitionLaw::zeta(rho).unwrap(),
        };
        // bins covering [0, 60) plus the far tail
        let mass: f64 = (0..600).map(|i| time_propagator(&q, i as f64 * 0.1, 0.1).unwrap()).sum::<f64>()
            + time_propagator(&q, 60.0, 1e6).unwrap();
        prop_assert!((mass - 1.0).abs() < 1e-9, "mass {}", mass);
    }

    #[test]
    fn surrogates_preserve_marginals(series in series_strategy(), seed in any::<u64>()) {
        for kind in SurrogateKind::ALL {
            let s = make_surrogate(&series, kind, seed).unwrap();
            prop_assert_eq!(s.len(), series.len());
            for (a, b) in series.sessions().iter().zip(s.sessions()) {
                prop_assert_eq!(a.range(), b.range());
                prop_assert_eq!(sorted(&series.waits()[a.range()]), sorted(&s.waits()[b.range()]));
                prop_assert_eq!(sorted(&series.increments()[a.range()]), sorted(&s.increments()[b.range()]));
            }
            if kind == SurrogateKind::Original {
                prop_assert_eq!(s.waits(), series.waits());
                prop_assert_eq!(s.increments(), series.increments());
            }
        }
    }

    #[test]
    fn stationarize_keeps_events_and_increments(series in series_strategy()) {
        let profile = build_seasonal_profile(&series, 300.0).unwrap();
        let s = stationarize(&series, &profile).unwrap();
        prop_assert_eq!(s.len(), series.len());
        prop_assert_eq!(s.increments(), series.increments());
        prop_assert!(s.waits().iter().all(|&w| w > 0.0));
        prop_assert!(s.is_stationarized());
    }

    #[test]
    fn event_csv_round_trip(series in series_strategy()) {
        let mut buf = Vec::new();
        series.write_csv(&mut buf).unwrap();
        let back = EventSeries::<f64>::read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back.times(), series.times());
        prop_assert_eq!(back.increments(), series.increments());
        prop_assert_eq!(back.sessions(), series.sessions());
    }

    #[test]
    fn tick_round_trip(series in series_strategy()) {
        let mut buf = Vec::new();
        write_ticks(&series, 100.0, &mut buf).unwrap();
        let r = read_ticks::<f64, _>(buf.as_slice(), &SessionRules::default()).unwrap();
        prop_assert_eq!(r.merged_ties + r.rejected_prices + r.outside_sessions, 0);
        prop_assert_eq!(r.series.times(), series.times());
        for (a, b) in r.series.increments().iter().zip(series.increments()) {
            prop_assert!((a - b).abs() < 1e-9);
        }
        prop_assert_eq!(r.series.sessions().len(), series.sessions().len());
    }

    #[test]
    fn step_acf_starts_at_one(values in prop::collection::vec(0.0f64..10.0, 60..300)) {
        prop_assume!(values.iter().any(|&v| (v - values[0]).abs() > 1e-6));
        let n = values.len();
        let c = step_acf(&values, &[0..n], &StepAcfOptions { max_lag: 20, bootstrap: None }).unwrap();
        prop_assert!((c.values[0].unwrap() - 1.0).abs() < 1e-12);
    }
}
