use eoi_force::estimate::{estimate_force, force_metrics, plateau_errors, EstimatorConfig, NominalModel};
use eoi_force::plant::{simulate, InputProfile, LoadProfile, PlantParams};
use eoi_force::shaping::{discretize, invert_shaper, DiscreteFilter};
use eoi_force::signal::{LeadLagShaper, SamplingConfig, SignalTable, Stage, TimeSeries};
use eoi_force::sta::{differentiate, eoi, gains_from_l, StaState};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

fn shaper() -> impl Strategy<Value = LeadLagShaper> {
    (
        0.05f64..20.0,
        prop::collection::vec((1e-4f64..0.5, 1e-4f64..0.5), 1..=4),
    )
        .prop_map(|(a, st)| LeadLagShaper::new(a, st.into_iter().map(|(b, c)| Stage::new(b, c)).collect()).unwrap())
}

/// Sup derivative error over the second half of a sine record.
fn sine_error(amplitude: f64, omega: f64, dt: f64, noise: f64, seed: u64) -> f64 {
    let gains = gains_from_l(1.1 * amplitude * omega * omega).unwrap();
    let cfg = SamplingConfig::new(dt, 12.0, seed).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = Normal::new(0.0, noise.max(f64::MIN_POSITIVE)).unwrap();
    let sigma = TimeSeries::new(
        dt,
        cfg.times()
            .map(|t| amplitude * (omega * t).sin() + if noise > 0.0 { n.sample(&mut rng) } else { 0.0 })
            .collect(),
    )
    .unwrap();
    let d = differentiate(&sigma, &gains, StaState::default()).unwrap();
    let k0 = sigma.len() / 2;
    d.x2_hat.values()[k0..]
        .iter()
        .enumerate()
        .map(|(i, x)| (x - amplitude * omega * (omega * sigma.time(k0 + i)).cos()).abs())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn finer_sampling_differentiates_more_accurately(amplitude in 0.2f64..5.0, freq in 0.1f64..1.0) {
        let w = 2.0 * std::f64::consts::PI * freq;
        let coarse = sine_error(amplitude, w, 1e-3, 0.0, 0);
        let fine = sine_error(amplitude, w, 2.5e-4, 0.0, 0);
        prop_assert!(fine < coarse, "dt/4 {} vs dt {}", fine, coarse);
    }

    #[test]
    fn differentiator_stays_bounded_under_noise(amplitude in 0.2f64..5.0, freq in 0.1f64..1.0, rel in 0.0f64..1e-3, seed in 0u64..1000) {
        let w = 2.0 * std::f64::consts::PI * freq;
        let eta = rel * 2.0 * amplitude;
        let err = sine_error(amplitude, w, 1e-3, eta, seed);
        let l = 1.1 * amplitude * w * w;
        prop_assert!(err.is_finite());
        prop_assert!(err <= 0.1 * amplitude * w + 10.0 * (l * eta).sqrt(), "error {} for eta {}", err, eta);
    }

    #[test]
    fn discrete_g_has_exact_dc_gain(s in shaper(), m in 0.1f64..50.0) {
        let g = DiscreteFilter::from_shaper(&s.inverse(m).unwrap(), 1e-3).unwrap();
        let expected = m / s.gain();
        prop_assert!((g.dc_gain() / expected - 1.0).abs() <= 1e-9);
        prop_assert!((g.freq_response(0.0).re / expected - 1.0).abs() <= 1e-9);
        let tf_g = discretize(&invert_shaper(&s, m).unwrap(), 1e-3).unwrap();
        prop_assert!((tf_g.dc_gain() / expected - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn filters_stay_bounded_on_bounded_input(s in shaper(), m in 0.1f64..50.0, seed in 0u64..1000) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = Normal::new(0.0, 1.0).unwrap();
        let x = TimeSeries::new(1e-3, (0..5000).map(|_| f64::clamp(n.sample(&mut rng), -3.0, 3.0)).collect()).unwrap();
        let peak = s.high_frequency_gain().max(s.dc_gain()) / m;
        let inv_peak = m / s.high_frequency_gain().min(s.dc_gain());
        for (filter, gain) in [
            (discretize(&s.to_tf().unwrap().scaled(1.0 / m).unwrap(), 1e-3).unwrap(), peak),
            (discretize(&invert_shaper(&s, m).unwrap(), 1e-3).unwrap(), inv_peak),
        ] {
            let y = filter.apply(&x).unwrap();
            prop_assert!(y.values().iter().all(|v| v.is_finite()));
            prop_assert!(y.max_abs() <= 3.0 * gain * 2f64.powi(2 * s.order() as i32));
        }
    }

    #[test]
    fn inversion_is_exact_in_frequency(s in shaper(), m in 0.1f64..50.0) {
        let g = invert_shaper(&s, m).unwrap();
        let coupling = s.to_tf().unwrap().scaled(1.0 / m).unwrap();
        for i in 0..50 {
            let w = 10f64.powf(-2.0 + 8.0 * i as f64 / 49.0);
            let p = g.freq_response(w) * coupling.freq_response(w);
            prop_assert!((p - Complex64::new(1.0, 0.0)).norm() < 1e-9, "{} at {}", p, w);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn eoi_is_odd(values in prop::collection::vec(prop_oneof![Just(0.0), -1.0f64..1.0], 1..200), l in 0.1f64..1e3) {
        let gains = gains_from_l(l).unwrap();
        let e = TimeSeries::new(1e-3, values).unwrap();
        let pos = eoi(&e, &gains);
        let neg = eoi(&e.scale(-1.0).unwrap(), &gains);
        for (a, b) in pos.values().iter().zip(neg.values()) {
            prop_assert_eq!(*a, -*b);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn csv_round_trip_preserves_metrics(amp in 1.0f64..20.0, period in 0.5f64..4.0, seed in 0u64..100) {
        let plant = PlantParams { noise_std: 1e-4, ..PlantParams::default() };
        let cfg = SamplingConfig::new(1e-3, 6.0, seed).unwrap();
        let u = InputProfile::Sine { amplitude: amp * 50.0, period, offset: 200.0 }.series(&cfg).unwrap();
        let load = LoadProfile::hold_sequence(vec![amp * 10.0, amp * 30.0], period).with_ramps(0.2 * period, 0.0);
        let d = simulate(&plant, &u, &load, &cfg).unwrap();
        let config = EstimatorConfig::new(100.0, NominalModel { m: 1.7, gamma: 160.0 }, &plant.coupling, 1e-3).unwrap();
        let est = estimate_force(&d, &config).unwrap();
        let f2 = d.f2_ref.as_ref().unwrap();

        let mut table = SignalTable::new(1e-3, d.len());
        table.push("f2_hat", &est.f2_hat).unwrap();
        table.push("f2_ref", f2).unwrap();
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        let back = SignalTable::read_csv(&buf[..]).unwrap();
        let (hat, reference) = (back.require("f2_hat").unwrap(), back.require("f2_ref").unwrap());

        let close = |x: f64, y: f64| (x - y).abs() <= 1e-6 * x.abs().max(y.abs());
        let a = force_metrics(&est.f2_hat, f2, est.skip).unwrap();
        let b = force_metrics(&hat, &reference, est.skip).unwrap();
        for (x, y) in [(a.rmse, b.rmse), (a.peak_error, b.peak_error), (a.relative_rmse, b.relative_rmse), (a.peak_reference, b.peak_reference)] {
            prop_assert!(close(x, y), "{} vs {}", x, y);
        }
        let pa = plateau_errors(&est.f2_hat, f2, est.skip, 0.5, 0.3).unwrap();
        let pb = plateau_errors(&hat, &reference, est.skip, 0.5, 0.3).unwrap();
        prop_assert_eq!(pa.len(), pb.len());
        for (x, y) in pa.iter().zip(&pb) {
            prop_assert!(close(x.mean_estimate, y.mean_estimate), "{:?} vs {:?}", x, y);
            // a fraction of the level, itself rounded in the file
            prop_assert!((x.relative_error - y.relative_error).abs() <= 1e-6, "{:?} vs {:?}", x, y);
        }
    }
}
