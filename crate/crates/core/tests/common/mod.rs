#![allow(dead_code)]

use eoi_force::estimate::{EstimatorConfig, NominalModel};
use eoi_force::plant::{
    rig_coupling, simulate_with, ControlSpec, Dataset, LoadProfile, PlantParams, Reference, TrackingLaw,
};
use eoi_force::signal::{LeadLagShaper, SamplingConfig};

pub const KP: f64 = 5e4;
pub const KD: f64 = 300.0;

pub fn tracking(amplitude: f64) -> ControlSpec {
    ControlSpec::Tracking(TrackingLaw {
        kp: KP,
        kd: KD,
        deriv_tau: 5e-3,
        reference: Reference {
            v0: 0.5,
            amplitude,
            period: 5.0,
        },
    })
}

pub fn saw_load() -> LoadProfile {
    LoadProfile::saw(5000.0, 6.0, 1000.0).with_ramps(1.5, 0.6)
}

pub fn noisy_plant() -> PlantParams {
    PlantParams {
        noise_std: 1e-4,
        ..PlantParams::default()
    }
}

/// The default saw scenario.
pub fn saw_dataset(duration: f64, noise_std: f64, seed: u64) -> Dataset {
    let plant = PlantParams {
        noise_std,
        ..PlantParams::default()
    };
    let cfg = SamplingConfig::new(1e-3, duration, seed).unwrap();
    simulate_with(&plant, &tracking(0.2), &saw_load(), &cfg).unwrap()
}

pub fn true_config(lipschitz: f64, coupling: &LeadLagShaper) -> EstimatorConfig {
    EstimatorConfig::new(lipschitz, NominalModel { m: 1.7, gamma: 160.0 }, coupling, 1e-3).unwrap()
}

pub fn rig_config(lipschitz: f64) -> EstimatorConfig {
    true_config(lipschitz, &rig_coupling())
}

/// Largest |sigma''| of the simulated motion after `after` seconds.
pub fn accel_bound(d: &Dataset, after: f64) -> f64 {
    let v = d.v_true.as_ref().unwrap();
    let k0 = v.index_at(after);
    v.values()[k0..]
        .windows(2)
        .map(|w| ((w[1] - w[0]) / v.dt()).abs())
        .fold(0.0, f64::max)
}
