//! Synthetic actuator: a mass with Coulomb friction, driven by an input
//! force and perturbed by an environmental force seen through a lead-lag
//! coupling, with noisy position measurement.

mod dataset;
mod load;
mod sim;

pub use dataset::Dataset;
pub use load::{generate_load, LoadDirection, LoadKind, LoadProfile};
pub use sim::{simulate, simulate_with, ControlSpec, InputProfile, Reference, TrackingLaw};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shaping::DiscreteFilter;
use crate::signal::{sign, LeadLagShaper, Stage, TimeSeries};

/// Mass of the identified actuator model, kg.
pub const RIG_MASS: f64 = 1.7;
/// Coulomb level of the identified actuator model, N.
pub const RIG_GAMMA: f64 = 160.0;

/// The identified coupling shaper: unit gain, zero time constants 1.37e-3
/// and 1.284e-2 s, pole time constants 2.84e-5 and 2.38e-5 s.
pub fn rig_coupling() -> LeadLagShaper {
    LeadLagShaper::new(1.0, vec![Stage::new(1.37e-3, 2.84e-5), Stage::new(1.284e-2, 2.38e-5)])
        .expect("constant shaper is valid")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantParams {
    /// kg
    pub m: f64,
    /// Coulomb friction level, N
    pub gamma: f64,
    /// Path from the environmental force to the actuator side.
    pub coupling: LeadLagShaper,
    /// Standard deviation of the position measurement noise, m.
    #[serde(default)]
    pub noise_std: f64,
}

impl Default for PlantParams {
    fn default() -> Self {
        Self {
            m: RIG_MASS,
            gamma: RIG_GAMMA,
            coupling: rig_coupling(),
            noise_std: 0.0,
        }
    }
}

impl PlantParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.m.is_finite() && self.m > 0.0) {
            return Err(Error::invalid(
                "plant",
                format!("mass must be positive, got {}", self.m),
            ));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::invalid(
                "plant",
                format!("gamma must be non-negative, got {}", self.gamma),
            ));
        }
        if !(self.noise_std.is_finite() && self.noise_std >= 0.0) {
            return Err(Error::invalid(
                "plant",
                format!("noise_std must be non-negative, got {}", self.noise_std),
            ));
        }
        self.coupling.to_tf().map(|_| ())
    }
}

/// `gamma sign(v)` with `sign(0) = 0`.
pub fn coulomb(v: f64, gamma: f64) -> f64 {
    gamma * sign(v)
}

/// Acceleration of the nominal model, `(u - gamma sign(v)) / m`.
pub fn nominal_accel(u: f64, v: f64, params: &PlantParams) -> f64 {
    (u - coulomb(v, params.gamma)) / params.m
}

/// Largest number of internal substeps per sample.
const MAX_SUBSTEPS: usize = 512;

/// Streaming coupling filter `xi = S12[F2] / m`.
///
/// The shaper runs at `dt / M`, fine enough to resolve its fastest time
/// constant. Each input sample is held over its interval and the output is
/// the interval average, so that the plant sees the mean disturbance over
/// each step.
#[derive(Debug, Clone)]
pub struct Coupling {
    filter: DiscreteFilter,
    substeps: usize,
    inv_m: f64,
    primed: bool,
}

impl Coupling {
    pub fn new(params: &PlantParams, dt: f64) -> Result<Self> {
        params.validate()?;
        let substeps = match params.coupling.fastest_time_constant() {
            Some(tau) if !params.coupling.is_static() => ((2.0 * dt / tau).ceil() as usize).clamp(1, MAX_SUBSTEPS),
            _ => 1,
        };
        let filter = DiscreteFilter::from_shaper(&params.coupling, dt / substeps as f64)?;
        Ok(Self {
            filter,
            substeps,
            inv_m: 1.0 / params.m,
            primed: false,
        })
    }

    pub fn substeps(&self) -> usize {
        self.substeps
    }

    /// Mean disturbance over the interval on which `f2` is held. The first
    /// call starts the filter in steady state.
    pub fn step(&mut self, f2: f64) -> f64 {
        if !self.primed {
            self.filter.reset_to_steady(f2);
            self.primed = true;
        }
        if self.substeps == 1 {
            return self.filter.step(f2) * self.inv_m;
        }
        let sum: f64 = (0..self.substeps).map(|_| self.filter.step(f2)).sum();
        sum / self.substeps as f64 * self.inv_m
    }
}

/// `xi = S12[F2] / m` over a whole series.
pub fn coupled_disturbance(f2: &TimeSeries, params: &PlantParams) -> Result<TimeSeries> {
    let mut c = Coupling::new(params, f2.dt())?;
    TimeSeries::new(f2.dt(), f2.values().iter().map(|&f| c.step(f)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::SamplingConfig;

    #[test]
    fn coulomb_values() {
        assert_eq!(coulomb(0.1, 160.0), 160.0);
        assert_eq!(coulomb(0.0, 160.0), 0.0);
        assert_eq!(coulomb(-1e-9, 160.0), -160.0);
    }

    #[test]
    fn nominal_accel_values() {
        let p = PlantParams::default();
        assert_eq!(nominal_accel(160.0, 0.3, &p), 0.0);
        assert_eq!(nominal_accel(0.0, 0.0, &p), 0.0);
        // 0.5882 * 840 with the rounded inverse mass
        assert!((nominal_accel(1000.0, 0.3, &p) - 494.09).abs() < 0.05);
        assert!((nominal_accel(1000.0, 0.3, &p) - 840.0 / 1.7).abs() < 1e-12);
    }

    #[test]
    fn identity_coupling_passes_force_through() {
        let p = PlantParams {
            m: 1.0,
            coupling: LeadLagShaper::identity(),
            ..PlantParams::default()
        };
        let cfg = SamplingConfig::new(1e-3, 1.0, 0).unwrap();
        let f2 = TimeSeries::from_fn(&cfg, |t| 300.0 * (7.0 * t).sin() - 20.0).unwrap();
        assert_eq!(coupled_disturbance(&f2, &p).unwrap(), f2);
    }

    #[test]
    fn constant_force_gives_dc_disturbance() {
        let coupling = LeadLagShaper::new(2.5, rig_coupling().stages().to_vec()).unwrap();
        let p = PlantParams {
            coupling,
            ..PlantParams::default()
        };
        let f2 = TimeSeries::constant(1e-3, 500, 1200.0).unwrap();
        let xi = coupled_disturbance(&f2, &p).unwrap();
        assert!(xi.values().iter().all(|v| (v - 2.5 / 1.7 * 1200.0).abs() < 1e-9));
    }

    #[test]
    fn rig_coupling_is_oversampled() {
        let c = Coupling::new(&PlantParams::default(), 1e-3).unwrap();
        assert_eq!(c.substeps(), 85);
    }

    #[test]
    fn saw_edge_transient_decays() {
        // lead coupling overshoots at the drop and settles well before the next edge
        let p = PlantParams::default();
        let cfg = SamplingConfig::new(1e-3, 12.0, 0).unwrap();
        let load = LoadProfile::saw(5000.0, 6.0, 1000.0).with_ramps(1.5, 0.0);
        let f2 = TimeSeries::from_fn(&cfg, |t| load.value(t)).unwrap();
        let xi = coupled_disturbance(&f2, &p).unwrap();
        let static_xi = |k: usize| f2.values()[k] / p.m;
        let drop = f2.index_at(1.5);
        assert!((xi.values()[drop] - static_xi(drop)).abs() > 100.0);
        let later = f2.index_at(3.0);
        assert!((xi.values()[later] - static_xi(later)).abs() < 1e-6);
        let before = drop - 100;
        assert!((xi.values()[before] - static_xi(before)).abs() < 0.05 * static_xi(before));
    }

    #[test]
    fn lag_dominant_bound() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let stages: Vec<Stage> = (0..2)
                .map(|_| {
                    let c = rng.random_range(1e-3..5e-2);
                    Stage::new(c * rng.random_range(0.05..1.0), c)
                })
                .collect();
            let coupling = LeadLagShaper::new(rng.random_range(0.2..3.0), stages).unwrap();
            let ratio = coupling.stages().iter().map(|s| s.b / s.c).fold(0.0, f64::max);
            let p = PlantParams {
                m: rng.random_range(0.5..5.0),
                coupling,
                ..PlantParams::default()
            };
            let cfg = SamplingConfig::new(1e-3, 4.0, 0).unwrap();
            let f2 = TimeSeries::new(1e-3, (0..cfg.samples()).map(|_| rng.random_range(-1e3..1e3)).collect()).unwrap();
            let xi = coupled_disturbance(&f2, &p).unwrap();
            let bound = p.coupling.gain() / p.m * f2.max_abs() * (1.0 + ratio);
            assert!(xi.max_abs() <= bound, "{} > {bound}", xi.max_abs());
        }
    }
}
