use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{generate_load, Coupling, Dataset, LoadProfile, PlantParams};
use crate::error::{Error, Result};
use crate::signal::{same_dt, sign, SamplingConfig, TimeSeries};

/// Position reference `v0 t + amplitude sin(2 pi t / period)`, in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reference {
    #[serde(default)]
    pub v0: f64,
    #[serde(default)]
    pub amplitude: f64,
    #[serde(default = "unit_period")]
    pub period: f64,
}

fn unit_period() -> f64 {
    1.0
}

impl Default for Reference {
    fn default() -> Self {
        Self {
            v0: 0.0,
            amplitude: 0.0,
            period: 1.0,
        }
    }
}

impl Reference {
    pub fn value(&self, t: f64) -> f64 {
        self.v0 * t + self.amplitude * (2.0 * PI * t / self.period).sin()
    }
}

/// PD position tracking: `u = kp (ref - sigma_meas) - kd v_f`, where `v_f`
/// is the finite difference of `sigma_meas` through a first-order low-pass
/// with time constant `deriv_tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackingLaw {
    pub kp: f64,
    #[serde(default)]
    pub kd: f64,
    #[serde(default)]
    pub deriv_tau: f64,
    #[serde(default)]
    pub reference: Reference,
}

impl TrackingLaw {
    pub fn validate(&self, m: f64, dt: f64) -> Result<()> {
        let bad = |reason: String| Err(Error::invalid("control", reason));
        let fields = [
            self.kp,
            self.kd,
            self.deriv_tau,
            self.reference.v0,
            self.reference.amplitude,
        ];
        if !fields.iter().all(|v| v.is_finite()) || self.kp < 0.0 || self.kd < 0.0 || self.deriv_tau < 0.0 {
            return bad("kp, kd and deriv_tau must be finite and non-negative".into());
        }
        if !(self.reference.period.is_finite() && self.reference.period > 0.0) {
            return bad(format!(
                "reference period must be positive, got {}",
                self.reference.period
            ));
        }
        if (self.kp / m).sqrt() * dt >= 1.0 || self.kd * dt / m >= 1.0 {
            return bad(format!(
                "gains kp={} kd={} are too stiff for dt={dt} with m={m}; need sqrt(kp/m) dt < 1 and kd dt / m < 1",
                self.kp, self.kd
            ));
        }
        Ok(())
    }
}

/// Predefined open-loop input force, N.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InputProfile {
    Constant {
        value: f64,
    },
    Step {
        amplitude: f64,
        onset: f64,
    },
    Sine {
        amplitude: f64,
        period: f64,
        #[serde(default)]
        offset: f64,
    },
}

impl InputProfile {
    pub fn series(&self, config: &SamplingConfig) -> Result<TimeSeries> {
        if let InputProfile::Sine { period, .. } = *self {
            if !(period > 0.0) {
                return Err(Error::invalid(
                    "input",
                    format!("sine period must be positive, got {period}"),
                ));
            }
        }
        TimeSeries::from_fn(config, |t| match *self {
            InputProfile::Constant { value } => value,
            InputProfile::Step { amplitude, onset } => {
                if t >= onset {
                    amplitude
                } else {
                    0.0
                }
            }
            InputProfile::Sine {
                amplitude,
                period,
                offset,
            } => offset + amplitude * (2.0 * PI * t / period).sin(),
        })
    }
}

/// How the input force is produced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ControlSpec {
    Tracking(TrackingLaw),
    OpenLoop { input: InputProfile },
}

/// Open-loop simulation with a prescribed input force.
pub fn simulate(params: &PlantParams, u: &TimeSeries, load: &LoadProfile, config: &SamplingConfig) -> Result<Dataset> {
    config.validate()?;
    if !same_dt(u.dt(), config.dt) {
        return Err(Error::invalid(
            "simulation",
            format!("input dt={} but config dt={}", u.dt(), config.dt),
        ));
    }
    if u.len() != config.samples() {
        return Err(Error::invalid(
            "simulation",
            format!(
                "input has {} samples but the config needs {}",
                u.len(),
                config.samples()
            ),
        ));
    }
    let values = u.values();
    integrate(params, load, config, |k, _, _| values[k])
}

/// Simulation driven by a [`ControlSpec`].
pub fn simulate_with(
    params: &PlantParams,
    control: &ControlSpec,
    load: &LoadProfile,
    config: &SamplingConfig,
) -> Result<Dataset> {
    config.validate()?;
    match control {
        ControlSpec::OpenLoop { input } => simulate(params, &input.series(config)?, load, config),
        ControlSpec::Tracking(law) => {
            params.validate()?;
            law.validate(params.m, config.dt)?;
            let dt = config.dt;
            let alpha = dt / (law.deriv_tau + dt);
            let (mut prev, mut vf) = (f64::NAN, 0.0);
            integrate(params, load, config, move |_, t, meas| {
                let d = if prev.is_nan() { 0.0 } else { (meas - prev) / dt };
                prev = meas;
                vf += alpha * (d - vf);
                law.kp * (law.reference.value(t) - meas) - law.kd * vf
            })
        }
    }
}

/// Semi-implicit Euler with Coulomb friction resolved as a velocity
/// projection: when the friction impulse available in one step can cancel
/// the trial velocity the mass stops, otherwise it slides against the sign
/// of the trial velocity.
fn integrate(
    params: &PlantParams,
    load: &LoadProfile,
    config: &SamplingConfig,
    mut input: impl FnMut(usize, f64, f64) -> f64,
) -> Result<Dataset> {
    params.validate()?;
    let dt = config.dt;
    let n = config.samples();
    let f2 = generate_load(load, config)?.scale(load.direction.sign())?;
    let mut coupling = Coupling::new(params, dt)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let noise = Normal::new(0.0, params.noise_std).map_err(|e| Error::invalid("plant", e.to_string()))?;

    let cap = dt * params.gamma / params.m;
    let (mut x, mut v) = (0.0f64, 0.0f64);
    let mut cols: [Vec<f64>; 5] = std::array::from_fn(|_| Vec::with_capacity(n));
    for k in 0..n {
        let t = k as f64 * dt;
        let meas = x + noise.sample(&mut rng);
        let u = input(k, t, meas);
        let xi = coupling.step(f2.values()[k]);
        for (col, val) in cols.iter_mut().zip([u, meas, x, v, xi]) {
            col.push(val);
        }
        let trial = v + dt * (u / params.m + xi);
        v = if trial.abs() <= cap {
            0.0
        } else {
            trial - cap * sign(trial)
        };
        x += dt * v;
        if !(x.is_finite() && v.is_finite() && u.is_finite()) {
            return Err(Error::Numerical(format!("simulation diverged at t={t}")));
        }
    }
    let [u, meas, x, v, xi] = cols;
    Ok(Dataset {
        u: TimeSeries::new(dt, u)?,
        sigma_meas: TimeSeries::new(dt, meas)?,
        sigma_true: Some(TimeSeries::new(dt, x)?),
        v_true: Some(TimeSeries::new(dt, v)?),
        f2_ref: Some(f2),
        xi_true: Some(TimeSeries::new(dt, xi)?),
    })
}
