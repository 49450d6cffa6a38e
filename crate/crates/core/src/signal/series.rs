use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sampling period used throughout unless a scenario overrides it.
pub const DEFAULT_DT: f64 = 1e-3;

/// Relative tolerance used when two sampling periods are compared.
const DT_MATCH_RTOL: f64 = 1e-9;

/// Uniform sampling grid for a simulation or a recorded experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingConfig {
    /// Sampling period in seconds.
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Record length in seconds.
    pub duration: f64,
    /// Seed for the measurement-noise generator.
    #[serde(default)]
    pub seed: u64,
}

fn default_dt() -> f64 {
    DEFAULT_DT
}

impl SamplingConfig {
    pub fn new(dt: f64, duration: f64, seed: u64) -> Result<Self> {
        let config = Self { dt, duration, seed };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid(
                "sampling",
                format!("dt must be positive, got {}", self.dt),
            ));
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(Error::invalid(
                "sampling",
                format!("duration must be positive, got {}", self.duration),
            ));
        }
        let n = self.duration / self.dt;
        if n.round() < 2.0 {
            return Err(Error::invalid("sampling", "fewer than two samples"));
        }
        Ok(())
    }

    /// Number of samples, `round(duration / dt)`.
    pub fn samples(&self) -> usize {
        (self.duration / self.dt).round() as usize
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.samples()).map(move |k| k as f64 * self.dt)
    }
}

/// Whether two sampling periods describe the same grid.
pub fn same_dt(a: f64, b: f64) -> bool {
    (a - b).abs() <= DT_MATCH_RTOL * a.abs().max(b.abs())
}

/// A uniformly sampled scalar signal: sample `k` sits at `t = k * dt`.
///
/// Units are a per-channel convention (m, m/s, N, m/s^2); the type itself
/// carries none. Every sample is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    dt: f64,
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::invalid("time series", format!("dt must be positive, got {dt}")));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-finite sample {} at index {k} (t = {})",
                values[k],
                k as f64 * dt
            )));
        }
        Ok(Self { dt, values })
    }

    /// Builds a series from a function of time evaluated on `config`'s grid.
    pub fn from_fn(config: &SamplingConfig, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(config.dt, config.times().map(f).collect())
    }

    pub fn constant(dt: f64, len: usize, value: f64) -> Result<Self> {
        Self::new(dt, vec![value; len])
    }

    /// Only for values that are finite by construction.
    pub(crate) fn from_finite(dt: f64, values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self { dt, values }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.values.len() as f64 * self.dt
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    /// Index of the first sample at or after `t`.
    pub fn index_at(&self, t: f64) -> usize {
        if t <= 0.0 {
            0
        } else {
            ((t / self.dt).ceil() as usize).min(self.values.len())
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.dt, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, factor: f64) -> Result<Self> {
        self.map(|v| v * factor)
    }

    /// Sample-wise combination of two series on the same grid.
    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_aligned(other)?;
        Self::new(
            self.dt,
            self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        )
    }

    pub fn check_aligned(&self, other: &Self) -> Result<()> {
        if !same_dt(self.dt, other.dt) {
            return Err(Error::Data(format!(
                "sampling mismatch: dt {} vs {}",
                self.dt, other.dt
            )));
        }
        if self.len() != other.len() {
            return Err(Error::Data(format!(
                "length mismatch: {} vs {} samples",
                self.len(),
                other.len()
            )));
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        mean(&self.values)
    }
}

/// `sign` with `sign(0) = 0`.
#[inline]
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn rms(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    (values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64).sqrt()
}

/// Root-mean-square difference of two equally long slices.
pub fn rmse(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "rmse over slices of different length");
    if a.is_empty() {
        return 0.0;
    }
    (a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64).sqrt()
}
