//! Super-twisting robust exact differentiator, discretised with forward
//! Euler, and the equivalent output injection read off its switching term.
//!
//! For a measured sliding variable `sigma` with `|sigma''| <= L` the observer
//!
//! ```text
//! x1' = K1 sqrt|e| sign(e) + x2
//! x2' = K2 sign(e),          e = sigma - x1
//! ```
//!
//! drives `e` and `e'` to zero in finite time, after which `x2 = sigma'` and
//! the averaged value of `K2 sign(e)` equals `sigma''`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{sign, TimeSeries};

/// Gain on `K2` relative to the Lipschitz bound.
pub const K2_PER_L: f64 = 1.1;
/// Gain on `K1` relative to `sqrt(K2)`.
pub const K1_PER_SQRT_K2: f64 = 2.028;

/// Observer gains together with the Lipschitz bound they were designed for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StaGains {
    pub lipschitz: f64,
    pub k1: f64,
    pub k2: f64,
}

impl StaGains {
    /// `K2 = 1.1 L`, `K1 = 2.028 sqrt(K2)`.
    pub fn from_lipschitz(lipschitz: f64) -> Result<Self> {
        if !(lipschitz.is_finite() && lipschitz > 0.0) {
            return Err(Error::invalid(
                "observer gains",
                format!("Lipschitz bound must be positive, got {lipschitz}"),
            ));
        }
        let k2 = K2_PER_L * lipschitz;
        Ok(Self {
            lipschitz,
            k1: K1_PER_SQRT_K2 * k2.sqrt(),
            k2,
        })
    }

    /// Hand-picked gains; `lipschitz` is kept for reporting only.
    pub fn new(lipschitz: f64, k1: f64, k2: f64) -> Result<Self> {
        if ![lipschitz, k1, k2].iter().all(|g| g.is_finite() && *g > 0.0) {
            return Err(Error::invalid("observer gains", "L, K1 and K2 must all be positive"));
        }
        Ok(Self { lipschitz, k1, k2 })
    }
}

/// Internal observer state: `x1_hat` estimates `sigma`, `x2_hat` its rate.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StaState {
    pub x1_hat: f64,
    pub x2_hat: f64,
}

impl StaState {
    pub fn new(x1_hat: f64, x2_hat: f64) -> Self {
        Self { x1_hat, x2_hat }
    }

    /// One forward-Euler step. Returns the next state and the output error
    /// `e = sigma - x1_hat` evaluated before the update.
    #[inline]
    pub fn step(&self, sigma: f64, gains: &StaGains, dt: f64) -> (StaState, f64) {
        let e = sigma - self.x1_hat;
        let s = sign(e);
        let next = StaState {
            x1_hat: self.x1_hat + dt * (gains.k1 * e.abs().sqrt() * s + self.x2_hat),
            x2_hat: self.x2_hat + dt * gains.k2 * s,
        };
        (next, e)
    }
}

/// Gains from the optimal rule, see [`StaGains::from_lipschitz`].
pub fn gains_from_l(lipschitz: f64) -> Result<StaGains> {
    StaGains::from_lipschitz(lipschitz)
}

/// Free-function form of [`StaState::step`].
pub fn sta_step(state: StaState, sigma_meas: f64, gains: &StaGains, dt: f64) -> (StaState, f64) {
    state.step(sigma_meas, gains, dt)
}

/// Per-sample observer trajectories. Sample `k` holds the state used at
/// step `k`, i.e. before it absorbs `sigma[k]`.
#[derive(Debug, Clone)]
pub struct Differentiation {
    pub x1_hat: TimeSeries,
    pub x2_hat: TimeSeries,
    pub e: TimeSeries,
}

/// Runs the observer over a whole series.
pub fn differentiate(sigma: &TimeSeries, gains: &StaGains, initial: StaState) -> Result<Differentiation> {
    let dt = sigma.dt();
    let n = sigma.len();
    let (mut x1, mut x2, mut e) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    let mut state = initial;
    for &s in sigma.values() {
        x1.push(state.x1_hat);
        x2.push(state.x2_hat);
        let (next, err) = state.step(s, gains, dt);
        e.push(err);
        state = next;
    }
    Ok(Differentiation {
        x1_hat: TimeSeries::new(dt, x1)?,
        x2_hat: TimeSeries::new(dt, x2)?,
        e: TimeSeries::new(dt, e)?,
    })
}

/// Outcome of [`detect_convergence`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Convergence {
    Converged {
        time: f64,
    },
    /// No window qualified; `duration` is the length of the record.
    NotConverged {
        duration: f64,
    },
}

impl Convergence {
    pub fn time(&self) -> Option<f64> {
        match *self {
            Convergence::Converged { time } => Some(time),
            Convergence::NotConverged { .. } => None,
        }
    }

    pub fn is_converged(&self) -> bool {
        matches!(self, Convergence::Converged { .. })
    }
}

/// Earliest `T` with `|e(t)| <= threshold` for every sample in `[T, T + dwell]`.
pub fn detect_convergence(e: &TimeSeries, threshold: f64, dwell: f64) -> Result<Convergence> {
    if !(threshold > 0.0) || !(dwell > 0.0) {
        return Err(Error::invalid(
            "convergence rule",
            format!("threshold and dwell must be positive, got {threshold} and {dwell}"),
        ));
    }
    let needed = (dwell / e.dt()).round() as usize + 1;
    let mut run = 0usize;
    for (k, v) in e.values().iter().enumerate() {
        if v.abs() <= threshold {
            run += 1;
            if run >= needed {
                return Ok(Convergence::Converged {
                    time: e.time(k + 1 - run),
                });
            }
        } else {
            run = 0;
        }
    }
    Ok(Convergence::NotConverged { duration: e.duration() })
}

/// Equivalent output injection `chi = K2 sign(e)`, with `sign(0) = 0`.
pub fn eoi(e: &TimeSeries, gains: &StaGains) -> TimeSeries {
    TimeSeries::from_finite(e.dt(), e.values().iter().map(|&v| gains.k2 * sign(v)).collect())
}

/// Robust estimate of white measurement-noise standard deviation from the
/// median absolute third difference. Smooth signal content contributes only
/// `O(dt^3)` to the differences.
pub fn estimate_noise_std(sigma: &TimeSeries) -> f64 {
    let v = sigma.values();
    if v.len() < 4 {
        return 0.0;
    }
    let mut d3: Vec<f64> = v
        .windows(4)
        .map(|w| (w[3] - 3.0 * w[2] + 3.0 * w[1] - w[0]).abs())
        .collect();
    let mid = d3.len() / 2;
    let (_, median, _) = d3.select_nth_unstable_by(mid, f64::total_cmp);
    // third difference of white noise has variance 20 eta^2; MAD/0.6745 -> std
    *median / 0.674_489_75 / 20f64.sqrt()
}

/// Rule used to locate the end of the observer transient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceRule {
    /// Error band in units of `sigma`; `None` derives it from the data.
    #[serde(default)]
    pub threshold: Option<f64>,
    /// Seconds the error must stay inside the band.
    #[serde(default = "default_dwell")]
    pub dwell: f64,
}

fn default_dwell() -> f64 {
    0.2
}

impl Default for ConvergenceRule {
    fn default() -> Self {
        Self {
            threshold: None,
            dwell: default_dwell(),
        }
    }
}

impl ConvergenceRule {
    /// Band used when none is configured: three noise standard deviations on
    /// top of the discrete-time chattering level `(K1^2 + K2) dt^2`.
    pub fn auto_threshold(sigma: &TimeSeries, gains: &StaGains) -> f64 {
        let dt2 = sigma.dt() * sigma.dt();
        3.0 * estimate_noise_std(sigma) + (gains.k1 * gains.k1 + gains.k2) * dt2
    }

    pub fn detect(&self, sigma: &TimeSeries, e: &TimeSeries, gains: &StaGains) -> Result<Convergence> {
        let threshold = self.threshold.unwrap_or_else(|| Self::auto_threshold(sigma, gains));
        detect_convergence(e, threshold, self.dwell)
    }
}
