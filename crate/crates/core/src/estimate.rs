//! Force reconstruction `F2_hat = g[K2 sign(e) - f(u, x2_hat)]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fir::FirKernel;
use crate::plant::{coulomb, Dataset};
use crate::shaping::{DiscreteFilter, FilterSpec};
use crate::signal::{mean, rms, same_dt, LeadLagShaper, TimeSeries};
use crate::sta::{differentiate, eoi, Convergence, ConvergenceRule, StaGains, StaState};

/// Nominal actuator model `f = (u - gamma sign(v)) / m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NominalModel {
    pub m: f64,
    pub gamma: f64,
}

impl NominalModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.m.is_finite() && self.m > 0.0 && self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::invalid(
                "nominal model",
                format!("need m > 0 and gamma >= 0, got m={} gamma={}", self.m, self.gamma),
            ));
        }
        Ok(())
    }

    pub fn accel(&self, u: f64, v: f64) -> f64 {
        (u - coulomb(v, self.gamma)) / self.m
    }
}

#[derive(Debug, Clone)]
pub struct EstimatorConfig {
    pub gains: StaGains,
    pub nominal: NominalModel,
    pub g_filter: DiscreteFilter,
    /// Settling time of `g_filter`, used for the automatic transient skip.
    pub g_settle: f64,
    /// Cut-off in Hz of the optional FIR stage ahead of `g_filter`.
    pub fir_cutoff: Option<f64>,
    /// Fixed transient skip in seconds; `None` derives it from convergence.
    pub transient_skip: Option<f64>,
    pub convergence: ConvergenceRule,
}

impl EstimatorConfig {
    /// Optimal gains for `lipschitz` and the `g` filter inverting `coupling`.
    pub fn new(lipschitz: f64, nominal: NominalModel, coupling: &LeadLagShaper, dt: f64) -> Result<Self> {
        nominal.validate()?;
        Ok(Self {
            gains: StaGains::from_lipschitz(lipschitz)?,
            nominal,
            g_filter: FilterSpec::new(coupling, nominal.m, dt).build()?,
            g_settle: settle_time(coupling),
            fir_cutoff: None,
            transient_skip: None,
            convergence: ConvergenceRule::default(),
        })
    }

    pub fn with_fir(mut self, cutoff: f64) -> Self {
        self.fir_cutoff = Some(cutoff);
        self
    }

    pub fn with_transient_skip(mut self, seconds: f64) -> Self {
        self.transient_skip = Some(seconds);
        self
    }

    pub fn with_gains(mut self, gains: StaGains) -> Self {
        self.gains = gains;
        self
    }

    pub fn validate(&self, dt: f64) -> Result<()> {
        self.nominal.validate()?;
        if !same_dt(self.g_filter.dt(), dt) {
            return Err(Error::invalid(
                "estimator",
                format!(
                    "g filter sampled at dt={} but the dataset has dt={dt}",
                    self.g_filter.dt()
                ),
            ));
        }
        if let Some(s) = self.transient_skip {
            if !(s.is_finite() && s >= 0.0) {
                return Err(Error::invalid(
                    "estimator",
                    format!("transient_skip must be >= 0, got {s}"),
                ));
            }
        }
        if let Some(fc) = self.fir_cutoff {
            FirKernel::lowpass(fc, dt)?;
        }
        Ok(())
    }
}

/// Five times the slowest time constant of `G = m / S12`, whose poles are
/// the zeros of the coupling.
pub fn settle_time(coupling: &LeadLagShaper) -> f64 {
    5.0 * coupling.stages().iter().map(|s| s.b).fold(0.0, f64::max)
}

/// Force estimate with every intermediate signal.
#[derive(Debug, Clone)]
pub struct Estimate {
    pub f2_hat: TimeSeries,
    pub x2_hat: TimeSeries,
    pub e: TimeSeries,
    pub chi: TimeSeries,
    /// Nominal acceleration evaluated on the estimated velocity.
    pub f_nominal: TimeSeries,
    pub convergence: Convergence,
    /// Start of the evaluation window, seconds.
    pub skip: f64,
    pub warnings: Vec<String>,
}

impl Estimate {
    pub fn skip_index(&self) -> usize {
        self.f2_hat.index_at(self.skip).min(self.f2_hat.len())
    }
}

pub fn estimate_force(dataset: &Dataset, config: &EstimatorConfig) -> Result<Estimate> {
    dataset.validate()?;
    let dt = dataset.dt();
    config.validate(dt)?;
    let sigma = &dataset.sigma_meas;
    let start = StaState::new(sigma.values()[0], 0.0);
    let diff = differentiate(sigma, &config.gains, start)?;
    let chi = eoi(&diff.e, &config.gains);
    let f_nominal = dataset.u.zip_with(&diff.x2_hat, |u, v| config.nominal.accel(u, v))?;
    let mut residual = chi.zip_with(&f_nominal, |c, f| c - f)?;
    if let Some(fc) = config.fir_cutoff {
        residual = FirKernel::lowpass(fc, dt)?.apply(&residual)?;
    }
    let f2_hat = config.g_filter.apply(&residual)?;

    let convergence = config.convergence.detect(sigma, &diff.e, &config.gains)?;
    let mut warnings = Vec::new();
    let skip = match (config.transient_skip, convergence) {
        (Some(s), _) => s,
        (None, Convergence::Converged { time }) => time.max(config.g_settle),
        (None, Convergence::NotConverged { .. }) => {
            warnings.push("observer convergence was not detected; only the filter settling time is skipped".into());
            config.g_settle
        }
    };
    Ok(Estimate {
        f2_hat,
        x2_hat: diff.x2_hat,
        e: diff.e,
        chi,
        f_nominal,
        convergence,
        skip,
        warnings,
    })
}

/// Agreement between an estimate and a reference over `[skip, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForceMetrics {
    pub rmse: f64,
    pub peak_error: f64,
    pub peak_reference: f64,
    /// `rmse / peak_reference`
    pub relative_rmse: f64,
    pub samples: usize,
}

pub fn force_metrics(estimate: &TimeSeries, reference: &TimeSeries, skip: f64) -> Result<ForceMetrics> {
    estimate.check_aligned(reference)?;
    let k0 = estimate.index_at(skip);
    if k0 >= estimate.len() {
        return Err(Error::Data(format!("transient skip {skip} s leaves no samples")));
    }
    let err: Vec<f64> = estimate.values()[k0..]
        .iter()
        .zip(&reference.values()[k0..])
        .map(|(a, b)| a - b)
        .collect();
    let peak_reference = reference.values()[k0..].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let rmse = rms(&err);
    Ok(ForceMetrics {
        rmse,
        peak_error: err.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        peak_reference,
        relative_rmse: if peak_reference > 0.0 {
            rmse / peak_reference
        } else {
            f64::NAN
        },
        samples: err.len(),
    })
}

/// A stretch where the reference holds a constant value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Plateau {
    pub start: f64,
    pub end: f64,
    pub level: f64,
    pub mean_estimate: f64,
    /// `|mean_estimate - level| / |level|`
    pub relative_error: f64,
}

/// Plateaus of `reference` lasting at least `min_duration` and starting
/// after `skip`. The first `margin` seconds of each are left out of the mean.
pub fn plateau_errors(
    estimate: &TimeSeries,
    reference: &TimeSeries,
    skip: f64,
    min_duration: f64,
    margin: f64,
) -> Result<Vec<Plateau>> {
    estimate.check_aligned(reference)?;
    let r = reference.values();
    let dt = reference.dt();
    let mut out = Vec::new();
    let mut k = 0;
    while k < r.len() {
        let mut end = k + 1;
        while end < r.len() && r[end] == r[k] {
            end += 1;
        }
        let (start_t, end_t) = (k as f64 * dt, (end - 1) as f64 * dt);
        if start_t >= skip && end_t - start_t >= min_duration && r[k] != 0.0 {
            let from = k + (margin / dt).round() as usize;
            let m = mean(&estimate.values()[from.min(end - 1)..end]);
            out.push(Plateau {
                start: start_t,
                end: end_t,
                level: r[k],
                mean_estimate: m,
                relative_error: (m - r[k]).abs() / r[k].abs(),
            });
        }
        k = end;
    }
    Ok(out)
}
