//! JSON scenario documents tying a plant, load, controller, sampling grid
//! and estimator together.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::{settle_time, EstimatorConfig, NominalModel};
use crate::plant::{simulate_with, ControlSpec, Dataset, LoadProfile, PlantParams};
use crate::shaping::FilterSpec;
use crate::signal::{same_dt, SamplingConfig};
use crate::sta::{ConvergenceRule, StaGains};

/// Estimator block of a scenario, or a standalone estimator document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSpec {
    pub lipschitz: f64,
    pub nominal: NominalModel,
    /// Coupling shaper to invert, with the mass and sampling period.
    pub g_filter: FilterSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fir_cutoff_hz: Option<f64>,
    /// Seconds; omitted means derived from observer convergence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transient_skip: Option<f64>,
    #[serde(default)]
    pub convergence: ConvergenceRule,
}

impl EstimatorSpec {
    pub fn validate(&self) -> Result<()> {
        self.nominal.validate()?;
        StaGains::from_lipschitz(self.lipschitz)?;
        if self.g_filter.m != self.nominal.m {
            return Err(Error::invalid(
                "estimator",
                format!(
                    "g_filter.m = {} differs from nominal.m = {}",
                    self.g_filter.m, self.nominal.m
                ),
            ));
        }
        self.g_filter.build().map(|_| ())
    }

    pub fn build(&self) -> Result<EstimatorConfig> {
        self.validate()?;
        let coupling = self.g_filter.coupling()?;
        let mut config = EstimatorConfig::new(self.lipschitz, self.nominal, &coupling, self.g_filter.dt)?;
        config.g_settle = settle_time(&coupling);
        config.fir_cutoff = self.fir_cutoff_hz;
        config.transient_skip = self.transient_skip;
        config.convergence = self.convergence;
        Ok(config)
    }

    /// Reads either a standalone estimator document or the `estimator`
    /// block of a scenario.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let spec: Self = match value.get("estimator") {
            Some(block) if value.get("plant").is_some() => serde_json::from_value(block.clone())?,
            _ => serde_json::from_value(value)?,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub plant: PlantParams,
    pub load: LoadProfile,
    pub control: ControlSpec,
    pub sampling: SamplingConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimator: Option<EstimatorSpec>,
}

impl ScenarioFile {
    pub fn validate(&self) -> Result<()> {
        self.plant.validate()?;
        self.load.validate()?;
        self.sampling.validate()?;
        if let ControlSpec::Tracking(law) = &self.control {
            law.validate(self.plant.m, self.sampling.dt)?;
        }
        if let Some(est) = &self.estimator {
            est.validate()?;
            if !same_dt(est.g_filter.dt, self.sampling.dt) {
                return Err(Error::invalid(
                    "scenario",
                    format!(
                        "estimator dt={} differs from sampling dt={}",
                        est.g_filter.dt, self.sampling.dt
                    ),
                ));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let scenario: Self = serde_json::from_str(text)?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn simulate(&self) -> Result<Dataset> {
        simulate_with(&self.plant, &self.control, &self.load, &self.sampling)
    }

    /// The estimator block, or a validation error when it is absent.
    pub fn estimator(&self) -> Result<EstimatorConfig> {
        self.estimator
            .as_ref()
            .ok_or_else(|| Error::invalid("scenario", "no estimator block"))?
            .build()
    }
}

/// Bundled scenarios, by file stem.
pub mod bundled {
    pub const DEFAULT: &str = include_str!("../scenarios/paper-default.json");
    pub const STICK_SLIP: &str = include_str!("../scenarios/stick-slip.json");
    pub const HOLD_PLATEAUS: &str = include_str!("../scenarios/hold-plateaus.json");
}
