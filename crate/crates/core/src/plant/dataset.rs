use std::path::Path;

use crate::error::{Error, Result};
use crate::signal::{SignalTable, TimeSeries};

/// Aligned estimator input plus optional ground truth.
///
/// | channel      | unit | meaning                                        |
/// |--------------|------|------------------------------------------------|
/// | `u`          | N    | input force applied over `[t_k, t_k + dt)`     |
/// | `sigma_meas` | m    | measured position                              |
/// | `sigma_true` | m    | noise-free position                            |
/// | `v_true`     | m/s  | velocity                                       |
/// | `f2_ref`     | N    | applied environmental force, sign included     |
/// | `xi_true`    | m/s² | disturbance acceleration seen by the mass      |
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub u: TimeSeries,
    pub sigma_meas: TimeSeries,
    pub sigma_true: Option<TimeSeries>,
    pub v_true: Option<TimeSeries>,
    pub f2_ref: Option<TimeSeries>,
    pub xi_true: Option<TimeSeries>,
}

pub(crate) const TRUTH_CHANNELS: [&str; 4] = ["sigma_true", "v_true", "f2_ref", "xi_true"];

impl Dataset {
    /// Measured channels only.
    pub fn new(u: TimeSeries, sigma_meas: TimeSeries) -> Result<Self> {
        u.check_aligned(&sigma_meas)?;
        Ok(Self {
            u,
            sigma_meas,
            sigma_true: None,
            v_true: None,
            f2_ref: None,
            xi_true: None,
        })
    }

    pub fn dt(&self) -> f64 {
        self.u.dt()
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    fn truth(&self) -> [(&'static str, &Option<TimeSeries>); 4] {
        [
            (TRUTH_CHANNELS[0], &self.sigma_true),
            (TRUTH_CHANNELS[1], &self.v_true),
            (TRUTH_CHANNELS[2], &self.f2_ref),
            (TRUTH_CHANNELS[3], &self.xi_true),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        self.u.check_aligned(&self.sigma_meas)?;
        for (_, ch) in self.truth() {
            if let Some(s) = ch {
                self.u.check_aligned(s)?;
            }
        }
        Ok(())
    }

    /// Reference force, or a channel error naming `f2_ref`.
    pub fn require_f2_ref(&self) -> Result<&TimeSeries> {
        self.f2_ref
            .as_ref()
            .ok_or_else(|| Error::MissingChannel("f2_ref".into()))
    }

    /// A copy without truth channels.
    pub fn measured_only(&self) -> Self {
        Self {
            sigma_true: None,
            v_true: None,
            f2_ref: None,
            xi_true: None,
            ..self.clone()
        }
    }

    pub fn to_table(&self) -> Result<SignalTable> {
        let mut table = SignalTable::new(self.dt(), self.len());
        table.push("u", &self.u)?;
        table.push("sigma_meas", &self.sigma_meas)?;
        for (name, ch) in self.truth() {
            if let Some(s) = ch {
                table.push(name, s)?;
            }
        }
        Ok(table)
    }

    /// Requires `u` and `sigma_meas`; truth channels are picked up when
    /// present. Other columns are ignored.
    pub fn from_table(table: &SignalTable) -> Result<Self> {
        let opt = |name: &str| table.series(name).transpose();
        let ds = Self {
            u: table.require("u")?,
            sigma_meas: table.require("sigma_meas")?,
            sigma_true: opt("sigma_true")?,
            v_true: opt("v_true")?,
            f2_ref: opt("f2_ref")?,
            xi_true: opt("xi_true")?,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.to_table()?.save(path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_table(&SignalTable::load(path)?)
    }
}
