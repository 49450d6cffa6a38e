use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{SamplingConfig, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoadKind {
    Saw,
    Step,
    Sine,
    HoldSequence,
}

/// Sign of the applied environmental force relative to the profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoadDirection {
    /// Applied force is the negated profile; pushes against positive motion.
    #[default]
    Opposing,
    Assisting,
}

impl LoadDirection {
    pub fn sign(self) -> f64 {
        match self {
            LoadDirection::Opposing => -1.0,
            LoadDirection::Assisting => 1.0,
        }
    }
}

/// Environmental force profile `F2(t)`, in newtons.
///
/// * `saw`: rises linearly from `offset` to `offset + amplitude` over `rise`
///   seconds (default: the whole period), falls back over `fall` seconds
///   (default 0, an instant drop) and rests at `offset` for the remainder.
/// * `step`: `offset` before `onset`, `offset + amplitude` from then on.
/// * `sine`: `offset + amplitude sin(2 pi t / period)`.
/// * `hold-sequence`: `offset + levels[i]`, each held for `dwell` seconds,
///   cycling. With `rise` set, each change of level is a linear ramp over
///   the first `rise` seconds of the new dwell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadProfile {
    pub kind: LoadKind,
    #[serde(default)]
    pub amplitude: f64,
    #[serde(default)]
    pub period: f64,
    #[serde(default)]
    pub offset: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rise: Option<f64>,
    #[serde(default)]
    pub fall: f64,
    #[serde(default)]
    pub onset: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<f64>,
    #[serde(default)]
    pub dwell: f64,
    #[serde(default)]
    pub direction: LoadDirection,
}

impl LoadProfile {
    fn blank(kind: LoadKind) -> Self {
        Self {
            kind,
            amplitude: 0.0,
            period: 0.0,
            offset: 0.0,
            rise: None,
            fall: 0.0,
            onset: 0.0,
            levels: Vec::new(),
            dwell: 0.0,
            direction: LoadDirection::Opposing,
        }
    }

    pub fn zero() -> Self {
        Self::step(0.0, 0.0)
    }

    pub fn saw(amplitude: f64, period: f64, offset: f64) -> Self {
        Self {
            amplitude,
            period,
            offset,
            ..Self::blank(LoadKind::Saw)
        }
    }

    pub fn step(amplitude: f64, onset: f64) -> Self {
        Self {
            amplitude,
            onset,
            ..Self::blank(LoadKind::Step)
        }
    }

    pub fn sine(amplitude: f64, period: f64, offset: f64) -> Self {
        Self {
            amplitude,
            period,
            offset,
            ..Self::blank(LoadKind::Sine)
        }
    }

    pub fn hold_sequence(levels: Vec<f64>, dwell: f64) -> Self {
        Self {
            levels,
            dwell,
            ..Self::blank(LoadKind::HoldSequence)
        }
    }

    pub fn with_ramps(mut self, rise: f64, fall: f64) -> Self {
        self.rise = Some(rise);
        self.fall = fall;
        self
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    pub fn with_direction(mut self, direction: LoadDirection) -> Self {
        self.direction = direction;
        self
    }

    fn rise_time(&self) -> f64 {
        self.rise.unwrap_or(self.period)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: String| Err(Error::invalid("load profile", reason));
        let finite = [
            self.amplitude,
            self.period,
            self.offset,
            self.fall,
            self.onset,
            self.dwell,
        ]
        .iter()
        .chain(self.rise.iter())
        .chain(&self.levels)
        .all(|v| v.is_finite());
        if !finite {
            return bad("all fields must be finite".into());
        }
        if self.kind != LoadKind::HoldSequence && self.amplitude < 0.0 {
            return bad(format!("amplitude must be non-negative, got {}", self.amplitude));
        }
        if self.kind != LoadKind::Saw && self.fall != 0.0 {
            return bad("fall applies to saw profiles only".into());
        }
        if !matches!(self.kind, LoadKind::Saw | LoadKind::HoldSequence) && self.rise.is_some() {
            return bad("rise applies to saw and hold-sequence profiles only".into());
        }
        if self.kind != LoadKind::HoldSequence && (!self.levels.is_empty() || self.dwell != 0.0) {
            return bad("levels and dwell apply to hold-sequence profiles only".into());
        }
        match self.kind {
            LoadKind::Saw => {
                let rise = self.rise_time();
                if !(self.period > 0.0) {
                    return bad(format!("saw period must be positive, got {}", self.period));
                }
                if !(rise > 0.0) || self.fall < 0.0 || rise + self.fall > self.period * (1.0 + 1e-12) {
                    return bad(format!(
                        "saw needs rise > 0, fall >= 0 and rise + fall <= period; got {rise}, {}, {}",
                        self.fall, self.period
                    ));
                }
            }
            LoadKind::Sine if !(self.period > 0.0) => {
                return bad(format!("sine period must be positive, got {}", self.period));
            }
            LoadKind::Step if self.onset < 0.0 => {
                return bad(format!("step onset must be non-negative, got {}", self.onset));
            }
            LoadKind::HoldSequence => {
                if self.levels.is_empty() || !(self.dwell > 0.0) {
                    return bad("hold-sequence needs at least one level and a positive dwell".into());
                }
                if let Some(rise) = self.rise {
                    if !(rise >= 0.0 && rise < self.dwell) {
                        return bad(format!("hold-sequence rise must lie in [0, dwell), got {rise}"));
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Upper bound on `|F2(t)|`.
    pub fn bound(&self) -> f64 {
        match self.kind {
            LoadKind::HoldSequence => self.levels.iter().map(|l| (self.offset + l).abs()).fold(0.0, f64::max),
            _ => self.amplitude + self.offset.abs(),
        }
    }

    /// Profile value at time `t`, before the direction sign is applied.
    pub fn value(&self, t: f64) -> f64 {
        match self.kind {
            LoadKind::Saw => {
                let tau = t.rem_euclid(self.period);
                let rise = self.rise_time();
                let ramp = if tau < rise {
                    tau / rise
                } else if tau < rise + self.fall {
                    1.0 - (tau - rise) / self.fall
                } else {
                    0.0
                };
                self.offset + self.amplitude * ramp
            }
            LoadKind::Step => self.offset + if t >= self.onset { self.amplitude } else { 0.0 },
            LoadKind::Sine => self.offset + self.amplitude * (2.0 * std::f64::consts::PI * t / self.period).sin(),
            LoadKind::HoldSequence => {
                let n = self.levels.len();
                let cycle = (t / self.dwell).floor() as usize;
                let level = self.levels[cycle % n];
                let tau = t - cycle as f64 * self.dwell;
                let rise = self.rise.unwrap_or(0.0);
                if cycle == 0 || tau >= rise {
                    return self.offset + level;
                }
                let prev = self.levels[(cycle - 1) % n];
                self.offset + prev + (level - prev) * tau / rise
            }
        }
    }

    /// Applied force at `t`, sign included.
    pub fn applied(&self, t: f64) -> f64 {
        self.direction.sign() * self.value(t)
    }
}

/// Samples the profile (without the direction sign) on the config grid.
pub fn generate_load(load: &LoadProfile, config: &SamplingConfig) -> Result<TimeSeries> {
    load.validate()?;
    config.validate()?;
    let series = TimeSeries::from_fn(config, |t| load.value(t))?;
    let bound = load.bound();
    if series.max_abs() > bound * (1.0 + 1e-12) {
        return Err(Error::invalid(
            "load profile",
            format!("profile exceeds its bound {bound}"),
        ));
    }
    Ok(series)
}
