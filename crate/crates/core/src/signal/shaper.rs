use serde::{Deserialize, Serialize};

use super::poly;
use super::tf::RationalTF;
use crate::error::{Error, Result};

/// One `(b s + 1) / (c s + 1)` factor; time constants in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stage {
    pub b: f64,
    pub c: f64,
}

impl Stage {
    pub const IDENTITY: Stage = Stage { b: 0.0, c: 0.0 };

    pub fn new(b: f64, c: f64) -> Self {
        Self { b, c }
    }

    pub fn is_identity(&self) -> bool {
        self.b == 0.0 && self.c == 0.0
    }

    pub fn swapped(&self) -> Self {
        Self { b: self.c, c: self.b }
    }
}

/// Product-form lead-lag shaper `a * prod_k (b_k s + 1) / (c_k s + 1)`.
///
/// A stage is lead-type when `b > c` and lag-type when `c > b`; `(0, 0)` is
/// the identity stage, so the order `n` can be chosen freely.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawShaper", into = "RawShaper")]
pub struct LeadLagShaper {
    a: f64,
    stages: Vec<Stage>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawShaper {
    a: f64,
    stages: Vec<Stage>,
}

impl TryFrom<RawShaper> for LeadLagShaper {
    type Error = Error;
    fn try_from(raw: RawShaper) -> Result<Self> {
        LeadLagShaper::new(raw.a, raw.stages)
    }
}

impl From<LeadLagShaper> for RawShaper {
    fn from(s: LeadLagShaper) -> Self {
        RawShaper {
            a: s.a,
            stages: s.stages,
        }
    }
}

impl LeadLagShaper {
    pub fn new(a: f64, stages: Vec<Stage>) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::invalid("shaper", format!("gain a must be positive, got {a}")));
        }
        if stages.is_empty() {
            return Err(Error::invalid("shaper", "at least one stage is required"));
        }
        for (k, s) in stages.iter().enumerate() {
            if !(s.b.is_finite() && s.c.is_finite() && s.b >= 0.0 && s.c >= 0.0) {
                return Err(Error::invalid(
                    "shaper",
                    format!(
                        "stage {k}: time constants must be finite and >= 0, got b={} c={}",
                        s.b, s.c
                    ),
                ));
            }
        }
        Ok(Self { a, stages })
    }

    /// The pass-through shaper `a = 1` with one identity stage.
    pub fn identity() -> Self {
        Self {
            a: 1.0,
            stages: vec![Stage::IDENTITY],
        }
    }

    pub fn gain(&self) -> f64 {
        self.a
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn order(&self) -> usize {
        self.stages.len()
    }

    /// Steady-state gain, always equal to `a`.
    pub fn dc_gain(&self) -> f64 {
        self.a
    }

    pub fn with_gain(&self, a: f64) -> Result<Self> {
        Self::new(a, self.stages.clone())
    }

    /// True when every stage is the identity: the shaper is a pure gain.
    pub fn is_static(&self) -> bool {
        self.stages.iter().all(Stage::is_identity)
    }

    /// Smallest nonzero time constant across all stages.
    pub fn fastest_time_constant(&self) -> Option<f64> {
        self.stages
            .iter()
            .flat_map(|s| [s.b, s.c])
            .filter(|&t| t > 0.0)
            .min_by(f64::total_cmp)
    }

    /// Largest denominator time constant, which sets the settling time.
    pub fn slowest_pole(&self) -> f64 {
        self.stages.iter().map(|s| s.c).fold(0.0, f64::max)
    }

    /// `a * prod(b_k / c_k)` over stages with `c_k > 0`; `inf` when a stage
    /// has a zero but no pole.
    pub fn high_frequency_gain(&self) -> f64 {
        self.stages.iter().fold(self.a, |g, s| match (s.b > 0.0, s.c > 0.0) {
            (_, true) => g * s.b / s.c,
            (true, false) => f64::INFINITY,
            (false, false) => g,
        })
    }

    /// Expands the product into a rational transfer function.
    pub fn to_tf(&self) -> Result<RationalTF> {
        let mut num = vec![self.a];
        let mut den = vec![1.0];
        for s in &self.stages {
            num = poly::mul(&num, &[1.0, s.b]);
            den = poly::mul(&den, &[1.0, s.c]);
        }
        let (num, den) = (poly::trim(num), poly::trim(den));
        if poly::degree(&num) > poly::degree(&den) {
            let k = self
                .stages
                .iter()
                .position(|s| s.c == 0.0 && s.b > 0.0)
                .expect("an improper product needs a zero-only stage");
            return Err(Error::invalid(
                "shaper",
                format!("stage {k} (b={}, c=0) makes the product improper", self.stages[k].b),
            ));
        }
        RationalTF::new(num, den)
    }

    /// The reciprocal shaper scaled by `m`: gain `m / a`, each stage with
    /// `b` and `c` exchanged.
    pub fn inverse(&self, m: f64) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::invalid("inversion", format!("mass must be positive, got {m}")));
        }
        if let Some(k) = self.stages.iter().position(|s| s.b == 0.0 && s.c > 0.0) {
            return Err(Error::invalid(
                "inversion",
                format!(
                    "stage {k} (b=0, c={}) has no zero; its inverse would be improper",
                    self.stages[k].c
                ),
            ));
        }
        Self::new(m / self.a, self.stages.iter().map(Stage::swapped).collect())
    }
}
