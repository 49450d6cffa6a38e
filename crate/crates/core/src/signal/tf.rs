use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly;
use crate::error::{Error, Result};

/// A proper, stable rational transfer function in the Laplace variable `s`.
///
/// Coefficients are stored in ascending degree, so the steady-state gain is
/// `num[0] / den[0]`. Both constant terms are nonzero: the function has no
/// free integrator or differentiator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTf", into = "RawTf")]
pub struct RationalTF {
    num: Vec<f64>,
    den: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTf {
    num: Vec<f64>,
    den: Vec<f64>,
}

impl TryFrom<RawTf> for RationalTF {
    type Error = Error;
    fn try_from(raw: RawTf) -> Result<Self> {
        RationalTF::new(raw.num, raw.den)
    }
}

impl From<RationalTF> for RawTf {
    fn from(tf: RationalTF) -> Self {
        RawTf {
            num: tf.num,
            den: tf.den,
        }
    }
}

/// A first- or second-order polynomial factor normalised to a unit constant
/// term: `1 + p1 s` or `1 + p1 s + p2 s^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Factor {
    First(f64),
    Second(f64, f64),
}

impl Factor {
    pub fn coefficients(&self) -> Vec<f64> {
        match *self {
            Factor::First(p1) => vec![1.0, p1],
            Factor::Second(p1, p2) => vec![1.0, p1, p2],
        }
    }

    pub fn order(&self) -> usize {
        match self {
            Factor::First(_) => 1,
            Factor::Second(..) => 2,
        }
    }

    /// Magnitude of the root(s) in rad/s.
    pub fn corner(&self) -> f64 {
        match *self {
            Factor::First(p1) => 1.0 / p1.abs(),
            Factor::Second(_, p2) => 1.0 / p2.abs().sqrt(),
        }
    }
}

/// `k * prod(zeros) / prod(poles)` with unit-constant factors.
#[derive(Debug, Clone, PartialEq)]
pub struct Factored {
    pub gain: f64,
    pub zeros: Vec<Factor>,
    pub poles: Vec<Factor>,
}

impl RationalTF {
    pub fn new(num: Vec<f64>, den: Vec<f64>) -> Result<Self> {
        if num.is_empty() || den.is_empty() {
            return Err(Error::invalid("transfer function", "empty coefficient list"));
        }
        if num.iter().chain(&den).any(|c| !c.is_finite()) {
            return Err(Error::invalid("transfer function", "non-finite coefficient"));
        }
        let num = poly::trim(num);
        let den = poly::trim(den);
        if num[0] == 0.0 || den[0] == 0.0 {
            return Err(Error::invalid(
                "transfer function",
                "zero constant term (free integrator or differentiator)",
            ));
        }
        if poly::degree(&num) > poly::degree(&den) {
            return Err(Error::invalid(
                "transfer function",
                format!(
                    "improper: numerator degree {} exceeds denominator degree {}",
                    poly::degree(&num),
                    poly::degree(&den)
                ),
            ));
        }
        if !is_hurwitz(&den) {
            return Err(Error::invalid(
                "transfer function",
                "denominator has a root with Re >= 0",
            ));
        }
        Ok(Self { num, den })
    }

    pub fn unity() -> Self {
        Self {
            num: vec![1.0],
            den: vec![1.0],
        }
    }

    pub fn num(&self) -> &[f64] {
        &self.num
    }

    pub fn den(&self) -> &[f64] {
        &self.den
    }

    pub fn dc_gain(&self) -> f64 {
        self.num[0] / self.den[0]
    }

    /// Limit of `|H(jw)|` as `w -> inf`: ratio of leading coefficients when the
    /// degrees match, zero for strictly proper functions.
    pub fn high_frequency_gain(&self) -> f64 {
        if poly::degree(&self.num) == poly::degree(&self.den) {
            (self.num[self.num.len() - 1] / self.den[self.den.len() - 1]).abs()
        } else {
            0.0
        }
    }

    /// `H(jw)`.
    pub fn freq_response(&self, omega: f64) -> Complex64 {
        let s = Complex64::new(0.0, omega);
        poly::eval(&self.num, s) / poly::eval(&self.den, s)
    }

    /// Series connection `self * other`.
    pub fn cascade(&self, other: &Self) -> Self {
        Self {
            num: poly::trim(poly::mul(&self.num, &other.num)),
            den: poly::trim(poly::mul(&self.den, &other.den)),
        }
    }

    pub fn scaled(&self, k: f64) -> Result<Self> {
        Self::new(self.num.iter().map(|c| c * k).collect(), self.den.clone())
    }

    /// Splits numerator and denominator into real first-order and
    /// complex-pair second-order factors.
    pub fn factor(&self) -> Factored {
        Factored {
            gain: self.dc_gain(),
            zeros: factors_of(&self.num),
            poles: factors_of(&self.den),
        }
    }
}

fn factors_of(p: &[f64]) -> Vec<Factor> {
    let roots = poly::roots(p);
    let mut out = Vec::new();
    let mut i = 0;
    while i < roots.len() {
        let r = roots[i];
        if r.im == 0.0 {
            out.push(Factor::First(-1.0 / r.re));
            i += 1;
        } else {
            // roots() emits conjugate pairs back to back
            let n2 = r.norm_sqr();
            out.push(Factor::Second(-2.0 * r.re / n2, 1.0 / n2));
            i += 2;
        }
    }
    out
}

fn is_hurwitz(den: &[f64]) -> bool {
    match poly::degree(den) {
        0 => true,
        1 | 2 => {
            let positive = den.iter().all(|&c| c > 0.0);
            let negative = den.iter().all(|&c| c < 0.0);
            positive || negative
        }
        _ => poly::roots(den).iter().all(|r| r.re < 0.0),
    }
}
