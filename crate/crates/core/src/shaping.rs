//! Discrete realisation of rational transfer functions and of the reshaping
//! filter `G(s) = m / S12(s)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{poly, same_dt, Factor, LeadLagShaper, RationalTF, Stage, TimeSeries};

/// `m / S12(s)` in expanded form. Fails when a stage has a pole but no zero.
pub fn invert_shaper(shaper: &LeadLagShaper, m: f64) -> Result<RationalTF> {
    shaper.inverse(m)?.to_tf()
}

/// One first- or second-order section in transposed direct form II with
/// unit DC gain. `a[0]` is implicitly 1.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Section {
    b: [f64; 3],
    a: [f64; 3],
}

impl Section {
    /// Bilinear image of `num(s) / den(s)` where both polynomials have unit
    /// constant terms and degree at most 2.
    fn bilinear(num: &[f64], den: &[f64], dt: f64) -> Self {
        let k = 2.0 / dt;
        let order = poly::degree(num).max(poly::degree(den));
        let map = |p: &[f64]| -> [f64; 3] {
            let c = |i: usize| p.get(i).copied().unwrap_or(0.0);
            match order {
                0 => [c(0), 0.0, 0.0],
                1 => [c(0) + c(1) * k, c(0) - c(1) * k, 0.0],
                _ => {
                    let k2 = k * k;
                    [
                        c(0) + c(1) * k + c(2) * k2,
                        2.0 * c(0) - 2.0 * c(2) * k2,
                        c(0) - c(1) * k + c(2) * k2,
                    ]
                }
            }
        };
        let (mut b, a) = (map(num), map(den));
        let a0 = a[0];
        let a = a.map(|x| x / a0);
        b.iter_mut().for_each(|x| *x /= a0);
        // force H(1) = 1 exactly
        let scale = a.iter().sum::<f64>() / b.iter().sum::<f64>();
        b.iter_mut().for_each(|x| *x *= scale);
        Section { b, a }
    }

    fn is_stable(&self) -> bool {
        let [_, a1, a2] = self.a;
        a2.abs() < 1.0 && a1.abs() < 1.0 + a2
    }

    #[inline]
    fn step(&self, state: &mut [f64; 2], x: f64) -> f64 {
        let y = self.b[0] * x + state[0];
        state[0] = self.b[1] * x - self.a[1] * y + state[1];
        state[1] = self.b[2] * x - self.a[2] * y;
        y
    }

    fn response(&self, z_inv: Complex64) -> Complex64 {
        let p = |c: &[f64; 3]| c[0] + z_inv * (c[1] + z_inv * c[2]);
        p(&self.b) / p(&self.a)
    }
}

/// Cascade of bilinear sections followed by a static gain.
///
/// The delay registers live in the filter: [`DiscreteFilter::step`] streams
/// one sample at a time, while [`DiscreteFilter::apply`] filters a whole
/// series from rest without touching them.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteFilter {
    dt: f64,
    gain: f64,
    sections: Vec<Section>,
    states: Vec<[f64; 2]>,
}

impl DiscreteFilter {
    pub fn unity(dt: f64) -> Result<Self> {
        Self::assemble(dt, 1.0, Vec::new())
    }

    /// Bilinear transform without prewarping, section by section.
    pub fn discretize(tf: &RationalTF, dt: f64) -> Result<Self> {
        check_dt(dt)?;
        let f = tf.factor();
        let sections = pair_sections(&f.zeros, &f.poles)
            .into_iter()
            .map(|(num, den)| Section::bilinear(&num, &den, dt))
            .collect();
        Self::assemble(dt, f.gain, sections)
    }

    /// As [`DiscreteFilter::discretize`], but refuses any pole or zero whose
    /// corner lies at or above the Nyquist frequency `pi / dt`.
    pub fn discretize_strict(tf: &RationalTF, dt: f64) -> Result<Self> {
        check_dt(dt)?;
        let nyquist = PI / dt;
        let f = tf.factor();
        if let Some(corner) = f
            .zeros
            .iter()
            .chain(&f.poles)
            .map(Factor::corner)
            .find(|&w| w >= nyquist)
        {
            return Err(Error::invalid(
                "discretization",
                format!("corner at {corner:.6} rad/s is not below the Nyquist frequency {nyquist:.6} rad/s"),
            ));
        }
        Self::discretize(tf, dt)
    }

    /// One first-order section per non-identity stage, taken straight from
    /// the time constants.
    pub fn from_shaper(shaper: &LeadLagShaper, dt: f64) -> Result<Self> {
        check_dt(dt)?;
        if shaper.stages().iter().any(|s| s.c == 0.0 && s.b > 0.0) {
            return Self::discretize(&shaper.to_tf()?, dt);
        }
        let sections = shaper
            .stages()
            .iter()
            .filter(|s| !s.is_identity())
            .map(|s| Section::bilinear(&poly::trim(vec![1.0, s.b]), &poly::trim(vec![1.0, s.c]), dt))
            .collect();
        Self::assemble(dt, shaper.gain(), sections)
    }

    fn assemble(dt: f64, gain: f64, sections: Vec<Section>) -> Result<Self> {
        check_dt(dt)?;
        if let Some(k) = sections.iter().position(|s| !s.is_stable()) {
            return Err(Error::Numerical(format!(
                "section {k} has a pole on or outside the unit circle"
            )));
        }
        if sections.iter().any(|s| s.a.iter().chain(&s.b).any(|c| !c.is_finite())) || !gain.is_finite() {
            return Err(Error::Numerical("non-finite filter coefficient".into()));
        }
        let states = vec![[0.0; 2]; sections.len()];
        Ok(Self {
            dt,
            gain,
            sections,
            states,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn sections(&self) -> usize {
        self.sections.len()
    }

    /// Gain at `z = 1`.
    pub fn dc_gain(&self) -> f64 {
        self.sections
            .iter()
            .fold(self.gain, |g, s| g * s.b.iter().sum::<f64>() / s.a.iter().sum::<f64>())
    }

    /// Complex gain at `omega` rad/s, i.e. at `z = exp(j omega dt)`.
    pub fn freq_response(&self, omega: f64) -> Complex64 {
        let z_inv = Complex64::from_polar(1.0, -omega * self.dt);
        self.sections
            .iter()
            .fold(Complex64::new(self.gain, 0.0), |h, s| h * s.response(z_inv))
    }

    pub fn reset(&mut self) {
        self.states.iter_mut().for_each(|s| *s = [0.0; 2]);
    }

    /// Loads the registers with the steady state for a constant input `x`.
    pub fn reset_to_steady(&mut self, x: f64) {
        for (sec, st) in self.sections.iter().zip(&mut self.states) {
            st[1] = (sec.b[2] - sec.a[2]) * x;
            st[0] = (sec.b[1] - sec.a[1]) * x + st[1];
        }
    }

    #[inline]
    pub fn step(&mut self, x: f64) -> f64 {
        let mut y = x;
        for (sec, st) in self.sections.iter().zip(&mut self.states) {
            y = sec.step(st, y);
        }
        self.gain * y
    }

    /// Causal filtering of a whole series from zero initial state.
    pub fn apply(&self, x: &TimeSeries) -> Result<TimeSeries> {
        if !same_dt(self.dt, x.dt()) {
            return Err(Error::invalid(
                "filter",
                format!(
                    "filter sampled at dt={} applied to a series with dt={}",
                    self.dt,
                    x.dt()
                ),
            ));
        }
        let mut f = self.clone();
        f.reset();
        let out: Vec<f64> = x.values().iter().map(|&v| f.step(v)).collect();
        TimeSeries::new(x.dt(), out)
    }
}

/// Permissive bilinear discretization, see [`DiscreteFilter::discretize`].
pub fn discretize(tf: &RationalTF, dt: f64) -> Result<DiscreteFilter> {
    DiscreteFilter::discretize(tf, dt)
}

/// Filters `x` through `filter` from rest.
pub fn apply_filter(filter: &DiscreteFilter, x: &TimeSeries) -> Result<TimeSeries> {
    filter.apply(x)
}

fn check_dt(dt: f64) -> Result<()> {
    if dt.is_finite() && dt > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            "discretization",
            format!("dt must be positive, got {dt}"),
        ))
    }
}

/// Groups factors into polynomials of degree <= 2 and pairs numerator with
/// denominator groups of equal or higher degree.
fn pair_sections(zeros: &[Factor], poles: &[Factor]) -> Vec<(Vec<f64>, Vec<f64>)> {
    let zs = group(zeros);
    let ps = group(poles);
    let mut out: Vec<(Vec<f64>, Vec<f64>)> = ps.into_iter().map(|p| (vec![1.0], p)).collect();
    for (slot, z) in out.iter_mut().zip(zs) {
        slot.0 = z;
    }
    out
}

fn group(factors: &[Factor]) -> Vec<Vec<f64>> {
    let mut sorted: Vec<Factor> = factors.to_vec();
    sorted.sort_by(|a, b| a.corner().total_cmp(&b.corner()));
    let mut groups = Vec::new();
    let mut pending: Option<f64> = None;
    for f in sorted {
        match f {
            Factor::Second(..) => groups.push(f.coefficients()),
            Factor::First(p) => match pending.take() {
                Some(q) => groups.push(poly::mul(&[1.0, q], &[1.0, p])),
                None => pending = Some(p),
            },
        }
    }
    if let Some(q) = pending {
        groups.push(vec![1.0, q]);
    }
    // highest degree first so that pairing never makes a section improper
    groups.sort_by_key(|g| std::cmp::Reverse(g.len()));
    groups
}

/// JSON description of the reshaping filter: the coupling shaper, the mass
/// that turns it into `G = m / S12`, and the sampling period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterSpec {
    pub a: f64,
    pub stages: Vec<Stage>,
    pub m: f64,
    pub dt: f64,
}

impl FilterSpec {
    pub fn new(coupling: &LeadLagShaper, m: f64, dt: f64) -> Self {
        Self {
            a: coupling.gain(),
            stages: coupling.stages().to_vec(),
            m,
            dt,
        }
    }

    pub fn coupling(&self) -> Result<LeadLagShaper> {
        LeadLagShaper::new(self.a, self.stages.clone())
    }

    pub fn g_tf(&self) -> Result<RationalTF> {
        invert_shaper(&self.coupling()?, self.m)
    }

    /// The discrete `g` filter.
    pub fn build(&self) -> Result<DiscreteFilter> {
        DiscreteFilter::from_shaper(&self.coupling()?.inverse(self.m)?, self.dt)
    }
}
