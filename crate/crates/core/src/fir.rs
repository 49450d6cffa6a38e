//! Unity-gain FIR low-pass used to strip chattering from the injection
//! signal before reshaping.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::signal::TimeSeries;

/// Hamming-windowed sinc kernel normalised to unit DC gain.
#[derive(Debug, Clone, PartialEq)]
pub struct FirKernel {
    dt: f64,
    cutoff: f64,
    taps: Vec<f64>,
}

impl FirKernel {
    /// Kernel length is `4 / (cutoff dt)` rounded to the nearest odd integer.
    pub fn lowpass(cutoff: f64, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::invalid("FIR filter", format!("dt must be positive, got {dt}")));
        }
        let nyquist = 0.5 / dt;
        if !(cutoff > 0.0 && cutoff < nyquist) {
            return Err(Error::invalid(
                "FIR filter",
                format!("cutoff {cutoff} Hz outside the open interval (0, {nyquist}) Hz"),
            ));
        }
        let mut len = (4.0 / (cutoff * dt)).round().max(1.0) as usize;
        if len.is_multiple_of(2) {
            len += 1;
        }
        let mid = (len / 2) as f64;
        let fc = cutoff * dt;
        let mut taps: Vec<f64> = (0..len)
            .map(|k| {
                let x = k as f64 - mid;
                let sinc = if x == 0.0 {
                    2.0 * fc
                } else {
                    (2.0 * PI * fc * x).sin() / (PI * x)
                };
                let window = if len == 1 {
                    1.0
                } else {
                    0.54 - 0.46 * (2.0 * PI * k as f64 / (len - 1) as f64).cos()
                };
                sinc * window
            })
            .collect();
        let sum: f64 = taps.iter().sum();
        taps.iter_mut().for_each(|t| *t /= sum);
        Ok(Self { dt, cutoff, taps })
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// Zero-phase response of the centred kernel at `freq` Hz.
    pub fn freq_response(&self, freq: f64) -> Complex64 {
        let mid = (self.taps.len() / 2) as f64;
        let w = 2.0 * PI * freq * self.dt;
        self.taps
            .iter()
            .enumerate()
            .map(|(k, &h)| h * Complex64::from_polar(1.0, -w * (k as f64 - mid)))
            .sum()
    }

    /// Centred convolution. Near the ends the kernel is truncated to the
    /// available samples and renormalised, so constants pass unchanged.
    pub fn apply(&self, x: &TimeSeries) -> Result<TimeSeries> {
        if (x.dt() - self.dt).abs() > 1e-9 * self.dt {
            return Err(Error::invalid(
                "FIR filter",
                format!("kernel built for dt={} applied to series with dt={}", self.dt, x.dt()),
            ));
        }
        let v = x.values();
        let n = v.len() as isize;
        let half = (self.taps.len() / 2) as isize;
        let out = (0..n)
            .map(|i| {
                let lo = (i - half).max(0);
                let hi = (i + half).min(n - 1);
                let (mut acc, mut norm) = (0.0, 0.0);
                for j in lo..=hi {
                    let h = self.taps[(j - i + half) as usize];
                    acc += h * v[j as usize];
                    norm += h;
                }
                acc / norm
            })
            .collect();
        TimeSeries::new(x.dt(), out)
    }
}

/// Filters `x` with a [`FirKernel::lowpass`] at `cutoff` Hz.
pub fn fir_lowpass(x: &TimeSeries, cutoff: f64) -> Result<TimeSeries> {
    FirKernel::lowpass(cutoff, x.dt())?.apply(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::SamplingConfig;

    #[test]
    fn length_is_odd_and_dc_is_unity() {
        let k = FirKernel::lowpass(10.0, 1e-3).unwrap();
        assert_eq!(k.taps().len(), 401);
        let k = FirKernel::lowpass(8.0, 1e-3).unwrap();
        assert_eq!(k.taps().len(), 501);
        assert!((k.taps().iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!((k.freq_response(0.0).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn constants_pass_unchanged() {
        let x = TimeSeries::constant(1e-3, 300, 2.5).unwrap();
        let y = fir_lowpass(&x, 20.0).unwrap();
        assert_eq!(y.len(), x.len());
        assert!(y.values().iter().all(|v| (v - 2.5).abs() < 1e-12));
    }

    #[test]
    fn nyquist_is_suppressed() {
        let dt = 1e-3;
        let k = FirKernel::lowpass(20.0, dt).unwrap();
        assert!(k.freq_response(0.5 / dt).norm() < 0.05);
        let x = TimeSeries::new(dt, (0..2000).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect()).unwrap();
        let y = k.apply(&x).unwrap();
        let half = k.taps().len() / 2;
        let interior = &y.values()[half..y.len() - half];
        assert!(interior.iter().all(|v| v.abs() < 0.05));
    }

    #[test]
    fn passband_sine_keeps_its_amplitude() {
        let (dt, cutoff) = (1e-3, 10.0);
        let k = FirKernel::lowpass(cutoff, dt).unwrap();
        let f = 0.1 * cutoff;
        assert!((k.freq_response(f).norm() - 1.0).abs() < 0.02);
        let cfg = SamplingConfig::new(dt, 10.0, 0).unwrap();
        let x = TimeSeries::from_fn(&cfg, |t| (2.0 * PI * f * t).sin()).unwrap();
        let y = k.apply(&x).unwrap();
        let half = k.taps().len() / 2;
        let peak = y.values()[half..y.len() - half]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        assert!((peak - 1.0).abs() < 0.02, "{peak}");
    }

    #[test]
    fn rejects_cutoffs_outside_nyquist_band() {
        assert!(FirKernel::lowpass(0.0, 1e-3).is_err());
        assert!(FirKernel::lowpass(500.0, 1e-3).is_err());
        assert!(FirKernel::lowpass(-1.0, 1e-3).is_err());
        assert!(FirKernel::lowpass(499.0, 1e-3).is_ok());
    }
}
