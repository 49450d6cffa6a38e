//! Differentiates sin(pi t) with the super-twisting observer and compares
//! the rate estimate with the analytic derivative.
//!
//!     cargo run --example differentiate_sine

use std::f64::consts::PI;

use eoi_force::signal::{rms, SamplingConfig, TimeSeries};
use eoi_force::sta::{differentiate, ConvergenceRule, StaGains, StaState};

fn main() -> eoi_force::Result<()> {
    let w = PI;
    let lipschitz = 1.1 * w * w;
    let gains = StaGains::from_lipschitz(lipschitz)?;
    println!("L = {lipschitz:.4}, K1 = {:.4}, K2 = {:.4}", gains.k1, gains.k2);

    for dt in [1e-3, 2.5e-4] {
        let cfg = SamplingConfig::new(dt, 60.0, 0)?;
        let sigma = TimeSeries::from_fn(&cfg, |t| (w * t).sin())?;
        let d = differentiate(&sigma, &gains, StaState::default())?;
        let conv = ConvergenceRule::default().detect(&sigma, &d.e, &gains)?;
        let t0 = conv.time().unwrap_or(sigma.duration());
        let k0 = sigma.index_at(t0);
        let err: Vec<f64> = (k0..sigma.len())
            .map(|k| d.x2_hat.values()[k] - w * (w * sigma.time(k)).cos())
            .collect();
        println!(
            "dt = {dt:e}: converged at {t0:.3} s, rate rmse {:.3e} ({:.3} % of amplitude)",
            rms(&err),
            100.0 * rms(&err) / w
        );
    }
    Ok(())
}
