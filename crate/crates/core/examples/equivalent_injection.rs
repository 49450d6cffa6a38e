//! Recovers a constant matched disturbance from the averaged switching term
//! `K2 sign(e)` of the observer.
//!
//!     cargo run --example equivalent_injection

use eoi_force::fir::fir_lowpass;
use eoi_force::signal::{mean, SamplingConfig, TimeSeries};
use eoi_force::sta::{differentiate, eoi, StaGains, StaState};

fn main() -> eoi_force::Result<()> {
    let xi0 = 1.0;
    let cfg = SamplingConfig::new(1e-3, 30.0, 0)?;
    // sigma'' = xi0 with no nominal dynamics
    let sigma = TimeSeries::from_fn(&cfg, |t| 0.5 * xi0 * t * t)?;
    let gains = StaGains::from_lipschitz(2.0)?;
    let d = differentiate(&sigma, &gains, StaState::default())?;
    let chi = eoi(&d.e, &gains);
    let smooth = fir_lowpass(&chi, 5.0)?;

    let half = chi.len() / 2;
    println!("raw injection switches between {:+.3} and {:+.3}", -gains.k2, gains.k2);
    println!(
        "mean of raw injection, last half:      {:.5}",
        mean(&chi.values()[half..])
    );
    println!(
        "mean of filtered injection, last half: {:.5}",
        mean(&smooth.values()[half..])
    );
    println!("true disturbance:                      {xi0:.5}");
    Ok(())
}
