//! Bilinear discretization of the coupling and of `G`, their cascade, and
//! how closely the discrete `G` follows the continuous one up to 50 Hz.
//!
//!     cargo run --example discretize_roundtrip

use std::f64::consts::PI;

use eoi_force::plant::{rig_coupling, RIG_MASS};
use eoi_force::shaping::{discretize, invert_shaper};
use eoi_force::signal::{rms, rmse, SamplingConfig, TimeSeries};

fn main() -> eoi_force::Result<()> {
    let dt = 1e-3;
    let coupling = rig_coupling();
    let forward_tf = coupling.to_tf()?.scaled(1.0 / RIG_MASS)?;
    let g_tf = invert_shaper(&coupling, RIG_MASS)?;
    let forward = discretize(&forward_tf, dt)?;
    let g = discretize(&g_tf, dt)?;
    println!(
        "dc gains: S12/m {:.12} (continuous {:.12}), G {:.12} (continuous {:.12})",
        forward.dc_gain(),
        forward_tf.dc_gain(),
        g.dc_gain(),
        g_tf.dc_gain()
    );

    let worst = (1..=500)
        .map(|i| {
            let w = 2.0 * PI * 0.1 * i as f64;
            (g.freq_response(w).norm() / g_tf.freq_response(w).norm() - 1.0).abs()
        })
        .fold(0.0, f64::max);
    println!("worst |G| mismatch up to 50 Hz: {:.4} %", 100.0 * worst);

    let cfg = SamplingConfig::new(dt, 5.0, 0)?;
    let x = TimeSeries::from_fn(&cfg, |t| {
        (2.0 * PI * 5.0 * t).sin() + 0.5 * (2.0 * PI * 1.5 * t + 0.3).sin()
    })?;
    let y = g.apply(&forward.apply(&x)?)?;
    let k0 = x.index_at(0.5);
    let e = rmse(&y.values()[k0..], &x.values()[k0..]);
    println!(
        "round trip rmse {:.3e} ({:.2e} % of signal rms)",
        e,
        100.0 * e / rms(&x.values()[k0..])
    );
    Ok(())
}
