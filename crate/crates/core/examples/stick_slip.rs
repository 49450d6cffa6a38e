//! A larger reference swing makes the actuator stop and reverse. Near each
//! reversal the estimated velocity sign is unreliable, which shows up in
//! the force estimate; a smaller identified L keeps the rate jitter down.
//!
//!     cargo run --release --example stick_slip

use eoi_force::estimate::{estimate_force, force_metrics, plateau_errors};
use eoi_force::identify::{identify_l, log_grid, DEFAULT_L_SKIP};
use eoi_force::scenario::{bundled, ScenarioFile};
use eoi_force::signal::sign;
use eoi_force::sta::StaGains;

fn main() -> eoi_force::Result<()> {
    let scenario = ScenarioFile::from_json(bundled::STICK_SLIP)?;
    let data = scenario.simulate()?;
    let v = data.v_true.as_ref().expect("simulation fills truth");
    let f2 = data.require_f2_ref()?;
    let reversals = count_reversals(v.values());
    let rest = v.values().iter().filter(|&&x| x == 0.0).count();
    println!("velocity reversals {reversals}, samples at rest {rest}");

    let l_id = identify_l(&data, &log_grid(0.5, 50.0, 30), DEFAULT_L_SKIP)?.optimum[0];
    for l in [150.0, l_id] {
        let config = scenario.estimator()?.with_gains(StaGains::from_lipschitz(l)?);
        let est = estimate_force(&data, &config)?;
        let k0 = est.skip_index();
        let moving: Vec<usize> = (k0..data.len()).filter(|&k| v.values()[k] != 0.0).collect();
        let wrong = moving
            .iter()
            .filter(|&&k| sign(est.x2_hat.values()[k]) != sign(v.values()[k]))
            .count();
        let m = force_metrics(&est.f2_hat, f2, est.skip)?;
        let worst = plateau_errors(&est.f2_hat, f2, est.skip, 0.5, 0.3)?
            .iter()
            .map(|p| p.relative_error)
            .fold(0.0, f64::max);
        println!(
            "L {l:7.2}: velocity sign wrong on {:.2} % of moving samples, rmse {:.3} % of peak, worst plateau {:.2} %",
            100.0 * wrong as f64 / moving.len() as f64,
            100.0 * m.relative_rmse,
            100.0 * worst
        );
    }
    Ok(())
}

/// Sign changes of the velocity, looking across stretches at rest.
fn count_reversals(v: &[f64]) -> usize {
    let mut last = 0.0;
    let mut n = 0;
    for &x in v.iter().filter(|x| **x != 0.0) {
        if last * x < 0.0 {
            n += 1;
        }
        last = x;
    }
    n
}
