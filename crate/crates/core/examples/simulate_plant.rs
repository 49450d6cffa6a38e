//! Simulates the bundled default scenario and writes the dataset CSV.
//!
//!     cargo run --example simulate_plant [-- out.csv]

use std::path::PathBuf;

use eoi_force::scenario::{bundled, ScenarioFile};

fn main() -> eoi_force::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("default-scenario.csv"));
    let scenario = ScenarioFile::from_json(bundled::DEFAULT)?;
    let data = scenario.simulate()?;
    data.save(&out)?;

    let v = data.v_true.as_ref().expect("simulation fills truth");
    let f2 = data.f2_ref.as_ref().expect("simulation fills truth");
    let reversals = count_reversals(v.values());
    let stuck = v.values().iter().filter(|&&x| x == 0.0).count();
    println!("{} samples at dt = {} s -> {}", data.len(), data.dt(), out.display());
    println!("peak load {:.0} N, peak velocity {:.3} m/s", f2.max_abs(), v.max_abs());
    println!("velocity reversals {reversals}, samples at rest {stuck}");
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
