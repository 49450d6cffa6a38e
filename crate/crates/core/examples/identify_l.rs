//! Sweeps the Lipschitz bound over a log grid, prints the squared output
//! error curve, and re-runs the estimator with the minimiser.
//!
//!     cargo run --release --example identify_l

use eoi_force::estimate::{estimate_force, force_metrics};
use eoi_force::identify::{identify_l, log_grid, DEFAULT_L_SKIP};
use eoi_force::scenario::{bundled, ScenarioFile};
use eoi_force::sta::StaGains;

fn main() -> eoi_force::Result<()> {
    let scenario = ScenarioFile::from_json(bundled::DEFAULT)?;
    let data = scenario.simulate()?;
    let report = identify_l(&data, &log_grid(0.5, 50.0, 30), DEFAULT_L_SKIP)?;
    let best = report.objective;
    for s in &report.samples {
        let bar = "#".repeat((40.0 * (best / s.objective)).round() as usize);
        println!("L {:8.3}  sse {:.4e}  {bar}", s.params[0], s.objective);
    }
    let l = report.optimum[0];
    println!(
        "minimum at L = {l:.3} ({} local minima on the grid)",
        report.curve_minima()
    );

    let config = scenario.estimator()?.with_gains(StaGains::from_lipschitz(l)?);
    let est = estimate_force(&data, &config)?;
    let m = force_metrics(&est.f2_hat, data.require_f2_ref()?, est.skip)?;
    println!(
        "estimate with identified L: rmse {:.3} % of peak",
        100.0 * m.relative_rmse
    );
    Ok(())
}
