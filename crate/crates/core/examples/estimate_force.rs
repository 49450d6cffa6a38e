//! End-to-end estimation on the default scenario: simulate, estimate,
//! score against the reference force and write an SVG overlay.
//!
//!     cargo run --release --example estimate_force [-- overlay.svg]

use std::path::PathBuf;

use eoi_force::estimate::{estimate_force, force_metrics, plateau_errors};
use eoi_force::plot::save_overlay;
use eoi_force::scenario::{bundled, ScenarioFile};

fn main() -> eoi_force::Result<()> {
    let svg = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("force-overlay.svg"));
    let scenario = ScenarioFile::from_json(bundled::DEFAULT)?;
    let data = scenario.simulate()?;
    let config = scenario.estimator()?;
    let est = estimate_force(&data, &config)?;
    let f2 = data.f2_ref.as_ref().expect("simulation fills truth");

    let m = force_metrics(&est.f2_hat, f2, est.skip)?;
    println!("convergence: {:?}, evaluation from {:.3} s", est.convergence, est.skip);
    println!(
        "rmse {:.2} N = {:.3} % of the {:.0} N peak, worst error {:.1} N",
        m.rmse,
        100.0 * m.relative_rmse,
        m.peak_reference,
        m.peak_error
    );
    for p in plateau_errors(&est.f2_hat, f2, est.skip, 0.5, 0.3)? {
        println!(
            "  plateau {:5.1}-{:5.1} s at {:7.1} N: mean estimate {:8.2} N ({:.3} %)",
            p.start,
            p.end,
            p.level,
            p.mean_estimate,
            100.0 * p.relative_error
        );
    }
    save_overlay(
        &svg,
        "Estimated versus reference interaction force",
        "force [N]",
        &[("estimate", &est.f2_hat), ("reference", f2)],
    )?;
    println!("overlay -> {}", svg.display());
    Ok(())
}
