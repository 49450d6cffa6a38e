//! Fits the coupling shaper and the Coulomb level to a noise-free dataset,
//! starting from every parameter doubled.
//!
//!     cargo run --release --example identify_shaper

use eoi_force::identify::{
    identify_l, identify_shaper_friction, log_grid, shaper_from_report, ShaperFit, DEFAULT_L_SKIP,
};
use eoi_force::scenario::{bundled, ScenarioFile};
use eoi_force::signal::{LeadLagShaper, Stage};

fn main() -> eoi_force::Result<()> {
    let mut scenario = ScenarioFile::from_json(bundled::DEFAULT)?;
    // L comes from the noisy record; the fit itself runs on clean data
    let noisy = scenario.simulate()?;
    let l = identify_l(&noisy, &log_grid(0.5, 50.0, 30), DEFAULT_L_SKIP)?.optimum[0];
    scenario.plant.noise_std = 0.0;
    let clean = scenario.simulate()?;

    let truth = &scenario.plant.coupling;
    let init = LeadLagShaper::new(
        2.0 * truth.gain(),
        truth
            .stages()
            .iter()
            .map(|s| Stage::new(2.0 * s.b, 2.0 * s.c))
            .collect(),
    )?;
    let fit = ShaperFit::new(init, 2.0 * scenario.plant.gamma, scenario.plant.m, l);
    let report = identify_shaper_friction(&clean, &fit)?;
    let (shaper, gamma) = shaper_from_report(&report)?;

    println!(
        "L = {l:.3}, {} evaluations, converged: {}",
        report.evaluations, report.converged
    );
    println!(
        "objective {:.4e} (initial {:.4e})",
        report.objective, report.samples[0].objective
    );
    println!("a     = {:.5} (true {})", shaper.gain(), truth.gain());
    println!("gamma = {gamma:.3} (true {})", scenario.plant.gamma);
    for (k, (s, t)) in shaper.stages().iter().zip(truth.stages()).enumerate() {
        println!(
            "stage {k}: b {:.3e} c {:.3e} (true b {:.3e} c {:.3e})",
            s.b, s.c, t.b, t.c
        );
    }
    println!("sum of b - c: {:.5e} (true {:.5e})", lead_sum(&shaper), lead_sum(truth));
    Ok(())
}

/// First-order lead contribution, which is what the data pins down.
fn lead_sum(s: &LeadLagShaper) -> f64 {
    s.stages().iter().map(|st| st.b - st.c).sum()
}
