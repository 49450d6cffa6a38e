//! Command-line front end. Exit statuses: 0 success, 2 parse, 3 validation,
//! 4 channel or data, 5 numerical.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::estimate::{estimate_force, force_metrics, plateau_errors};
use crate::identify::{identify_l, identify_shaper_friction, log_grid, ShaperFit, DEFAULT_L_SKIP};
use crate::plant::Dataset;
use crate::plot::save_overlay;
use crate::scenario::{EstimatorSpec, ScenarioFile};
use crate::signal::{format_sig9, LeadLagShaper, RationalTF, SignalTable, TimeSeries};
use crate::sta::StaGains;

#[derive(Debug, Parser)]
#[command(
    name = "eoi-force",
    version,
    about = "Sliding-mode interaction force estimation toolkit"
)]
pub struct Cli {
    /// Output file of the command.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Replaces the noise seed of the scenario.
    #[arg(long, global = true)]
    pub seed_override: Option<u64>,
    /// Suppresses the summary printed on success.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Lipschitz bound by output-error sweep.
    #[value(name = "L", alias = "l")]
    L,
    /// Coupling shaper and Coulomb level against `f2_ref`.
    Shaper,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulates a scenario and writes the dataset CSV.
    Simulate { scenario: PathBuf },
    /// Estimates the interaction force from a dataset.
    Estimate {
        dataset: PathBuf,
        /// Scenario with an `estimator` block, or a standalone estimator document.
        #[arg(long)]
        config: PathBuf,
        /// Overrides the Lipschitz bound of the config.
        #[arg(long)]
        lipschitz: Option<f64>,
        /// Enables the FIR stage with this cut-off in Hz.
        #[arg(long)]
        fir_cutoff: Option<f64>,
        /// Writes an SVG overlay next to the output CSV.
        #[arg(long)]
        plot: bool,
    },
    /// Runs one of the identification procedures and writes a JSON report.
    Identify {
        #[arg(long, value_enum)]
        mode: Mode,
        dataset: PathBuf,
        /// Log-spaced L grid as `lo:hi:count`.
        #[arg(long, default_value = "0.5:50:30", conflicts_with = "values")]
        grid: String,
        /// Explicit comma-separated L candidates.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        /// Seconds excluded from the objective.
        #[arg(long)]
        skip: Option<f64>,
        /// Estimator document giving the initial shaper, gamma, m and L (shaper mode).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the Lipschitz bound used in shaper mode.
        #[arg(long)]
        lipschitz: Option<f64>,
        /// Multiplies every initial parameter (shaper mode).
        #[arg(long, default_value_t = 1.0)]
        init_scale: f64,
        /// Objective evaluation budget (shaper mode).
        #[arg(long, default_value_t = 4000)]
        max_evals: usize,
    },
    /// Tabulates magnitude and phase of a shaper or transfer function.
    Freqresp {
        /// Inline JSON or a path: `{"a", "stages"}` or `{"num", "den"}`.
        spec: String,
        /// Inverts the shaper with this mass first, giving `m / S12`.
        #[arg(long)]
        invert: Option<f64>,
        #[arg(long, default_value_t = 0.1)]
        omega_min: f64,
        #[arg(long, default_value_t = 1e6)]
        omega_max: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
}

struct Console {
    quiet: bool,
}

impl Console {
    fn say(&self, line: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", line.as_ref());
        }
    }
}

/// Parses `std::env::args`, runs, and returns the process exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let console = Console { quiet: cli.quiet };
    match &cli.command {
        Command::Simulate { scenario } => simulate(cli, &console, scenario),
        Command::Estimate {
            dataset,
            config,
            lipschitz,
            fir_cutoff,
            plot,
        } => estimate(cli, &console, dataset, config, *lipschitz, *fir_cutoff, *plot),
        Command::Identify {
            mode: Mode::L,
            dataset,
            grid,
            values,
            skip,
            ..
        } => identify_lipschitz(cli, &console, dataset, grid, values.as_deref(), *skip),
        Command::Identify {
            mode: Mode::Shaper,
            dataset,
            skip,
            config,
            lipschitz,
            init_scale,
            max_evals,
            ..
        } => {
            let config = config
                .as_deref()
                .ok_or_else(|| Error::invalid("arguments", "shaper mode needs --config"))?;
            identify_shaper(
                cli,
                &console,
                dataset,
                config,
                *lipschitz,
                *init_scale,
                *max_evals,
                *skip,
            )
        }
        Command::Freqresp {
            spec,
            invert,
            omega_min,
            omega_max,
            points,
        } => freqresp(cli, &console, spec, *invert, *omega_min, *omega_max, *points),
    }
}

fn require_out(cli: &Cli) -> Result<&Path> {
    cli.out
        .as_deref()
        .ok_or_else(|| Error::invalid("arguments", "--out is required for this command"))
}

fn simulate(cli: &Cli, console: &Console, path: &Path) -> Result<()> {
    let out = require_out(cli)?;
    let mut scenario = ScenarioFile::load(path)?;
    if let Some(seed) = cli.seed_override {
        scenario.sampling.seed = seed;
    }
    let data = scenario.simulate()?;
    data.save(out)?;
    let peak = |s: &Option<TimeSeries>| s.as_ref().map_or(0.0, TimeSeries::max_abs);
    console.say(format!(
        "duration {} s, {} samples, dt {} s",
        data.u.duration(),
        data.len(),
        data.dt()
    ));
    console.say(format!("peak F2 {} N", format_sig9(peak(&data.f2_ref))));
    console.say(format!("peak velocity {} m/s", format_sig9(peak(&data.v_true))));
    Ok(())
}

fn estimate(
    cli: &Cli,
    console: &Console,
    dataset: &Path,
    config: &Path,
    lipschitz: Option<f64>,
    fir_cutoff: Option<f64>,
    plot: bool,
) -> Result<()> {
    let out = require_out(cli)?;
    let data = Dataset::load(dataset)?;
    let mut config = EstimatorSpec::load(config)?.build()?;
    if let Some(l) = lipschitz {
        config.gains = StaGains::from_lipschitz(l)?;
    }
    if fir_cutoff.is_some() {
        config.fir_cutoff = fir_cutoff;
    }
    let est = estimate_force(&data, &config)?;

    let mut table = SignalTable::new(data.dt(), data.len());
    table.push("f2_hat", &est.f2_hat)?;
    table.push("x2_hat", &est.x2_hat)?;
    table.push("e", &est.e)?;
    table.push("chi", &est.chi)?;
    table.push("f_nominal", &est.f_nominal)?;
    if let Some(f2) = &data.f2_ref {
        table.push("f2_ref", f2)?;
    }
    table.save(out)?;
    if plot {
        let mut series = vec![("F2 estimate", &est.f2_hat)];
        if let Some(f2) = &data.f2_ref {
            series.push(("F2 reference", f2));
        }
        save_overlay(
            &out.with_extension("svg"),
            "Estimated versus reference interaction force",
            "force [N]",
            &series,
        )?;
    }

    match est.convergence.time() {
        Some(t) => console.say(format!(
            "observer converged at {} s; evaluation starts at {} s",
            format_sig9(t),
            format_sig9(est.skip)
        )),
        None => console.say(format!(
            "observer convergence not detected; evaluation starts at {} s",
            format_sig9(est.skip)
        )),
    }
    for w in &est.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(f2) = &data.f2_ref {
        let m = force_metrics(&est.f2_hat, f2, est.skip)?;
        console.say(format!(
            "rmse {} N ({} % of peak {} N), peak error {} N",
            format_sig9(m.rmse),
            format_sig9(100.0 * m.relative_rmse),
            format_sig9(m.peak_reference),
            format_sig9(m.peak_error)
        ));
        let plateaus = plateau_errors(&est.f2_hat, f2, est.skip, 0.5, 0.3)?;
        if let Some(worst) = plateaus.iter().map(|p| p.relative_error).max_by(f64::total_cmp) {
            console.say(format!(
                "{} plateaus, worst mean error {} %",
                plateaus.len(),
                format_sig9(100.0 * worst)
            ));
        }
    }
    Ok(())
}

fn parse_grid(grid: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = grid.split(':').collect();
    let bad = || Error::Parse(format!("grid `{grid}` is not lo:hi:count"));
    let [lo, hi, n] = parts.as_slice() else {
        return Err(bad());
    };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if !(lo > 0.0 && hi >= lo) {
        return Err(Error::invalid(
            "L grid",
            format!("need 0 < lo <= hi, got {lo} and {hi}"),
        ));
    }
    Ok(log_grid(lo, hi, n))
}

fn identify_lipschitz(
    cli: &Cli,
    console: &Console,
    dataset: &Path,
    grid: &str,
    values: Option<&[f64]>,
    skip: Option<f64>,
) -> Result<()> {
    let out = require_out(cli)?;
    let grid = match values {
        Some(v) => v.to_vec(),
        None => parse_grid(grid)?,
    };
    let data = Dataset::load(dataset)?;
    let report = identify_l(&data, &grid, skip.unwrap_or(DEFAULT_L_SKIP))?;
    report.save_json(out)?;
    let curve = out.with_extension("curve.csv");
    report.write_curve_csv(std::fs::File::create(&curve)?)?;
    console.say(format!(
        "L = {} (sse {}) over {} candidates; curve written to {}",
        format_sig9(report.optimum[0]),
        format_sig9(report.objective),
        grid.len(),
        curve.display()
    ));
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn identify_shaper(
    cli: &Cli,
    console: &Console,
    dataset: &Path,
    config: &Path,
    lipschitz: Option<f64>,
    init_scale: f64,
    max_evals: usize,
    skip: Option<f64>,
) -> Result<()> {
    let out = require_out(cli)?;
    let spec = EstimatorSpec::load(config)?;
    let data = Dataset::load(dataset)?;
    data.require_f2_ref()?;
    if !(init_scale.is_finite() && init_scale > 0.0) {
        return Err(Error::invalid(
            "arguments",
            format!("--init-scale must be positive, got {init_scale}"),
        ));
    }
    let coupling = spec.g_filter.coupling()?;
    let init = LeadLagShaper::new(
        coupling.gain() * init_scale,
        coupling
            .stages()
            .iter()
            .map(|s| crate::signal::Stage::new(s.b * init_scale, s.c * init_scale))
            .collect(),
    )?;
    let mut fit = ShaperFit::new(
        init,
        spec.nominal.gamma * init_scale,
        spec.nominal.m,
        lipschitz.unwrap_or(spec.lipschitz),
    );
    fit.max_evals = max_evals;
    fit.skip = skip;
    let report = identify_shaper_friction(&data, &fit)?;
    report.save_json(out)?;
    let pairs: Vec<String> = report
        .parameters
        .iter()
        .zip(&report.optimum)
        .map(|(n, v)| format!("{n}={}", format_sig9(*v)))
        .collect();
    console.say(pairs.join(" "));
    console.say(format!(
        "objective {} after {} evaluations ({})",
        format_sig9(report.objective),
        report.evaluations,
        if report.converged {
            "converged"
        } else {
            "budget exhausted"
        }
    ));
    Ok(())
}

fn freqresp(
    cli: &Cli,
    console: &Console,
    spec: &str,
    invert: Option<f64>,
    omega_min: f64,
    omega_max: f64,
    points: usize,
) -> Result<()> {
    let text = if spec.trim_start().starts_with('{') {
        spec.to_string()
    } else {
        std::fs::read_to_string(spec)?
    };
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let tf: RationalTF = if value.get("num").is_some() {
        if invert.is_some() {
            return Err(Error::invalid("arguments", "--invert applies to shapers only"));
        }
        serde_json::from_value(value)?
    } else {
        let shaper: LeadLagShaper = serde_json::from_value(value)?;
        match invert {
            Some(m) => shaper.inverse(m)?.to_tf()?,
            None => shaper.to_tf()?,
        }
    };
    if !(omega_min > 0.0 && omega_max >= omega_min && points >= 1) {
        return Err(Error::invalid(
            "arguments",
            "need 0 < omega_min <= omega_max and points >= 1",
        ));
    }
    if let Some(out) = &cli.out {
        let mut w = csv::Writer::from_path(out)?;
        w.write_record(["omega", "magnitude", "phase_deg"])?;
        for omega in log_grid(omega_min, omega_max, points) {
            let h = tf.freq_response(omega);
            w.write_record([
                format_sig9(omega),
                format_sig9(h.norm()),
                format_sig9(h.arg().to_degrees()),
            ])?;
        }
        w.flush()?;
    }
    console.say(format!("dc gain {}", format_sig9(tf.dc_gain())));
    console.say(format!("high-frequency gain {}", format_sig9(tf.high_frequency_gain())));
    Ok(())
}
