//! Identification of the Lipschitz bound and of the coupling shaper with
//! the Coulomb level.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::NominalModel;
use crate::plant::Dataset;
use crate::shaping::DiscreteFilter;
use crate::signal::{format_sig9, sign, LeadLagShaper, Stage, TimeSeries};
use crate::simplex::{self, Settings};
use crate::sta::{differentiate, eoi, ConvergenceRule, StaGains, StaState};

/// One evaluated parameter vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub params: Vec<f64>,
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub parameters: Vec<String>,
    pub optimum: Vec<f64>,
    pub objective: f64,
    /// Grid curve or optimiser trace, in evaluation order.
    pub samples: Vec<Sample>,
    pub converged: bool,
    pub evaluations: usize,
    /// Number of terms in each objective sum.
    pub n_samples: usize,
}

impl FitReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    /// Writes the single-parameter curve as `name,sse` rows.
    pub fn write_curve_csv<W: Write>(&self, writer: W) -> Result<()> {
        let name = match self.parameters.as_slice() {
            [p] => p.as_str(),
            _ => return Err(Error::Data("curve export needs exactly one parameter".into())),
        };
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([name, "sse"])?;
        for s in &self.samples {
            w.write_record([format_sig9(s.params[0]), format_sig9(s.objective)])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Number of strict interior local minima of a single-parameter curve
    /// ordered by parameter value, plus a minimum at either end.
    pub fn curve_minima(&self) -> usize {
        let mut pts: Vec<(f64, f64)> = self.samples.iter().map(|s| (s.params[0], s.objective)).collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let f: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let n = f.len();
        if n == 1 {
            return 1;
        }
        (0..n)
            .filter(|&i| {
                let left = i == 0 || f[i] < f[i - 1];
                let right = i == n - 1 || f[i] < f[i + 1];
                left && right
            })
            .count()
    }
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect(),
    }
}

/// Seconds excluded from the start of the L objective when not configured.
pub const DEFAULT_L_SKIP: f64 = 1.0;

/// Sum of squared output errors after `skip` seconds for one `L`.
pub fn output_error_sse(sigma: &TimeSeries, lipschitz: f64, skip: f64) -> Result<f64> {
    let gains = StaGains::from_lipschitz(lipschitz)?;
    let d = differentiate(sigma, &gains, StaState::new(sigma.values()[0], 0.0))?;
    let k0 = sigma.index_at(skip);
    Ok(d.e.values()[k0..].iter().map(|e| e * e).sum())
}

/// Grid search for the Lipschitz bound minimising the squared output error.
/// Only `sigma_meas` is used. Ties go to the smaller `L`.
pub fn identify_l(dataset: &Dataset, grid: &[f64], skip: f64) -> Result<FitReport> {
    if grid.is_empty() {
        return Err(Error::invalid("L grid", "grid is empty"));
    }
    if let Some(bad) = grid.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
        return Err(Error::invalid(
            "L grid",
            format!("candidates must be positive, got {bad}"),
        ));
    }
    let sigma = &dataset.sigma_meas;
    if !(skip >= 0.0) || sigma.index_at(skip) >= sigma.len() {
        return Err(Error::invalid("L grid", format!("skip {skip} s leaves no samples")));
    }
    let sse: Vec<f64> = grid
        .par_iter()
        .map(|&l| output_error_sse(sigma, l, skip))
        .collect::<Result<_>>()?;
    let best = (0..grid.len())
        .min_by(|&i, &j| sse[i].total_cmp(&sse[j]).then(grid[i].total_cmp(&grid[j])))
        .expect("grid is non-empty");
    Ok(FitReport {
        parameters: vec!["L".into()],
        optimum: vec![grid[best]],
        objective: sse[best],
        samples: grid
            .iter()
            .zip(&sse)
            .map(|(&l, &s)| Sample {
                params: vec![l],
                objective: s,
            })
            .collect(),
        converged: true,
        evaluations: grid.len(),
        n_samples: sigma.len() - sigma.index_at(skip),
    })
}

/// Starting point and fixed settings of the shaper and friction fit.
#[derive(Debug, Clone)]
pub struct ShaperFit {
    pub init: LeadLagShaper,
    pub gamma: f64,
    /// Known mass of the nominal model.
    pub m: f64,
    /// Lipschitz bound for the observer, from a prior L identification.
    pub lipschitz: f64,
    pub max_evals: usize,
    /// Seconds excluded from the objective; `None` uses the observer
    /// convergence time or five times the slowest initial `b`, whichever is
    /// larger.
    pub skip: Option<f64>,
}

impl ShaperFit {
    pub fn new(init: LeadLagShaper, gamma: f64, m: f64, lipschitz: f64) -> Self {
        Self {
            init,
            gamma,
            m,
            lipschitz,
            max_evals: 4000,
            skip: None,
        }
    }

    fn validate(&self) -> Result<()> {
        NominalModel {
            m: self.m,
            gamma: self.gamma,
        }
        .validate()?;
        if !(self.gamma > 0.0) {
            return Err(Error::invalid("shaper fit", "initial gamma must be positive"));
        }
        if let Some(k) = self.init.stages().iter().position(|s| !(s.b > 0.0 && s.c > 0.0)) {
            return Err(Error::invalid(
                "shaper fit",
                format!("stage {k} of the initial shaper needs positive b and c"),
            ));
        }
        if self.max_evals == 0 {
            return Err(Error::invalid("shaper fit", "evaluation budget must be positive"));
        }
        Ok(())
    }
}

/// Parameter names of the shaper fit for `n` stages.
pub fn shaper_parameter_names(n: usize) -> Vec<String> {
    let mut names = vec!["a".to_string()];
    names.extend((1..=n).map(|k| format!("b{k}")));
    names.extend((1..=n).map(|k| format!("c{k}")));
    names.push("gamma".into());
    names
}

fn unpack(theta: &[f64], n: usize) -> Result<(LeadLagShaper, f64)> {
    let stages = (0..n).map(|k| Stage::new(theta[1 + k], theta[1 + n + k])).collect();
    Ok((LeadLagShaper::new(theta[0], stages)?, theta[2 * n + 1]))
}

fn pack(shaper: &LeadLagShaper, gamma: f64) -> Vec<f64> {
    let mut theta = vec![shaper.gain()];
    theta.extend(shaper.stages().iter().map(|s| s.b));
    theta.extend(shaper.stages().iter().map(|s| s.c));
    theta.push(gamma);
    theta
}

/// Precomputed observer outputs shared by every objective evaluation.
struct FitData<'a> {
    chi: Vec<f64>,
    sign_v: Vec<f64>,
    u: &'a [f64],
    f2_ref: &'a [f64],
    dt: f64,
    m: f64,
    k0: usize,
}

impl FitData<'_> {
    fn sse(&self, shaper: &LeadLagShaper, gamma: f64) -> f64 {
        let Ok(g) = shaper
            .inverse(self.m)
            .and_then(|s| DiscreteFilter::from_shaper(&s, self.dt))
        else {
            return f64::INFINITY;
        };
        let mut g = g;
        let inv_m = 1.0 / self.m;
        let mut sse = 0.0;
        for k in 0..self.u.len() {
            let f = (self.u[k] - gamma * self.sign_v[k]) * inv_m;
            let est = g.step(self.chi[k] - f);
            if k >= self.k0 {
                sse += (est - self.f2_ref[k]).powi(2);
            }
        }
        sse
    }
}

/// Simultaneous fit of `(a, b_1..b_n, c_1..c_n, gamma)` against `f2_ref` by
/// a simplex search over the logarithms of the parameters.
pub fn identify_shaper_friction(dataset: &Dataset, fit: &ShaperFit) -> Result<FitReport> {
    fit.validate()?;
    let f2_ref = dataset.require_f2_ref()?;
    dataset.validate()?;
    let sigma = &dataset.sigma_meas;
    let gains = StaGains::from_lipschitz(fit.lipschitz)?;
    let diff = differentiate(sigma, &gains, StaState::new(sigma.values()[0], 0.0))?;
    let skip = match fit.skip {
        Some(s) => s,
        None => {
            let t_conv = ConvergenceRule::default()
                .detect(sigma, &diff.e, &gains)?
                .time()
                .unwrap_or(0.0);
            let slowest = fit.init.stages().iter().map(|s| s.b).fold(0.0, f64::max);
            t_conv.max(5.0 * slowest)
        }
    };
    let k0 = sigma.index_at(skip);
    if k0 >= sigma.len() {
        return Err(Error::invalid("shaper fit", format!("skip {skip} s leaves no samples")));
    }
    let data = FitData {
        chi: eoi(&diff.e, &gains).into_values(),
        sign_v: diff.x2_hat.values().iter().map(|&v| sign(v)).collect(),
        u: dataset.u.values(),
        f2_ref: f2_ref.values(),
        dt: dataset.dt(),
        m: fit.m,
        k0,
    };
    let n = fit.init.order();
    let objective = |log_theta: &[f64]| -> f64 {
        let theta: Vec<f64> = log_theta.iter().map(|v| v.exp()).collect();
        match unpack(&theta, n) {
            Ok((shaper, gamma)) => data.sse(&shaper, gamma),
            Err(_) => f64::INFINITY,
        }
    };
    let x0: Vec<f64> = pack(&fit.init, fit.gamma).iter().map(|v| v.ln()).collect();
    let step = vec![0.25; x0.len()];
    let settings = Settings {
        max_evals: fit.max_evals,
        ..Settings::default()
    };
    let out = simplex::minimize(objective, &x0, &step, &settings);
    let exp = |x: &[f64]| x.iter().map(|v| v.exp()).collect::<Vec<f64>>();
    Ok(FitReport {
        parameters: shaper_parameter_names(n),
        optimum: exp(&out.best.x),
        objective: out.best.f,
        evaluations: out.trace.len(),
        samples: out
            .trace
            .iter()
            .map(|p| Sample {
                params: exp(&p.x),
                objective: p.f,
            })
            .collect(),
        converged: out.converged,
        n_samples: sigma.len() - k0,
    })
}

/// Splits a shaper-fit optimum into the shaper and gamma.
pub fn shaper_from_report(report: &FitReport) -> Result<(LeadLagShaper, f64)> {
    let len = report.optimum.len();
    if len < 4 || !len.is_multiple_of(2) {
        return Err(Error::Data(format!("a shaper fit has 2n + 2 parameters, got {len}")));
    }
    unpack(&report.optimum, (len - 2) / 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(0.5, 50.0, 30);
        assert_eq!(g.len(), 30);
        assert_eq!(g[0], 0.5);
        assert!((g[29] - 50.0).abs() < 1e-12);
        assert!((g[1] / g[0] - g[29] / g[28]).abs() < 1e-12);
        assert_eq!(log_grid(2.0, 9.0, 1), vec![2.0]);
    }

    #[test]
    fn parameter_layout() {
        assert_eq!(shaper_parameter_names(2), ["a", "b1", "b2", "c1", "c2", "gamma"]);
        let s = LeadLagShaper::new(2.0, vec![Stage::new(1.0, 3.0), Stage::new(4.0, 5.0)]).unwrap();
        let theta = pack(&s, 7.0);
        assert_eq!(theta, [2.0, 1.0, 4.0, 3.0, 5.0, 7.0]);
        assert_eq!(unpack(&theta, 2).unwrap(), (s, 7.0));
    }

    #[test]
    fn curve_minima_counting() {
        let report = |f: &[f64]| FitReport {
            parameters: vec!["L".into()],
            optimum: vec![0.0],
            objective: 0.0,
            samples: f
                .iter()
                .enumerate()
                .map(|(i, &o)| Sample {
                    params: vec![i as f64],
                    objective: o,
                })
                .collect(),
            converged: true,
            evaluations: f.len(),
            n_samples: 1,
        };
        assert_eq!(report(&[5.0, 3.0, 1.0, 2.0, 4.0]).curve_minima(), 1);
        assert_eq!(report(&[5.0, 3.0, 4.0, 2.0, 4.0]).curve_minima(), 2);
        assert_eq!(report(&[1.0, 2.0, 3.0]).curve_minima(), 1);
        assert_eq!(report(&[7.0]).curve_minima(), 1);
    }

    #[test]
    fn curve_csv_has_one_row_per_point() {
        let r = FitReport {
            parameters: vec!["L".into()],
            optimum: vec![2.0],
            objective: 0.5,
            samples: vec![
                Sample {
                    params: vec![1.0],
                    objective: 1.5,
                },
                Sample {
                    params: vec![2.0],
                    objective: 0.5,
                },
            ],
            converged: true,
            evaluations: 2,
            n_samples: 10,
        };
        let mut buf = Vec::new();
        r.write_curve_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "L,sse\n1,1.5\n2,0.5\n");
        let json = r.to_json().unwrap();
        assert_eq!(serde_json::from_str::<FitReport>(&json).unwrap(), r);
    }
}
