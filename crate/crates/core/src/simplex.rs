//! Nelder-Mead downhill simplex.

/// Evaluated point.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub x: Vec<f64>,
    pub f: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Stop when `f_max - f_min <= rel_tol * |f_min|` across the simplex.
    pub rel_tol: f64,
    pub max_evals: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            rel_tol: 1e-8,
            max_evals: 2000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub best: Point,
    pub trace: Vec<Point>,
    pub converged: bool,
}

/// Minimises `f` from `x0`, seeding the simplex with `x0 + step_i e_i`.
/// Non-finite objective values are treated as `+inf`.
pub fn minimize(mut f: impl FnMut(&[f64]) -> f64, x0: &[f64], step: &[f64], settings: &Settings) -> Outcome {
    let n = x0.len();
    let mut trace: Vec<Point> = Vec::new();
    let mut eval = |x: Vec<f64>, trace: &mut Vec<Point>| -> Point {
        let v = f(&x);
        let p = Point {
            x,
            f: if v.is_finite() { v } else { f64::INFINITY },
        };
        trace.push(p.clone());
        p
    };

    let mut simplex = vec![eval(x0.to_vec(), &mut trace)];
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step[i];
        simplex.push(eval(x, &mut trace));
    }

    let converged = loop {
        simplex.sort_by(|a, b| a.f.total_cmp(&b.f));
        let (lo, hi) = (simplex[0].f, simplex[n].f);
        if hi - lo <= settings.rel_tol * lo.abs() {
            break true;
        }
        if trace.len() >= settings.max_evals {
            break false;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|p| p.x[j]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].x)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let r = eval(along(settings.reflection), &mut trace);
        if r.f < simplex[0].f {
            let e = eval(along(settings.reflection * settings.expansion), &mut trace);
            simplex[n] = if e.f < r.f { e } else { r };
            continue;
        }
        if r.f < simplex[n - 1].f {
            simplex[n] = r;
            continue;
        }
        let c = if r.f < simplex[n].f {
            eval(along(settings.reflection * settings.contraction), &mut trace)
        } else {
            eval(along(-settings.contraction), &mut trace)
        };
        if c.f < r.f.min(simplex[n].f) {
            simplex[n] = c;
            continue;
        }
        let best = simplex[0].x.clone();
        for p in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = best
                .iter()
                .zip(&p.x)
                .map(|(b, v)| b + settings.shrink * (v - b))
                .collect();
            *p = eval(x, &mut trace);
        }
    };
    simplex.sort_by(|a, b| a.f.total_cmp(&b.f));
    Outcome {
        best: simplex.swap_remove(0),
        trace,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_the_rosenbrock_minimum() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let s = Settings {
            rel_tol: 1e-12,
            max_evals: 5000,
            ..Settings::default()
        };
        let out = minimize(rosen, &[-1.2, 1.0], &[0.5, 0.5], &s);
        assert!(out.converged);
        assert!(
            (out.best.x[0] - 1.0).abs() < 1e-3 && (out.best.x[1] - 1.0).abs() < 1e-3,
            "{:?}",
            out.best
        );
        assert!(out.trace.iter().all(|p| p.f >= out.best.f));
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let quad = |x: &[f64]| x.iter().map(|v| (v - 3.0).powi(2)).sum::<f64>() + 1.0;
        let s = Settings {
            max_evals: 10,
            ..Settings::default()
        };
        let out = minimize(quad, &[0.0; 4], &[1.0; 4], &s);
        assert!(!out.converged);
        // the last iteration may finish a shrink
        assert!(out.trace.len() <= 10 + 1 + 4);
    }

    #[test]
    fn non_finite_values_are_avoided() {
        let f = |x: &[f64]| {
            if x[0] < 0.0 {
                f64::NAN
            } else {
                (x[0] - 0.5).powi(2) + 1.0
            }
        };
        let out = minimize(f, &[2.0], &[1.0], &Settings::default());
        assert!(out.converged);
        assert!((out.best.x[0] - 0.5).abs() < 1e-3);
    }
}
