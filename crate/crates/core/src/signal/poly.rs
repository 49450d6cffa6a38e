//! Real polynomials in ascending-degree coefficient order.

use num_complex::Complex64;

/// Drops trailing (highest-degree) zero coefficients, keeping at least one.
pub fn trim(mut p: Vec<f64>) -> Vec<f64> {
    while p.len() > 1 && p[p.len() - 1] == 0.0 {
        p.pop();
    }
    if p.is_empty() {
        p.push(0.0);
    }
    p
}

pub fn degree(p: &[f64]) -> usize {
    p.iter().rposition(|&c| c != 0.0).unwrap_or(0)
}

pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Horner evaluation at a complex point.
pub fn eval(p: &[f64], s: Complex64) -> Complex64 {
    p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
}

fn eval_with_derivative(p: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut value = Complex64::new(0.0, 0.0);
    let mut deriv = Complex64::new(0.0, 0.0);
    for &c in p.iter().rev() {
        deriv = deriv * z + value;
        value = value * z + c;
    }
    (value, deriv)
}

/// All complex roots of `p` (ascending coefficients), via closed forms up to
/// degree two and Aberth-Ehrlich iteration above.
///
/// Real roots are returned with an exactly zero imaginary part and complex
/// roots as exact conjugate pairs, so downstream factoring can rely on both.
pub fn roots(p: &[f64]) -> Vec<Complex64> {
    let p = trim(p.to_vec());
    let n = degree(&p);
    match n {
        0 => Vec::new(),
        1 => vec![Complex64::new(-p[0] / p[1], 0.0)],
        2 => quadratic_roots(p[0], p[1], p[2]).to_vec(),
        _ => polish_conjugates(aberth(&p)),
    }
}

/// Roots of `c + b s + a s^2`, using the cancellation-free form.
fn quadratic_roots(c: f64, b: f64, a: f64) -> [Complex64; 2] {
    let disc = b * b - 4.0 * a * c;
    if disc >= 0.0 {
        let sgn = if b >= 0.0 { 1.0 } else { -1.0 };
        let q = -0.5 * (b + sgn * disc.sqrt());
        let r1 = q / a;
        let r2 = if q != 0.0 { c / q } else { r1 };
        [Complex64::new(r1, 0.0), Complex64::new(r2, 0.0)]
    } else {
        let re = -b / (2.0 * a);
        let im = (-disc).sqrt() / (2.0 * a.abs());
        [Complex64::new(re, im), Complex64::new(re, -im)]
    }
}

fn aberth(p: &[f64]) -> Vec<Complex64> {
    let n = p.len() - 1;
    let lead = p[n];
    let monic: Vec<Complex64> = p.iter().map(|&c| Complex64::new(c / lead, 0.0)).collect();
    // Cauchy-style radius for the initial circle.
    let radius = monic[..n]
        .iter()
        .enumerate()
        .map(|(k, c)| c.norm().powf(1.0 / (n - k) as f64))
        .fold(0.0f64, f64::max)
        .max(1e-12);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, angle)
        })
        .collect();
    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let (value, deriv) = eval_with_derivative(&monic, z[i]);
            if value.norm() == 0.0 {
                continue;
            }
            let ratio = value / deriv;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1e-300));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z
}

/// Snaps near-real roots onto the real axis and pairs the rest as exact
/// conjugates.
fn polish_conjugates(mut z: Vec<Complex64>) -> Vec<Complex64> {
    const IMAG_RTOL: f64 = 1e-9;
    let mut out = Vec::with_capacity(z.len());
    z.sort_by(|a, b| a.im.abs().total_cmp(&b.im.abs()));
    let mut complex = Vec::new();
    for r in z {
        if r.im.abs() <= IMAG_RTOL * r.norm() {
            out.push(Complex64::new(r.re, 0.0));
        } else if r.im > 0.0 {
            complex.push(r);
        }
    }
    for r in complex {
        out.push(r);
        out.push(r.conj());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_roots(roots: &[f64]) -> Vec<f64> {
        roots.iter().fold(vec![1.0], |acc, &r| mul(&acc, &[-r, 1.0]))
    }

    fn sorted_re(mut r: Vec<Complex64>) -> Vec<f64> {
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        r.iter().map(|c| c.re).collect()
    }

    #[test]
    fn multiplication_expands_products() {
        // (1 + 2s)(1 + 3s) = 1 + 5s + 6s^2
        assert_eq!(mul(&[1.0, 2.0], &[1.0, 3.0]), vec![1.0, 5.0, 6.0]);
        assert_eq!(trim(vec![1.0, 0.0, 0.0]), vec![1.0]);
        assert_eq!(degree(&[2.0, 0.0, 3.0, 0.0]), 2);
    }

    #[test]
    fn quadratic_without_cancellation() {
        // roots -1e-5 and -1e5
        let p = mul(&[1e-5, 1.0], &[1e5, 1.0]);
        let r = sorted_re(roots(&p));
        assert!((r[0] + 1e5).abs() < 1e-6);
        assert!((r[1] + 1e-5).abs() < 1e-16);
    }

    #[test]
    fn complex_pair() {
        // s^2 + 2s + 5 -> -1 +- 2j
        let r = roots(&[5.0, 2.0, 1.0]);
        assert_eq!(r.len(), 2);
        assert_eq!(r[0], r[1].conj());
        assert!((r[0].re + 1.0).abs() < 1e-15 && (r[0].im.abs() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn quartic_with_spread_roots() {
        let expected = [-35211.0, -42017.0, -729.927, -77.882];
        let p = from_roots(&expected);
        let got = sorted_re(roots(&p));
        let mut want = expected.to_vec();
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert!(((g - w) / w).abs() < 1e-10, "{g} vs {w}");
        }
    }

    #[test]
    fn mixed_real_and_complex_quintic() {
        let p = mul(&from_roots(&[-1.0, -2.0, -30.0]), &[13.0, 4.0, 1.0]);
        let r = roots(&p);
        assert_eq!(r.len(), 5);
        assert_eq!(r.iter().filter(|c| c.im == 0.0).count(), 3);
        for z in &r {
            assert!(eval(&p, *z).norm() < 1e-8 * 780.0);
        }
    }
}
