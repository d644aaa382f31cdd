//! Root finding: all complex roots (Aberth–Ehrlich) and certified real-root
//! isolation for real polynomials.

use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::{Complex, Error, Result};

const MAX_ABERTH_ITERS: usize = 500;

/// All complex roots of `c_0 + c_1 z + … + c_n z^n`, with multiplicity.
/// The leading coefficient must be nonzero.
pub fn complex_roots(coeffs: &[Complex]) -> Result<Vec<Complex>> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 || coeffs[n] == Complex::new(0.0, 0.0) {
        return Err(Error::InvalidArgument("root solve needs a nonzero leading coefficient"));
    }
    match n {
        1 => Ok(vec![-coeffs[0] / coeffs[1]]),
        2 => Ok(quadratic_roots(coeffs[2], coeffs[1], coeffs[0]).to_vec()),
        _ => aberth(coeffs),
    }
}

/// Roots of `a z^2 + b z + c` without cancellation in either root.
pub fn quadratic_roots(a: Complex, b: Complex, c: Complex) -> [Complex; 2] {
    let disc = (b * b - a * c * 4.0).sqrt();
    let sign = if (b.conj() * disc).re >= 0.0 { 1.0 } else { -1.0 };
    let q = -(b + disc * sign) * 0.5;
    if q == Complex::new(0.0, 0.0) {
        return [q, q];
    }
    [q / a, c / q]
}

fn horner(coeffs: &[Complex], z: Complex) -> (Complex, Complex) {
    let mut p = coeffs[coeffs.len() - 1];
    let mut dp = Complex::new(0.0, 0.0);
    for c in coeffs.iter().rev().skip(1) {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn aberth(coeffs: &[Complex]) -> Result<Vec<Complex>> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n].norm();
    let radius = (0..n)
        .map(|k| (coeffs[k].norm() / lead).powf(1.0 / (n - k) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex> = (0..n)
        .map(|k| {
            let angle = core::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            Complex::from_polar(radius, angle)
        })
        .collect();

    let mut converged = false;
    for _ in 0..MAX_ABERTH_ITERS {
        let mut worst: f64 = 0.0;
        for k in 0..n {
            let (p, dp) = horner(coeffs, z[k]);
            if p == Complex::new(0.0, 0.0) {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex = (0..n)
                .filter(|&j| j != k)
                .map(|j| {
                    let diff = z[k] - z[j];
                    if diff == Complex::new(0.0, 0.0) {
                        Complex::new(0.0, 0.0)
                    } else {
                        diff.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex::new(1.0, 0.0) - ratio * repulsion);
            if step.re.is_finite() && step.im.is_finite() {
                z[k] -= step;
                worst = worst.max(step.norm() / z[k].norm().max(1e-300));
            }
        }
        if worst <= 4.0 * f64::EPSILON {
            converged = true;
            break;
        }
    }
    // Newton polish; only keep a step that lowers the residual.
    for root in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner(coeffs, *root);
            if dp == Complex::new(0.0, 0.0) {
                break;
            }
            let cand = *root - p / dp;
            if horner(coeffs, cand).0.norm() < p.norm() {
                *root = cand;
            } else {
                break;
            }
        }
    }
    if !converged {
        let residual = z.iter().map(|&r| horner(coeffs, r).0.norm()).fold(0.0, f64::max);
        if !(residual <= 1e-8 * coeffs.iter().map(|c| c.norm()).sum::<f64>()) {
            return Err(Error::RootSolveFailed { residual });
        }
    }
    Ok(z)
}

/// A real root with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealRoot {
    pub value: f64,
    pub multiplicity: usize,
}

/// All real roots of a real polynomial, counted with multiplicity.
///
/// Isolation recurses on the derivative: between consecutive critical points
/// the polynomial is monotone, so a sign change there certifies exactly one
/// simple root, located by bisection to machine precision. A critical point
/// where the value vanishes up to Horner rounding is a multiple root.
/// Coefficients are ascending; exact trailing zeros are ignored.
pub fn real_roots(coeffs: &[f64]) -> Result<Vec<RealRoot>> {
    let mut c: Vec<f64> = coeffs.to_vec();
    while c.last() == Some(&0.0) {
        c.pop();
    }
    if c.iter().any(|v| !v.is_finite()) {
        return Err(Error::RootIsolationFailed);
    }
    isolate(&c)
}

fn eval_real(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

/// Horner rounding bound at `x`.
fn rounding_bound(c: &[f64], x: f64) -> f64 {
    let mag = c.iter().rev().fold(0.0, |acc: f64, &k| acc * x.abs() + k.abs());
    4.0 * c.len() as f64 * f64::EPSILON * mag
}

fn isolate(c: &[f64]) -> Result<Vec<RealRoot>> {
    let n = match c.len() {
        0 | 1 => return Ok(Vec::new()),
        len => len - 1,
    };
    if n == 1 {
        return Ok(vec![RealRoot { value: -c[0] / c[1], multiplicity: 1 }]);
    }
    let lead = c[n];
    let bound = 1.0 + c[..n].iter().map(|v| (v / lead).abs()).fold(0.0, f64::max);

    let deriv: Vec<f64> = (1..=n).map(|k| k as f64 * c[k]).collect();
    let critical = isolate(&deriv)?;

    // Break points of monotonicity, each tagged with whether p vanishes there.
    let mut knots: Vec<(f64, Option<usize>)> = vec![(-bound, None)];
    for cp in critical.iter().filter(|r| r.value > -bound && r.value < bound) {
        let zero = eval_real(c, cp.value).abs() <= rounding_bound(c, cp.value);
        knots.push((cp.value, zero.then_some(cp.multiplicity + 1)));
    }
    knots.push((bound, None));

    let mut roots = Vec::new();
    for w in knots.windows(2) {
        let (lo, lo_zero) = w[0];
        let (hi, hi_zero) = w[1];
        if lo_zero.is_some() || hi_zero.is_some() || lo >= hi {
            continue;
        }
        let flo = eval_real(c, lo);
        let fhi = eval_real(c, hi);
        if flo.signum() == fhi.signum() {
            continue;
        }
        roots.push(RealRoot { value: bisect(c, lo, hi, flo)?, multiplicity: 1 });
    }
    for (x, mult) in &knots {
        if let Some(m) = mult {
            roots.push(RealRoot { value: *x, multiplicity: *m });
        }
    }
    roots.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(roots)
}

fn bisect(c: &[f64], mut lo: f64, mut hi: f64, flo: f64) -> Result<f64> {
    let lo_sign = flo.signum();
    for _ in 0..2100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fm = eval_real(c, mid);
        if !fm.is_finite() {
            return Err(Error::RootIsolationFailed);
        }
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::RootIsolationFailed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn assert_roots(found: &[Complex], expected: &[Complex], tol: f64) {
        assert_eq!(found.len(), expected.len());
        let mut used = vec![false; found.len()];
        for e in expected {
            let k = (0..found.len())
                .filter(|&k| !used[k])
                .min_by(|&a, &b| (found[a] - e).norm().total_cmp(&(found[b] - e).norm()))
                .unwrap();
            assert!((found[k] - e).norm() <= tol, "{found:?} vs {expected:?}");
            used[k] = true;
        }
    }

    #[test]
    fn quadratic_cases() {
        let r = complex_roots(&[c(-4.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_roots(&r, &[c(2.0, 0.0), c(-2.0, 0.0)], 1e-15);
        let r = complex_roots(&[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_roots(&r, &[c(0.0, 0.0), c(0.0, 0.0)], 0.0);
        // Wide spread of magnitudes: no cancellation in the small root.
        let r = complex_roots(&[c(1.0, 0.0), c(1e8, 0.0), c(1.0, 0.0)]).unwrap();
        assert_roots(&r, &[c(-1e-8, 0.0), c(-1e8, 0.0)], 1e-20_f64.max(1e-24));
    }

    #[test]
    fn cube_roots_of_eight() {
        let r = complex_roots(&[c(-8.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let omega = Complex::from_polar(1.0, core::f64::consts::TAU / 3.0);
        assert_roots(&r, &[c(2.0, 0.0), omega * 2.0, omega * omega * 2.0], 1e-13);
    }

    #[test]
    fn aberth_random_degree_six() {
        let expected = [c(1.0, 2.0), c(-0.5, 0.1), c(0.3, -1.7), c(2.5, 0.0), c(-1.2, -0.8), c(0.0, 0.4)];
        let mut poly = vec![c(1.0, 0.0)];
        for r in &expected {
            let mut next = vec![c(0.0, 0.0); poly.len() + 1];
            for (k, &v) in poly.iter().enumerate() {
                next[k] -= v * r;
                next[k + 1] += v;
            }
            poly = next;
        }
        let found = complex_roots(&poly).unwrap();
        assert_roots(&found, &expected, 1e-10);
    }

    #[test]
    fn real_roots_simple_and_double() {
        // (x - 1)(x + 2)(x - 3) = x^3 - 2x^2 - 5x + 6
        let r = real_roots(&[6.0, -5.0, -2.0, 1.0]).unwrap();
        let v: Vec<f64> = r.iter().map(|r| r.value).collect();
        assert_eq!(r.len(), 3);
        for (got, want) in v.iter().zip([-2.0, 1.0, 3.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        // -y^2: double root at 0.
        let r = real_roots(&[0.0, 0.0, -1.0]).unwrap();
        assert_eq!(r, vec![RealRoot { value: 0.0, multiplicity: 2 }]);
        // x^2 + 1: none.
        assert!(real_roots(&[1.0, 0.0, 1.0]).unwrap().is_empty());
        // (x - 1)^3
        let r = real_roots(&[-1.0, 3.0, -3.0, 1.0]).unwrap();
        assert_eq!(r.iter().map(|r| r.multiplicity).sum::<usize>(), 3);
    }

    #[test]
    fn close_simple_roots_are_separated() {
        // (x - 1)(x - 1.001)
        let r = real_roots(&[1.001, -2.001, 1.0]).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0].value - 1.0).abs() < 1e-12);
        assert!((r[1].value - 1.001).abs() < 1e-12);
    }

    #[test]
    fn constant_and_linear() {
        assert!(real_roots(&[3.0]).unwrap().is_empty());
        assert_eq!(real_roots(&[-3.0, 1.5]).unwrap()[0].value, 2.0);
    }
}
