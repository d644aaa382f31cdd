//! Green function of the filled Julia set, the Böttcher coordinate near
//! infinity, external rays and level curves.
//!
//! The Böttcher coordinate is evaluated as the convergent product
//! `φ(z) = c z ∏ (P(z_n) / (a_d z_n^d))^(1/d^(n+1))`, with `c^(d-1) = a_d`,
//! carried out in reciprocal coordinates `1/z_n` so that nothing overflows.
//! All principal roots are taken; the product is the analytic branch on
//! `|z| > R_b`, where every factor stays in the disk of radius 1/2 about 1
//! and orbits move strictly outward.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_traits::Euclid;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::orbits::coefficient_escape_radius;
use crate::{Complex, Error, Polynomial, Result};

/// Default iteration budget for Green function evaluations.
pub const GREEN_BUDGET: usize = 4000;

const CIRCLE_SAMPLES: usize = 720;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenValue {
    pub g: f64,
    pub iterations_used: usize,
    pub converged: bool,
}

/// Orbit magnitude at which the asymptotic `G(z_n) ≈ log|z_n| + log|a_d|/(d-1)`
/// is used; the neglected term is `O(1/|z_n|)`.
fn green_bailout(p: &Polynomial) -> f64 {
    let d = p.degree() as f64;
    let c = p.leading().norm().powf(1.0 / (d - 1.0));
    let safe = 10f64.powf(250.0 / d) / p.leading().norm().max(1.0);
    (1e20 / c.min(1.0)).min(safe)
}

/// Green function `G(z) = lim d^(-n) log|z_n|`.
///
/// Returns `g = 0` when the orbit stays inside the coefficient escape radius
/// for the whole budget. [`Error::NotConverged`] is raised when the orbit has
/// escaped but the last two estimates still differ by more than `1e-10`.
pub fn green(p: &Polynomial, z: Complex, n_max: usize) -> Result<GreenValue> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("green needs n_max >= 1"));
    }
    let d = p.degree() as f64;
    let correction = p.leading().norm().ln() / (d - 1.0);
    let bail = green_bailout(p);
    let mut w = z;
    let mut scale = 1.0;
    let mut prev_estimate = f64::NAN;
    for k in 0..=n_max {
        let r = w.norm();
        if r > bail {
            let g = (scale * (r.ln() + correction)).max(0.0);
            return Ok(GreenValue { g, iterations_used: k, converged: true });
        }
        if k == n_max {
            break;
        }
        prev_estimate = scale * (r.ln() + correction);
        w = p.eval_unchecked(w);
        scale /= d;
    }
    if w.norm() <= coefficient_escape_radius(p) {
        return Ok(GreenValue { g: 0.0, iterations_used: n_max, converged: true });
    }
    let estimate = scale * (w.norm().ln() + correction);
    let change = (estimate - prev_estimate).abs();
    if change <= 1e-10 {
        Ok(GreenValue { g: estimate.max(0.0), iterations_used: n_max, converged: true })
    } else {
        Err(Error::NotConverged { change })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayPoint {
    pub z: Complex,
    pub theta: f64,
    pub potential: f64,
}

/// Böttcher coordinate of one polynomial, with its domain computed once.
///
/// * `radius`: on `|z| > radius` the product formula is the analytic
///   Böttcher map.
/// * `level`: the largest Green value on the circle `|z| = radius`; every
///   point with `G(z) > level` lies outside that circle.
#[derive(Debug, Clone)]
pub struct Boettcher {
    p: Polynomial,
    c: Complex,
    radius: f64,
    level: f64,
}

impl Boettcher {
    pub fn new(p: &Polynomial) -> Result<Self> {
        let d = p.degree();
        let lead = p.leading();
        let c = (lead.ln() / (d as f64 - 1.0)).exp();
        let radius = domain_radius(p);
        let mut b = Boettcher { p: p.clone(), c, radius, level: 0.0 };
        b.level = b.max_green_on_circle()?;
        Ok(b)
    }

    pub fn polynomial(&self) -> &Polynomial {
        &self.p
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    fn max_green_on_circle(&self) -> Result<f64> {
        let g_at = |t: f64| -> Result<f64> {
            Ok(green(&self.p, Complex::from_polar(self.radius, t), GREEN_BUDGET)?.g)
        };
        let mut best = (0.0, f64::NEG_INFINITY);
        for k in 0..CIRCLE_SAMPLES {
            let t = TAU * k as f64 / CIRCLE_SAMPLES as f64;
            let g = g_at(t)?;
            if g > best.1 {
                best = (t, g);
            }
        }
        // Golden-section refinement around the best sample.
        let h = TAU / CIRCLE_SAMPLES as f64;
        let (mut lo, mut hi) = (best.0 - h, best.0 + h);
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..40 {
            let m1 = hi - phi * (hi - lo);
            let m2 = lo + phi * (hi - lo);
            if g_at(m1)? < g_at(m2)? {
                lo = m1;
            } else {
                hi = m2;
            }
        }
        let refined = g_at(0.5 * (lo + hi))?;
        let top = best.1.max(refined);
        Ok(top + 1e-9 * top.abs() + 1e-12)
    }

    /// True when the product formula applies at `z`.
    pub fn contains(&self, z: Complex) -> bool {
        z.norm() > self.radius
    }

    /// `(φ(z), φ'(z)/φ(z))`; the caller guarantees `|z| > radius`.
    fn series(&self, z: Complex) -> Result<(Complex, Complex)> {
        let coeffs = self.p.coeffs();
        let d = self.p.degree();
        let df = d as f64;
        let lead = self.p.leading();
        let mut w = z.inv();
        let mut u = w;
        let mut log_sum = Complex::new(0.0, 0.0);
        let mut dlog = w;
        let mut scale = 1.0;
        for n in 0..400 {
            // num = z_n^(-d) P(z_n), dnum = z_n^(1-d) P'(z_n).
            let (num, dnum) = reversed_sums(coeffs, w);
            let factor = num / lead;
            if factor.re <= 1e-9 {
                return Err(Error::BranchAmbiguity);
            }
            let q = dnum / num;
            scale /= df;
            let log_factor = factor.ln() * scale;
            let dterm = (q - df) * u * scale;
            log_sum += log_factor;
            dlog += dterm;
            u *= q;
            w = w.powu(d as u32) / num;
            if n > 0 && log_factor.norm() + dterm.norm() < 1e-18 * (1.0 + log_sum.norm() + dlog.norm()) {
                break;
            }
        }
        let phi = self.c * z * log_sum.exp();
        Ok((phi, dlog))
    }

    /// `φ(z)` for `|z| > radius` (implied by `G(z) > level`).
    pub fn phi(&self, z: Complex) -> Result<Complex> {
        self.check_domain(z)?;
        Ok(self.series(z)?.0)
    }

    /// `φ(z)` and `φ'(z)`.
    pub fn phi_with_derivative(&self, z: Complex) -> Result<(Complex, Complex)> {
        self.check_domain(z)?;
        let (phi, dlog) = self.series(z)?;
        Ok((phi, phi * dlog))
    }

    fn check_domain(&self, z: Complex) -> Result<()> {
        if self.contains(z) {
            return Ok(());
        }
        let g = green(&self.p, z, GREEN_BUDGET).map_or(f64::NAN, |v| v.g);
        Err(Error::OutsideDomain { potential: g, level: self.level })
    }

    /// Arg φ(z) / 2π in `[0, 1)`.
    pub fn ray_angle(&self, z: Complex) -> Result<f64> {
        Ok(unit_angle(self.phi(z)?))
    }

    /// Solves `φ(z) = w` for `log|w| > level` by Newton's method on
    /// `log φ(z) - log w`.
    pub fn inverse(&self, w: Complex) -> Result<Complex> {
        let g = w.norm().ln();
        if !(g > self.level) {
            return Err(Error::OutsideDomain { potential: g, level: self.level });
        }
        let mut z = w / self.c;
        if !self.contains(z) {
            z *= 1.01 * self.radius / z.norm();
        }
        for _ in 0..100 {
            let (phi, dlog) = self.series(z)?;
            let residual = (phi / w).ln();
            let mut step = residual / dlog;
            let mut next = z - step;
            let mut halvings = 0;
            while !self.contains(next) && halvings < 60 {
                step *= 0.5;
                next = z - step;
                halvings += 1;
            }
            if !self.contains(next) {
                break;
            }
            z = next;
            if step.norm() <= 1e-15 * z.norm().max(1.0) {
                return Ok(z);
            }
        }
        let (phi, _) = self.series(z)?;
        if (phi / w).ln().norm() < 1e-12 {
            Ok(z)
        } else {
            Err(Error::NewtonDiverged { traced: 0, last_re: z.re, last_im: z.im })
        }
    }

    /// Points `{G = g}` at `samples` equally spaced Böttcher angles.
    pub fn level_curve(&self, g: f64, samples: usize) -> Result<Vec<Complex>> {
        let r = g.exp();
        (0..samples).map(|k| self.inverse(Complex::from_polar(r, TAU * k as f64 / samples as f64))).collect()
    }

    /// Traces the external ray of angle `theta` from potential `g_from` down
    /// to `g_to` at `steps` geometrically spaced potentials.
    ///
    /// Below the Böttcher domain a point of potential `g` is found from
    /// `P^m(z) = φ⁻¹(e^(d^m (g + 2πiθ)))` with the smallest `m` that lifts it
    /// into the domain, by Newton continuation from the previous ray point.
    /// A failed step is halved (in log-potential) down to `1e-6` of its
    /// nominal size before [`Error::NewtonDiverged`] is reported.
    pub fn external_ray(&self, theta: f64, g_from: f64, g_to: f64, steps: usize) -> Result<Vec<RayPoint>> {
        if !(g_from > g_to && g_to > 0.0) {
            return Err(Error::InvalidArgument("external ray needs g_from > g_to > 0"));
        }
        if !(0.0..1.0).contains(&theta) {
            return Err(Error::InvalidArgument("ray angle must lie in [0, 1)"));
        }
        if steps == 0 {
            return Err(Error::InvalidArgument("external ray needs at least one step"));
        }
        let potentials: Vec<f64> = if steps == 1 {
            alloc::vec![g_from]
        } else {
            let ratio = (g_to / g_from).ln() / (steps - 1) as f64;
            (0..steps).map(|k| g_from * (ratio * k as f64).exp()).collect()
        };
        let nominal = if steps == 1 { 0.1 } else { -(g_to / g_from).ln() / (steps - 1) as f64 };

        let mut tracer = RayTracer::start(self, theta, g_from)?;
        let mut out = Vec::with_capacity(steps);
        for &g in &potentials {
            tracer.advance_to(g, nominal, out.len())?;
            out.push(RayPoint { z: tracer.z, theta, potential: g });
        }
        Ok(out)
    }
}

fn reversed_sums(coeffs: &[Complex], w: Complex) -> (Complex, Complex) {
    // Σ_j a_j w^(d-j) and Σ_j j a_j w^(d-j): a_0 carries the top power of w.
    let mut num = Complex::new(0.0, 0.0);
    let mut dnum = Complex::new(0.0, 0.0);
    for (j, &a) in coeffs.iter().enumerate() {
        num = num * w + a;
        dnum = dnum * w + a * (j as f64);
    }
    (num, dnum)
}

/// Smallest radius with `s(R) = Σ_{j<d} |a_j| / (|a_d| R^(d-j)) <= 1/2` and
/// `|a_d| R^(d-1) (1 - s(R)) > 1`.
fn domain_radius(p: &Polynomial) -> f64 {
    let d = p.degree();
    let lead = p.leading().norm();
    let ok = |r: f64| {
        let s: f64 = p.coeffs()[..d]
            .iter()
            .enumerate()
            .map(|(j, a)| a.norm() / (lead * r.powi((d - j) as i32)))
            .sum();
        s <= 0.5 && lead * r.powi(d as i32 - 1) * (1.0 - s) >= 1.0 + 1e-9
    };
    let mut hi = 1e-6;
    while !ok(hi) {
        hi *= 2.0;
    }
    let mut lo = hi / 2.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi * (1.0 + 1e-12)
}

fn unit_angle(w: Complex) -> f64 {
    let t = Euclid::rem_euclid(&(w.arg() / TAU), &1.0);
    if t >= 1.0 {
        0.0
    } else {
        t
    }
}

/// Signed distance between two angles in turns, in `[-1/2, 1/2)`.
fn angle_gap(a: f64, b: f64) -> f64 {
    Euclid::rem_euclid(&(a - b + 0.5), &1.0) - 0.5
}

struct RayTracer<'a> {
    b: &'a Boettcher,
    theta: f64,
    z: Complex,
    g: f64,
    /// |dz / dlog g| at the current point, used to reject branch jumps.
    speed: f64,
}

impl<'a> RayTracer<'a> {
    fn start(b: &'a Boettcher, theta: f64, g_from: f64) -> Result<Self> {
        let g0 = if g_from > b.level { g_from } else { 2.0 * b.level + 0.5 };
        let z = b.inverse(Complex::from_polar(g0.exp(), TAU * theta))?;
        let (_, dlog) = b.series(z)?;
        // dz/dg = 1/(φ'/φ) along the ray; per unit of log g multiply by g.
        let speed = g0 / dlog.norm();
        let mut t = RayTracer { b, theta, z, g: g0, speed };
        if g0 > g_from {
            t.advance_to(g_from, 0.05, 0)?;
        }
        Ok(t)
    }

    fn advance_to(&mut self, g_target: f64, nominal: f64, traced: usize) -> Result<()> {
        let min_step = 1e-6 * nominal.max(1e-3);
        let mut step = nominal.max(1e-3).min((self.g / g_target).ln().abs().max(min_step));
        while self.g > g_target * (1.0 + 1e-15) {
            let remaining = (self.g / g_target).ln();
            let h = step.min(remaining);
            let g_next = if h >= remaining { g_target } else { self.g * (-h).exp() };
            match self.solve(g_next, h) {
                Some(z) => {
                    let moved = (z - self.z).norm();
                    self.speed = (moved / h).max(1e-300);
                    self.z = z;
                    self.g = g_next;
                    step = (step * 2.0).min(nominal.max(1e-3));
                }
                None => {
                    step *= 0.5;
                    if step < min_step {
                        return Err(Error::NewtonDiverged { traced, last_re: self.z.re, last_im: self.z.im });
                    }
                }
            }
        }
        Ok(())
    }

    /// Ray point at potential `g`, starting Newton from the current point.
    fn solve(&self, g: f64, h: f64) -> Option<Complex> {
        let b = self.b;
        let p = &b.p;
        let d = p.degree() as f64;
        let mut m = 0u32;
        let mut lifted = g;
        let mut angle = self.theta;
        while lifted <= b.level * (1.0 + 1e-9) + 1e-12 {
            m += 1;
            lifted *= d;
            angle = Euclid::rem_euclid(&(angle * d), &1.0);
            if m > 200 {
                return None;
            }
        }
        let target = b.inverse(Complex::from_polar(lifted.exp(), TAU * angle)).ok()?;
        let z = if m == 0 {
            target
        } else {
            let mut z = self.z;
            let mut done = false;
            for _ in 0..80 {
                let (val, der) = iterate_with_derivative(p, z, m);
                if !(val.re.is_finite() && val.im.is_finite()) || der == Complex::new(0.0, 0.0) {
                    return None;
                }
                // Newton on log(P^m(z) / target): tame for large targets.
                let step = (val / target).ln() * val / der;
                z -= step;
                if step.norm() <= 1e-14 * z.norm().max(1.0) {
                    done = true;
                    break;
                }
            }
            if !done {
                return None;
            }
            let (val, _) = iterate_with_derivative(p, z, m);
            if !b.contains(val) || angle_gap(b.ray_angle(val).ok()?, angle).abs() > 1e-8 {
                return None;
            }
            z
        };
        let limit = 4.0 * self.speed * h + 1e-12 * z.norm().max(1.0);
        if (z - self.z).norm() > limit {
            return None;
        }
        Some(z)
    }
}

/// `(P^m(z), (P^m)'(z))`.
fn iterate_with_derivative(p: &Polynomial, z: Complex, m: u32) -> (Complex, Complex) {
    let mut w = z;
    let mut der = Complex::new(1.0, 0.0);
    for _ in 0..m {
        let (val, dval) = p.eval_with_derivative(w);
        der *= dval;
        w = val;
    }
    (w, der)
}

/// Böttcher coordinate `φ(z)` (builds the domain on every call; use
/// [`Boettcher`] for repeated evaluation).
pub fn boettcher(p: &Polynomial, z: Complex) -> Result<Complex> {
    Boettcher::new(p)?.phi(z)
}

/// External ray of angle `theta` between potentials `g_from > g_to > 0`.
pub fn external_ray(p: &Polynomial, theta: f64, g_from: f64, g_to: f64, steps: usize) -> Result<Vec<RayPoint>> {
    Boettcher::new(p)?.external_ray(theta, g_from, g_to, steps)
}

/// Böttcher angle of `z` in turns.
pub fn ray_angle(p: &Polynomial, z: Complex) -> Result<f64> {
    Boettcher::new(p)?.ray_angle(z)
}

/// True when consecutive turns of the closed polygon all have the same
/// orientation.
pub fn is_strictly_convex(points: &[Complex]) -> bool {
    let n = points.len();
    if n < 3 {
        return false;
    }
    let mut sign = 0.0;
    for k in 0..n {
        let a = points[(k + 1) % n] - points[k];
        let b = points[(k + 2) % n] - points[(k + 1) % n];
        let cross = a.re * b.im - a.im * b.re;
        if cross == 0.0 {
            return false;
        }
        if sign == 0.0 {
            sign = cross.signum();
        } else if cross.signum() != sign {
            return false;
        }
    }
    true
}
