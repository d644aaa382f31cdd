//! Forward orbits, real-part growth constants, the shadow map and its shift.
//!
//! The shadow of `z` is `(x_0, …, x_N)` with `x_j = Re P^j(z)`; the shift `Q`
//! satisfies `Q ∘ Φ = Φ ∘ P`, so shifting a shadow amounts to recomputing it
//! from `P(witness)`.

use alloc::vec::Vec;
use core::cmp::Ordering;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::poly::i_pow;
use crate::{Complex, Error, Polynomial, Result, OVERFLOW_GUARD};

/// Angular resolution of the boundary searches for `R`, `R'`, `R''`.
const BOUNDARY_SAMPLES: usize = 720;

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitRecord {
    /// `z_0, …, z_n`; ends at the first escaping point if there is one.
    pub points: Vec<Complex>,
    pub escaped: bool,
    /// First `n` with `|z_n| > radius_used` (strict).
    pub escape_index: Option<usize>,
    pub radius_used: f64,
}

/// Iterates until `n_max` steps are done or `|z_n|` strictly exceeds
/// `escape_radius`.
pub fn iterate(p: &Polynomial, z0: Complex, n_max: usize, escape_radius: f64) -> Result<OrbitRecord> {
    if !(escape_radius > 0.0) {
        return Err(Error::InvalidArgument("escape radius must be positive"));
    }
    let mut points = Vec::with_capacity(n_max.min(4096) + 1);
    let mut z = z0;
    let mut escape_index = None;
    for n in 0..=n_max {
        points.push(z);
        if !(z.norm() <= escape_radius) {
            escape_index = Some(n);
            break;
        }
        if n < n_max {
            z = p.eval_unchecked(z);
        }
    }
    Ok(OrbitRecord { points, escaped: escape_index.is_some(), escape_index, radius_used: escape_radius })
}

/// `(1 + Σ|a_j|) / |a_d|`, at least 2: every orbit leaving this disk escapes.
pub fn coefficient_escape_radius(p: &Polynomial) -> f64 {
    let total: f64 = p.coeffs().iter().map(|c| c.norm()).sum();
    ((1.0 + total) / p.leading().norm()).max(2.0)
}

/// `max(R'', 2, (1 + Σ|a_j|) / |a_d|)`; `R''` only enters for
/// non-exceptional maps.
pub fn default_escape_radius(p: &Polynomial) -> f64 {
    let base = coefficient_escape_radius(p);
    match escape_constants(p) {
        Ok(k) => base.max(k.r_double_prime),
        Err(_) => base,
    }
}

/// Constants controlling how real parts grow far from the origin.
///
/// With `a_d i^d = A + iB` (`A != 0` exactly when `P` is non-exceptional):
/// * in the cone `|x| <= η|y|`, `|y| >= R`: `|x_1| >= |A| |y|^d / 2`;
/// * for `|x| >= η|y|`, `|x| >= R'`: either `|x_1| >= σ|a_d||x|^d/2`, or
///   `|x_1| <= η|y_1|` and `|y_1| >= (1-σ)|a_d||x|^d/2`;
/// * for `|x| >= R''`: `|x_1| >= λ|x|^d` or `|x_2| >= λ^(d+1)|x|^(d^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscapeConstants {
    pub a: f64,
    pub b: f64,
    pub eta: f64,
    pub sigma: f64,
    pub r: f64,
    pub r_prime: f64,
    pub r_double_prime: f64,
    pub lambda: f64,
}

/// Computes [`EscapeConstants`] for a non-exceptional polynomial.
///
/// `η` is the largest value with `η(1+η)^(d-1) <= |A| / (4 d |a_d|)`. The
/// radii are the smallest ones (geometric grid, then bisection) at which the
/// corresponding inequality holds on 720 sampled boundary points. `λ` is the
/// smallest of the three growth constants the case analysis produces.
pub fn escape_constants(p: &Polynomial) -> Result<EscapeConstants> {
    if !p.is_non_exceptional() {
        return Err(Error::NotNonExceptional);
    }
    let d = p.degree();
    let df = d as f64;
    let lead = p.leading();
    let lead_mod = lead.norm();
    let rot = lead * i_pow(d as i64);
    let (a, b) = (rot.re, rot.im);

    let target = a.abs() / (4.0 * df * lead_mod);
    let g = |eta: f64| eta * (1.0 + eta).powi(d as i32 - 1);
    let (mut lo, mut hi) = (0.0, target.max(1e-300));
    while hi - lo > 1e-12 * hi.max(1e-300) && hi - lo > 1e-300 {
        let mid = 0.5 * (lo + hi);
        if g(mid) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let eta = lo;
    let sigma = eta / (1.0 + eta);

    let r = smallest_radius(|r| cone_boundary_holds(p, a, eta, r))?;
    let r_prime = smallest_radius(|r| strip_boundary_holds(p, eta, sigma, r))?;

    let lambda_cone = a.abs() / (2.0 * eta.powi(d as i32));
    let lambda_direct = sigma * lead_mod / 2.0;
    let lambda_two_step =
        (0.5 * a.abs() * ((1.0 - sigma) * lead_mod / 2.0).powi(d as i32)).powf(1.0 / (df + 1.0));
    let lambda = lambda_cone.min(lambda_direct).min(lambda_two_step);

    let floor = r_prime.max(eta * r);
    let r_double_prime =
        smallest_radius(|rr| rr >= floor && growth_boundary_holds(p, eta, lambda, rr))?.max(floor);

    Ok(EscapeConstants { a, b, eta, sigma, r, r_prime, r_double_prime, lambda })
}

/// Smallest radius passing `check`, found on a doubling grid and refined by
/// bisection. A grid point counts only if it and the next two also pass.
fn smallest_radius(check: impl Fn(f64) -> bool) -> Result<f64> {
    let mut prev = 0.0;
    let mut r = 1e-3;
    while r < 1e12 {
        if check(r) && check(2.0 * r) && check(4.0 * r) {
            let (mut lo, mut hi) = (prev, r);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if check(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(hi);
        }
        prev = r;
        r *= 2.0;
    }
    Err(Error::PreconditionViolated("no radius below 1e12 satisfies the growth estimate"))
}

fn linspace(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| -1.0 + 2.0 * k as f64 / (n - 1) as f64)
}

fn cone_boundary_holds(p: &Polynomial, a: f64, eta: f64, r: f64) -> bool {
    let bound = a.abs() * r.powi(p.degree() as i32) / 2.0;
    linspace(BOUNDARY_SAMPLES / 2).all(|t| {
        [r, -r].iter().all(|&y| p.eval_unchecked(Complex::new(eta * r * t, y)).re.abs() >= bound)
    })
}

fn strip_boundary_holds(p: &Polynomial, eta: f64, sigma: f64, r: f64) -> bool {
    linspace(BOUNDARY_SAMPLES / 2).all(|t| {
        [r, -r].iter().all(|&x| strip_alternative(p, eta, sigma, Complex::new(x, r / eta * t)))
    })
}

fn strip_alternative(p: &Polynomial, eta: f64, sigma: f64, z: Complex) -> bool {
    let lead = p.leading().norm();
    let xd = z.re.abs().powi(p.degree() as i32);
    let w = p.eval_unchecked(z);
    w.re.abs() >= sigma * lead * xd / 2.0
        || (w.re.abs() <= eta * w.im.abs() && w.im.abs() >= (1.0 - sigma) * lead * xd / 2.0)
}

fn growth_boundary_holds(p: &Polynomial, eta: f64, lambda: f64, r: f64) -> bool {
    // Cover |x| <= eta|y| up to a few cone widths, then a geometric tail.
    let spread = 4.0 * r / eta;
    let near = linspace(BOUNDARY_SAMPLES / 2).map(move |t| t * spread);
    let tail = (1..=20).flat_map(move |k| {
        let y = spread * 2f64.powi(k);
        [y, -y]
    });
    near.chain(tail)
        .all(|y| [r, -r].iter().all(|&x| growth_dichotomy(p, lambda, Complex::new(x, y))))
}

fn growth_dichotomy(p: &Polynomial, lambda: f64, z: Complex) -> bool {
    let d = p.degree() as i32;
    let x = z.re.abs();
    let z1 = p.eval_unchecked(z);
    if z1.re.abs() >= lambda * x.powi(d) {
        return true;
    }
    let z2 = p.eval_unchecked(z1);
    if !(z2.re.is_finite() && z2.im.is_finite()) {
        // |z_1| is beyond double range; the second iterate is unbounded.
        return true;
    }
    z2.re.abs() >= lambda.powi(d + 1) * x.powi(d * d)
}

/// `|x_1| >= λ|x|^d` or `|x_2| >= λ^(d+1)|x|^(d^2)` at a point with
/// `|Re z| >= R''`.
pub fn check_growth_bound(p: &Polynomial, k: &EscapeConstants, z: Complex) -> Result<bool> {
    if z.re.abs() < k.r_double_prime {
        return Err(Error::PreconditionViolated("|Re z| must be at least R''"));
    }
    Ok(growth_dichotomy(p, k.lambda, z))
}

/// Cone estimate: for `|x| <= η|y|` and `|y| >= R`, `|x_1| >= |A||y|^d / 2`.
/// Returns `None` outside the cone.
pub fn check_cone_bound(p: &Polynomial, k: &EscapeConstants, z: Complex) -> Option<bool> {
    if z.re.abs() > k.eta * z.im.abs() || z.im.abs() < k.r {
        return None;
    }
    let bound = k.a.abs() * z.im.abs().powi(p.degree() as i32) / 2.0;
    Some(p.eval_unchecked(z).re.abs() >= bound)
}

/// Strip estimate for `|x| >= η|y|`, `|x| >= R'`. `None` outside the region.
pub fn check_strip_bound(p: &Polynomial, k: &EscapeConstants, z: Complex) -> Option<bool> {
    if z.re.abs() < k.eta * z.im.abs() || z.re.abs() < k.r_prime {
        return None;
    }
    Some(strip_alternative(p, k.eta, k.sigma, z))
}

/// `Φ(witness) = (Re z_0, …, Re z_N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadowPoint {
    pub xs: Vec<f64>,
    pub witness: Complex,
}

impl ShadowPoint {
    /// The embedding depth `N` (one less than the vector length).
    pub fn depth(&self) -> usize {
        self.xs.len() - 1
    }

    /// Sup-norm distance to another shadow of the same depth.
    pub fn sup_distance(&self, other: &ShadowPoint) -> f64 {
        self.xs.iter().zip(&other.xs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// The shadow map `Φ` with depth `N`. Orbits that pass the overflow guard
/// are reported as [`Error::Escaped`].
pub fn shadow(p: &Polynomial, z0: Complex, n: usize) -> Result<ShadowPoint> {
    let mut xs = Vec::with_capacity(n + 1);
    let mut z = z0;
    for step in 0..=n {
        if !(z.norm() <= OVERFLOW_GUARD) {
            return Err(Error::Escaped { step });
        }
        xs.push(z.re);
        if step < n {
            z = p.eval_unchecked(z);
        }
    }
    Ok(ShadowPoint { xs, witness: z0 })
}

/// The shadow shift `Q`: `Φ(P(witness))` at the same depth.
pub fn shadow_shift(p: &Polynomial, s: &ShadowPoint) -> Result<ShadowPoint> {
    let next = p.eval(s.witness).map_err(|_| Error::Escaped { step: 1 })?;
    shadow(p, next, s.depth())
}

/// A point of the one-point compactification `S ∪ {∞}`.
#[derive(Debug, Clone, PartialEq)]
pub enum ExtendedShadow {
    Finite(ShadowPoint),
    Infinity,
}

impl ExtendedShadow {
    pub fn of(p: &Polynomial, z0: Complex, n: usize) -> Self {
        match shadow(p, z0, n) {
            Ok(s) => Self::Finite(s),
            Err(_) => Self::Infinity,
        }
    }

    pub fn shift(&self, p: &Polynomial) -> Self {
        match self {
            Self::Finite(s) => shadow_shift(p, s).map_or(Self::Infinity, Self::Finite),
            Self::Infinity => Self::Infinity,
        }
    }

    /// Sup-norm distance; infinity is at infinite distance from every
    /// finite shadow and at distance zero from itself.
    pub fn distance(&self, other: &Self) -> f64 {
        match (self, other) {
            (Self::Finite(a), Self::Finite(b)) => a.sup_distance(b),
            (Self::Infinity, Self::Infinity) => 0.0,
            _ => f64::INFINITY,
        }
    }

    /// Total order: lexicographic on finite vectors, infinity last.
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Self::Finite(a), Self::Finite(b)) => a
                .xs
                .iter()
                .zip(&b.xs)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or_else(|| a.xs.len().cmp(&b.xs.len())),
            (Self::Finite(_), Self::Infinity) => Ordering::Less,
            (Self::Infinity, Self::Finite(_)) => Ordering::Greater,
            (Self::Infinity, Self::Infinity) => Ordering::Equal,
        }
    }
}

/// Real parts `Re P^m(z0)` for `m < len`; entries after the orbit passes the
/// overflow guard are `+∞`.
pub fn real_track(p: &Polynomial, z0: Complex, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut z = z0;
    for m in 0..len {
        if !(z.norm() <= OVERFLOW_GUARD) {
            out.resize(len, f64::INFINITY);
            break;
        }
        out.push(z.re);
        if m + 1 < len {
            z = p.eval_unchecked(z);
        }
    }
    out
}
