//! Mirrored orbits: distinct points whose orbits have equal real parts.
//!
//! Candidates for mirrors of `z` lie on the vertical line `Re w = Re z` and
//! are the real roots `y` of `Re P(x₀ + iy) = x₁`, a real polynomial of
//! degree at most `d`. Deeper conditions `Re P^n(w) = x_n` only filter those
//! candidates; they are never solved directly.

use alloc::vec::Vec;
use core::f64::consts::TAU;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::orbits::coefficient_escape_radius;
use crate::par::map_indices;
use crate::poly::i_pow;
use crate::potential::{green, GREEN_BUDGET};
use crate::rng::Stream;
use crate::roots::real_roots;
use crate::{Complex, Error, Polynomial, Result, OVERFLOW_GUARD};

const NEGLIGIBLE: f64 = 1e-14;

/// Image of one vertical line in another.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineImage {
    /// The whole source line maps into the target line.
    Invariant,
    /// Number of points of the source line mapped into the target line,
    /// with multiplicity.
    Count(usize),
}

/// Coefficients (ascending in `y`) of `Re P(x_src + iy) - x_dst`, and the
/// magnitude scale used to judge them.
fn line_polynomial(p: &Polynomial, x_src: f64, x_dst: f64) -> (Vec<f64>, f64) {
    let shifted = p.taylor_shift(Complex::new(x_src, 0.0));
    let mut f: Vec<f64> = shifted.iter().enumerate().map(|(k, b)| (b * i_pow(k as i64)).re).collect();
    let scale = shifted.iter().map(|b| b.norm()).fold(x_dst.abs(), f64::max).max(1.0);
    f[0] -= x_dst;
    (f, scale)
}

/// How many points of the line `Re z = x_src` map into `Re z = x_dst`.
pub fn line_image_count(p: &Polynomial, x_src: f64, x_dst: f64, tol: f64) -> Result<LineImage> {
    let (mut f, scale) = line_polynomial(p, x_src, x_dst);
    if f.iter().all(|c| c.abs() <= tol * scale) {
        return Ok(LineImage::Invariant);
    }
    trim(&mut f, scale);
    Ok(LineImage::Count(real_roots(&f)?.iter().map(|r| r.multiplicity).sum()))
}

/// Drops leading coefficients that are rounding noise.
fn trim(f: &mut Vec<f64>, scale: f64) {
    while f.len() > 1 && f.last().is_some_and(|c| c.abs() <= NEGLIGIBLE * scale) {
        f.pop();
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MirrorSet {
    pub base: Complex,
    pub mirrors: Vec<Complex>,
    pub depth_verified: usize,
    pub tol: f64,
}

/// Orbit up to `len` points; `None` once the overflow guard is passed.
fn orbit(p: &Polynomial, z: Complex, len: usize) -> Vec<Option<Complex>> {
    let mut out = Vec::with_capacity(len);
    let mut w = Some(z);
    for _ in 0..len {
        w = w.filter(|v| v.norm() <= OVERFLOW_GUARD);
        out.push(w);
        w = w.map(|v| p.eval_unchecked(v));
    }
    out
}

/// First index where the candidate's real part leaves the base's within
/// `tol · max(1, |z_n|)`, or `None` if it stays through the whole orbit.
/// Two orbits past the overflow guard count as equal.
fn first_mismatch(base: &[Option<Complex>], cand: &[Option<Complex>], tol: f64) -> Option<usize> {
    base.iter().zip(cand).position(|pair| match pair {
        (Some(b), Some(c)) => (b.re - c.re).abs() > tol * b.norm().max(1.0),
        (None, None) => false,
        _ => true,
    })
}

/// Gauss–Newton on `y ↦ (Re P^k(x₀ + iy) - x_k) / scale_k`, `k = 1..=levels`.
/// A step is kept only if it lowers the residual.
fn polish(p: &Polynomial, x0: f64, mut y: f64, base: &[Option<Complex>], levels: usize) -> f64 {
    let residual = |y: f64| -> Option<(f64, f64)> {
        let mut w = Complex::new(x0, y);
        let mut der = Complex::new(1.0, 0.0);
        let (mut rr, mut jr) = (0.0, 0.0);
        let mut jj = 0.0;
        for target in base.iter().skip(1).take(levels) {
            let b = (*target)?;
            let (v, dv) = p.eval_with_derivative(w);
            der *= dv;
            w = v;
            if !(w.norm() <= OVERFLOW_GUARD) {
                return None;
            }
            let s = b.norm().max(1.0);
            let r = (w.re - b.re) / s;
            let j = -der.im / s;
            rr += r * r;
            jr += j * r;
            jj += j * j;
        }
        Some((rr, if jj > 0.0 { jr / jj } else { 0.0 }))
    };
    let Some((mut cost, mut step)) = residual(y) else { return y };
    for _ in 0..6 {
        if cost == 0.0 || step == 0.0 {
            break;
        }
        match residual(y - step) {
            Some((c, s)) if c < cost => {
                y -= step;
                cost = c;
                step = s;
            }
            _ => break,
        }
    }
    y
}

/// Stage-one candidates on the vertical line through `z`, excluding `z`,
/// each paired with its orbit.
fn candidates(p: &Polynomial, z: Complex, base: &[Option<Complex>], tol: f64) -> Result<Vec<Complex>> {
    let x1 = base.get(1).copied().flatten().map_or(f64::INFINITY, |v| v.re);
    if !x1.is_finite() {
        // Past the overflow guard after one step: leave the set empty rather than
        // solving against an infinite target.
        return Ok(Vec::new());
    }
    let (mut f, scale) = line_polynomial(p, z.re, x1);
    if f.iter().all(|c| c.abs() <= tol * scale) {
        return Err(Error::InvariantLine);
    }
    trim(&mut f, scale);
    let roots = real_roots(&f)?;
    let levels = (base.len() - 1).min(3);
    let same = tol * z.norm().max(1.0);
    Ok(roots
        .iter()
        .map(|r| Complex::new(z.re, polish(p, z.re, r.value, base, levels)))
        .filter(|w| (w - z).norm() > same)
        .collect())
}

/// Mirrors of `z` verified through depth `depth`.
pub fn find_mirrors(p: &Polynomial, z: Complex, depth: usize, tol: f64) -> Result<MirrorSet> {
    if depth == 0 {
        return Err(Error::InvalidArgument("mirror depth must be at least 1"));
    }
    let base = orbit(p, z, depth + 1);
    let mirrors = candidates(p, z, &base, tol)?
        .into_iter()
        .filter(|&w| first_mismatch(&base, &orbit(p, w, depth + 1), tol).is_none())
        .collect();
    Ok(MirrorSet { base: z, mirrors, depth_verified: depth, tol })
}

/// Mirror sets of `samples` equally spaced base points on the segment `[a, b]`.
pub fn mirror_sweep(p: &Polynomial, a: Complex, b: Complex, samples: usize, depth: usize, tol: f64) -> Vec<Result<MirrorSet>> {
    map_indices(samples, |k| {
        let t = if samples > 1 { k as f64 / (samples - 1) as f64 } else { 0.0 };
        find_mirrors(p, a + (b - a) * t, depth, tol)
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BreakReport {
    pub pair: (Complex, Complex),
    pub break_index: Option<usize>,
}

/// First `k <= n_max` with `|P^k(z) - P^k(w)| <= tol`.
///
/// The pair must be a mirror pair up to the break: distinct, with matching
/// real parts (relative tolerance) at every step before the orbits meet.
pub fn mirror_breaks(p: &Polynomial, z: Complex, w: Complex, n_max: usize, tol: f64) -> Result<BreakReport> {
    if (z - w).norm() <= tol {
        return Err(Error::PreconditionViolated("mirror break needs two distinct points"));
    }
    let (mut a, mut b) = (z, w);
    for k in 1..=n_max {
        if (a.re - b.re).abs() > tol * a.norm().max(1.0) {
            return Err(Error::PreconditionViolated("points are not mirrored"));
        }
        a = p.eval_unchecked(a);
        b = p.eval_unchecked(b);
        if !(a.norm() <= OVERFLOW_GUARD && b.norm() <= OVERFLOW_GUARD) {
            break;
        }
        if (a - b).norm() <= tol {
            return Ok(BreakReport { pair: (z, w), break_index: Some(k) });
        }
    }
    Ok(BreakReport { pair: (z, w), break_index: None })
}

/// `max |G(w) - G(base)|` over the mirrors of an escaping base point.
pub fn green_level_diagnostic(p: &Polynomial, m: &MirrorSet) -> Result<f64> {
    let g0 = green(p, m.base, GREEN_BUDGET)?.g;
    if g0 <= 0.0 {
        return Err(Error::NotEscaping);
    }
    m.mirrors.iter().try_fold(0.0, |acc: f64, &w| Ok(acc.max((green(p, w, GREEN_BUDGET)?.g - g0).abs())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NEstimate {
    pub n: usize,
    pub not_stabilized: bool,
    /// Random bases whose vertical line was invariant (mirrors form a
    /// continuum there) and which were therefore skipped.
    pub skipped: usize,
}

/// Heuristic for the depth `N(P)` at which mirrors stabilize: the smallest
/// `n <= depth_cap / 2` such that, for every random base, each depth-`n`
/// mirror also survives to depth `2n`. Bases are uniform in the disk of the
/// coefficient escape radius, drawn from `seed`.
pub fn estimate_n(p: &Polynomial, sample_size: usize, depth_cap: usize, tol: f64, seed: u64) -> Result<NEstimate> {
    if depth_cap < 2 {
        return Err(Error::InvalidArgument("estimate_n needs depth_cap >= 2"));
    }
    if sample_size == 0 {
        return Err(Error::InvalidArgument("estimate_n needs at least one base point"));
    }
    let radius = coefficient_escape_radius(p);
    // For each base: the first mismatch depth of every stage-one candidate.
    let per_base = map_indices(sample_size, |i| -> Result<Option<Vec<usize>>> {
        let mut rng = Stream::new(seed, i as u64);
        let r = radius * rng.unit().sqrt();
        let z = Complex::from_polar(r, TAU * rng.unit());
        let base = orbit(p, z, depth_cap + 1);
        match candidates(p, z, &base, tol) {
            Ok(c) => Ok(Some(
                c.iter().map(|&w| first_mismatch(&base, &orbit(p, w, depth_cap + 1), tol).unwrap_or(usize::MAX)).collect(),
            )),
            Err(Error::InvariantLine) => Ok(None),
            Err(e) => Err(e),
        }
    });
    let mut fails = Vec::new();
    let mut skipped = 0;
    for entry in per_base {
        match entry? {
            Some(f) => fails.extend(f),
            None => skipped += 1,
        }
    }
    for n in 1..=depth_cap / 2 {
        if !fails.iter().any(|&f| f > n && f <= 2 * n) {
            return Ok(NEstimate { n, not_stabilized: false, skipped });
        }
    }
    Ok(NEstimate { n: depth_cap, not_stabilized: true, skipped })
}
