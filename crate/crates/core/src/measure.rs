//! Sampling the equilibrium measure `μ` by random backward iteration and its
//! pushforward `ν = Φ_* μ` onto shadows.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::f64::consts::TAU;

use num_traits::Euclid;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::orbits::{coefficient_escape_radius, escape_constants, shadow, shadow_shift, ShadowPoint};
use crate::par::map_indices;
use crate::rng::Stream;
use crate::roots::complex_roots;
use crate::{Complex, Error, Polynomial, Result};

/// Default number of backward steps per sample point.
pub const DEFAULT_BURN_IN: usize = 40;

/// The `d` solutions of `P(w) = z`, with multiplicity.
pub fn inverse_images(p: &Polynomial, z: Complex) -> Result<Vec<Complex>> {
    let mut coeffs = p.coeffs().to_vec();
    coeffs[0] -= z;
    let mut roots = complex_roots(&coeffs)?;
    let bound = 1e-10 * (1.0 + z.norm());
    for r in roots.iter_mut() {
        let mut residual = (p.eval_unchecked(*r) - z).norm();
        let mut tries = 0;
        while residual > bound && tries < 8 {
            let (v, dv) = p.eval_with_derivative(*r);
            if dv == Complex::new(0.0, 0.0) {
                break;
            }
            let cand = *r - (v - z) / dv;
            let cand_res = (p.eval_unchecked(cand) - z).norm();
            if cand_res >= residual {
                break;
            }
            *r = cand;
            residual = cand_res;
            tries += 1;
        }
        if residual > bound {
            return Err(Error::RootSolveFailed { residual });
        }
    }
    Ok(roots)
}

/// Equally weighted sample of the equilibrium measure.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSample {
    pub points: Vec<Complex>,
    pub seed: u64,
    pub burn_in: usize,
    pub polynomial_hash: u64,
}

impl MeasureSample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.points.len() as f64
    }
}

/// Start of every backward orbit: `R″ + 0i` when the escape constants exist,
/// otherwise the coefficient escape radius on the positive real axis.
pub fn base_point(p: &Polynomial) -> Complex {
    let r = escape_constants(p).map_or_else(|_| coefficient_escape_radius(p), |k| k.r_double_prime);
    Complex::new(r, 0.0)
}

/// `count` points, each the end of `burn_in` uniformly random inverse
/// branches applied to [`base_point`]. Point `i` draws from stream `i` of
/// `seed`, so the result does not depend on thread scheduling.
pub fn brolin_sample(p: &Polynomial, count: usize, burn_in: usize, seed: u64) -> Result<MeasureSample> {
    if count == 0 || burn_in == 0 {
        return Err(Error::InvalidArgument("brolin sample needs count >= 1 and burn_in >= 1"));
    }
    let base = base_point(p);
    let d = p.degree();
    let first = inverse_images(p, base)?;
    let points = map_indices(count, |i| -> Result<Complex> {
        let mut rng = Stream::new(seed, i as u64);
        let mut z = first[rng.index(d)];
        for _ in 1..burn_in {
            let pre = inverse_images(p, z)?;
            z = pre[rng.index(d)];
        }
        Ok(z)
    });
    Ok(MeasureSample {
        points: points.into_iter().collect::<Result<_>>()?,
        seed,
        burn_in,
        polynomial_hash: p.digest(),
    })
}

/// Shadows `Φ(z)` of a measure sample at a common depth.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadowSample {
    pub shadows: Vec<ShadowPoint>,
    pub depth: usize,
}

pub fn pushforward_shadow(p: &Polynomial, s: &MeasureSample, depth: usize) -> Result<ShadowSample> {
    let shadows = map_indices(s.points.len(), |i| shadow(p, s.points[i], depth));
    Ok(ShadowSample { shadows: shadows.into_iter().collect::<Result<_>>()?, depth })
}

pub type TestFn = Box<dyn Fn(Complex) -> f64 + Send + Sync>;

/// Real and imaginary moments of orders 1 to 4 and the indicators of a
/// 4 × 8 polar grid, all scaled to the largest modulus in `points`.
pub fn default_test_functions(points: &[Complex]) -> Vec<TestFn> {
    let r_max = points.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut fns: Vec<TestFn> = Vec::new();
    for k in 1..=4 {
        fns.push(Box::new(move |z: Complex| (z.re / r_max).powi(k)));
        fns.push(Box::new(move |z: Complex| (z.im / r_max).powi(k)));
    }
    for ring in 0..4usize {
        for sector in 0..8usize {
            fns.push(Box::new(move |z: Complex| {
                let r = ((4.0 * z.norm() / r_max) as usize).min(3);
                let s = ((8.0 * Euclid::rem_euclid(&z.arg(), &TAU) / TAU) as usize).min(7);
                if r == ring && s == sector {
                    1.0
                } else {
                    0.0
                }
            }));
        }
    }
    fns
}

/// `max_f |mean f(z) - mean f(P(z))|` over the sample points.
pub fn invariance_discrepancy(p: &Polynomial, points: &[Complex], test_fns: &[TestFn]) -> Result<f64> {
    if points.is_empty() || test_fns.is_empty() {
        return Err(Error::InvalidArgument("invariance discrepancy needs points and test functions"));
    }
    let images: Vec<Complex> = points.iter().map(|&z| p.eval_unchecked(z)).collect();
    Ok(max_mean_gap(points, &images, test_fns.len(), |k, z| test_fns[k](*z)))
}

fn max_mean_gap<T>(before: &[T], after: &[T], count: usize, f: impl Fn(usize, &T) -> f64) -> f64 {
    let n = before.len() as f64;
    (0..count)
        .map(|k| {
            let gap: f64 = before.iter().zip(after).map(|(a, b)| f(k, a) - f(k, b)).sum();
            (gap / n).abs()
        })
        .fold(0.0, f64::max)
}

/// The invariance statistic for `ν`: shadows against their shifts, with
/// coordinate moments of orders 1 to 4 and a 16-bin histogram of every
/// coordinate, scaled to the largest coordinate in the sample.
pub fn shadow_invariance_discrepancy(p: &Polynomial, sample: &ShadowSample) -> Result<f64> {
    if sample.shadows.is_empty() {
        return Err(Error::InvalidArgument("shadow invariance needs a nonempty sample"));
    }
    let shifted = map_indices(sample.shadows.len(), |i| shadow_shift(p, &sample.shadows[i]));
    let shifted: Vec<ShadowPoint> = shifted.into_iter().collect::<Result<_>>()?;
    let x_max = sample
        .shadows
        .iter()
        .flat_map(|s| s.xs.iter())
        .map(|x| x.abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut fns: Vec<Box<dyn Fn(&ShadowPoint) -> f64 + Send + Sync>> = Vec::new();
    for j in 0..=sample.depth {
        for k in 1..=4 {
            fns.push(Box::new(move |s: &ShadowPoint| (s.xs[j] / x_max).powi(k)));
        }
        for bin in 0..16usize {
            fns.push(Box::new(move |s: &ShadowPoint| {
                let t = ((s.xs[j] / x_max + 1.0) * 8.0).clamp(0.0, 15.0) as usize;
                if t == bin {
                    1.0
                } else {
                    0.0
                }
            }));
        }
    }
    Ok(max_mean_gap(&sample.shadows, &shifted, fns.len(), |k, s| fns[k](s)))
}
