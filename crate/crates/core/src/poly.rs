//! Polynomials, real-affine conjugation and the exceptional classification.
//!
//! Conjugation is restricted to maps `z ↦ a z + b` with `a, b` real and
//! `a != 0`: these are exactly the affine maps that send vertical lines to
//! vertical lines, so they preserve everything the real parts of orbits can
//! see.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::{Complex, Error, Result};

/// Default relative band for "this coefficient is real".
pub const DEFAULT_TOL: f64 = 1e-9;

/// Coefficients smaller than this fraction of the largest one are dropped
/// before classification.
const NEGLIGIBLE_COEFF: f64 = 1e-14;

/// A Horner evaluation produced a non-finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Overflow;

/// `z ↦ a z + b` with `a` real and nonzero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealAffineMap {
    pub a: f64,
    pub b: f64,
}

impl RealAffineMap {
    pub const IDENTITY: Self = Self { a: 1.0, b: 0.0 };

    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidArgument("affine map needs finite a != 0 and finite b"));
        }
        Ok(Self { a, b })
    }

    pub fn apply(&self, z: Complex) -> Complex {
        z * self.a + self.b
    }

    pub fn inverse(&self) -> Self {
        Self { a: 1.0 / self.a, b: -self.b / self.a }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self { a: self.a * other.a, b: self.a * other.b + self.b }
    }
}

/// Complex polynomial of degree at least two, coefficients in ascending order.
#[derive(Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex>,
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Polynomial").field(&self.coeffs).finish()
    }
}

impl Polynomial {
    /// Builds a polynomial from `a_0, …, a_d`. Exact trailing zeros are
    /// dropped; the remaining degree must be at least two.
    pub fn new(mut coeffs: Vec<Complex>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidPolynomial("coefficients must be finite"));
        }
        while coeffs.last().is_some_and(|c| c.re == 0.0 && c.im == 0.0) {
            coeffs.pop();
        }
        if coeffs.len() < 3 {
            return Err(Error::InvalidPolynomial("degree must be at least 2"));
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex::new(c, 0.0)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn leading(&self) -> Complex {
        self.coeffs[self.degree()]
    }

    /// True when every coefficient has zero imaginary part.
    pub fn has_real_coefficients(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == 0.0)
    }

    /// Horner evaluation without any overflow check.
    #[inline]
    pub fn eval_unchecked(&self, z: Complex) -> Complex {
        let mut acc = self.coeffs[self.coeffs.len() - 1];
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc * z + c;
        }
        acc
    }

    /// Horner evaluation; a non-finite result is reported as [`Overflow`].
    pub fn eval(&self, z: Complex) -> core::result::Result<Complex, Overflow> {
        let w = self.eval_unchecked(z);
        if w.re.is_finite() && w.im.is_finite() {
            Ok(w)
        } else {
            Err(Overflow)
        }
    }

    /// `(P(z), P'(z))` in one Horner pass.
    #[inline]
    pub fn eval_with_derivative(&self, z: Complex) -> (Complex, Complex) {
        let mut p = self.coeffs[self.coeffs.len() - 1];
        let mut dp = Complex::new(0.0, 0.0);
        for c in self.coeffs.iter().rev().skip(1) {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Coefficients of `P(x + t)` as a polynomial in `t`.
    pub fn taylor_shift(&self, x: Complex) -> Vec<Complex> {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let next = c[j + 1];
                c[j] += x * next;
            }
        }
        c
    }

    /// `m ∘ P ∘ m⁻¹`, expanded back to coefficient form.
    pub fn conjugate(&self, m: &RealAffineMap) -> Polynomial {
        // P((z - b) / a) by Horner over polynomials.
        let alpha = Complex::new(1.0 / m.a, 0.0);
        let beta = Complex::new(-m.b / m.a, 0.0);
        let d = self.degree();
        let mut acc: Vec<Complex> = vec![self.coeffs[d]];
        for c in self.coeffs[..d].iter().rev() {
            let mut next = vec![Complex::new(0.0, 0.0); acc.len() + 1];
            for (k, &v) in acc.iter().enumerate() {
                next[k] += beta * v;
                next[k + 1] += alpha * v;
            }
            next[0] += c;
            acc = next;
        }
        for v in acc.iter_mut() {
            *v *= m.a;
        }
        acc[0] += m.b;
        Polynomial { coeffs: acc }
    }

    /// Conjugation by the translation `z ↦ z - c`; the vertical line
    /// `Re z = c` becomes the imaginary axis.
    pub fn recenter(&self, c: f64) -> Polynomial {
        self.conjugate(&RealAffineMap { a: 1.0, b: -c })
    }

    /// Real-affine normal form: unit-modulus leading coefficient and, where a
    /// real translation allows it, no `z^(d-1)` term. Returns the normalized
    /// polynomial together with the map `m` such that it equals `m ∘ P ∘ m⁻¹`.
    ///
    /// The `z^(d-1)` coefficient can be removed by a real translation only
    /// when `a_(d-1) / a_d` is real. Otherwise the translation minimizing its
    /// modulus is used and the remaining coefficient is a purely imaginary
    /// multiple of the leading one.
    pub fn normalize(&self) -> (Polynomial, RealAffineMap) {
        let d = self.degree();
        let lead = self.leading();
        let scale = lead.norm().powf(1.0 / (d as f64 - 1.0));
        let sub = self.coeffs[d - 1];
        let shift = scale * (sub * lead.conj()).re / (d as f64 * lead.norm_sqr());
        let m = RealAffineMap { a: scale, b: shift };
        let mut out = self.conjugate(&m);
        let ratio = out.coeffs[d - 1] / out.coeffs[d];
        if ratio.re.abs() <= 1e-12 * (1.0 + ratio.norm()) && (sub / lead).im.abs() <= 1e-15 * (1.0 + (sub / lead).norm()) {
            out.coeffs[d - 1] = Complex::new(0.0, 0.0);
        }
        (out, m)
    }

    /// Decides between non-exceptional, strongly and weakly exceptional.
    ///
    /// `P` is non-exceptional iff `Re(a_d i^d) != 0`. Otherwise the only
    /// vertical line that can map into a vertical line is `Re z = c` with `c`
    /// read off the `z^(d-1)` term; after recentering on it, `P` is strongly
    /// exceptional iff every `a_j i^(j-1)` is real.
    pub fn classify(&self, tol: f64) -> Result<Classification> {
        if !(tol >= 0.0) {
            return Err(Error::InvalidArgument("tolerance must be non-negative"));
        }
        let d = self.degree();
        let lead = self.leading();
        let leading_residual = real_residual(lead * i_pow(d as i64 - 1));
        match band(leading_residual, tol) {
            Band::Outside => {
                return Ok(Classification {
                    kind: ExceptionalKind::NonExceptional,
                    leading_residual,
                    line: None,
                    witnesses: Vec::new(),
                })
            }
            Band::Ambiguous => {
                return Err(Error::AmbiguousClassification { degree: d, residual: leading_residual, tol })
            }
            Band::Inside => {}
        }

        // a_d i^(d-1) is real; the candidate invariant line Re z = c.
        let lead_real = (lead * i_pow(d as i64 - 1)).re;
        let sub = self.coeffs[d - 1] * i_pow(d as i64 - 1);
        let line = -sub.re / (d as f64 * lead_real);
        let centered = self.recenter(line);
        let coeffs = centered.coeffs();
        let biggest = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);

        let mut witnesses = Vec::with_capacity(d + 1);
        let mut kind = ExceptionalKind::StronglyExceptional;
        for (j, &c) in coeffs.iter().enumerate() {
            if c.norm() < NEGLIGIBLE_COEFF * biggest {
                continue;
            }
            let residual = real_residual(c * i_pow(j as i64 - 1));
            witnesses.push(Residual { degree: j, residual });
            match band(residual, tol) {
                Band::Inside => {}
                Band::Outside => kind = ExceptionalKind::WeaklyExceptional,
                Band::Ambiguous => {
                    return Err(Error::AmbiguousClassification { degree: j, residual, tol })
                }
            }
        }
        Ok(Classification { kind, leading_residual, line: Some(line), witnesses })
    }

    /// Shorthand for a non-exceptional verdict at the default tolerance.
    pub fn is_non_exceptional(&self) -> bool {
        matches!(
            self.classify(DEFAULT_TOL),
            Ok(Classification { kind: ExceptionalKind::NonExceptional, .. })
        )
    }

    /// Stable 64-bit FNV-1a digest of the coefficient bit patterns.
    pub fn digest(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for c in &self.coeffs {
            for bits in [c.re.to_bits(), c.im.to_bits()] {
                for byte in bits.to_le_bytes() {
                    h ^= u64::from(byte);
                    h = h.wrapping_mul(0x0100_0000_01b3);
                }
            }
        }
        h
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExceptionalKind {
    NonExceptional,
    StronglyExceptional,
    WeaklyExceptional,
}

/// Imaginary-part residual of `a_j i^(j-1)`, relative to `max(1, |a_j|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub degree: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub kind: ExceptionalKind,
    /// Relative `|Re(a_d i^d)|`; the non-exceptional criterion.
    pub leading_residual: f64,
    /// For exceptional maps, the only vertical line `Re z = line` that can be
    /// mapped into a vertical line.
    pub line: Option<f64>,
    /// Per-coefficient residuals after recentering on `line`.
    pub witnesses: Vec<Residual>,
}

enum Band {
    Inside,
    Ambiguous,
    Outside,
}

/// Residuals up to `tol` count as real, beyond `2 tol` as non-real; in
/// between the verdict is refused.
fn band(residual: f64, tol: f64) -> Band {
    if residual <= tol {
        Band::Inside
    } else if residual <= 2.0 * tol {
        Band::Ambiguous
    } else {
        Band::Outside
    }
}

fn real_residual(c: Complex) -> f64 {
    c.im.abs() / c.norm().max(1.0)
}

/// `i^k` for any integer `k`.
pub(crate) fn i_pow(k: i64) -> Complex {
    match k.rem_euclid(4) {
        0 => Complex::new(1.0, 0.0),
        1 => Complex::new(0.0, 1.0),
        2 => Complex::new(-1.0, 0.0),
        _ => Complex::new(0.0, -1.0),
    }
}
