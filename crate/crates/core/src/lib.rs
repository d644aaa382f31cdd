//! Complex polynomial dynamics seen through the real parts of orbits.
//!
//! A polynomial `P` acts on the plane; the shadow map sends a point `z` to the
//! vector of the first `N + 1` real parts of its orbit, and the shadow shift
//! `Q` drops the first coordinate. This crate provides the pieces needed to
//! study `(S, Q)` numerically:
//!
//! * [`poly`]: polynomials, real-affine conjugation and the
//!   exceptional / non-exceptional classification.
//! * [`orbits`]: iteration, the real-part growth constants, shadows.
//! * [`potential`]: Green function, Böttcher coordinate, external rays.
//! * [`measure`]: Brolin measure by backward iteration and its pushforward.
//! * [`mirrors`]: pairs of orbits with identical real parts.
//! * [`entropy`]: topological and metric entropy estimators on shadows.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is
//! disabled. The `parallel` feature enables rayon for batch operations;
//! results do not depend on scheduling.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod entropy;
pub mod error;
pub mod measure;
pub mod mirrors;
pub mod orbits;
pub mod poly;
pub mod potential;
pub mod rng;
pub mod roots;

mod par;

pub use error::{Error, Result};
pub use poly::{Classification, ExceptionalKind, Polynomial, RealAffineMap, DEFAULT_TOL};

/// Complex scalar with double precision components.
pub type Complex = num_complex::Complex64;

/// Magnitude beyond which an orbit is treated as having reached infinity.
pub const OVERFLOW_GUARD: f64 = 1e100;
