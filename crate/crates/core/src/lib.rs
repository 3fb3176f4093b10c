//! Computational geometric algebra over Cl(p,q,r).
//!
//! The crate is organised around a single dense [`Multivector`] type:
//!
//! * [`algebra`] — the product kernel: blade arithmetic, involutions,
//!   exponentials, versor inverses, and a matrix-representation oracle.
//! * [`decompose`] — invariant decomposition of bivectors and versors into
//!   commuting simple factors, geometric gauge transformations, rotor
//!   logarithms, and polar decomposition.
//! * [`points`] — points as top-grade blades: factorization into orthogonal
//!   hyperplanes, Cartan bivector frames, label projectors, chiral split.
//! * [`spinors`] — algebraic spinors over the complexified algebra: null
//!   eigenvectors, the master idempotent, basis spinors, chiral operator.
//! * [`pointors`] — elements `ψ = ρ₊R + ρ₋P` that fix a point up to
//!   magnitude, their decompositions, and the bridge back to algebraic
//!   spinors.

pub mod algebra;
pub mod decompose;
pub mod error;
pub mod points;
pub mod pointors;
pub mod sample;
pub mod spinors;

pub use algebra::multivector::Multivector;
pub use algebra::sig::{Field, Signature};
pub use error::GaError;

/// Default relative tolerance for scalar comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;
