//! Parabolic distance sets over finite fields.
//!
//! The crate computes the parabolic distance `(x₂ − y₂) + (x₁ − y₁)²` on
//! subsets of F_q², its counting function and distance sets, additive and
//! fiber energies, additive-character sums, the closed-form lower bounds that
//! these quantities control, and the extremal constructions that show those
//! bounds are close to tight. Everything is exact except the character sums,
//! which use `f64` complex arithmetic with explicit tolerances.

pub mod bounds;
pub mod constructions;
pub mod energy;
pub mod error;
pub mod field;
pub mod fourier;
pub mod geometry;
pub mod io;

pub use error::{Error, Result};
pub use field::{Elem, Field, FieldElement, Subspace};
pub use geometry::{DistanceProfile, Point, PointSet};
