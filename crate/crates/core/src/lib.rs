//! Exact orbit counting for element systems with characters (ESCs) over
//! finite abelian groups.
//!
//! An ESC of length `n` over `G` is a tuple of `n` group elements paired with
//! `n` characters of `G`. Two ESCs are isomorphic when an automorphism of `G`
//! together with a relabelling of positions carries one onto the other, so
//! the isomorphism classes are the orbits of `Aut(G) × S_n` acting on
//! `G^n × Ĝ^n`. This crate counts them several independent ways:
//!
//! * [`burnside::orbit_count_naive`] walks the whole action,
//! * [`burnside::orbit_count_congruence`] reduces fixed points to per-cycle
//!   congruence solution counts,
//! * [`burnside::orbit_enumerate`] materialises the orbits,
//! * [`closed_form`] evaluates explicit formulas for cyclic and elementary
//!   abelian groups.
//!
//! [`verify`] cross-checks them all.

pub mod abelian;
pub mod budget;
pub mod burnside;
pub mod cli;
pub mod closed_form;
pub mod error;
pub mod numtheory;
pub mod verify;

use num_bigint::BigUint;
use num_rational::BigRational;

/// Arbitrary-precision nonnegative count.
pub type ExactCount = BigUint;
/// Exact fraction used for Burnside averages.
pub type ExactRational = BigRational;

pub use abelian::{AbelianGroup, Character, EndoMatrix, GroupElement};
pub use budget::Budget;
pub use error::{EscError, Result};
pub use numtheory::CycleType;
