//! Decides whether a finitely generated subgroup of SL₂(ℚ), acting on the
//! Bruhat–Tits tree of ℚ_p, is discrete and free.
//!
//! The decision is a descent over Nielsen-equivalent generating tuples that
//! strictly decreases a sum of translation lengths. It stops either at an
//! elliptic element (a witness that the group is not discrete and free) or at
//! a minimal tuple, whose axes are then checked for ping-pong by explicit tree
//! geometry in [`tree`].

pub mod axes;
pub mod descent;
pub mod error;
pub mod exact;
pub mod harness;
pub mod isometry;
pub mod samples;
pub mod schema;
pub mod tree;
pub mod verify;

pub use error::{ArborError, Result};
pub use exact::{Mat2, Prime, Rational, Valuation};
pub use isometry::{Isometry, TrackedElement, Word};
