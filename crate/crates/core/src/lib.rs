//! Groups of GF(2)-linear maps generated by a class of order-3 elements with
//! two-dimensional commutator space.
//!
//! The crate builds every family of such groups, computes the incidence
//! geometry of their commutator lines, and recognizes which family an
//! arbitrary generating set belongs to, with verifiable evidence.
//!
//! Matrices act on row vectors from the right throughout (`v * g`).

pub mod classify;
pub mod cotriangular;
pub mod f4;
pub mod families;
pub mod forms;
pub mod geometry;
pub mod gf2;
pub mod spread;
pub mod group;

pub use gf2::{BitMatrix, BitVector, Gf2Error, Subspace};
