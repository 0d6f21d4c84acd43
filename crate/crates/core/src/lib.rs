//! Pointwise generalized complex linear algebra over exact and floating
//! scalars, together with the Delzant polytope combinatorics and coordinate
//! chart models needed to certify torus-equivariant surgery constructions.
//!
//! The crate is split along the data it manipulates:
//!
//! - [`scalar`], [`form`]: complex exterior algebra on an `m`-dimensional
//!   space (`m <= 8`), with a Gaussian-rational backend for exact identities
//!   and a complex-double backend for chart evaluation.
//! - [`linalg`]: dense matrices over either backend, row reduction, kernels.
//! - [`gclin`]: pure spinors, annihilators, J-matrices, B-transforms, type.
//! - [`chart`]: named coordinate models, finite-difference exterior calculus,
//!   Courant brackets, and the numeric verification suites.
//! - [`polytope`]: exact rational H-polytopes, vertex enumeration, Delzant
//!   validation, slabs, slices, freeness.
//! - [`morse`]: combinatorial Morse indices and Betti numbers of moment maps.
//! - [`construct`]: the surgery certificate pipeline over polytope input.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod chart;
pub mod construct;
pub mod form;
pub mod gclin;
pub mod linalg;
pub mod morse;
pub mod polytope;
pub mod scalar;

pub use form::{GVector, MultiForm};
pub use scalar::{Cf64, ComplexScalar, GaussRat, Scalar};
