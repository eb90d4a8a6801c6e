//! Models for two multibeam satellites sharing one orbital slot.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only pure, seedable
//! computations: beam geometry and link budget ([`channel`]), zero-forcing
//! precoding and the cooperative capacity bound ([`precoding`]), user
//! selection and allocation ([`scheduling`]), beam-hopping patterns
//! ([`beamhopping`]), the four co-location architectures
//! ([`architectures`]) and the evaluation criteria ([`metrics`]).
//!
//! IO, configuration files and the Monte Carlo driver live in the `dualsat`
//! crate.

#![no_std]
// Negated comparisons also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod architectures;
pub mod beamhopping;
pub mod channel;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod precoding;
pub mod scheduling;
pub mod seed;
pub mod system;

pub use error::{Error, Result};
