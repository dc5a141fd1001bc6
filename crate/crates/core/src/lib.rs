//! Exact free-fermion dynamics of symmetry-broken ground states after a
//! sudden quench, for the XY chain and the N-cluster Ising chain.
//!
//! The pipeline runs momentum amplitudes ([`model`], [`quench`]) into
//! real-space Majorana contractions ([`fermion_corr`]), then into Pauli
//! string expectations through Pfaffians ([`wick`]), reduced density
//! matrices and their distinguishability ([`rdm`]), and finally decay fits
//! ([`analysis`]).
//!
//! The crate is `no_std` with `alloc`; the `std` feature only forwards to
//! the dependencies.
#![cfg_attr(not(any(feature = "std", test)), no_std)]
// Negated comparisons are how NaN gets rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
mod fmath;

pub mod analysis;
pub mod fermion_corr;
pub mod model;
pub mod quench;
pub mod rdm;
pub mod wick;

pub use error::{Error, Result};
