//! Exact computation for twisted spin structures and their Thom spectra.
//!
//! The crate has four layers, each usable on its own:
//!
//! * [`f2algebra`] — degree-truncated graded polynomial rings over the field
//!   with two elements, with unit power series and substitution homomorphisms.
//! * [`bundles`] — virtual vector bundles over a small catalog of classifying
//!   spaces, total Stiefel-Whitney classes, and spin/pin classification.
//! * [`rewriter`] — a term-rewriting system on Thom-spectrum expressions whose
//!   rules carry machine-checked side conditions; every equivalence it finds
//!   is returned as a replayable certificate.
//! * [`ranks_les`] — exact generating-function arithmetic for bordism ranks
//!   away from 2, long-exact-sequence feasibility, and a catalog of known
//!   low-degree bordism groups.
//!
//! Everything is `no_std` + `alloc`; all arithmetic is exact (sets over F2,
//! `u64` coefficients) and every operation is a pure function of its inputs.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bundles;
pub mod f2algebra;
pub mod ranks_les;
pub mod rewriter;
pub mod rng;
