//! Intrinsic volumes of convex compacts in Hilbert space and the analytic
//! machinery built on them.
//!
//! The crate is `no_std` (with `alloc`). It covers four areas:
//!
//! - [`volseq`]: exact intrinsic-volume sequences for the Wiener spiral, the
//!   spiral bridge and rectangular boxes (finite or rule-generated infinite
//!   ones), plus the ultra-log-concavity and Chevet validators.
//! - [`growth`]: order, type, `m_k` decay and oscillation estimates from a
//!   finite sequence, and the Gaussian-continuity verdict built from them.
//! - [`evalzero`]: evaluation of the Steiner entire function `f_K(z) = Σ V_k z^k`,
//!   hypergeometric closed forms, zeros of truncations and product
//!   reconstruction.
//! - [`gaussmc`]: seeded, shard-deterministic Monte Carlo for the tube volume,
//!   the Gaussian Wills integral and the Gaussian exponential-supremum
//!   formula on boxes.
//!
//! Sequences are stored as natural logarithms throughout; `-inf` encodes a
//! vanishing volume.

#![cfg_attr(not(any(test, feature = "std")), no_std)]
#![deny(unsafe_code)]
// `!(x > 0.0)` style guards are meant to reject NaN too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
mod linfit;
pub mod special;

pub mod evalzero;
pub mod gaussmc;
pub mod growth;
pub mod volseq;

pub use error::{Error, Result};
pub use num_complex::Complex64;
