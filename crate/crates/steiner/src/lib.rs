//! File formats, threaded Monte Carlo and the `steiner` command line on top
//! of [`steiner_core`].

pub mod cli;
pub mod io;
pub mod parallel;

pub use steiner_core::{evalzero, gaussmc, growth, special, volseq, Complex64, Error};
