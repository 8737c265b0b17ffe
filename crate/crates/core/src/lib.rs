//! Wavepacket propagation through a bounded one-dimensional multibarrier
//! potential.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`] builds the barrier array from `(N, c, L, V)`.
//! * [`wavepacket`] samples the complex Gaussian packet on a grid.
//! * [`evolution`] advances a field through the array by finite differences.
//! * [`correlation`] reduces the initial/final densities to a third-order
//!   Lanczos matrix whose last diagonal entry is the correlation `C`.
//! * [`spectrum`] holds the transfer-matrix scattering algebra, the
//!   periodic-boundary level condition and level-spacing statistics.
//! * [`period_scan`] sweeps `(N, c)` grids with a result cache and detects
//!   periodicities in `N` and constancy windows in `c`.
//! * [`cli_io`] is the command-line front end and all file emission.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli_io;
pub mod correlation;
pub mod error;
pub mod evolution;
pub mod geometry;
pub mod number;
pub mod period_scan;
pub mod pipeline;
pub mod spectrum;
pub mod wavepacket;

pub use error::{Error, Result};
pub use number::{Exact, Num};
