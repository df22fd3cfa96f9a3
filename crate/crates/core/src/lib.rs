//! Simulation and analysis toolkit for quantum-dot biexciton–exciton
//! cascade sources of polarization-entangled photon pairs.
//!
//! - [`physics`]: closed-form two-photon state and figure-of-merit formulas.
//! - [`mc`]: pulse-by-pulse Monte Carlo generator of detection records.
//! - [`analysis`]: coincidence histograms, peak areas, estimators and fits.
//! - [`io`]: run configuration and time-tag file formats.
//! - [`cli`]: the `cstg` command surface.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod error;
pub mod io;
pub mod mc;
pub mod physics;

pub use error::{Error, Result};
