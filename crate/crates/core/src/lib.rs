//! Uplink SIMO link simulator for a uniform linear array with and without an
//! electromagnetic lens mounted in front of it.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`] places the array elements.
//! * [`lens`] models the lens as a Gaussian focal spot and splits each incident
//!   path's power over the elements.
//! * [`channel`] draws multipath realizations and builds the conventional and
//!   lensed channel vectors.
//! * [`receiver`] performs antenna selection, MRC and rate evaluation.
//! * [`majorization`] checks the ordering results that guarantee the lens
//!   never loses rate in a single-path channel.
//! * [`experiments`] runs the Monte Carlo rate-versus-selected-antennas studies.
//! * [`report`], [`verify`] back the `lensmimo` command-line tool.
//!
//! All lengths are in carrier wavelengths and all angles are in degrees.

pub mod channel;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod lens;
pub mod majorization;
pub mod receiver;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
