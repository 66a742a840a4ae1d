//! Periodic-orbit census for subshifts of finite type and planar open
//! billiards.
//!
//! The pipeline runs bottom-up: [`symbolic`] enumerates periodic words,
//! [`potential`] attaches a roof function to them, [`transfer`] computes
//! pressure and equilibrium constants from finite Ruelle operators, [`census`]
//! counts orbits in shrinking windows against the asymptotic predictions, and
//! [`billiard`] supplies geometric roof functions from reflection paths.

pub mod billiard;
pub mod census;
pub mod error;
pub mod format;
pub mod numeric;
pub mod par;
pub mod potential;
pub mod symbolic;
pub mod transfer;

pub use error::{Error, Result};
