//! Numerical laboratory for the Dirac and Rarita-Schwinger operators on the
//! scalar-flat Taub-NUT type family of four-metrics.

pub mod clifford;
pub mod error;
pub mod fd;
pub mod geometry;
pub mod harness;
pub mod jet;
pub mod rs_bundle;
pub mod solutions;
pub mod specfun;

pub use error::{LabError, Result};
