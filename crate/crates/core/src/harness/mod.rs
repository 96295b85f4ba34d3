//! Numerical verification harness: quadrature, norms, grid scans, ODE
//! oracles, configuration, and the check registry behind the CLI.

pub mod norms;
pub mod oracle;
pub mod quadrature;
pub mod scan;
pub mod config;
pub mod report;
pub mod suite;
