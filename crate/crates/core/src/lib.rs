//! Renormalized electromagnetic vacuum stress in smooth, spherically
//! symmetric dielectric media.

pub mod anomaly;
pub mod bec;
pub mod geo_optics;
pub mod media;
pub mod numerics;
pub mod radial_green;
pub mod renorm;
pub mod specfun;
pub mod stress_engine;

/// Library version embedded in every output file.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
