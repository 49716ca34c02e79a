//! Simulation and estimation toolkit for SINR-based wireless networks on
//! Poisson point processes.
//!
//! The crate is organized around the pipeline used by the rare-event
//! experiments:
//!
//! * [`ppp`] — reproducible sampling of homogeneous and radially
//!   inhomogeneous Poisson point processes,
//! * [`sinr`] — interference, SINR, connectable-receiver sets and the
//!   good-connection-region area,
//! * [`analytic`] — special functions and closed forms for the
//!   interference law and connection counts,
//! * [`tilt`] — construction of importance-sampling changes of measure,
//! * [`estimate`] — likelihood-ratio weighted estimators and replicate
//!   statistics,
//! * [`oracle`] — independent brute-force and quadrature cross-checks.
//!
//! All randomness is derived from a single master seed through
//! [`ppp::derive_replicate_seed`]; estimator output is bit-identical across
//! worker counts.

pub mod analytic;
pub mod estimate;
mod error;
pub mod oracle;
pub mod ppp;
pub(crate) mod quad;
pub mod sinr;
pub mod tilt;

pub use error::{Error, Result};
pub use estimate::EstimatorReport;
pub use ppp::{Point2, PointLabel, PointPattern, SeedSpec, Window};
pub use sinr::{EventSpec, ModelParams, NetworkFunctional, Truncation};
pub use tilt::{IntensityPair, RadialIntensity, TiltSpec};
