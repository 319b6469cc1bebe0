//! Reconstruction of point sets on the real line and the unit circle from
//! partial pairwise-distance measurements.
//!
//! * [`determination`]: 3-local (line) and 5-local (circle) distance rules and
//!   the closure of a measurement set under them.
//! * [`clique`]: extraction of a large fully-determined vertex subset from a
//!   dense measurement graph.
//! * [`reconstruction`]: shortest-path estimates, triangle-equality voting and
//!   the linear-time line embedding for random measurements.
//! * [`monotone`]: simulation of monotone paths in `G(n, p)`.
//! * [`constructions`]: generators for the extremal and test instances.

#![forbid(unsafe_code)]

pub mod clique;
pub mod constructions;
pub mod determination;
pub mod error;
pub mod graph;
pub mod io;
pub mod measurement;
pub mod monotone;
pub mod numeric;
pub mod reconstruction;
pub mod rng;
pub mod space;

pub use error::{Error, Result};
pub use graph::Graph;
pub use measurement::{sample_measurements, MeasurementSet};
pub use numeric::Scalar;
pub use space::{PointConfig, Space};
