//! Two-body scattering, particle flows and collision-tree Monte Carlo for
//! short-range radial potentials in the low-density (Boltzmann–Grad) scaling.

pub mod cross_section;
pub mod dynamics;
pub mod error;
pub mod hierarchy_mc;
pub mod numerics;
pub mod potentials;
pub mod trees_flows;
pub mod two_body;

pub use error::{Error, Result};

/// Three-vector used for positions, velocities and directions.
pub type Vec3 = nalgebra::Vector3<f64>;
