//! Bootstrap percolation on lattices and random regular graphs, with exact
//! and Monte Carlo tools for influences, noise sensitivity and critical
//! windows.

pub mod analytic;
pub mod boolean_lab;
pub mod bootstrap;
pub mod cli;
pub mod config;
pub mod error;
pub mod estimator;
pub mod experiment;
pub mod rectangle;
pub mod rng;
pub mod topology;

pub use bootstrap::{closure, is_complete, pivotal_set, ClosureEngine, ClosureResult};
pub use config::{BitConfig, Bits};
pub use error::{Error, Result};
pub use rectangle::{al_rectangle_scan, is_internally_spanned, Rectangle};
pub use topology::{build_lattice, build_random_regular, GraphKind, GraphTopology, LatticeKind};
