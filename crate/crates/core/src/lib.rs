//! Root finding for switching and monotone sign functions on dyadic grids.

pub mod bench;
pub mod bisection;
pub mod cli;
pub mod cake;
pub mod discretize;
pub mod domain;
pub mod dyadic;
pub mod error;
pub mod families;
pub mod instance;
pub mod reductions;
pub mod root2d;
pub mod rootnd;

pub use domain::{BoxDomain, GridPoint, GridSpec, RealOracle, Sign, SignField, SignOracle, SignVector};
pub use dyadic::Dyadic;
pub use error::{Error, Result};
