pub mod cli;
pub mod combmaps;
pub mod congruence;
pub mod curve;
pub mod error;
pub mod flat_hyperbolic;
pub mod quadrature;
pub mod surface_mesh;
pub mod weierstrass;

pub use error::{Error, Result};
