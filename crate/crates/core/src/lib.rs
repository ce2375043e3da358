//! Exact structure theory for real spherical pairs (g, h): root data, adapted
//! parabolics, spherical roots, compression cones and fans, boundary
//! degenerations and bounded-degree enveloping-algebra computations.

pub mod cones;
pub mod degen;
pub mod envalg;
pub mod error;
pub mod liecore;
pub mod rational;
pub mod sphstruct;

pub use error::{Error, Result};
