//! Numerical constant-term engine for eigenfunctions on real spherical spaces:
//! transport systems along A_Z, joint spectral projectors, limits at infinity,
//! exponential-polynomial fitting and decay certification.

pub mod error;
pub mod exppoly;
pub mod linalg;
pub mod quad;
pub mod rapidfit;
pub mod rate;
pub mod spectral;
pub mod synthetic;
pub mod system;
pub mod transport;

pub use error::{CtermError, Result};
