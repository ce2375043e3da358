//! Local structure of a spherical pair: adapted parabolic, T-map, spherical roots.

mod datum;
mod json;
mod parabolic;

pub use datum::*;
pub use parabolic::{check_open_orbit, ParabolicDatum};
