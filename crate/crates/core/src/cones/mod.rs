//! Rational polyhedral cones, simplicial fans and toric chart limits.

mod compress;
mod cone;
mod fan;

pub use compress::{compression_subcones, CompressionSubcones};
pub use cone::{canonical_basis, idot, iv, normalize_sign, Cone, IVec, Location};
pub use fan::{simplicial_subdivision, toric_limit, Fan, FanCertificate, ToricLimit};
