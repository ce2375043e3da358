mod hc;
mod pbw;
mod ub;

pub use hc::{HcOrder, HcProjection};
pub use pbw::{mono_degree, Mono, Pbw, Poly};
pub use ub::{BAlgebra, MuResult, DEFAULT_DEGREE_CAP};
