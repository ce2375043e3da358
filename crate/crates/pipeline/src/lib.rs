//! Example registry, end-to-end runs and report emission.

pub mod error;
pub mod examples;
pub mod hyperbolic;
pub mod oracle;
pub mod orbit;
pub mod report;
pub mod run;
pub mod suites;
