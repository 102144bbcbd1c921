//! Linear forms in odd zeta values: exact construction, integrality checks,
//! certified numerics and the divisor elimination.

pub mod analysis;
pub mod cli;
pub mod construction;
pub mod elimination;
pub mod error;
pub mod exact_arith;
pub mod forms;

/// Version tag written at the top level of every JSON document.
pub const SCHEMA: &str = "zeta-forms/1";
