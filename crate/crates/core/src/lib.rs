//! Derivation of OO-Method conceptual models from Communication Analysis
//! requirements models.

pub mod carm;
pub mod ced;
pub mod diag;
pub mod dm;
pub mod emit;
pub mod naming;
pub mod om;
pub mod pipeline;
pub mod trace;
