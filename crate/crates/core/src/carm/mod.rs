//! The Communication Analysis requirements model and its `.carm` text format.

pub mod annotations;
pub mod condition;
pub mod model;
pub mod parse;
pub mod print;
pub mod validate;

pub use model::*;
pub use parse::{parse_annotations, parse_files, parse_model};
pub use print::print_model;
pub use validate::validate_model;
