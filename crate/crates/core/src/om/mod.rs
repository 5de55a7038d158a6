//! Object Model derivation.

pub mod derive;
pub mod model;

pub use derive::{derive_event_view, derive_object_model, map_data_type, DeriveOptions, Derivation};
pub use model::*;
