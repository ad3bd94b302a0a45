pub mod bethe;
pub mod calogero;
pub mod chain;
pub mod duality;
pub mod error;
pub mod graded;
pub mod linalg;
pub mod model;
pub mod precision;
pub mod registry;

pub use error::{Error, Result};
pub use model::{GaudinSpec, Geometry, SuperalgebraTag};
