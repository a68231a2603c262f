pub mod bisim;
pub mod dsl;
pub mod error;
pub mod fixture;
pub mod logic;
pub mod model;
pub mod oracle;
pub mod relations;
pub mod synthesis;

pub use error::{Error, Result};
