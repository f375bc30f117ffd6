pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod field_file;
pub mod generate;
pub mod inequalities;
pub mod littlewood_paley;
pub mod norms;
pub mod report;
pub mod solver;

pub use error::{Error, Result};
