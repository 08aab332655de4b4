pub mod algebra;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod expansion;
pub mod expr;
pub mod gbranch;
pub mod reduction;

pub use error::{Error, Result};
