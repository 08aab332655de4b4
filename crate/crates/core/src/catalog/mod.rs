//! Published solution families and the numeric checks run against them.

mod families;
mod report;
mod residual;

pub use families::*;
pub use report::*;
pub use residual::*;
