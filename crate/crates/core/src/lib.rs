//! Finite-part integration of generalized Stieltjes transforms and the
//! hypergeometric transformation formulas that follow from it.

pub mod config;
pub mod error;
pub mod fpi_closed;
pub mod hyp2f1;
pub mod hyp3f2;
pub mod oracle;
pub mod quad;
pub mod special;
pub mod stieltjes;
pub mod sum;
pub mod verify;

pub use config::EvalConfig;
pub use error::{FpiError, Result};
pub use special::C64;
pub use sum::{SeriesResult, SeriesStatus};
