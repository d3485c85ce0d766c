//! Parametric timed automata: reachability synthesis and timed
//! non-interference under a rate-limited attacker.

pub mod constraint;
pub mod error;
pub mod format;
pub mod pta;
pub mod noninterf;
pub mod oracle;
pub mod reach;

pub use error::{Error, Result};
