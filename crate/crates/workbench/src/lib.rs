//! Standard-library companion to `berlu-core`: file formats, the epsilon
//! sweep, the kernel benchmark and the `berlu` command-line tool.

pub mod bench;
pub mod cli;
pub mod datasets;
mod error;
pub mod io;
pub mod sweep;

pub use error::{Error, Result};
