//! File formats, the space-spec grammar, run configuration and the `lplab` front end.

pub mod builtin;
pub mod cli;
pub mod config;
pub mod error;
pub mod lpf;
pub mod output;
pub mod spec;

pub use error::{AppError, AppResult};
