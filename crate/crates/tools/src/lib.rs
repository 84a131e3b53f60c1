//! File formats, synthetic data and the drivers behind the `muscle`
//! command-line tool.

pub mod datasets;
pub mod error;
pub mod export;
pub mod fitconfig;
pub mod grid;
pub mod params;
pub mod synthetic;

pub use error::{Result, ToolError};
