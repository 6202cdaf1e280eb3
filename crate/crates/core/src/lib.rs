//! Nucleus decomposition of probabilistic graphs.

pub mod cli;
pub mod det;
pub mod error;
pub mod global;
pub mod graph;
pub mod local;
pub mod metrics;
pub mod motif;
pub mod oracle;
pub mod sampling;
pub mod support;
pub mod unionfind;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
