//! Configuration and serialization layer of the `relzeta` binary.

pub mod config;
pub mod output;
