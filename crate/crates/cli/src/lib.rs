//! Command layer and document formats for the `weakgrade` binary.

pub mod commands;
pub mod docs;
