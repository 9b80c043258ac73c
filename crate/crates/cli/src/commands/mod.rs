//! Subcommand implementations.

pub mod compare;
pub mod consdata;
pub mod measure;
pub mod potential;
pub mod psolve;
pub mod recipe;
pub mod simulate;
pub mod sweep;
