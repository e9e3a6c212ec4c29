//! Topological entropy, Hausdorff dimension under the standard metric, and
//! compression-based complexity rates for subshifts of finite type on `N^d`
//! and `Z^d`, together with the packing and encoding procedures that tie the
//! three quantities together.

pub mod catalog;
pub mod cli;
pub mod complexity;
pub mod dimension;
pub mod error;
pub mod lattice;
pub mod measure;
pub mod sft;
pub mod spectral;

#[cfg(test)]
mod testing;

pub use error::{Error, Result};
