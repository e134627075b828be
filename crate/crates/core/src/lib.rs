//! Slice analysis of several Clifford variables.

pub mod clifford;
pub mod error;
pub mod gauge;
pub mod growth;
pub mod harness;
pub mod report;
pub mod series;
pub mod slice;
pub mod slice_map;

pub use clifford::{BladeIndex, CliffordElement};
pub use error::{Error, Result};
