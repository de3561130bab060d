//! Exact and numeric machinery for truncated defect relations of holomorphic
//! curves against hypersurfaces in subgeneral position.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod exact_algebra;
pub mod filtration;
pub mod gaussmap;
pub mod nevanlinna;
pub mod polyring;
pub mod position;
pub mod report;
pub mod samples;
pub mod selftest;
pub mod wronskian;

pub use error::{Error, Result};

