#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod extremal;
pub mod oracle;
pub mod poisson;
pub mod region;
pub mod zonal;

pub use error::{Error, Result};
