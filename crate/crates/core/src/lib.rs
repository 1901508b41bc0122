#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod combinat;
pub mod construct;
pub mod error;
pub mod kruglov;
pub mod matrix;
pub mod orlicz;
pub mod rearrange;
pub mod report;
pub mod sampling;
pub mod verify;

pub use error::{Error, Result};
