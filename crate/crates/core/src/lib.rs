#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod constraint;
pub mod error;
pub mod free_field;
pub mod gamma;
pub mod gas;
pub mod linalg;
pub mod mode;
pub mod oscillator;
pub mod sign;
pub mod verify;

pub use error::{Error, Result};
pub use sign::Sign;
