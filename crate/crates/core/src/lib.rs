#![allow(clippy::needless_range_loop)]

pub mod conventions;
pub mod error;
pub mod exterior;
pub mod g2;
pub mod gauge;
pub mod heterotic;
pub mod linalg;
pub mod report;
pub mod scalar;
pub mod su3;

pub use error::{Error, Result};
