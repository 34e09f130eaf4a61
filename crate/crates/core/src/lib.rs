//! Link-level simulation of trellis-coded non-orthogonal multiple access.

pub mod channel;
pub mod constellation;
pub mod decoder;
pub mod distance;
pub mod encoder;
pub mod error;
pub mod harness;
pub mod mapping;
pub mod partition;
pub mod trellis;

pub use error::{Error, Result};
