pub mod arith;
pub mod char_ideal;
pub mod characters;
pub mod error;
pub mod exact;
pub mod group_ring;
pub mod harness;
pub mod l_elements;
pub mod padic;
pub mod series;

pub use error::{Error, Result};
