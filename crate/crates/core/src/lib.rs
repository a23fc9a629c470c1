//! Finite combinatorics of globular sets, pasting trees, the free strict
//! ω-category monad, globular operads, their nerves, and a bounded
//! construction of the initial operad with contractions.

pub mod error;
pub mod globset;
pub mod tree;
pub mod freecat;
pub mod operad;
pub mod nerve;
pub mod kontraction;
pub mod formats;

pub use error::{Error, Result};
