//! Exact decision procedures for the Group Problem and the Identity Problem
//! in SA(2,Z), with checkable identity certificates and a brute-force oracle.

pub mod algebra;
pub mod caps;
pub mod cells;
pub mod error;
pub mod exactmath;
pub mod heisenberg;
pub mod modular;
pub mod oracle;
pub mod pipeline;
pub mod sl2group;
pub mod witness;

pub use caps::Caps;
pub use error::{Error, Result};
