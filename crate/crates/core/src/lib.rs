//! Adversarially robust learning: exact robust loss, attack and separation
//! oracles, boosting, reductions and redaction-based selective classification.

pub mod boosting;
pub mod data;
pub mod error;
pub mod learners;
pub mod linalg;
pub mod oracles;
pub mod redaction;
pub mod reductions;
pub mod rng;
pub mod robust;

pub use error::{Error, ErrorKind, Result};
