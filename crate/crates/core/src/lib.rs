//! Evolvable binary logic-gate circuits ("Brains") with information-flow
//! analysis: evolve circuits for motion detection or sound localization,
//! record their activity, estimate pairwise transfer entropy, and score the
//! estimates against ground-truth influence maps built by exhaustive
//! state-space enumeration.

pub mod analysis;
pub mod brain;
pub mod detection;
mod error;
pub mod evolve;
pub mod genome;
pub mod groundtruth;
pub mod infoflow;
pub mod tasks;

pub use error::{Error, Result};
