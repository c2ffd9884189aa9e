//! A learning-from-failures ILP engine with higher-order library definitions.

pub mod bias;
pub mod error;
pub mod evaluator;
pub mod generator;
pub mod harness;
pub mod kernel;
pub mod learner;
pub mod library;
pub mod parse;
pub mod subsumption;
pub mod symbol;

pub use error::{Error, Result};
pub use symbol::Symbol;
