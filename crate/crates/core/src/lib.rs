//! Leakage-safe cross-validated predictive modelling on tabular data:
//! pipelines of transformers and a model, nested grid search, and corrected
//! statistics for comparing pipelines.

pub mod cv;
pub mod error;
pub mod inspect;
pub mod model;
pub mod numerics;
pub mod params;
pub mod pipeline;
pub mod score;
pub mod stats;
pub mod synth;
pub mod table;
pub mod transform;

pub use error::{Error, Result};
