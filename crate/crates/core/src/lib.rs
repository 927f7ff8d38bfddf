//! Meta-evaluation of MT metrics against MQM annotations, with tools to
//! measure how strongly that meta-evaluation leans towards accuracy or
//! fluency errors.

pub mod bias;
pub mod data;
pub mod error;
pub mod meta;
pub mod protocols;
pub mod scoring;
pub mod stats;
pub mod synth;

pub use error::{DataError, Error, Result, StatsError};
