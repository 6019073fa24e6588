//! Approximation algorithms built on capped sumsets and min-plus
//! convolution: weak subset sum, partition, min-plus convolution,
//! tree sparsity and kSUM.

pub mod bitset;
pub mod brute;
pub mod conv;
pub mod error;
pub mod format;
pub mod gen;
pub mod ksum;
pub mod minconv;
pub mod ntt;
pub mod numeric;
pub mod oracle;
pub mod preprocess;
pub mod ratio;
pub mod sumset;
pub mod treesparsity;
pub mod weakssum;

pub use bitset::BoundedBitset;
pub use error::{ApxError, Result};
pub use ratio::Ratio;
