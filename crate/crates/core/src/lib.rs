//! Pre-training data for ad-hoc retrieval mined from Wikipedia structure.
//!
//! A dump is streamed ([`parse`]), each article becomes a heading tree ([`wst`]), the
//! corpus's See Also sections become a directed graph ([`sag`]), and four contrastive
//! samplers ([`samplers`]) turn both into query / positive / negatives groups. [`pipeline`]
//! wires this into a deterministic two-pass job; [`metrics`] scores rankings.

pub mod error;
pub mod metrics;
pub mod parse;
pub mod pipeline;
pub mod sag;
pub mod samplers;
pub mod wst;

pub use error::{Error, Result, Warnings};
