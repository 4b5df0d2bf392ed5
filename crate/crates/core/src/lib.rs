//! Disinformation detection with weak social supervision.
//!
//! The crate covers the whole desk-scale pipeline: a JSON Lines social-news
//! corpus ([`corpus`]), engagement signals ([`signals`]), weak labeling
//! functions ([`weaklabel`]), the tri-relationship factorization detector
//! ([`trifn`]), the multi-source weak-supervision classifier ([`mwss`]),
//! hierarchical propagation features ([`propnet`]), transmitter attribution
//! ([`provenance`]) and a planted-structure generator ([`synth`]). The
//! [`cli`] module drives all of it from a config file.

pub mod cli;
pub mod corpus;
pub mod error;
pub mod exec;
pub mod matrix;
pub mod metrics;
pub mod mwss;
pub mod propnet;
pub mod provenance;
pub mod signals;
pub mod stats;
pub mod synth;
pub mod text;
pub mod trifn;
pub mod weaklabel;

pub use error::{Error, Result};
