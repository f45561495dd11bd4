//! Helper-assisted secure computation among a keyholder, an encrypted-value
//! holder and a helper.
//!
//! Secrets are split into a ciphertext (held by the encrypted-value holder)
//! and a key (held by the keyholder). Gates are evaluated by message
//! exchanges through a round-synchronous simulator that records every
//! transmitted bit, so costs and party views can be measured and audited.

pub mod anf;
pub mod circuit;
pub mod cli;
pub mod error;
pub mod expo;
pub mod gates;
pub mod harness;
pub mod netsim;
pub mod sharing;

pub use error::{Error, Result};
