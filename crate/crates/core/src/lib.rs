//! Quantum discord, measurement disturbance and nonlocality checks for finite
//! bipartite quantum systems.
//!
//! The crate is `no_std` and needs only `alloc`. Everything is a pure function
//! over immutable values; file formats and the command-line front end live in
//! the companion `bohrdisc` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod discord;
pub mod error;
pub mod lp;
pub mod measure;
pub mod nonlocal;
pub mod phenomena;
pub mod qcore;
pub mod random;

pub use error::{Error, Result};
