//! Prefix membership for one-relator groups.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line tool and the brute-force harness live in the `onerel` crate.

#![no_std]

extern crate alloc;

pub mod alphabet;
pub mod amalgam;
pub mod chain;
pub mod error;
pub mod factorise;
pub mod fsa;
pub mod group;
pub mod herbst;
pub mod hnn;
pub mod munn;
pub mod onerel;
pub mod prefix;
pub mod rational;
pub mod stallings;
pub mod word;

pub use alphabet::{Alphabet, Symbol};
pub use error::{Error, Result};
pub use fsa::Fsa;
pub use rational::{benois_reduce, RationalSet};
pub use stallings::StallingsGraph;
pub use word::{Letter, Word};
