//! Generation and analysis of single-peaked preference orders.
//!
//! Candidates sit at the integer points `1..=n` of a left-right axis; a vote is
//! single-peaked when every prefix of its ranking covers a contiguous stretch
//! of that axis. This crate samples such votes uniformly (the Impartial
//! Culture model restricted to the single-peaked domain) and with Conitzer's
//! peak-then-extend generator, counts and enumerates the domain through a
//! rank/unrank bijection, computes exact rational probability masses for both
//! generators, runs chi-square goodness-of-fit checks of samplers against the
//! exact tables, and reads and writes profiles in the PrefLib strict-order
//! format.
//!
//! All randomness flows from an explicit 64-bit seed through a fixed splitmix64
//! generator, so every result is reproducible bit for bit.
//!
//! ```
//! use spgen::samplers::{self, SplitMix64};
//!
//! let mut rng = SplitMix64::new(7);
//! let vote = samplers::uniform_vote(4, &mut rng).unwrap();
//! assert!(vote.is_single_peaked());
//! ```

#![forbid(unsafe_code)]

use std::io;

use thiserror::Error;

pub mod combinatorics;
pub mod domain;
pub mod files;
pub mod probability;
pub mod samplers;
pub mod stats;

pub use domain::{Interval, Profile, Vote};
pub use samplers::Model;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid vote: {0}")]
    InvalidVote(String),

    #[error("vote {0} is not single-peaked")]
    NotSinglePeaked(String),

    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: u32, b: u32 },

    #[error("candidate count must be at least 1")]
    ZeroCandidates,

    #[error("peak {peak} outside 1..={n}")]
    PeakOutOfRange { peak: u32, n: u32 },

    #[error("index {index} outside 0..{count} for n={n}")]
    IndexOutOfRange { index: u64, n: u32, count: u64 },

    #[error("{what} overflows a 64-bit integer at n={n}")]
    Overflow { what: &'static str, n: u32 },

    #[error("2^(n-1) single-peaked votes at n={n} exceed the enumeration cap of {cap}")]
    CapExceeded { n: u32, cap: u64 },

    #[error("candidate counts differ: {left} vs {right}")]
    MismatchedN { left: u32, right: u32 },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("inconsistent document: {0}")]
    Inconsistent(String),

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("{path}: {source}")]
    IoAt { path: String, source: io::Error },
}
