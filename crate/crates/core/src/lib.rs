//! Deterministic simulator for controlled deterministic secure quantum
//! communication (CDSQC) and its bidirectional variant.
//!
//! The library models the Bell-state protocol in which a controller
//! (Charlie) prepares the entangled channel, secretly permutes the
//! receiver-side particle order, and gates decoding behind his classical
//! disclosure. It covers the alternative channel constructions (generic
//! dense-coding states, entanglement-swapping states, controlled
//! (N+1)-qubit states), both eavesdrop-check subroutines (BB84 conjugate
//! coding and GV orthogonal-state checking), pluggable attack models, and
//! the qubit-efficiency accounting for comparing the protocol variants.
//!
//! Everything is seeded: identical configuration and seed reproduce a
//! byte-identical session transcript.

pub mod adversary;
pub mod bits;
pub mod catalog;
pub mod check;
pub mod error;
pub mod io;
pub mod metrics;
pub mod protocol;
pub mod quantum;
pub mod rng;

pub use error::{Error, Result};
