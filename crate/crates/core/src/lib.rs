//! Qudit state-vector simulation and Shamir secret sharing, assembled into a
//! simulator for the GHZ-based (t, n) threshold secret reconstruction protocol.
//!
//! The crate shows by exact computation that an agent who Fourier-measures only
//! its own qudit of the phase-encoded GHZ state sees a uniformly random outcome,
//! while the variant in which every agent measures and announces recovers the
//! secret with certainty.
//!
//! Terminology: each d-level system is called a *qudit*. Basis index `I` of a
//! `t`-qudit register encodes `(k_1, ..., k_t)` with qudit 1 as the most
//! significant base-`d` digit.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod modmath;
pub mod protocol;
pub mod qudit_sim;

pub use error::{Error, Result};
