//! Markovian decoherence of two-qubit states: entanglement sudden death
//! against the asymptotic decay of interferometric power.
//!
//! The pipeline is: build an initial state ([`states`]), push it through
//! local Kraus channels ([`channels`]), evaluate concurrence and
//! interferometric power ([`measures`]), and sweep or classify over the
//! damping parameter γ ([`dynamics`]). [`verify`] bundles the invariant and
//! oracle checks behind the `verify` CLI command.

#![allow(clippy::needless_range_loop)]

pub mod channels;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod sampling;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
