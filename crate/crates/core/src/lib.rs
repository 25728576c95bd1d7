//! Entanglement fidelity of noisy two-qubit channels.
//!
//! The crate models a two-step protocol: a pure Schmidt-form state
//! α|00⟩ + β|11⟩ is prepared, its second qubit is sent through a noisy
//! channel (amplitude damping, phase damping, or depolarizing), and the
//! fidelity of the resulting mixed state is evaluated and optionally
//! optimized over trace-preserving local post-processing.
//!
//! Module map:
//! - [`linalg`]: fixed-size complex matrix algebra and a Hermitian
//!   eigensolver for 4×4 matrices.
//! - [`states`]: Schmidt states, density matrices, the magic basis and
//!   the Pauli correlation matrix.
//! - [`channels`]: Kraus channel families, channel application and Choi
//!   states.
//! - [`measures`]: fully entangled fraction (three routes), concurrence,
//!   negativity, teleportation fidelity.
//! - [`fstar`]: the TP-LOCC-optimal fidelity F*: analytic branches and a
//!   rank-1 SDP search that cross-checks them.
//! - [`sweep`]: parameter sweeps, curve data and the proposition
//!   verification suite.
//! - [`cli`]: the `chanfid` command-line front end.

pub mod channels;
pub mod cli;
pub mod fstar;
pub mod linalg;
pub mod measures;
pub mod states;
pub mod sweep;

mod error;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
