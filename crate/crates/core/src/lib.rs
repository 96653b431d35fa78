//! Single-qubit quantum fingerprinting in the simultaneous message passing model.
//!
//! Alice and Bob each turn a message from a small set into one qubit and send it to a
//! referee, Roger, who has to decide whether the messages were equal. The crate covers
//! the pieces needed to analyse and simulate that game:
//!
//! * [`qstate`]: Bloch-sphere states, overlaps and fingerprint encodings
//!   (tetrahedral for four messages, numerically searched otherwise).
//! * [`twophoton`]: two-qubit states, Pauli operations, Bell states and the
//!   beam-splitter coincidence model with a finite dip depth.
//! * [`protocol`]: encoders, Roger's inference rule and single trials for the
//!   unentangled and entangled protocols, plus closed-form error rates.
//! * [`strategy`]: Roger's mixed strategy and its equalizing optimum.
//! * [`classical`]: exhaustive game values for one-bit classical fingerprints,
//!   computed in exact rational arithmetic.
//! * [`mc`]: a seeded, schedule-independent Monte Carlo engine.
//! * [`calib`]: visibility-table ingestion and calibration of the error model.

pub mod calib;
pub mod classical;
mod error;
pub mod mc;
pub mod protocol;
pub mod qstate;
pub mod strategy;
pub mod twophoton;

pub use error::{Error, Result};
