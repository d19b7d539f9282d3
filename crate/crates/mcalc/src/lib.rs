//! A workbench for the measurement calculus of one-way quantum computing.
//!
//! The crate models measurement patterns — classically correlated sequences
//! of preparations, entanglements, destructive measurements, and Pauli
//! corrections — and provides:
//!
//! * pattern validation, composition, tensoring, and renaming ([`pattern`]);
//! * the local rewrite system with standardization into NEMC form,
//!   termination measure, signal shifting, and canonical forms ([`rewrite`]);
//! * branch-map and CPTP semantics on a small dense simulator, determinism
//!   classification, and unitary extraction ([`sim`]);
//! * dependency graphs, depth/round scheduling, and Pauli/Clifford
//!   membership checks ([`analysis`]);
//! * the phase, Pauli, and teleportation model extensions with compositional
//!   embeddings into and out of the one-way model ([`models`]);
//! * constructors for the standard pattern families with reference
//!   unitaries ([`zoo`]);
//! * a text format for patterns and JSON/DOT exports ([`textio`]).

pub mod analysis;
pub mod angle;
pub mod command;
pub mod linalg;
pub mod models;
pub mod pattern;
pub mod qubit;
pub mod rewrite;
pub mod signal;
pub mod sim;
pub mod textio;
pub mod zoo;

pub use angle::{Angle, AngleTerm, DependentAngle, ANGLE_TOL};
pub use command::Command;
pub use pattern::{Condition, Pattern, Violation};
pub use qubit::{q, QubitId};
pub use signal::Signal;
