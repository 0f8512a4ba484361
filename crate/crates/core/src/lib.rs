//! Simulation library for remote entanglement distribution (RED) on small
//! quantum networks.
//!
//! A supplier shares one bipartite state with each of two nodes and performs
//! LOCC to leave the nodes entangled with each other. This crate provides the
//! dense linear algebra for multipartite states ([`state`], [`schmidt`]),
//! entanglement measures ([`entanglement`]), Kraus measurements
//! ([`measurement`]), the remote-preparation protocol that produces an
//! outcome-independent shared state ([`protocol`]), Monte Carlo verification
//! of the average-concurrence bound `C14 <= C12 * C34` and its chain
//! generalization ([`bounds`]), and numerical maximization of the final-state
//! concurrence over the measurement phases ([`optimizer`]).
//!
//! All types are immutable values and all operations are pure functions;
//! stochastic operations take explicit seeds and are bit-reproducible.

pub mod bounds;
pub mod entanglement;
pub mod error;
pub mod linalg;
pub mod measurement;
pub mod optimizer;
pub mod protocol;
pub mod schmidt;
pub mod state;
pub mod tolerance;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector};
pub use state::{DensityMatrix, Outcome, OutcomeDistribution, PureState, QState};
