//! Simulation of spin-j quantum teleportation and entanglement swapping.
//!
//! The crate is organised bottom-up:
//!
//! * [`spin`] and [`state`]: spin operators, bases, multi-mode pure states,
//!   partial traces and projective measurement.
//! * [`squeezed`]: two-mode spin-squeezed resource states.
//! * [`teleport`]: the approximate teleportation protocol built from an
//!   Ising interaction, spin measurements and correcting rotations.
//! * [`swap`]: entanglement swapping and its optimization.
//! * [`perfect`]: Bell bases, phase measurements and exact teleportation.

pub mod error;
pub mod linalg;
pub mod optimize;
pub mod perfect;
pub mod quadrature;
pub mod random;
pub mod spin;
pub mod squeezed;
pub mod state;
pub mod swap;
pub mod teleport;

pub use error::{Error, Result};
pub use spin::{Axis, BasisKind, BasisTag, Generator, ModeOperator, Spin};
pub use state::{MeasurementBasis, MeasurementBranch, PureState};
