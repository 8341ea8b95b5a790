//! Qubit and qutrit QAOA for graph 3-coloring.
//!
//! The crate is split along the pipeline:
//!
//! - [`sim`]: dense mixed-radix statevector simulation (qubits or qutrits).
//! - [`gates`]: gate and observable matrices plus parameter-shift rules.
//! - [`encodings`]: diagonal cost functions and decoders for both encodings.
//! - [`circuit`]: layered QAOA circuit construction, depth and gate counts.
//! - [`graph`]: graph type, 3-coloring solver, enumeration and generators.
//! - [`train`]: Adam training loop with parameter-shift gradients.
//! - [`experiment`]: batch drivers and CSV output used by the `qcolor` CLI.

pub mod circuit;
pub mod encodings;
pub mod error;
pub mod experiment;
pub mod gates;
pub mod graph;
pub mod sim;
pub mod train;

pub use circuit::{Circuit, GateInstance, ParamBinding};
pub use encodings::{Coloring, DiagonalCost, EncodingKind};
pub use error::{Error, Result};
pub use gates::{Axis, GateKind, ShiftRule, Subspace};
pub use graph::Graph;
pub use sim::{BasisIndex, SimConfig, Statevector};
pub use train::{GradientMethod, TrainConfig, TrainResult};

/// Dense complex matrix used for gates, observables and circuit unitaries.
pub type CMatrix = ndarray::Array2<num_complex::Complex64>;
