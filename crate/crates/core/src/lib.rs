//! Edge-weighted decision diagrams for quantum computing.
//!
//! A [`Manager`] owns every node, weight and compute table. State vectors
//! ([`StateDD`]), operators ([`OperatorDD`]) and density matrices
//! ([`DensityDD`]) are cheap handles into it. On top of the core package the
//! crate provides
//!
//! - Schrödinger-style circuit simulation with measurement and sampling
//!   ([`simulator`]),
//! - noise-aware simulation, both by Monte-Carlo unravelling of Kraus channels
//!   and by exact density-matrix evolution ([`noise`]),
//! - equivalence checking of circuits by system-matrix construction, by the
//!   alternating `G → 𝕀 ← G′` scheme and by random-stimuli simulation
//!   ([`equivalence`]),
//! - an OpenQASM 2 subset reader/writer ([`qasm`]) and Graphviz export
//!   ([`dot`]).
//!
//! ```
//! use qdd::{Manager, qasm};
//!
//! let circuit = qasm::parse("qreg q[2]; h q[1]; cx q[1],q[0];").unwrap();
//! let mut dd = Manager::default();
//! let init = dd.zero_state(2).unwrap();
//! let bell = qdd::simulator::simulate(&mut dd, &circuit, &init).unwrap();
//! let amp = dd.get_amplitude(&bell, 3).unwrap();
//! assert!((amp.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
//! ```

mod cache;
pub mod circuit;
pub mod complex;
pub mod dot;
pub mod equivalence;
pub mod error;
pub mod gates;
pub mod matrix;
pub mod noise;
pub mod package;
pub mod qasm;
pub mod simulator;
pub mod vector;

pub use circuit::{GateKind, GateOp, Op, QuantumCircuit};
pub use complex::{CanonicalComplex, ComplexTable, DEFAULT_TOLERANCE};
pub use error::{DdError, Result};
pub use gates::Gate;
pub use matrix::OperatorDD;
pub use noise::{DensityDD, KrausChannel, NoiseModel};
pub use package::{
    DdKind, Diagram, Edge, Manager, ManagerConfig, ManagerStats, NodeId, VectorNormScheme,
};
pub use vector::StateDD;

pub use num_complex::Complex64;
