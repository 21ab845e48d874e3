//! Black-box quantum state preparation by linear combination of unitaries.
//!
//! Amplitudes given as fixed-point words behind an oracle are turned into
//! state amplitudes by a transduction circuit (`|x> -> x|x>` on a flagged
//! branch), then boosted by amplitude amplification. Two transductions are
//! provided: a binary-indexed one ([`standard`]) and a one-hot one
//! ([`modified`]). Circuits run on the bundled statevector simulator and
//! export to OpenQASM 2.0.
//!
//! ```
//! use lcu_stateprep::{build_pipeline, Algorithm, AmplitudeSpec, PipelineConfig, Rounds};
//!
//! let spec = AmplitudeSpec::new(vec![0.25, 0.5], 2).unwrap();
//! let config = PipelineConfig::new(spec, Algorithm::Standard).rounds(Rounds::Explicit(1));
//! let pipeline = build_pipeline(&config).unwrap();
//! assert!((pipeline.analytic_probability() - 0.991).abs() < 1e-3);
//! ```

pub mod amplification;
pub mod analysis;
pub mod circuit;
pub mod cli;
pub mod encoding;
pub mod error;
pub mod modified;
pub mod qasm;
pub mod report;
pub mod simulator;
pub mod standard;

pub use amplification::{build_pipeline, Algorithm, Pipeline, PipelineConfig, Rounds};
pub use circuit::{Circuit, Gate, GateCounts, GateKind, Register, RegisterLayout};
pub use encoding::AmplitudeSpec;
pub use error::{Error, Result};
pub use simulator::{Backend, Simulator, StateVector};
