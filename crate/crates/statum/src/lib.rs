//! Compile descriptions of pure quantum states into preparation circuits and
//! check the results by dense simulation.
//!
//! A target is prepared in layers: layer k rotates qubit k once for every
//! value of qubits 1..k-1, with angles chosen so that after the layer the
//! first k qubits carry the target's marginal amplitudes. The angles come
//! from conditional-probability oracles — closed forms for symmetric states,
//! a brute-force marginal tree for dense ones. Phases, when present, follow
//! as a diagonal stage. Each rotation layer can instead be expanded into a
//! phase-kickback network that scores its angle table into an ancilla
//! register, turns the fractions into rotations with conditional bit phases
//! between Hadamards, and uncomputes the register afterwards.
//!
//! ```
//! use statum::sim;
//! use statum::synth::{synthesize_full, SynthMode, Target};
//!
//! // (|01⟩ + |10⟩)/√2
//! let target = Target::Dicke { n: 2, weight: 1 };
//! let circuit = synthesize_full(&target, SynthMode::Exact, true).unwrap();
//! let report = sim::verify(&circuit, &target.to_dense(), 1e-12);
//! assert!(report.passed);
//! ```

pub mod cli;
pub mod comb;
pub mod format;
pub mod oracles;
pub mod sim;
pub mod state;
pub mod synth;
