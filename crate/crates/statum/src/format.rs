//! Input documents and the circuit text format.
//!
//! Inputs are JSON with a `kind` tag (`dense`, `symmetric`, `symmetric-mix`);
//! complex numbers are `[re, im]` pairs. Circuits serialize to a line-based
//! text format with a fixed header and one gate per line; angles print with
//! twelve fixed decimals, which keeps files byte-deterministic while staying
//! far below verification tolerances. Parsing is strict: any deviation from
//! the emitted grammar is an error naming the offending line.

use num_complex::Complex64;
use serde::Deserialize;

use crate::state::{Prefix, SymmetricSpec, TargetState};
use crate::synth::{Circuit, Gate, Target};

pub const CIRCUIT_HEADER: &str = "# statum-circuit v1";

/// Largest accepted qubit count; synthesis output is Θ(2^n) lines, so
/// anything beyond this is a mistake, not a workload.
pub const MAX_QUBITS: usize = 24;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FormatError {
    #[error("input document: {0}")]
    Input(String),
    #[error("{field}: {message}")]
    Field { field: &'static str, message: String },
    #[error("circuit line {line}: {message}")]
    Circuit { line: usize, message: String },
}

fn field_err(field: &'static str, message: impl Into<String>) -> FormatError {
    FormatError::Field { field, message: message.into() }
}

/// A target description as it appears on disk.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InputDocument {
    Dense { n: usize, amplitudes: Vec<[f64; 2]> },
    Symmetric { n: usize, r: usize },
    SymmetricMix { n: usize, betas: Vec<[f64; 2]> },
}

pub fn parse_input(text: &str) -> Result<InputDocument, FormatError> {
    serde_json::from_str(text).map_err(|e| FormatError::Input(e.to_string()))
}

impl InputDocument {
    /// Validate shapes and amplitudes and hand over to synthesis.
    pub fn into_target(self) -> Result<Target, FormatError> {
        let n = match &self {
            InputDocument::Dense { n, .. }
            | InputDocument::Symmetric { n, .. }
            | InputDocument::SymmetricMix { n, .. } => *n,
        };
        if n == 0 {
            return Err(field_err("n", "must be at least 1"));
        }
        if n > MAX_QUBITS {
            return Err(field_err("n", format!("must be at most {MAX_QUBITS}, got {n}")));
        }
        match self {
            InputDocument::Dense { n, amplitudes } => {
                let expected = 1usize << n;
                if amplitudes.len() != expected {
                    return Err(field_err(
                        "amplitudes",
                        format!("expected {expected} entries for n={n}, got {}", amplitudes.len()),
                    ));
                }
                let amps: Vec<Complex64> =
                    amplitudes.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
                let state = TargetState::from_amplitudes(n, &amps)
                    .map_err(|e| field_err("amplitudes", e.to_string()))?;
                Ok(Target::Dense(state))
            }
            InputDocument::Symmetric { n, r } => {
                if r > n {
                    return Err(field_err("r", format!("must lie in 0..=n, got r={r} with n={n}")));
                }
                Ok(Target::Dicke { n, weight: r })
            }
            InputDocument::SymmetricMix { n, betas } => {
                if betas.len() != n + 1 {
                    return Err(field_err(
                        "betas",
                        format!("expected {} entries for n={n}, got {}", n + 1, betas.len()),
                    ));
                }
                let betas: Vec<Complex64> =
                    betas.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
                let spec = SymmetricSpec::new(n, betas)
                    .map_err(|e| field_err("betas", e.to_string()))?;
                Ok(Target::SymmetricMix(spec))
            }
        }
    }
}

/// Parse and validate an input document in one step.
pub fn read_target(text: &str) -> Result<Target, FormatError> {
    parse_input(text)?.into_target()
}

fn angle(x: f64) -> String {
    format!("{x:.12}")
}

fn omega_list(omegas: &[u64]) -> String {
    omegas.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

pub fn emit_circuit(circuit: &Circuit) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    writeln!(out, "{CIRCUIT_HEADER}").unwrap();
    writeln!(out, "N {}", circuit.data_qubits).unwrap();
    writeln!(out, "ANC {}", circuit.ancilla_bits).unwrap();
    for gate in &circuit.gates {
        match gate {
            Gate::Ry { target, controls, theta } => {
                writeln!(out, "RY t={target} ctl={controls} theta={}", angle(*theta))
            }
            Gate::Phase { target, controls, phi } => {
                writeln!(out, "PHASE t={target} ctl={controls} phi={}", angle(*phi))
            }
            Gate::H { target } => writeln!(out, "H t={target}"),
            Gate::V { target } => writeln!(out, "V t={target}"),
            Gate::CPhaseBit { control_bit, target, phi } => {
                writeln!(out, "CPB b={control_bit} t={target} phi={}", angle(*phi))
            }
            Gate::OracleWrite { layer, omegas } => {
                writeln!(out, "OWR k={layer} w={}", omega_list(omegas))
            }
            Gate::OracleWriteInverse { layer, omegas } => {
                writeln!(out, "OWRI k={layer} w={}", omega_list(omegas))
            }
            Gate::GlobalPhase { phi } => writeln!(out, "GPHASE phi={}", angle(*phi)),
        }
        .unwrap();
    }
    out
}

struct GateLine<'a> {
    line: usize,
    tokens: std::str::Split<'a, char>,
}

impl<'a> GateLine<'a> {
    fn err(&self, message: impl Into<String>) -> FormatError {
        FormatError::Circuit { line: self.line, message: message.into() }
    }

    fn field(&mut self, key: &str) -> Result<&'a str, FormatError> {
        let token = self.tokens.next().ok_or_else(|| self.err(format!("missing {key}= field")))?;
        token
            .strip_prefix(key)
            .and_then(|rest| rest.strip_prefix('='))
            .ok_or_else(|| self.err(format!("expected {key}=..., got `{token}`")))
    }

    fn usize_field(&mut self, key: &str) -> Result<usize, FormatError> {
        let raw = self.field(key)?;
        raw.parse().map_err(|_| self.err(format!("{key}: not an integer: `{raw}`")))
    }

    fn angle_field(&mut self, key: &str) -> Result<f64, FormatError> {
        let raw = self.field(key)?;
        raw.parse().map_err(|_| self.err(format!("{key}: not a number: `{raw}`")))
    }

    fn prefix_field(&mut self) -> Result<Prefix, FormatError> {
        let raw = self.field("ctl")?;
        Prefix::from_pattern(raw).ok_or_else(|| self.err(format!("ctl: not a bit pattern: `{raw}`")))
    }

    fn omegas_field(&mut self) -> Result<Vec<u64>, FormatError> {
        let raw = self.field("w")?;
        raw.split(',')
            .map(|tok| tok.parse().map_err(|_| self.err(format!("w: not an integer: `{tok}`"))))
            .collect()
    }

    fn finish(&mut self) -> Result<(), FormatError> {
        match self.tokens.next() {
            Some(extra) => Err(self.err(format!("unexpected trailing token `{extra}`"))),
            None => Ok(()),
        }
    }
}

pub fn parse_circuit(text: &str) -> Result<Circuit, FormatError> {
    let err = |line: usize, message: &str| FormatError::Circuit { line, message: message.into() };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (line, header) = lines.next().ok_or_else(|| err(1, "missing header"))?;
    if header != CIRCUIT_HEADER {
        return Err(err(line, &format!("expected `{CIRCUIT_HEADER}`, got `{header}`")));
    }
    let (line, raw) = lines.next().ok_or_else(|| err(2, "missing N line"))?;
    let data_qubits: usize = raw
        .strip_prefix("N ")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| err(line, &format!("expected `N <count>`, got `{raw}`")))?;
    if data_qubits == 0 || data_qubits > MAX_QUBITS {
        return Err(err(line, &format!("data qubit count must lie in 1..={MAX_QUBITS}")));
    }
    let (line, raw) = lines.next().ok_or_else(|| err(3, "missing ANC line"))?;
    let ancilla_bits: u32 = raw
        .strip_prefix("ANC ")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| err(line, &format!("expected `ANC <bits>`, got `{raw}`")))?;
    if ancilla_bits > 32 {
        return Err(err(line, "ancilla register wider than 32 bits"));
    }

    let mut circuit = Circuit::new(data_qubits, ancilla_bits);
    for (line_no, raw) in lines {
        let mut tokens = raw.split(' ');
        let mnemonic = tokens.next().unwrap_or("");
        let mut gl = GateLine { line: line_no, tokens };
        let check_target = |gl: &GateLine, t: usize| {
            if t < 1 || t > data_qubits {
                Err(gl.err(format!("target {t} outside 1..={data_qubits}")))
            } else {
                Ok(())
            }
        };
        let gate = match mnemonic {
            "RY" | "PHASE" => {
                let target = gl.usize_field("t")?;
                check_target(&gl, target)?;
                let controls = gl.prefix_field()?;
                if controls.len() != target - 1 {
                    return Err(gl.err(format!(
                        "control pattern has {} bits, target {target} needs {}",
                        controls.len(),
                        target - 1
                    )));
                }
                if mnemonic == "RY" {
                    Gate::Ry { target, controls, theta: gl.angle_field("theta")? }
                } else {
                    Gate::Phase { target, controls, phi: gl.angle_field("phi")? }
                }
            }
            "H" | "V" => {
                let target = gl.usize_field("t")?;
                check_target(&gl, target)?;
                if mnemonic == "H" {
                    Gate::H { target }
                } else {
                    Gate::V { target }
                }
            }
            "CPB" => {
                let control_bit = gl.usize_field("b")? as u32;
                if control_bit < 1 || control_bit > ancilla_bits {
                    return Err(gl.err(format!("ancilla bit {control_bit} outside 1..={ancilla_bits}")));
                }
                let target = gl.usize_field("t")?;
                check_target(&gl, target)?;
                Gate::CPhaseBit { control_bit, target, phi: gl.angle_field("phi")? }
            }
            "OWR" | "OWRI" => {
                if ancilla_bits < 2 {
                    return Err(gl.err("oracle writes need an ancilla register of at least 2 bits"));
                }
                let layer = gl.usize_field("k")?;
                check_target(&gl, layer)?;
                let omegas = gl.omegas_field()?;
                if omegas.len() != 1usize << (layer - 1) {
                    return Err(gl.err(format!(
                        "layer {layer} needs {} fraction entries, got {}",
                        1usize << (layer - 1),
                        omegas.len()
                    )));
                }
                let cap = 1u64 << (ancilla_bits - 2);
                if let Some(bad) = omegas.iter().find(|&&w| w > cap) {
                    return Err(gl.err(format!("fraction numerator {bad} exceeds 2^{}", ancilla_bits - 2)));
                }
                if mnemonic == "OWR" {
                    Gate::OracleWrite { layer, omegas }
                } else {
                    Gate::OracleWriteInverse { layer, omegas }
                }
            }
            "GPHASE" => Gate::GlobalPhase { phi: gl.angle_field("phi")? },
            other => return Err(gl.err(format!("unknown gate `{other}`"))),
        };
        gl.finish()?;
        circuit.gates.push(gate);
    }
    Ok(circuit)
}
