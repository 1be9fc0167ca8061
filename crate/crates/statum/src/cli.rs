//! Command-line front end: read a target description, synthesize, write the
//! circuit, optionally verify by simulation.
//!
//! Exit codes: 0 on success (and on a passing verification), 1 when
//! verification fails, 2 for usage or input errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use crate::format::{emit_circuit, read_target};
use crate::sim;
use crate::synth::{synthesize_full, SynthMode};

/// Verification simulates 2^n amplitudes densely; beyond this it is refused.
pub const VERIFY_QUBIT_LIMIT: usize = 20;
/// Data plus ancilla bits a verification run may simulate.
pub const VERIFY_TOTAL_BIT_LIMIT: usize = 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Quantized,
    Kickback,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Debug, Parser)]
#[command(name = "statum", about = "Synthesize state-preparation circuits and verify them by simulation")]
struct Args {
    /// Target description (JSON)
    #[arg(long, value_name = "PATH")]
    input: PathBuf,

    /// Angle realization
    #[arg(long, value_enum)]
    mode: Mode,

    /// Fraction bits; required in quantized and kickback modes
    #[arg(long, value_name = "M")]
    bits: Option<u32>,

    /// Verification slack: pass means fidelity >= 1 - epsilon
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,

    /// Whether to synthesize the diagonal phase stage
    #[arg(long, value_enum, default_value_t = Switch::On)]
    phases: Switch,

    /// Simulate the circuit and compare against the target
    #[arg(long)]
    verify: bool,

    /// Circuit file destination (stdout when absent)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Reserved for randomized self-test runs; accepted but currently unused
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
}

pub fn run() -> ExitCode {
    match execute(&Args::parse()) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn execute(args: &Args) -> Result<ExitCode, String> {
    let bits = match (args.mode, args.bits) {
        (Mode::Exact, _) => None,
        (_, None) => return Err("--bits is required in quantized and kickback modes".into()),
        (_, Some(bits)) if (2..=32).contains(&bits) => Some(bits),
        (_, Some(bits)) => return Err(format!("--bits must lie in 2..=32, got {bits}")),
    };
    if !(args.epsilon.is_finite() && args.epsilon > 0.0) {
        return Err(format!("--epsilon must be a positive number, got {}", args.epsilon));
    }

    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| format!("{}: {e}", args.input.display()))?;
    let target = read_target(&text).map_err(|e| e.to_string())?;

    let n = target.num_qubits();
    if args.verify {
        // Checked before synthesis: an oversized target should fail fast,
        // not after minutes of work.
        if n > VERIFY_QUBIT_LIMIT {
            return Err(format!("--verify is limited to n <= {VERIFY_QUBIT_LIMIT}, got n={n}"));
        }
        let ancilla = if args.mode == Mode::Kickback { bits.unwrap() as usize } else { 0 };
        if n + ancilla > VERIFY_TOTAL_BIT_LIMIT {
            return Err(format!(
                "--verify is limited to {VERIFY_TOTAL_BIT_LIMIT} simulated bits, got n={n} plus {ancilla} ancilla bits"
            ));
        }
    }

    let mode = match (args.mode, bits) {
        (Mode::Exact, _) => SynthMode::Exact,
        (Mode::Quantized, Some(bits)) => SynthMode::Quantized { bits },
        (Mode::Kickback, Some(bits)) => SynthMode::Kickback { bits },
        _ => unreachable!("--bits checked above"),
    };
    let circuit = synthesize_full(&target, mode, args.phases == Switch::On).map_err(|e| e.to_string())?;

    let rendered = emit_circuit(&circuit);
    match &args.out {
        Some(path) => std::fs::write(path, &rendered).map_err(|e| format!("{}: {e}", path.display()))?,
        None => print!("{rendered}"),
    }

    if !args.verify {
        return Ok(ExitCode::SUCCESS);
    }
    let report = sim::verify(&circuit, &target.to_dense(), args.epsilon);
    let counts = circuit.gate_counts();
    println!(
        "gates RY={} PHASE={} H={} V={} CPB={} OWR={} OWRI={} GPHASE={}",
        counts.ry,
        counts.phase,
        counts.h,
        counts.v,
        counts.cphase_bit,
        counts.oracle_write,
        counts.oracle_write_inverse,
        counts.global_phase
    );
    println!("fidelity {:.12}", report.fidelity);
    println!("ancilla residual {:.6e}", report.ancilla_residual);
    if report.passed {
        println!("pass");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("fail");
        Ok(ExitCode::from(1))
    }
}
