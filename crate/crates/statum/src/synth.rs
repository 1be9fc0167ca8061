//! Circuit synthesis.
//!
//! The core output is a cascade of prefix-controlled rotations: for each
//! qubit k = 1..n and each value of the preceding qubits, one RY whose angle
//! is set by the conditional probability from an oracle. After layer k the
//! register carries the correct marginal amplitudes over its first k qubits,
//! which is the induction that makes the construction work. Phases, when
//! present, are appended as a diagonal stage of prefix-controlled phase
//! gates. Each rotation layer can further be expanded into a phase-kickback
//! form that scores the rotation fraction into an ancilla register and turns
//! it into the same rotation via conditional bit phases between Hadamards.

use std::f64::consts::TAU;

use crate::oracles::ConditionalOracle;
use crate::state::{dense_from_symmetric, Prefix, SymmetricSpec, TargetState};

/// Rotation and phase angles strictly below this act as identity at double
/// precision; the pruning pass drops them.
pub const ANGLE_EPSILON: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SynthError {
    #[error("kickback expansion needs at least 2 precision bits, got {0}")]
    PrecisionTooSmall(u32),
    #[error("kickback expansion expects a plain rotation cascade ({0})")]
    NotRotationCascade(&'static str),
    #[error("oracle covers {oracle} qubits but the cascade has {cascade}")]
    QubitMismatch { oracle: usize, cascade: usize },
}

/// A rotation fraction snapped to `numerator / 2^bits`. Fractions arising
/// from probabilities lie in [0, 1/4], so `numerator <= 2^(bits-2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OmegaFraction {
    numerator: u64,
    bits: u32,
}

impl OmegaFraction {
    pub fn new(numerator: u64, bits: u32) -> Self {
        assert!(bits >= 2 && bits <= 62, "precision bits out of range: {bits}");
        assert!(numerator <= 1u64 << (bits - 2), "fraction {numerator}/2^{bits} exceeds 1/4");
        OmegaFraction { numerator, bits }
    }

    pub fn numerator(&self) -> u64 {
        self.numerator
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn value(&self) -> f64 {
        self.numerator as f64 / (1u64 << self.bits) as f64
    }

    /// The rotation angle this fraction stands for.
    pub fn theta(&self) -> f64 {
        2.0 * TAU * self.value()
    }
}

/// The rotation fraction for a conditional probability: RY(4πω) sends |0⟩ to
/// √p0 |0⟩ + √(1-p0) |1⟩ when cos²(2πω) = p0, so ω = arccos(√p0) / 2π,
/// which lands in [0, 1/4].
pub fn omega_from_prob(p0: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p0));
    p0.sqrt().acos() / TAU
}

/// Snap ω to `bits` fractional bits: nearest grid point, ties toward zero,
/// clamped into [0, 1/4].
pub fn quantize_omega(omega: f64, bits: u32) -> OmegaFraction {
    assert!(bits >= 2 && bits <= 62, "precision bits out of range: {bits}");
    debug_assert!((0.0..=0.25 + 1e-12).contains(&omega));
    let scaled = omega * (1u64 << bits) as f64;
    let floor = scaled.floor();
    let numerator = floor as u64 + u64::from(scaled - floor > 0.5);
    OmegaFraction::new(numerator.min(1u64 << (bits - 2)), bits)
}

/// Data qubits are numbered 1..=n left to right (qubit 1 is the highest-order
/// bit of a basis index); ancilla bits 1..=m hold a fraction's bits in order
/// of decreasing weight (bit j has weight 2^-j).
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    /// RY(theta) on `target`, applied only where qubits 1..target-1 read
    /// `controls`.
    Ry { target: usize, controls: Prefix, theta: f64 },
    /// diag(1, e^{i phi}) on `target` under the same prefix control.
    Phase { target: usize, controls: Prefix, phi: f64 },
    /// Hadamard on `target`.
    H { target: usize },
    /// diag(1, -i) on `target`.
    V { target: usize },
    /// Controlled by ancilla bit `control_bit`: diag(e^{i phi}, e^{-i phi})
    /// on data qubit `target`.
    CPhaseBit { control_bit: u32, target: usize, phi: f64 },
    /// XOR the layer's fraction table into the ancilla register:
    /// `omegas[p]` is the numerator written when qubits 1..layer-1 read p.
    OracleWrite { layer: usize, omegas: Vec<u64> },
    /// The inverse write (the same XOR, listed separately so circuits read
    /// as compute/uncompute pairs).
    OracleWriteInverse { layer: usize, omegas: Vec<u64> },
    /// Multiply the whole state by e^{i phi}.
    GlobalPhase { phi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GateCounts {
    pub ry: usize,
    pub phase: usize,
    pub h: usize,
    pub v: usize,
    pub cphase_bit: usize,
    pub oracle_write: usize,
    pub oracle_write_inverse: usize,
    pub global_phase: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub data_qubits: usize,
    pub ancilla_bits: u32,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(data_qubits: usize, ancilla_bits: u32) -> Self {
        Circuit { data_qubits, ancilla_bits, gates: Vec::new() }
    }

    pub fn gate_counts(&self) -> GateCounts {
        let mut counts = GateCounts::default();
        for gate in &self.gates {
            match gate {
                Gate::Ry { .. } => counts.ry += 1,
                Gate::Phase { .. } => counts.phase += 1,
                Gate::H { .. } => counts.h += 1,
                Gate::V { .. } => counts.v += 1,
                Gate::CPhaseBit { .. } => counts.cphase_bit += 1,
                Gate::OracleWrite { .. } => counts.oracle_write += 1,
                Gate::OracleWriteInverse { .. } => counts.oracle_write_inverse += 1,
                Gate::GlobalPhase { .. } => counts.global_phase += 1,
            }
        }
        counts
    }
}

/// How rotation angles are realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthMode {
    /// Angles straight from the oracle.
    Exact,
    /// Angles snapped to `bits` fractional bits of ω.
    Quantized { bits: u32 },
    /// Quantized angles realized through the ancilla-scoring network.
    Kickback { bits: u32 },
}

/// The rotation cascade: for k = 1..=n and each length-(k-1) prefix in
/// ascending binary order, one RY on qubit k — exactly 2^n - 1 gates, always.
/// Unreachable prefixes get angle 0 (any angle would do; nothing reaches
/// them) and are left for the pruning pass to remove.
pub fn synthesize_rotations(oracle: &dyn ConditionalOracle, quantized_bits: Option<u32>) -> Circuit {
    let n = oracle.num_qubits();
    let mut circuit = Circuit::new(n, 0);
    for k in 1..=n {
        for value in 0..1usize << (k - 1) {
            let controls = Prefix::new(k - 1, value);
            let theta = match oracle.cond_prob_zero(controls) {
                Some(p0) => match quantized_bits {
                    Some(bits) => quantize_omega(omega_from_prob(p0), bits).theta(),
                    None => 2.0 * TAU * omega_from_prob(p0),
                },
                None => 0.0,
            };
            circuit.gates.push(Gate::Ry { target: k, controls, theta });
        }
    }
    circuit
}

/// Decompose the diagonal diag(e^{i phases[x]}) into prefix-controlled phase
/// gates plus one global phase. Exact: peeling qubits from last to first,
/// each step applies the phase difference between the two extensions of a
/// prefix and pushes the common part up a level.
pub fn decompose_diagonal(phases: &[f64]) -> Vec<Gate> {
    assert!(phases.len() >= 2 && phases.len().is_power_of_two());
    let n = phases.len().trailing_zeros() as usize;
    let mut work = phases.to_vec();
    let mut gates = Vec::with_capacity(phases.len());
    for k in (1..=n).rev() {
        for value in 0..1usize << (k - 1) {
            let (low, high) = (work[2 * value], work[2 * value + 1]);
            gates.push(Gate::Phase { target: k, controls: Prefix::new(k - 1, value), phi: high - low });
            work[value] = low;
        }
    }
    gates.push(Gate::GlobalPhase { phi: work[0] });
    gates
}

/// Replace every rotation layer of `cascade` with its phase-kickback form:
/// write the layer's quantized fractions into the ancilla, apply the
/// conditional bit phases between Hadamards, and uncompute.
///
/// Per layer the emitted block is
/// `OWR, V, V, V, H, CPB(1..=bits), H, V, OWRI`, which equals RY(4πω̂) as an
/// operator on the data qubit: with S the conditional phases, V·H·S·H comes
/// out as RY·V, so the block opens with V³ = V† to cancel the stray factor.
/// Without it the layer would agree with RY only on a |0⟩ input — enough for
/// preparation from |0…0⟩, but not the operator equality the cascade
/// replacement promises.
pub fn expand_kickback(
    cascade: &Circuit,
    oracle: &dyn ConditionalOracle,
    bits: u32,
) -> Result<Circuit, SynthError> {
    if bits < 2 {
        return Err(SynthError::PrecisionTooSmall(bits));
    }
    if cascade.ancilla_bits != 0 {
        return Err(SynthError::NotRotationCascade("input already carries an ancilla register"));
    }
    if cascade.gates.iter().any(|g| !matches!(g, Gate::Ry { .. })) {
        return Err(SynthError::NotRotationCascade("input contains non-rotation gates"));
    }
    if oracle.num_qubits() != cascade.data_qubits {
        return Err(SynthError::QubitMismatch { oracle: oracle.num_qubits(), cascade: cascade.data_qubits });
    }
    let n = cascade.data_qubits;
    let mut circuit = Circuit::new(n, bits);
    for layer in 1..=n {
        let omegas: Vec<u64> = (0..1usize << (layer - 1))
            .map(|value| match oracle.cond_prob_zero(Prefix::new(layer - 1, value)) {
                Some(p0) => quantize_omega(omega_from_prob(p0), bits).numerator(),
                None => 0,
            })
            .collect();
        circuit.gates.push(Gate::OracleWrite { layer, omegas: omegas.clone() });
        for _ in 0..3 {
            circuit.gates.push(Gate::V { target: layer });
        }
        circuit.gates.push(Gate::H { target: layer });
        for control_bit in 1..=bits {
            circuit.gates.push(Gate::CPhaseBit {
                control_bit,
                target: layer,
                phi: TAU / (1u64 << control_bit) as f64,
            });
        }
        circuit.gates.push(Gate::H { target: layer });
        circuit.gates.push(Gate::V { target: layer });
        circuit.gates.push(Gate::OracleWriteInverse { layer, omegas });
    }
    Ok(circuit)
}

/// Drop gates that act as identity at double precision: rotations and phases
/// with |angle| < [`ANGLE_EPSILON`]. Structural gates (H, V, writes, bit
/// phases) always stay.
pub fn prune(circuit: &Circuit) -> Circuit {
    let gates = circuit
        .gates
        .iter()
        .filter(|gate| match gate {
            Gate::Ry { theta, .. } => theta.abs() >= ANGLE_EPSILON,
            Gate::Phase { phi, .. } | Gate::GlobalPhase { phi } => phi.abs() >= ANGLE_EPSILON,
            _ => true,
        })
        .cloned()
        .collect();
    Circuit { data_qubits: circuit.data_qubits, ancilla_bits: circuit.ancilla_bits, gates }
}

/// What to prepare.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Dense(TargetState),
    Dicke { n: usize, weight: usize },
    SymmetricMix(SymmetricSpec),
}

impl Target {
    pub fn num_qubits(&self) -> usize {
        match self {
            Target::Dense(state) => state.n(),
            Target::Dicke { n, .. } => *n,
            Target::SymmetricMix(spec) => spec.n(),
        }
    }

    /// The conditional oracle that drives the cascade — closed-form for the
    /// symmetric targets, marginal-tree brute force for dense ones.
    pub fn oracle(&self) -> Box<dyn ConditionalOracle> {
        match self {
            Target::Dense(state) => Box::new(crate::oracles::DenseOracle::new(state)),
            Target::Dicke { n, weight } => Box::new(crate::oracles::SymmetricBasisOracle::new(*n, *weight)),
            Target::SymmetricMix(spec) => Box::new(crate::oracles::SymmetricMixOracle::new(spec)),
        }
    }

    /// Per-basis-state phases for the diagonal stage, or `None` when the
    /// target carries none by construction.
    pub fn phase_angles(&self) -> Option<Vec<f64>> {
        match self {
            Target::Dense(state) => Some(state.phases().to_vec()),
            Target::Dicke { .. } => None,
            Target::SymmetricMix(spec) => Some(
                (0..1usize << spec.n())
                    .map(|x| spec.betas()[x.count_ones() as usize].arg())
                    .collect(),
            ),
        }
    }

    /// The dense form, for verification.
    pub fn to_dense(&self) -> TargetState {
        match self {
            Target::Dense(state) => state.clone(),
            Target::Dicke { n, weight } => dense_from_symmetric(&SymmetricSpec::dicke(*n, *weight)),
            Target::SymmetricMix(spec) => dense_from_symmetric(spec),
        }
    }
}

/// The whole pipeline: rotation cascade, optional kickback expansion,
/// optional diagonal phase stage, pruning.
pub fn synthesize_full(target: &Target, mode: SynthMode, with_phases: bool) -> Result<Circuit, SynthError> {
    let oracle = target.oracle();
    let mut circuit = match mode {
        SynthMode::Exact => synthesize_rotations(oracle.as_ref(), None),
        SynthMode::Quantized { bits } => {
            if bits < 2 {
                return Err(SynthError::PrecisionTooSmall(bits));
            }
            synthesize_rotations(oracle.as_ref(), Some(bits))
        }
        SynthMode::Kickback { bits } => {
            let cascade = synthesize_rotations(oracle.as_ref(), None);
            expand_kickback(&cascade, oracle.as_ref(), bits)?
        }
    };
    if with_phases {
        if let Some(phases) = target.phase_angles() {
            circuit.gates.extend(decompose_diagonal(&phases));
        }
    }
    Ok(prune(&circuit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::DenseOracle;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn ry_angles(circuit: &Circuit) -> Vec<f64> {
        circuit
            .gates
            .iter()
            .map(|g| match g {
                Gate::Ry { theta, .. } => *theta,
                other => panic!("expected only rotations, got {other:?}"),
            })
            .collect()
    }

    #[test]
    fn omega_stays_in_the_first_quarter() {
        assert!((omega_from_prob(1.0) - 0.0).abs() < 1e-15);
        assert!((omega_from_prob(0.0) - 0.25).abs() < 1e-15);
        assert!((omega_from_prob(0.5) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn quantize_rounds_to_nearest_with_ties_toward_zero() {
        // 1/6 · 2^4 = 2.67 → 3.
        let q = quantize_omega(1.0 / 6.0, 4);
        assert_eq!((q.numerator(), q.bits()), (3, 4));
        assert!((q.value() - 0.1875).abs() < 1e-15);
        // Exact tie 1/8 · 2^3 = 1.0 stays 1; tie 3/16 · 2^3 = 1.5 drops to 1.
        assert_eq!(quantize_omega(0.125, 3).numerator(), 1);
        assert_eq!(quantize_omega(3.0 / 16.0, 3).numerator(), 1);
        // The top of the range stays clamped at 2^(bits-2).
        assert_eq!(quantize_omega(0.25, 4).numerator(), 4);
        assert_eq!(quantize_omega(0.0, 4).numerator(), 0);
    }

    #[test]
    fn quantize_error_is_at_most_half_a_grid_step() {
        for i in 0..=1000 {
            let omega = 0.25 * i as f64 / 1000.0;
            for bits in [2u32, 4, 8, 16] {
                let q = quantize_omega(omega, bits);
                let step = 1.0 / (1u64 << bits) as f64;
                assert!((q.value() - omega).abs() <= step / 2.0 + 1e-15, "omega={omega} bits={bits}");
            }
        }
    }

    #[test]
    fn cascade_for_the_uniform_pair_state() {
        // (|01⟩ + |10⟩)/√2 → RY(π/2) on qubit 1, then π and 0 on qubit 2.
        let oracle = crate::oracles::SymmetricBasisOracle::new(2, 1);
        let circuit = synthesize_rotations(&oracle, None);
        let angles = ry_angles(&circuit);
        assert_eq!(angles.len(), 3);
        assert!((angles[0] - FRAC_PI_2).abs() < 1e-12);
        assert!((angles[1] - PI).abs() < 1e-12);
        assert!(angles[2].abs() < 1e-12);
        // Layout: qubit k controlled by each length-(k-1) prefix, ascending.
        assert_eq!(
            circuit.gates[1],
            Gate::Ry { target: 2, controls: Prefix::new(1, 0), theta: angles[1] }
        );
    }

    #[test]
    fn cascade_for_a_basis_state() {
        // |10⟩: π on qubit 1; prefix 0 unreachable (angle 0), prefix 1 holds 0.
        let state = TargetState::basis(2, 0b10);
        let circuit = synthesize_rotations(&DenseOracle::new(&state), None);
        let angles = ry_angles(&circuit);
        assert!((angles[0] - PI).abs() < 1e-12);
        assert_eq!(&angles[1..], &[0.0, 0.0]);
    }

    #[test]
    fn cascade_always_counts_two_to_the_n_minus_one() {
        for n in 1..=6usize {
            let state = TargetState::basis(n, (1usize << n) - 1);
            let circuit = synthesize_rotations(&DenseOracle::new(&state), None);
            assert_eq!(circuit.gates.len(), (1usize << n) - 1);
        }
    }

    #[test]
    fn rotation_angles_stay_in_zero_to_pi() {
        let state = TargetState::new(
            2,
            vec![0.1, 0.7, 0.1f64.sqrt(), 0.4f64.sqrt()],
            vec![0.0; 4],
        )
        .unwrap();
        for quantized in [None, Some(6)] {
            let circuit = synthesize_rotations(&DenseOracle::new(&state), quantized);
            for theta in ry_angles(&circuit) {
                assert!((0.0..=PI + 1e-12).contains(&theta), "theta={theta}");
            }
        }
    }

    #[test]
    fn diagonal_decomposition_matches_entrywise() {
        // γ = (0, 0, 0, π): qubit-2 layer (0, π), then qubit-1 gate 0 and
        // global phase 0.
        let gates = decompose_diagonal(&[0.0, 0.0, 0.0, PI]);
        assert_eq!(
            gates,
            vec![
                Gate::Phase { target: 2, controls: Prefix::new(1, 0), phi: 0.0 },
                Gate::Phase { target: 2, controls: Prefix::new(1, 1), phi: PI },
                Gate::Phase { target: 1, controls: Prefix::empty(), phi: 0.0 },
                Gate::GlobalPhase { phi: 0.0 },
            ]
        );
    }

    #[test]
    fn diagonal_decomposition_reconstructs_any_input() {
        // Entrywise: summing the applied phases along each basis index gives
        // back the input γ exactly (same additions, no cancellation).
        let phases = [0.3, -1.2, 2.5, 0.0, -0.7, 1.9, 3.0, -2.2];
        let gates = decompose_diagonal(&phases);
        assert_eq!(gates.len(), 8);
        for x in 0..8usize {
            let mut acc = 0.0;
            for gate in &gates {
                match gate {
                    Gate::Phase { target, controls, phi } => {
                        // Phase applies where the prefix matches and the target bit is 1.
                        let shifted = x >> (3 - target);
                        if shifted >> 1 == controls.value() && shifted & 1 == 1 {
                            acc += phi;
                        }
                    }
                    Gate::GlobalPhase { phi } => acc += phi,
                    other => panic!("unexpected gate {other:?}"),
                }
            }
            assert!((acc - phases[x]).abs() < 1e-12, "x={x}: {acc} vs {}", phases[x]);
        }
    }

    #[test]
    fn kickback_layers_follow_the_operator_identity_order() {
        let oracle = crate::oracles::SymmetricBasisOracle::new(1, 1);
        let cascade = synthesize_rotations(&oracle, None);
        let circuit = expand_kickback(&cascade, &oracle, 4).unwrap();
        assert_eq!(circuit.ancilla_bits, 4);
        // p0 = 0 → ω = 1/4 → numerator 4.
        assert_eq!(
            circuit.gates,
            vec![
                Gate::OracleWrite { layer: 1, omegas: vec![4] },
                Gate::V { target: 1 },
                Gate::V { target: 1 },
                Gate::V { target: 1 },
                Gate::H { target: 1 },
                Gate::CPhaseBit { control_bit: 1, target: 1, phi: TAU / 2.0 },
                Gate::CPhaseBit { control_bit: 2, target: 1, phi: TAU / 4.0 },
                Gate::CPhaseBit { control_bit: 3, target: 1, phi: TAU / 8.0 },
                Gate::CPhaseBit { control_bit: 4, target: 1, phi: TAU / 16.0 },
                Gate::H { target: 1 },
                Gate::V { target: 1 },
                Gate::OracleWriteInverse { layer: 1, omegas: vec![4] },
            ]
        );
    }

    #[test]
    fn kickback_rejects_bad_inputs() {
        let oracle = crate::oracles::SymmetricBasisOracle::new(2, 1);
        let cascade = synthesize_rotations(&oracle, None);
        assert_eq!(expand_kickback(&cascade, &oracle, 1), Err(SynthError::PrecisionTooSmall(1)));

        let mut tainted = cascade.clone();
        tainted.gates.push(Gate::H { target: 1 });
        assert!(matches!(
            expand_kickback(&tainted, &oracle, 4),
            Err(SynthError::NotRotationCascade(_))
        ));

        let small = crate::oracles::SymmetricBasisOracle::new(1, 1);
        assert_eq!(
            expand_kickback(&cascade, &small, 4),
            Err(SynthError::QubitMismatch { oracle: 1, cascade: 2 })
        );
    }

    #[test]
    fn pruning_drops_only_identity_angles() {
        let mut circuit = Circuit::new(2, 0);
        circuit.gates = vec![
            Gate::Ry { target: 1, controls: Prefix::empty(), theta: 1e-16 },
            Gate::Ry { target: 2, controls: Prefix::new(1, 0), theta: PI },
            Gate::Phase { target: 2, controls: Prefix::new(1, 1), phi: -1e-17 },
            Gate::H { target: 1 },
            Gate::GlobalPhase { phi: 0.0 },
        ];
        let pruned = prune(&circuit);
        assert_eq!(
            pruned.gates,
            vec![
                Gate::Ry { target: 2, controls: Prefix::new(1, 0), theta: PI },
                Gate::H { target: 1 },
            ]
        );
    }

    #[test]
    fn full_synthesis_of_a_dicke_target_prunes_unreachable_rotations() {
        let circuit = synthesize_full(&Target::Dicke { n: 2, weight: 1 }, SynthMode::Exact, true).unwrap();
        let angles = ry_angles(&circuit);
        assert_eq!(angles.len(), 2);
        assert!((angles[0] - FRAC_PI_2).abs() < 1e-12);
        assert!((angles[1] - PI).abs() < 1e-12);
    }

    #[test]
    fn full_synthesis_respects_mode_gate_vocabulary() {
        let target = Target::Dicke { n: 3, weight: 2 };
        for (mode, expect_kick) in [
            (SynthMode::Exact, false),
            (SynthMode::Quantized { bits: 8 }, false),
            (SynthMode::Kickback { bits: 8 }, true),
        ] {
            let circuit = synthesize_full(&target, mode, true).unwrap();
            let counts = circuit.gate_counts();
            let kick_gates = counts.h + counts.v + counts.cphase_bit + counts.oracle_write + counts.oracle_write_inverse;
            if expect_kick {
                assert!(kick_gates > 0);
                assert_eq!(circuit.ancilla_bits, 8);
            } else {
                assert_eq!(kick_gates, 0);
                assert_eq!(circuit.ancilla_bits, 0);
            }
        }
        assert_eq!(
            synthesize_full(&target, SynthMode::Quantized { bits: 1 }, false),
            Err(SynthError::PrecisionTooSmall(1))
        );
    }
}
