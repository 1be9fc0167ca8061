//! Dense statevector simulation and verification.
//!
//! The register layout follows the circuit convention: a full basis index
//! packs the n data qubits in its top bits (qubit 1 highest) and the m
//! ancilla bits below (ancilla bit j at position m-j, so the ancilla value
//! read as an integer is the fraction numerator it holds).

use num_complex::Complex64;

use crate::state::{Prefix, TargetState};
use crate::synth::{Circuit, Gate};

/// Weight allowed outside the ancilla |0⟩ subspace after a full run.
pub const ANCILLA_RESIDUAL_LIMIT: f64 = 1e-9;
/// Weight allowed outside the measured-prefix support in [`prefix_amplitudes`].
pub const SUFFIX_RESIDUAL_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    data_qubits: usize,
    ancilla_bits: u32,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0…0⟩ on both registers.
    pub fn zero(data_qubits: usize, ancilla_bits: u32) -> Self {
        StateVector::basis(data_qubits, ancilla_bits, 0)
    }

    /// |x⟩ on the data register, |0⟩ on the ancilla.
    pub fn basis(data_qubits: usize, ancilla_bits: u32, x: usize) -> Self {
        assert!(data_qubits >= 1 && x < 1usize << data_qubits);
        let dim = 1usize << (data_qubits + ancilla_bits as usize);
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[x << ancilla_bits] = Complex64::new(1.0, 0.0);
        StateVector { data_qubits, ancilla_bits, amps }
    }

    /// The target's amplitudes on the data register, |0⟩ on the ancilla.
    pub fn from_target(target: &TargetState, ancilla_bits: u32) -> Self {
        let n = target.n();
        let mut sv = StateVector::zero(n, ancilla_bits);
        for x in 0..1usize << n {
            sv.amps[x << ancilla_bits] = target.amplitude(x);
        }
        sv
    }

    pub fn data_qubits(&self) -> usize {
        self.data_qubits
    }

    pub fn ancilla_bits(&self) -> u32 {
        self.ancilla_bits
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    fn total_bits(&self) -> usize {
        self.data_qubits + self.ancilla_bits as usize
    }

    /// Bit position of data qubit k in a full index.
    fn data_bit(&self, k: usize) -> usize {
        debug_assert!(k >= 1 && k <= self.data_qubits);
        self.ancilla_bits as usize + self.data_qubits - k
    }

    /// Bit position of ancilla bit j in a full index.
    fn ancilla_bit(&self, j: u32) -> usize {
        debug_assert!(j >= 1 && j <= self.ancilla_bits);
        (self.ancilla_bits - j) as usize
    }

    fn prefix_matches(&self, i: usize, prefix: Prefix) -> bool {
        prefix.is_empty() || i >> (self.total_bits() - prefix.len()) == prefix.value()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    /// Amplitude of |x⟩ on the data register with the ancilla in |0⟩.
    pub fn data_amplitude(&self, x: usize) -> Complex64 {
        self.amps[x << self.ancilla_bits]
    }

    /// Total probability outside the ancilla |0⟩ subspace.
    pub fn ancilla_residual(&self) -> f64 {
        if self.ancilla_bits == 0 {
            return 0.0;
        }
        let mask = (1usize << self.ancilla_bits) - 1;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}

pub fn apply_gate(sv: &mut StateVector, gate: &Gate) {
    let dim = sv.amps.len();
    match gate {
        Gate::Ry { target, controls, theta } => {
            let pos = sv.data_bit(*target);
            let (s, c) = (theta / 2.0).sin_cos();
            for i in 0..dim {
                if i & (1 << pos) == 0 && sv.prefix_matches(i, *controls) {
                    let j = i | (1 << pos);
                    let (a, b) = (sv.amps[i], sv.amps[j]);
                    sv.amps[i] = c * a - s * b;
                    sv.amps[j] = s * a + c * b;
                }
            }
        }
        Gate::Phase { target, controls, phi } => {
            let pos = sv.data_bit(*target);
            let factor = Complex64::from_polar(1.0, *phi);
            for i in 0..dim {
                if i & (1 << pos) != 0 && sv.prefix_matches(i, *controls) {
                    sv.amps[i] *= factor;
                }
            }
        }
        Gate::H { target } => {
            let pos = sv.data_bit(*target);
            let s = std::f64::consts::FRAC_1_SQRT_2;
            for i in 0..dim {
                if i & (1 << pos) == 0 {
                    let j = i | (1 << pos);
                    let (a, b) = (sv.amps[i], sv.amps[j]);
                    sv.amps[i] = s * (a + b);
                    sv.amps[j] = s * (a - b);
                }
            }
        }
        Gate::V { target } => {
            // diag(1, -i); the |1⟩ component picks up (re, im) → (im, -re),
            // exact in floating point.
            let pos = sv.data_bit(*target);
            for i in 0..dim {
                if i & (1 << pos) != 0 {
                    let a = sv.amps[i];
                    sv.amps[i] = Complex64::new(a.im, -a.re);
                }
            }
        }
        Gate::CPhaseBit { control_bit, target, phi } => {
            let control = sv.ancilla_bit(*control_bit);
            let pos = sv.data_bit(*target);
            let plus = Complex64::from_polar(1.0, *phi);
            let minus = Complex64::from_polar(1.0, -phi);
            for i in 0..dim {
                if i & (1 << control) != 0 {
                    sv.amps[i] *= if i & (1 << pos) == 0 { plus } else { minus };
                }
            }
        }
        Gate::OracleWrite { layer, omegas } | Gate::OracleWriteInverse { layer, omegas } => {
            // XOR the per-prefix numerator into the ancilla: a permutation of
            // basis states, its own inverse.
            let m = sv.ancilla_bits;
            let n = sv.data_qubits;
            assert_eq!(omegas.len(), 1usize << (layer - 1));
            for d in 0..1usize << n {
                let mask = omegas[d >> (n + 1 - layer)] as usize;
                if mask == 0 {
                    continue;
                }
                debug_assert!(mask < 1usize << m);
                let base = d << m;
                for a in 0..1usize << m {
                    if a < a ^ mask {
                        sv.amps.swap(base | a, base | (a ^ mask));
                    }
                }
            }
        }
        Gate::GlobalPhase { phi } => {
            let factor = Complex64::from_polar(1.0, *phi);
            for amp in &mut sv.amps {
                *amp *= factor;
            }
        }
    }
}

/// Apply every gate in order to a copy of `initial`.
pub fn run(circuit: &Circuit, initial: &StateVector) -> StateVector {
    assert_eq!(circuit.data_qubits, initial.data_qubits);
    assert_eq!(circuit.ancilla_bits, initial.ancilla_bits);
    let mut sv = initial.clone();
    for gate in &circuit.gates {
        apply_gate(&mut sv, gate);
    }
    sv
}

/// |⟨a|b⟩|² for states on identical registers.
pub fn fidelity(a: &StateVector, b: &StateVector) -> f64 {
    assert_eq!(a.data_qubits, b.data_qubits);
    assert_eq!(a.ancilla_bits, b.ancilla_bits);
    let overlap: Complex64 = a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum();
    overlap.norm_sqr()
}

/// Square roots of the probabilities of each length-`len` data prefix, with
/// whatever weight sits outside the expected |0…0⟩ suffix reported alongside.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefixMarginals {
    pub len: usize,
    pub values: Vec<f64>,
    pub off_support: f64,
}

impl PrefixMarginals {
    /// Whether the suffix (data qubits past the prefix, plus the ancilla)
    /// really was in |0⟩.
    pub fn suffix_in_zero(&self) -> bool {
        self.off_support <= SUFFIX_RESIDUAL_LIMIT
    }
}

/// Measure the marginal magnitudes of the first `len` data qubits.
pub fn prefix_amplitudes(sv: &StateVector, len: usize) -> PrefixMarginals {
    assert!(len <= sv.data_qubits);
    let drop = sv.total_bits() - len;
    let mut sums = vec![0.0f64; 1usize << len];
    let mut off_support = 0.0;
    for (i, amp) in sv.amps.iter().enumerate() {
        let p = amp.norm_sqr();
        sums[i >> drop] += p;
        if i & ((1usize << drop) - 1) != 0 {
            off_support += p;
        }
    }
    PrefixMarginals { len, values: sums.into_iter().map(f64::sqrt).collect(), off_support }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyReport {
    pub fidelity: f64,
    pub ancilla_residual: f64,
    pub epsilon: f64,
    pub passed: bool,
}

/// Run `circuit` from |0…0⟩ and compare against `target` (phases included).
/// Passing means fidelity ≥ 1 - epsilon and ancilla residual within
/// [`ANCILLA_RESIDUAL_LIMIT`].
pub fn verify(circuit: &Circuit, target: &TargetState, epsilon: f64) -> VerifyReport {
    assert_eq!(circuit.data_qubits, target.n());
    let out = run(circuit, &StateVector::zero(circuit.data_qubits, circuit.ancilla_bits));
    let want = StateVector::from_target(target, circuit.ancilla_bits);
    let fidelity = fidelity(&want, &out);
    let ancilla_residual = out.ancilla_residual();
    VerifyReport {
        fidelity,
        ancilla_residual,
        epsilon,
        passed: fidelity >= 1.0 - epsilon && ancilla_residual <= ANCILLA_RESIDUAL_LIMIT,
    }
}
