//! Target-state descriptions and prefix/marginal machinery.
//!
//! A preparation target is given either densely (one complex amplitude per
//! basis state) or as weights over the symmetric basis. Dense targets are
//! factored into nonnegative magnitudes and phases: the magnitudes drive the
//! rotation cascade, the phases a separate diagonal stage. The central
//! derived object is the [`MarginalTree`], which extends the leaf magnitudes
//! to every bit-string prefix: `tree.amplitude(p)` squared is the probability
//! of observing `p` on the leftmost qubits of the target.

use num_complex::Complex64;

use crate::comb::binomial;

/// Norm² deviations at or above this are rejected outright.
pub const NORM_REJECT: f64 = 1e-6;
/// Norm² deviations at or below this are accepted as-is; anything between
/// this and [`NORM_REJECT`] is silently renormalized and flagged.
pub const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StateError {
    #[error("qubit count must be at least 1")]
    NoQubits,
    #[error("expected {expected} entries for n={n}, got {got}")]
    WrongLength { n: usize, expected: usize, got: usize },
    #[error("magnitude at index {index} is negative or non-finite ({value})")]
    NegativeMagnitude { index: usize, value: f64 },
    #[error("norm\u{b2} = {norm_sq} deviates from 1 by {:e}, at or above the 1e-6 limit", (norm_sq - 1.0).abs())]
    NotNormalized { norm_sq: f64 },
}

/// The observed values of qubits 1..=len, most significant bit first
/// (qubit 1 is the highest-order bit of a basis index).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prefix {
    len: usize,
    value: usize,
}

impl Prefix {
    pub fn new(len: usize, value: usize) -> Self {
        assert!(len < usize::BITS as usize && value < 1usize << len, "prefix value {value} does not fit in {len} bits");
        Prefix { len, value }
    }

    pub fn empty() -> Self {
        Prefix { len: 0, value: 0 }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn value(&self) -> usize {
        self.value
    }

    /// Value of qubit `k` (1-based, `k <= len`).
    pub fn bit(&self, k: usize) -> bool {
        assert!(k >= 1 && k <= self.len);
        (self.value >> (self.len - k)) & 1 == 1
    }

    /// The prefix extended by one more qubit reading `bit`.
    pub fn child(&self, bit: bool) -> Self {
        Prefix::new(self.len + 1, (self.value << 1) | bit as usize)
    }

    /// Number of 1 bits.
    pub fn hamming_weight(&self) -> usize {
        self.value.count_ones() as usize
    }

    /// Parse the textual form: `-` for the empty prefix, otherwise a string
    /// of `0`/`1` characters.
    pub fn from_pattern(s: &str) -> Option<Self> {
        if s == "-" {
            return Some(Prefix::empty());
        }
        if s.is_empty() || s.len() >= usize::BITS as usize {
            return None;
        }
        let mut value = 0usize;
        for c in s.chars() {
            value = (value << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    _ => return None,
                };
        }
        Some(Prefix::new(s.len(), value))
    }
}

impl std::fmt::Display for Prefix {
    /// The inverse of [`Prefix::from_pattern`]: `-` when empty, else the bits.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.len == 0 {
            return f.write_str("-");
        }
        for k in 1..=self.len {
            f.write_str(if self.bit(k) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Checks the squared norm of `mags` and either accepts, renormalizes in
/// place (returning `true`), or rejects.
fn normalize_magnitudes(mags: &mut [f64]) -> Result<bool, StateError> {
    for (index, &value) in mags.iter().enumerate() {
        if value < 0.0 || !value.is_finite() {
            return Err(StateError::NegativeMagnitude { index, value });
        }
    }
    let norm_sq: f64 = mags.iter().map(|a| a * a).sum();
    let dev = (norm_sq - 1.0).abs();
    if dev >= NORM_REJECT {
        return Err(StateError::NotNormalized { norm_sq });
    }
    if dev <= NORM_TOLERANCE {
        return Ok(false);
    }
    let scale = norm_sq.sqrt().recip();
    for a in mags.iter_mut() {
        *a *= scale;
    }
    Ok(true)
}

/// A dense n-qubit target in polar form: amplitude at basis index x is
/// `magnitudes[x] * exp(i * phases[x])` with every magnitude nonnegative.
///
/// Construction is validation: magnitudes must be nonnegative and their
/// squares must sum to 1 within [`NORM_REJECT`]; deviations above
/// [`NORM_TOLERANCE`] are repaired by scaling and recorded in
/// [`was_renormalized`](TargetState::was_renormalized). Phases are never
/// touched.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetState {
    n: usize,
    magnitudes: Vec<f64>,
    phases: Vec<f64>,
    renormalized: bool,
}

impl TargetState {
    pub fn new(n: usize, mut magnitudes: Vec<f64>, phases: Vec<f64>) -> Result<Self, StateError> {
        if n == 0 {
            return Err(StateError::NoQubits);
        }
        let expected = 1usize << n;
        if magnitudes.len() != expected {
            return Err(StateError::WrongLength { n, expected, got: magnitudes.len() });
        }
        if phases.len() != expected {
            return Err(StateError::WrongLength { n, expected, got: phases.len() });
        }
        let renormalized = normalize_magnitudes(&mut magnitudes)?;
        Ok(TargetState { n, magnitudes, phases, renormalized })
    }

    /// Polar-factor a complex amplitude vector. A zero amplitude gets phase 0.
    pub fn from_amplitudes(n: usize, amplitudes: &[Complex64]) -> Result<Self, StateError> {
        let (magnitudes, phases) = amplitudes.iter().map(|a| (a.norm(), a.arg())).unzip();
        TargetState::new(n, magnitudes, phases)
    }

    /// The computational basis state |x⟩.
    pub fn basis(n: usize, x: usize) -> Self {
        assert!(n >= 1 && x < 1usize << n);
        let mut magnitudes = vec![0.0; 1usize << n];
        magnitudes[x] = 1.0;
        TargetState { n, magnitudes, phases: vec![0.0; 1usize << n], renormalized: false }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn amplitude(&self, x: usize) -> Complex64 {
        Complex64::from_polar(self.magnitudes[x], self.phases[x])
    }

    pub fn was_renormalized(&self) -> bool {
        self.renormalized
    }

    pub fn marginal_tree(&self) -> MarginalTree {
        MarginalTree::from_magnitudes(self.n, &self.magnitudes)
    }
}

/// Marginal magnitudes for every prefix, built bottom-up from the leaves:
/// `amplitude(p)` = sqrt of the total probability of basis states extending
/// `p`. Level n stores the leaf magnitudes themselves, unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalTree {
    n: usize,
    levels: Vec<Vec<f64>>,
}

impl MarginalTree {
    fn from_magnitudes(n: usize, magnitudes: &[f64]) -> Self {
        let mut levels = vec![magnitudes.to_vec()];
        for _ in 0..n {
            let below = levels.last().unwrap();
            let level: Vec<f64> = (0..below.len() / 2)
                .map(|p| {
                    let (a0, a1) = (below[2 * p], below[2 * p + 1]);
                    (a0 * a0 + a1 * a1).sqrt()
                })
                .collect();
            levels.push(level);
        }
        levels.reverse();
        MarginalTree { n, levels }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    /// All marginal magnitudes for prefixes of length `j`, indexed by value.
    pub fn level(&self, j: usize) -> &[f64] {
        &self.levels[j]
    }

    pub fn amplitude(&self, prefix: Prefix) -> f64 {
        self.levels[prefix.len()][prefix.value()]
    }
}

/// A target in the symmetric basis: sum over j of `betas[j] |S_j⟩`, where
/// |S_j⟩ is the uniform superposition of the C(n, j) basis states of Hamming
/// weight j. Validation mirrors [`TargetState`] on the β vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricSpec {
    n: usize,
    betas: Vec<Complex64>,
    renormalized: bool,
}

impl SymmetricSpec {
    pub fn new(n: usize, mut betas: Vec<Complex64>) -> Result<Self, StateError> {
        if n == 0 {
            return Err(StateError::NoQubits);
        }
        if betas.len() != n + 1 {
            return Err(StateError::WrongLength { n, expected: n + 1, got: betas.len() });
        }
        let mut mags: Vec<f64> = betas.iter().map(|b| b.norm()).collect();
        let renormalized = normalize_magnitudes(&mut mags)?;
        if renormalized {
            let norm_sq: f64 = betas.iter().map(|b| b.norm_sqr()).sum();
            let scale = norm_sq.sqrt().recip();
            for b in betas.iter_mut() {
                *b *= scale;
            }
        }
        Ok(SymmetricSpec { n, betas, renormalized })
    }

    /// The single symmetric basis state |S_weight⟩.
    pub fn dicke(n: usize, weight: usize) -> Self {
        assert!(n >= 1 && weight <= n);
        let mut betas = vec![Complex64::new(0.0, 0.0); n + 1];
        betas[weight] = Complex64::new(1.0, 0.0);
        SymmetricSpec { n, betas, renormalized: false }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn betas(&self) -> &[Complex64] {
        &self.betas
    }

    pub fn was_renormalized(&self) -> bool {
        self.renormalized
    }
}

/// Expand a symmetric spec to its dense form: the amplitude at basis index x
/// is `betas[weight(x)] / sqrt(C(n, weight(x)))`.
///
/// The result always passes dense validation without renormalization; the
/// expansion only regroups the weight that the spec already normalized.
pub fn dense_from_symmetric(spec: &SymmetricSpec) -> TargetState {
    let n = spec.n();
    assert!(n <= 30, "dense expansion of n={n} qubits does not fit in memory");
    let amplitudes: Vec<Complex64> = (0..1usize << n)
        .map(|x| spec.betas()[x.count_ones() as usize] / binomial(n as u32, x.count_ones()).sqrt())
        .collect();
    let state = TargetState::from_amplitudes(n, &amplitudes)
        .expect("dense expansion of a validated symmetric spec is normalized");
    debug_assert!(!state.was_renormalized());
    state
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sqrt_half() -> f64 {
        std::f64::consts::FRAC_1_SQRT_2
    }

    #[test]
    fn prefix_bits_and_pattern_round_trip() {
        let p = Prefix::from_pattern("101").unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.value(), 0b101);
        assert!(p.bit(1) && !p.bit(2) && p.bit(3));
        assert_eq!(p.to_string(), "101");
        assert_eq!(p.hamming_weight(), 2);

        let root = Prefix::from_pattern("-").unwrap();
        assert_eq!(root, Prefix::empty());
        assert_eq!(root.to_string(), "-");
        assert_eq!(root.child(true), Prefix::new(1, 1));
        assert_eq!(root.child(true).child(false), Prefix::from_pattern("10").unwrap());

        assert_eq!(Prefix::from_pattern(""), None);
        assert_eq!(Prefix::from_pattern("10x"), None);
    }

    #[test]
    fn hamming_weight_examples() {
        assert_eq!(Prefix::from_pattern("1011").unwrap().hamming_weight(), 3);
        assert_eq!(Prefix::empty().hamming_weight(), 0);
    }

    #[test]
    fn accepts_exactly_normalized_input() {
        let s = TargetState::new(1, vec![0.8, 0.6], vec![0.0, 0.0]).unwrap();
        assert!(!s.was_renormalized());
        assert_eq!(s.magnitudes(), &[0.8, 0.6]);
    }

    #[test]
    fn renormalizes_and_flags_small_deviation() {
        // norm² = 1.00000012…, deviation ≈ 1.2e-7: inside the repairable band.
        let s = TargetState::new(1, vec![0.8, 0.600_000_1], vec![0.0, 1.0]).unwrap();
        assert!(s.was_renormalized());
        let norm_sq: f64 = s.magnitudes().iter().map(|a| a * a).sum();
        assert!((norm_sq - 1.0).abs() < 1e-15);
        // Phases ride along untouched.
        assert_eq!(s.phases(), &[0.0, 1.0]);
    }

    #[test]
    fn rejects_large_deviation_with_measured_norm() {
        let err = TargetState::new(1, vec![0.8, 0.7], vec![0.0, 0.0]).unwrap_err();
        match err {
            StateError::NotNormalized { norm_sq } => assert!((norm_sq - 1.13).abs() < 1e-12),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_negative_magnitude_and_bad_lengths() {
        assert!(matches!(
            TargetState::new(1, vec![1.0, -0.1], vec![0.0, 0.0]),
            Err(StateError::NegativeMagnitude { index: 1, .. })
        ));
        assert!(matches!(
            TargetState::new(2, vec![1.0, 0.0], vec![0.0, 0.0]),
            Err(StateError::WrongLength { expected: 4, got: 2, .. })
        ));
        assert!(matches!(TargetState::new(0, vec![], vec![]), Err(StateError::NoQubits)));
    }

    #[test]
    fn polar_factoring_keeps_magnitudes_nonnegative() {
        let amps = [
            Complex64::new(-0.6, 0.0),
            Complex64::new(0.0, 0.8),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        let s = TargetState::from_amplitudes(2, &amps).unwrap();
        assert!((s.magnitudes()[0] - 0.6).abs() < 1e-15);
        assert!((s.phases()[0] - std::f64::consts::PI).abs() < 1e-15);
        assert!((s.phases()[1] - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(s.phases()[2], 0.0);
        // Recombining reproduces the input amplitudes.
        for (x, a) in amps.iter().enumerate() {
            assert!((s.amplitude(x) - a).norm() < 1e-15);
        }
    }

    #[test]
    fn marginal_tree_of_uniform_pair() {
        // (|01⟩ + |10⟩)/√2: both single-qubit marginals are 1/√2.
        let s = TargetState::new(2, vec![0.0, sqrt_half(), sqrt_half(), 0.0], vec![0.0; 4]).unwrap();
        let tree = s.marginal_tree();
        assert!((tree.amplitude(Prefix::empty()) - 1.0).abs() < 1e-15);
        assert!((tree.amplitude(Prefix::new(1, 0)) - sqrt_half()).abs() < 1e-15);
        assert!((tree.amplitude(Prefix::new(1, 1)) - sqrt_half()).abs() < 1e-15);
        // Leaves are the magnitudes themselves, bit-for-bit.
        assert_eq!(tree.level(2), s.magnitudes());
    }

    #[test]
    fn dicke_expansion_is_uniform_over_its_weight_class() {
        let dense = dense_from_symmetric(&SymmetricSpec::dicke(4, 2));
        for x in 0..16usize {
            let want = if x.count_ones() == 2 { 1.0 / 6.0f64.sqrt() } else { 0.0 };
            assert!((dense.magnitudes()[x] - want).abs() < 1e-15, "x={x}");
        }
        assert!(!dense.was_renormalized());
    }

    #[test]
    fn mix_expansion_keeps_beta_phases() {
        let betas = vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, sqrt_half()),
            Complex64::new(-sqrt_half(), 0.0),
        ];
        let spec = SymmetricSpec::new(2, betas).unwrap();
        assert!(!spec.was_renormalized());
        let dense = dense_from_symmetric(&spec);
        // |01⟩ and |10⟩ carry β₁/√2 = i/2; |11⟩ carries β₂ = -1/√2.
        assert!((dense.amplitude(0b01) - Complex64::new(0.0, 0.5)).norm() < 1e-15);
        assert!((dense.amplitude(0b10) - Complex64::new(0.0, 0.5)).norm() < 1e-15);
        assert!((dense.amplitude(0b11) - Complex64::new(-sqrt_half(), 0.0)).norm() < 1e-15);
        assert_eq!(dense.magnitudes()[0b00], 0.0);
    }

    #[test]
    fn spec_validation_mirrors_dense_policy() {
        let unnorm = vec![Complex64::new(0.8, 0.0), Complex64::new(0.600_000_1, 0.0)];
        let spec = SymmetricSpec::new(1, unnorm).unwrap();
        assert!(spec.was_renormalized());
        let norm_sq: f64 = spec.betas().iter().map(|b| b.norm_sqr()).sum();
        assert!((norm_sq - 1.0).abs() < 1e-15);

        let bad = vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)];
        assert!(matches!(SymmetricSpec::new(1, bad), Err(StateError::NotNormalized { .. })));
        assert!(matches!(
            SymmetricSpec::new(2, vec![Complex64::new(1.0, 0.0); 2]),
            Err(StateError::WrongLength { expected: 3, got: 2, .. })
        ));
    }
}
