//! Conditional-probability oracles.
//!
//! Every rotation in the synthesized cascade encodes one number: the
//! probability that qubit k reads 0 given the values already observed on
//! qubits 1..k-1. This module puts that quantity behind a single interface
//! with three implementations: brute force over a marginal tree for dense
//! targets, and closed forms for symmetric targets that never touch the
//! 2^n-element expansion.

use num_complex::Complex64;

use crate::comb::binomial;
use crate::state::{MarginalTree, Prefix, SymmetricSpec, TargetState};

/// Source of the conditional probabilities driving synthesis.
pub trait ConditionalOracle {
    fn num_qubits(&self) -> usize;

    /// Probability that the qubit following `prefix` reads 0, or `None`
    /// exactly when the prefix itself has zero marginal probability (the
    /// conditional would be 0/0). A reachable prefix always yields a value,
    /// including 0.
    ///
    /// Requires `prefix.len() < num_qubits()`.
    fn cond_prob_zero(&self, prefix: Prefix) -> Option<f64>;
}

/// Brute-force oracle for dense targets: conditionals are ratios of marginal
/// probabilities read off a [`MarginalTree`]. This is the reference the
/// closed-form oracles are checked against.
#[derive(Debug, Clone)]
pub struct DenseOracle {
    tree: MarginalTree,
}

impl DenseOracle {
    pub fn new(state: &TargetState) -> Self {
        DenseOracle { tree: state.marginal_tree() }
    }

    pub fn from_tree(tree: MarginalTree) -> Self {
        DenseOracle { tree }
    }

    pub fn tree(&self) -> &MarginalTree {
        &self.tree
    }
}

impl ConditionalOracle for DenseOracle {
    fn num_qubits(&self) -> usize {
        self.tree.num_qubits()
    }

    fn cond_prob_zero(&self, prefix: Prefix) -> Option<f64> {
        assert!(prefix.len() < self.num_qubits());
        let a0 = self.tree.amplitude(prefix.child(false));
        let a1 = self.tree.amplitude(prefix.child(true));
        let (p0, p1) = (a0 * a0, a1 * a1);
        // Forming the ratio against p0 + p1 (rather than the parent entry)
        // keeps the result in [0, 1] by construction.
        if p0 + p1 == 0.0 {
            None
        } else {
            Some(p0 / (p0 + p1))
        }
    }
}

/// Probability that the qubit after `prefix` reads 1 in the symmetric basis
/// state |S_weight⟩ on n qubits, or `None` when no weight-`weight` string
/// extends `prefix`.
///
/// Counting form: of the C(n-l, weight-h) continuations (l = prefix length,
/// h = prefix weight), the fraction placing a 1 next is (weight-h)/(n-l).
pub fn symmetric_cond_prob_one(n: usize, weight: usize, prefix: Prefix) -> Option<f64> {
    assert!(weight <= n && prefix.len() < n);
    let remaining = n - prefix.len();
    let h = prefix.hamming_weight();
    if weight < h || weight - h > remaining {
        return None;
    }
    Some((weight - h) as f64 / remaining as f64)
}

/// Closed-form oracle for a single symmetric basis state |S_weight⟩.
#[derive(Debug, Clone, Copy)]
pub struct SymmetricBasisOracle {
    n: usize,
    weight: usize,
}

impl SymmetricBasisOracle {
    pub fn new(n: usize, weight: usize) -> Self {
        assert!(n >= 1 && weight <= n);
        SymmetricBasisOracle { n, weight }
    }
}

impl ConditionalOracle for SymmetricBasisOracle {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn cond_prob_zero(&self, prefix: Prefix) -> Option<f64> {
        symmetric_cond_prob_one(self.n, self.weight, prefix)?;
        // Integer subtraction first, so the result is exact (and exactly 0
        // or 1 at the boundaries).
        let remaining = n_minus_len(self.n, prefix);
        let ones_needed = self.weight - prefix.hamming_weight();
        Some((remaining - ones_needed) as f64 / remaining as f64)
    }
}

fn n_minus_len(n: usize, prefix: Prefix) -> usize {
    n - prefix.len()
}

/// Closed-form oracle for a superposition over the symmetric basis. The
/// cross terms between different weights vanish in every prefix marginal, so
/// only the weights |β_j|² enter.
#[derive(Debug, Clone)]
pub struct SymmetricMixOracle {
    n: usize,
    weights: Vec<f64>,
}

impl SymmetricMixOracle {
    pub fn new(spec: &SymmetricSpec) -> Self {
        SymmetricMixOracle {
            n: spec.n(),
            weights: spec.betas().iter().map(Complex64::norm_sqr).collect(),
        }
    }

    /// Marginal probability of observing `prefix` on the leftmost qubits:
    /// sum over j of |β_j|² C(n-l, j-h) / C(n, j), counting how many of the
    /// C(n, j) weight-j strings extend the prefix.
    pub fn marginal_sq(&self, prefix: Prefix) -> f64 {
        let remaining = (self.n - prefix.len()) as u32;
        let h = prefix.hamming_weight();
        self.weights
            .iter()
            .enumerate()
            .skip(h)
            .map(|(j, w)| w * binomial(remaining, (j - h) as u32) / binomial(self.n as u32, j as u32))
            .sum()
    }
}

impl ConditionalOracle for SymmetricMixOracle {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn cond_prob_zero(&self, prefix: Prefix) -> Option<f64> {
        assert!(prefix.len() < self.n);
        let m0 = self.marginal_sq(prefix.child(false));
        let m1 = self.marginal_sq(prefix.child(true));
        if m0 + m1 == 0.0 {
            None
        } else {
            Some(m0 / (m0 + m1))
        }
    }
}
