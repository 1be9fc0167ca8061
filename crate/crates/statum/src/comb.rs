//! Exact binomial coefficients.
//!
//! Conditional probabilities of symmetric states are ratios of binomial
//! coefficients. Computing those from exact integers keeps the oracle error
//! at the level of a single rounding step instead of letting it grow with n.

/// C(n, k) as an exact `u128`, or 0 when `k > n`.
///
/// Every partial product `acc * (n - k + i) / i` is itself a binomial
/// coefficient, so the division is exact at each step. Free of overflow for
/// n ≤ 124; callers beyond that range must use [`binomial`].
pub fn binomial_u128(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc * (n - k + i) / i;
    }
    acc
}

/// C(n, k) as `f64`: converted once from exact integer arithmetic for
/// n ≤ 120, via a log-space product beyond that.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    if n <= 120 {
        return binomial_u128(n, k) as f64;
    }
    let k = k.min(n - k);
    let rest = (n - k) as f64;
    let ln_c: f64 = (1..=k)
        .map(|i| ((rest + i as f64) / i as f64).ln())
        .sum();
    ln_c.exp()
}
