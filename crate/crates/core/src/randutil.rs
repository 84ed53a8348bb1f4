use rand::Rng;
use rand_distr::{Distribution, Poisson};

/// Poisson draw tolerating a zero mean (identically zero).
pub(crate) fn poisson_count<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    debug_assert!(mean >= 0.0);
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("positive mean").sample(rng) as u64
}

/// Log Γ(x) via the Lanczos approximation (g = 7, n = 9), x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ];
    debug_assert!(x > 0.0);
    if x < 0.5 {
        // reflection
        return std::f64::consts::PI.ln()
            - (std::f64::consts::PI * x).sin().abs().ln()
            - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut acc = 0.99999999999980993;
    for (i, c) in COEFFS.iter().enumerate() {
        acc += c / (z + i as f64 + 1.0);
    }
    let t = z + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// ln P[Poisson(mean) = k].
pub(crate) fn poisson_ln_pmf(mean: f64, k: u64) -> f64 {
    if mean <= 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    k as f64 * mean.ln() - mean - ln_gamma(k as f64 + 1.0)
}

/// P[Poisson(mean) >= threshold], summed from the lighter side.
pub fn poisson_tail(mean: f64, threshold: u64) -> f64 {
    if threshold == 0 {
        return 1.0;
    }
    if mean <= 0.0 {
        return 0.0;
    }
    // Sum the head in the pmf recurrence; complement gives the tail.
    let mut p = (-mean).exp();
    let mut head = p;
    for k in 1..threshold {
        p *= mean / k as f64;
        head += p;
    }
    (1.0 - head).max(0.0)
}

/// Inversion sample of Poisson(mean) conditioned on >= threshold.
///
/// `tail` must equal `poisson_tail(mean, threshold)`.
pub(crate) fn truncated_poisson<R: Rng + ?Sized>(
    rng: &mut R,
    mean: f64,
    threshold: u64,
    tail: f64,
) -> u64 {
    let u: f64 = rng.random();
    let target = u * tail;
    let mut k = threshold;
    let mut p = poisson_ln_pmf(mean, k).exp();
    let mut acc = p;
    while acc < target && p > 0.0 {
        k += 1;
        p *= mean / k as f64;
        acc += p;
    }
    k
}
