//! Seeded randomness.
//!
//! Every sampling primitive here is hand-rolled on top of the raw ChaCha8
//! output stream, so generated instances are bit-reproducible from a 64-bit
//! seed alone: nothing depends on distribution internals of the `rand` crate
//! that might change between versions.

use rand::{RngCore, SeedableRng};

/// The project-wide generator: ChaCha8, seeded from a single `u64`.
pub type Rng = rand_chacha::ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer; used to derive independent seeds.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Per-trial seed for cell `cell` and trial `trial` of an experiment:
/// `sm64(sm64(sm64(master) ^ cell) ^ trial)`. Cells and trials can therefore
/// run in any order, or in parallel, without changing any record.
pub fn trial_seed(master_seed: u64, cell: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master_seed) ^ cell) ^ trial)
}

/// Uniform draw from `0..bound` without modulo bias (rejection sampling).
pub fn uniform(rng: &mut Rng, bound: u64) -> u64 {
    debug_assert!(bound > 0);
    let zone = u64::MAX - (u64::MAX - bound + 1) % bound;
    loop {
        let v = rng.next_u64();
        if v <= zone {
            return v % bound;
        }
    }
}

/// Bernoulli draw with probability `p` (clamped to [0, 1]).
pub fn bernoulli(rng: &mut Rng, p: f64) -> bool {
    if p <= 0.0 {
        return false;
    }
    if p >= 1.0 {
        return true;
    }
    // Compare against a 64-bit threshold; the 2^-64 quantization is far below
    // any tolerance used in this crate.
    let threshold = (p * (u64::MAX as f64)) as u64;
    rng.next_u64() <= threshold
}

/// `count` distinct values from `1..=n`, returned sorted ascending.
///
/// Floyd's algorithm: `count` draws regardless of `n`.
pub fn sample_distinct(rng: &mut Rng, count: usize, n: usize) -> Vec<usize> {
    debug_assert!(count <= n);
    let mut chosen: Vec<usize> = Vec::with_capacity(count);
    for j in (n - count + 1)..=n {
        let t = uniform(rng, j as u64) as usize + 1;
        if chosen.contains(&t) {
            chosen.push(j);
        } else {
            chosen.push(t);
        }
    }
    chosen.sort_unstable();
    chosen
}

/// Binomial(n, p) by CDF inversion. Intended for the desk-scale regime where
/// the mean is at most a few thousand; runs in O(mean + spread) steps.
pub fn binomial(rng: &mut Rng, n: u64, p: f64) -> u64 {
    if p <= 0.0 || n == 0 {
        return 0;
    }
    if p >= 1.0 {
        return n;
    }
    let ln_q = (1.0 - p).ln();
    let mut pmf = (n as f64 * ln_q).exp();
    if pmf == 0.0 {
        // Mean too large for the inversion walk to start from zero; fall back
        // to a normal approximation rounded into range. Desk-scale parameters
        // never get here.
        let mean = n as f64 * p;
        let sd = (mean * (1.0 - p)).sqrt();
        let g = gaussian(rng);
        let v = (mean + sd * g).round();
        return v.clamp(0.0, n as f64) as u64;
    }
    let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    let odds = p / (1.0 - p);
    let mut cdf = pmf;
    let mut j = 0u64;
    while u > cdf && j < n {
        pmf *= odds * ((n - j) as f64) / ((j + 1) as f64);
        cdf += pmf;
        j += 1;
        if pmf < 1e-300 && cdf < u {
            break;
        }
    }
    j
}

fn gaussian(rng: &mut Rng) -> f64 {
    // Box-Muller on two 53-bit uniforms.
    let u1 = ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
    let u2 = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
