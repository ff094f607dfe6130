//! Random instance generators for the two ensembles.
//!
//! All randomness flows from `ModelParams::seed` through the crate's ChaCha8
//! stream; identical parameters always produce the identical formula.

use super::{Clause, Density, Formula, Literal, ModelParams, Provenance};
use crate::error::{Error, Result};
use crate::rng::{bernoulli, binomial, rng_from_seed, sample_distinct, Rng};

/// How `generate_counting` assigns sign patterns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignMode {
    /// Each literal slot negated independently with probability `eps`, so a
    /// pattern with `i` negations has probability `eps^i * (1-eps)^(k-i)`.
    Multinomial,
    /// Pattern counts are largest-remainder roundings of
    /// `m * eps^i * (1-eps)^j` over the `2^k` ordered patterns, summing to `m`
    /// exactly.
    ExactCounts,
}

/// Counting model: exactly `round(r*n)` clauses, drawn with replacement.
///
/// Clause variables are `k` distinct indices sampled uniformly and listed in
/// ascending order; slot `j`'s sign comes from the pattern for that clause.
pub fn generate_counting(params: &ModelParams, mode: SignMode) -> Result<Formula> {
    params.validate()?;
    let r = match params.density {
        Density::ClauseRatio(r) => r,
        Density::InclusionScale(_) => {
            return Err(Error::domain("counting model needs a clause/variable ratio"))
        }
    };
    let (n, k, eps) = (params.n, params.k, params.epsilon);
    let m = (r * n as f64).round() as usize;
    let mut rng = rng_from_seed(params.seed);
    let mut clauses = Vec::with_capacity(m);

    match mode {
        SignMode::Multinomial => {
            for _ in 0..m {
                let mut pattern = 0u32;
                for slot in 0..k {
                    if bernoulli(&mut rng, eps) {
                        pattern |= 1 << slot;
                    }
                }
                clauses.push(draw_clause(&mut rng, n, k, pattern)?);
            }
        }
        SignMode::ExactCounts => {
            for (pattern, count) in pattern_counts(m, k, eps).into_iter().enumerate() {
                for _ in 0..count {
                    clauses.push(draw_clause(&mut rng, n, k, pattern as u32)?);
                }
            }
        }
    }

    Formula::new(n, k, eps, clauses, Provenance::Counting { r, seed: params.seed })
}

fn draw_clause(rng: &mut Rng, n: usize, k: usize, pattern: u32) -> Result<Clause> {
    let vars = sample_distinct(rng, k, n);
    let literals = vars
        .iter()
        .enumerate()
        .map(|(slot, &v)| Literal::new(v, pattern >> slot & 1 == 1))
        .collect();
    Clause::new(literals, k, n)
}

/// Largest-remainder apportionment of `m` clauses over the `2^k` ordered sign
/// patterns with weights `eps^i * (1-eps)^(k-i)`. Ties go to the lower
/// pattern index.
fn pattern_counts(m: usize, k: usize, eps: f64) -> Vec<usize> {
    let patterns = 1usize << k;
    let mut counts = vec![0usize; patterns];
    let mut remainders: Vec<(usize, f64)> = Vec::with_capacity(patterns);
    let mut assigned = 0usize;
    for pat in 0..patterns {
        let i = (pat as u32).count_ones() as i32;
        let weight = eps.powi(i) * (1.0 - eps).powi(k as i32 - i);
        let target = m as f64 * weight;
        let floor = target.floor() as usize;
        counts[pat] = floor;
        assigned += floor;
        remainders.push((pat, target - floor as f64));
    }
    remainders.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    for &(pat, _) in remainders.iter().take(m - assigned) {
        counts[pat] += 1;
    }
    counts
}

/// Largest `C(n,k)` for which the generator walks every candidate clause.
const FULL_SWEEP_LIMIT: f64 = 1e7;

/// Constant probability model: every signed clause with `i` negations is
/// present independently with probability `p * eps^i * (1-eps)^j`.
///
/// For `C(n,k)` up to 10^7 this is a full Bernoulli sweep in (variable-set,
/// pattern) lexicographic order; above that, a binomial count is drawn per
/// sign pattern and that many distinct variable sets are rejection-sampled.
pub fn generate_constant_prob(params: &ModelParams) -> Result<Formula> {
    params.validate()?;
    let p = match params.density {
        Density::InclusionScale(p) => p,
        Density::ClauseRatio(_) => {
            return Err(Error::domain("constant probability model needs an inclusion scale"))
        }
    };
    let (n, k, eps) = (params.n, params.k, params.epsilon);
    let max_pattern_weight = eps.max(1.0 - eps).powi(k as i32);
    if p * max_pattern_weight > 1.0 {
        return Err(Error::domain(format!(
            "inclusion probability {} exceeds 1 for the most likely sign pattern",
            p * max_pattern_weight
        )));
    }
    let mut rng = rng_from_seed(params.seed);
    let mut clauses = Vec::new();
    let subsets = super::binomial_coefficient(n, k);

    if subsets <= FULL_SWEEP_LIMIT {
        let mut vars: Vec<usize> = (1..=k).collect();
        loop {
            for pat in 0..(1u32 << k) {
                let i = pat.count_ones() as i32;
                let prob = p * eps.powi(i) * (1.0 - eps).powi(k as i32 - i);
                if bernoulli(&mut rng, prob) {
                    let literals = vars
                        .iter()
                        .enumerate()
                        .map(|(slot, &v)| Literal::new(v, pat >> slot & 1 == 1))
                        .collect();
                    clauses.push(Clause::new(literals, k, n)?);
                }
            }
            if !next_combination(&mut vars, n) {
                break;
            }
        }
    } else {
        for pat in 0..(1u32 << k) {
            let i = pat.count_ones() as i32;
            let prob = p * eps.powi(i) * (1.0 - eps).powi(k as i32 - i);
            let count = binomial(&mut rng, subsets as u64, prob);
            let mut seen: Vec<Vec<usize>> = Vec::with_capacity(count as usize);
            while (seen.len() as u64) < count {
                let vars = sample_distinct(&mut rng, k, n);
                if !seen.contains(&vars) {
                    seen.push(vars);
                }
            }
            seen.sort_unstable();
            for vars in seen {
                let literals = vars
                    .iter()
                    .enumerate()
                    .map(|(slot, &v)| Literal::new(v, pat >> slot & 1 == 1))
                    .collect();
                clauses.push(Clause::new(literals, k, n)?);
            }
        }
    }

    Formula::new(n, k, eps, clauses, Provenance::ConstantProb { p, seed: params.seed })
}

/// Advances `vars` to the next k-subset of `1..=n` in lexicographic order.
fn next_combination(vars: &mut [usize], n: usize) -> bool {
    let k = vars.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if vars[i] < n - (k - 1 - i) {
            vars[i] += 1;
            for j in i + 1..k {
                vars[j] = vars[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
