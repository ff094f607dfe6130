//! Exactly-one-in-k formulas, assignments, random models, and thresholds.
//!
//! An instance is a conjunction of width-`k` clauses over `n` boolean
//! variables; an assignment satisfies it when every clause has *exactly one*
//! true literal. Random instances are drawn under two ensembles:
//!
//! * the **counting model**: exactly `round(r*n)` clauses, sign patterns with
//!   `i` negations weighted `eps^i * (1-eps)^(k-i)` per pattern;
//! * the **constant probability model**: every signed clause included
//!   independently with probability `p * eps^i * (1-eps)^j`.
//!
//! Everything here is desk scale by design: assignments are packed into a
//! `u64`, so `n <= 64`.

mod gen;
mod text;

pub use gen::{generate_constant_prob, generate_counting, SignMode};
pub use text::{parse_formula, write_formula};

use crate::error::{Error, Result};

/// Hard upper bound on the variable count; assignments are `u64`-packed.
pub const MAX_VARS: usize = 64;

/// A signed variable. Encoded DIMACS style: `v` positive, `-v` negated.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal(i32);

impl Literal {
    pub fn new(var: usize, negated: bool) -> Self {
        debug_assert!(var >= 1 && var <= i32::MAX as usize);
        Literal(if negated { -(var as i32) } else { var as i32 })
    }

    /// From a nonzero DIMACS code.
    pub fn from_code(code: i32) -> Result<Self> {
        if code == 0 {
            return Err(Error::domain("literal code must be nonzero"));
        }
        Ok(Literal(code))
    }

    pub fn code(self) -> i32 {
        self.0
    }

    /// 1-based variable index.
    pub fn var(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_negated(self) -> bool {
        self.0 < 0
    }

    /// Whether the literal is true when its variable has `value`.
    pub fn satisfied_by(self, value: bool) -> bool {
        value != self.is_negated()
    }
}

impl std::fmt::Debug for Literal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A width-`k` exactly-one clause: `k` literals over pairwise distinct
/// variables.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Clause {
    literals: Vec<Literal>,
}

impl Clause {
    /// Validates width, distinctness and the variable range `1..=n`.
    pub fn new(literals: Vec<Literal>, k: usize, n: usize) -> Result<Self> {
        if literals.len() != k {
            return Err(Error::domain(format!(
                "clause has {} literals, expected {k}",
                literals.len()
            )));
        }
        for (idx, lit) in literals.iter().enumerate() {
            if lit.var() < 1 || lit.var() > n {
                return Err(Error::domain(format!(
                    "variable {} out of range 1..={n}",
                    lit.var()
                )));
            }
            if literals[..idx].iter().any(|prev| prev.var() == lit.var()) {
                return Err(Error::domain(format!("repeated variable {}", lit.var())));
            }
        }
        Ok(Clause { literals })
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    /// Bit mask of the clause's variables (bit `v-1` set for variable `v`).
    pub fn var_mask(&self) -> u64 {
        self.literals
            .iter()
            .fold(0u64, |m, l| m | (1u64 << (l.var() - 1)))
    }

    /// Bit mask of the negated positions.
    pub fn neg_mask(&self) -> u64 {
        self.literals
            .iter()
            .filter(|l| l.is_negated())
            .fold(0u64, |m, l| m | (1u64 << (l.var() - 1)))
    }
}

/// How a formula came to be; carried for reporting, ignored by equality.
#[derive(Clone, Debug, PartialEq)]
pub enum Provenance {
    Counting { r: f64, seed: u64 },
    ConstantProb { p: f64, seed: u64 },
    File,
}

/// An exactly-one-in-k formula.
#[derive(Clone, Debug)]
pub struct Formula {
    n: usize,
    k: usize,
    epsilon: f64,
    clauses: Vec<Clause>,
    provenance: Provenance,
    /// Per-clause `(var_mask, neg_mask)`, precomputed for the hot paths.
    masks: Vec<(u64, u64)>,
}

impl Formula {
    pub fn new(
        n: usize,
        k: usize,
        epsilon: f64,
        clauses: Vec<Clause>,
        provenance: Provenance,
    ) -> Result<Self> {
        if n == 0 || n > MAX_VARS {
            return Err(Error::domain(format!("n must be in 1..={MAX_VARS}, got {n}")));
        }
        if k < 3 {
            return Err(Error::domain(format!("k must be at least 3, got {k}")));
        }
        if !(0.0..=0.5).contains(&epsilon) {
            return Err(Error::domain(format!("epsilon must be in [0, 1/2], got {epsilon}")));
        }
        for cl in &clauses {
            // Re-validate against this formula's n and k.
            Clause::new(cl.literals.clone(), k, n)?;
        }
        let masks = clauses.iter().map(|c| (c.var_mask(), c.neg_mask())).collect();
        Ok(Formula { n, k, epsilon, clauses, provenance, masks })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// `(var_mask, neg_mask)` of clause `idx`.
    pub fn clause_masks(&self, idx: usize) -> (u64, u64) {
        self.masks[idx]
    }

    /// A short content fingerprint, stable across runs.
    pub fn id(&self) -> String {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |v: u64| {
            h ^= v;
            h = h.wrapping_mul(0x1000_0000_01b3);
        };
        eat(self.n as u64);
        eat(self.k as u64);
        eat(self.epsilon.to_bits());
        for cl in &self.clauses {
            for lit in cl.literals() {
                eat(lit.code() as u64);
            }
            eat(u64::MAX);
        }
        format!("eok-n{}-k{}-m{}-{:08x}", self.n, self.k, self.num_clauses(), h as u32)
    }
}

/// Structural equality: provenance is metadata, not content.
impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.k == other.k
            && self.epsilon == other.epsilon
            && self.clauses == other.clauses
    }
}

/// A total assignment of `n` variables, packed into a `u64`
/// (variable `i` maps to bit `i-1`).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Assignment {
    n: u32,
    bits: u64,
}

impl Assignment {
    pub fn new(n: usize, bits: u64) -> Result<Self> {
        if n == 0 || n > MAX_VARS {
            return Err(Error::domain(format!("n must be in 1..={MAX_VARS}, got {n}")));
        }
        if n < MAX_VARS && bits >> n != 0 {
            return Err(Error::domain("assignment has bits beyond variable count"));
        }
        Ok(Assignment { n: n as u32, bits })
    }

    /// Parses a bitstring with variable 1 leftmost, e.g. `"100"`.
    pub fn from_bitstring(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s.len() > MAX_VARS {
            return Err(Error::domain(format!("bitstring length must be 1..={MAX_VARS}")));
        }
        let mut bits = 0u64;
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '1' => bits |= 1u64 << i,
                '0' => {}
                _ => return Err(Error::domain(format!("invalid bitstring character {ch:?}"))),
            }
        }
        Ok(Assignment { n: s.len() as u32, bits })
    }

    /// Renders with variable 1 leftmost.
    pub fn to_bitstring(self) -> String {
        (0..self.n)
            .map(|i| if self.bits >> i & 1 == 1 { '1' } else { '0' })
            .collect()
    }

    pub fn n(self) -> usize {
        self.n as usize
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    /// Value of 1-based variable `var`.
    pub fn get(self, var: usize) -> bool {
        debug_assert!(var >= 1 && var <= self.n as usize);
        self.bits >> (var - 1) & 1 == 1
    }

    pub fn with_var(self, var: usize, value: bool) -> Self {
        let mask = 1u64 << (var - 1);
        Assignment {
            n: self.n,
            bits: if value { self.bits | mask } else { self.bits & !mask },
        }
    }

    pub fn hamming(self, other: Self) -> Result<u32> {
        if self.n != other.n {
            return Err(Error::domain(format!(
                "assignment lengths differ: {} vs {}",
                self.n, other.n
            )));
        }
        Ok((self.bits ^ other.bits).count_ones())
    }

    /// Key under which bitstring order (variable 1 leftmost) is numeric order.
    fn lex_key(self) -> u64 {
        self.bits.reverse_bits() >> (MAX_VARS as u32 - self.n)
    }
}

impl std::fmt::Debug for Assignment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_bitstring())
    }
}

impl std::fmt::Display for Assignment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_bitstring())
    }
}

/// Bitstring-lexicographic order (variable 1 most significant).
impl Ord for Assignment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.lex_key().cmp(&other.lex_key()))
    }
}

impl PartialOrd for Assignment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl serde::Serialize for Assignment {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_bitstring())
    }
}

/// Density parameter of the two random models.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Density {
    /// Counting model: clause/variable ratio `r > 0`.
    ClauseRatio(f64),
    /// Constant probability model: inclusion scale `p` in [0, 1].
    InclusionScale(f64),
}

/// Parameters of a random instance draw.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub n: usize,
    pub k: usize,
    pub epsilon: f64,
    pub density: Density,
    pub seed: u64,
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if self.k < 3 {
            return Err(Error::domain(format!("k must be at least 3, got {}", self.k)));
        }
        if self.n < self.k {
            return Err(Error::domain(format!("n must be at least k={}, got {}", self.k, self.n)));
        }
        if self.n > MAX_VARS {
            return Err(Error::domain(format!("n must be at most {MAX_VARS}, got {}", self.n)));
        }
        if !(0.0..=0.5).contains(&self.epsilon) {
            return Err(Error::domain(format!(
                "epsilon must be in [0, 1/2], got {}",
                self.epsilon
            )));
        }
        match self.density {
            Density::ClauseRatio(r) if !(r > 0.0) => {
                Err(Error::domain(format!("clause/variable ratio must be positive, got {r}")))
            }
            Density::InclusionScale(p) if !(0.0..=1.0).contains(&p) => {
                Err(Error::domain(format!("inclusion scale must be in [0, 1], got {p}")))
            }
            _ => Ok(()),
        }
    }
}

/// `C(n, k)` as an `f64`; exact while the result stays below 2^53.
pub fn binomial_coefficient(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Satisfiability threshold of the counting model:
/// `r = 1 / (4*eps*(1-eps)) * 1 / C(k,2)`.
///
/// At `eps = 1/2` and `k = 3` this is the familiar `1/3` ratio of symmetric
/// 1-in-3 SAT.
pub fn threshold_r(k: usize, epsilon: f64) -> Result<f64> {
    if k < 3 {
        return Err(Error::domain(format!("k must be at least 3, got {k}")));
    }
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(Error::domain(format!("epsilon must be in (0, 1/2], got {epsilon}")));
    }
    Ok(1.0 / (4.0 * epsilon * (1.0 - epsilon)) / binomial_coefficient(k, 2))
}

/// Satisfiability threshold of the constant probability model:
/// `p = (k-2)! / (2*eps*(1-eps)) * n^(1-k)`.
pub fn threshold_p(k: usize, epsilon: f64, n: usize) -> Result<f64> {
    if k < 3 {
        return Err(Error::domain(format!("k must be at least 3, got {k}")));
    }
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(Error::domain(format!("epsilon must be in (0, 1/2], got {epsilon}")));
    }
    if n < k {
        return Err(Error::domain(format!("n must be at least k={k}, got {n}")));
    }
    let factorial_k2: f64 = (1..=(k - 2)).map(|i| i as f64).product();
    Ok(factorial_k2 / (2.0 * epsilon * (1.0 - epsilon)) * (n as f64).powi(1 - k as i32))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_r_known_values() {
        // 1-in-3 SAT threshold 2/(k(k-1)) = 1/3.
        assert_eq!(threshold_r(3, 0.5).unwrap(), 1.0 / 3.0);
        // At epsilon_0 = (3 - sqrt(3))/6 the weight 4*eps*(1-eps) is 2/3.
        let eps0 = (3.0 - 3.0f64.sqrt()) / 6.0;
        assert!((threshold_r(3, eps0).unwrap() - 0.5).abs() < 1e-12);
        assert!((threshold_r(4, 0.5).unwrap() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn threshold_r_domain_errors() {
        assert!(threshold_r(2, 0.5).is_err());
        assert!(threshold_r(3, 0.0).is_err());
        assert!(threshold_r(3, 0.6).is_err());
    }

    #[test]
    fn threshold_p_known_values() {
        for n in [10usize, 100] {
            let expect = 2.0 / (n as f64 * n as f64);
            assert!((threshold_p(3, 0.5, n).unwrap() - expect).abs() < 1e-18);
        }
        // (k=3, eps=0.25, n=100): 1/(2*0.1875) * 100^-2
        let v = threshold_p(3, 0.25, 100).unwrap();
        assert!((v - 2.666_666_666_666_667e-4).abs() < 1e-12, "{v}");
        assert!(threshold_p(3, 0.5, 2).is_err());
    }

    #[test]
    fn thresholds_are_consistent_between_models() {
        // p * C(n,k) / n approaches r as n grows.
        for (n, tol) in [(1_000usize, 5e-3), (10_000, 5e-4)] {
            let r = threshold_r(3, 0.5).unwrap();
            let p = threshold_p(3, 0.5, n).unwrap();
            let approx_r = p * binomial_coefficient(n, 3) / n as f64;
            let rel = (approx_r - r).abs() / r;
            assert!(rel < tol, "n={n} rel={rel}");
        }
        // And the error shrinks with n.
        let rel = |n: usize| {
            let r = threshold_r(4, 0.3).unwrap();
            let p = threshold_p(4, 0.3, n).unwrap();
            (p * binomial_coefficient(n, 4) / n as f64 - r).abs() / r
        };
        assert!(rel(10_000) < rel(1_000));
    }

    #[test]
    fn clause_invariants() {
        let lits = vec![Literal::new(1, false), Literal::new(2, false), Literal::new(3, true)];
        let cl = Clause::new(lits, 3, 3).unwrap();
        assert_eq!(cl.var_mask(), 0b111);
        assert_eq!(cl.neg_mask(), 0b100);

        let repeated = vec![Literal::new(1, false), Literal::new(1, true), Literal::new(2, false)];
        assert!(Clause::new(repeated, 3, 3).is_err());
        let out_of_range = vec![Literal::new(1, false), Literal::new(2, false), Literal::new(9, false)];
        assert!(Clause::new(out_of_range, 3, 3).is_err());
        let short = vec![Literal::new(1, false)];
        assert!(Clause::new(short, 3, 3).is_err());
    }

    #[test]
    fn assignment_bitstring_round_trip() {
        let a = Assignment::from_bitstring("100").unwrap();
        assert_eq!(a.bits(), 0b001);
        assert!(a.get(1) && !a.get(2) && !a.get(3));
        assert_eq!(a.to_bitstring(), "100");
        assert!(Assignment::from_bitstring("10x").is_err());
    }

    #[test]
    fn assignment_order_is_bitstring_lexicographic() {
        let strs = ["0011", "0100", "1000"];
        let mut parsed: Vec<Assignment> =
            strs.iter().map(|s| Assignment::from_bitstring(s).unwrap()).collect();
        parsed.sort();
        let rendered: Vec<String> = parsed.iter().map(|a| a.to_bitstring()).collect();
        assert_eq!(rendered, strs);
    }

    #[test]
    fn formula_rejects_bad_epsilon_and_k() {
        assert!(Formula::new(3, 3, 0.7, vec![], Provenance::File).is_err());
        assert!(Formula::new(3, 2, 0.5, vec![], Provenance::File).is_err());
        assert!(Formula::new(0, 3, 0.5, vec![], Provenance::File).is_err());
        // Empty formula over fewer than k variables is still a formula.
        assert!(Formula::new(2, 3, 0.5, vec![], Provenance::File).is_ok());
    }
}
