//! Component factorization of the solution space.
//!
//! The solution set of a formula is the Cartesian product of the solution
//! sets of its formula-hypergraph components, times a free `{0,1}^F` factor
//! for variables in no clause. Pairwise statistics over the full set
//! (hole counts, minimum overlap, connectivity radius, H-path success
//! rates) therefore reduce to per-component pair scans combined by exact
//! product counting — the experiment harness runs on these, and the tests
//! check them against the direct whole-set operations.
//!
//! The reductions used here:
//!
//! * a hole pair must agree outside a single component (any disagreement
//!   elsewhere yields an interior solution by splicing), so hole counts sum
//!   over components with a product multiplicity;
//! * distance maxima add across components; cluster radii take the maximum;
//! * an H-path of a full pair is valid exactly when each per-component
//!   restriction path is valid, because flips never cross component
//!   boundaries.

use crate::error::Result;
use crate::geometry;
use crate::instance::{Clause, Formula, Literal, Provenance};
use crate::solver::{enumerate_solutions, SolutionSet};
use crate::structure::{build_h, formula_components, path_via_h};

/// One formula-hypergraph component with its clauses remapped to local
/// variables `1..=vars.len()` and its complete local solution set.
pub struct ComponentSpace {
    /// Global variable indices, ascending.
    pub vars: Vec<usize>,
    pub sub_formula: Formula,
    pub restrictions: SolutionSet,
}

/// The factored solution space of one formula.
pub struct SpaceFactorization {
    n: usize,
    free_vars: Vec<usize>,
    blocks: Vec<ComponentSpace>,
    complete: bool,
}

impl SpaceFactorization {
    /// Splits `f` into components and enumerates each component's
    /// restrictions, up to `per_block_limit` solutions per component.
    pub fn build(f: &Formula, per_block_limit: Option<usize>) -> Result<SpaceFactorization> {
        let partition = formula_components(f);
        let mut free_vars = Vec::new();
        let mut blocks = Vec::new();
        let mut complete = true;
        for comp in partition.components {
            if comp.len() == 1 && !var_is_touched(f, comp[0]) {
                free_vars.push(comp[0]);
                continue;
            }
            let block = build_block(f, comp, per_block_limit)?;
            complete &= block.restrictions.complete();
            blocks.push(block);
        }
        Ok(SpaceFactorization { n: f.n(), free_vars, blocks, complete })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn free_var_count(&self) -> usize {
        self.free_vars.len()
    }

    pub fn blocks(&self) -> &[ComponentSpace] {
        &self.blocks
    }

    /// False when some component hit the enumeration cap; the counting
    /// methods are then lower bounds and the callers should skip them.
    pub fn complete(&self) -> bool {
        self.complete
    }

    /// Exact number of solutions of the full formula.
    pub fn solution_count(&self) -> u128 {
        let mut count: u128 = 1 << self.free_vars.len();
        for b in &self.blocks {
            count = count.saturating_mul(b.restrictions.len() as u128);
        }
        count
    }

    pub fn is_satisfiable(&self) -> bool {
        self.blocks.iter().all(|b| !b.restrictions.is_empty())
    }

    /// Maximum Hamming distance over all solution pairs; `None` with fewer
    /// than two solutions. Distances add across independent factors.
    pub fn max_pair_distance(&self) -> Option<u32> {
        if self.solution_count() < 2 {
            return None;
        }
        let mut total = self.free_vars.len() as u32;
        for b in &self.blocks {
            let sols = b.restrictions.solutions();
            let mut best = 0u32;
            for i in 0..sols.len() {
                for j in i + 1..sols.len() {
                    best = best.max((sols[i].bits() ^ sols[j].bits()).count_ones());
                }
            }
            total += best;
        }
        Some(total)
    }

    /// Minimum overlap over all solution pairs, as an exact fraction.
    pub fn min_overlap(&self) -> Option<geometry::OverlapFraction> {
        self.max_pair_distance().map(|d| geometry::OverlapFraction {
            agree: self.n as u32 - d,
            n: self.n as u32,
        })
    }

    /// Smallest `l` making the full solution set one distance-`l` cluster:
    /// the maximum of the per-factor radii (free variables contribute 1).
    pub fn min_connect_l(&self) -> Result<Option<u32>> {
        if self.solution_count() < 2 {
            return Ok(None);
        }
        let mut radius = if self.free_vars.is_empty() { 0 } else { 1 };
        for b in &self.blocks {
            if b.restrictions.len() >= 2 {
                radius = radius.max(geometry::min_connect_l(&b.restrictions)?);
            }
        }
        Ok(Some(radius.max(1)))
    }

    /// Exact count of hole pairs of size at least `min_size` in the full
    /// solution set. A hole is confined to one component; each component
    /// hole lifts in `count / |S_K|` ways.
    pub fn hole_count_at_least(&self, min_size: u32) -> Result<u128> {
        let total = self.solution_count();
        let mut holes: u128 = 0;
        for b in &self.blocks {
            let local = geometry::find_holes(&b.sub_formula, &b.restrictions, min_size)?;
            if !local.is_empty() {
                let multiplicity = total / b.restrictions.len() as u128;
                holes += local.len() as u128 * multiplicity;
            }
        }
        Ok(holes)
    }

    /// Pair statistics for the H-path construction, over all ordered
    /// distinct solution pairs of the full formula.
    pub fn h_path_stats(&self, component_bound: Option<u32>) -> Result<PairStats> {
        let solutions = self.solution_count();
        let free = self.free_vars.len() as u32;
        let mut total: u128 = 1u128 << (2 * free);
        let mut successes: u128 = 1u128 << (2 * free);
        let mut within: u128 = match component_bound {
            // Free disagreement variables are singleton H-components.
            Some(0) => 1u128 << free,
            _ => 1u128 << (2 * free),
        };
        let mut max_h: Option<usize> = None;
        if solutions >= 2 && free > 0 {
            max_h = Some(1);
        }

        for b in &self.blocks {
            let sols = b.restrictions.solutions();
            let s = sols.len() as u128;
            let mut block_succ: u128 = s; // diagonal pairs always succeed
            let mut block_within: u128 = s; // diagonal H is empty
            let mut block_max = 0usize;
            for i in 0..sols.len() {
                for j in 0..sols.len() {
                    if i == j {
                        continue;
                    }
                    let h = build_h(&b.sub_formula, &sols[i], &sols[j])?;
                    let comp = h.largest_component_size();
                    block_max = block_max.max(comp);
                    if component_bound.is_none_or(|l| comp as u32 <= l) {
                        block_within += 1;
                    }
                    if path_via_h(&b.sub_formula, &sols[i], &sols[j])?.is_path() {
                        block_succ += 1;
                    }
                }
            }
            total = total.saturating_mul(s * s);
            successes = successes.saturating_mul(block_succ);
            within = within.saturating_mul(block_within);
            if s >= 2 {
                max_h = Some(max_h.unwrap_or(0).max(block_max));
            }
        }

        let distinct = total.saturating_sub(solutions);
        let succ_distinct = successes.saturating_sub(solutions);
        let within_distinct = within.saturating_sub(solutions);
        Ok(PairStats {
            solutions,
            ordered_distinct_pairs: distinct,
            path_failures: distinct - succ_distinct,
            pairs_within_component_bound: component_bound.map(|_| within_distinct),
            max_h_component: max_h,
        })
    }
}

/// Ordered distinct-pair tallies for the H-path construction.
#[derive(Clone, Copy, Debug)]
pub struct PairStats {
    pub solutions: u128,
    pub ordered_distinct_pairs: u128,
    pub path_failures: u128,
    /// Pairs whose largest H-component stayed within the requested bound;
    /// present iff a bound was requested.
    pub pairs_within_component_bound: Option<u128>,
    /// Largest H-component over all pairs; `None` without pairs.
    pub max_h_component: Option<usize>,
}

impl PairStats {
    /// Fraction of ordered distinct pairs connected by a valid H-path;
    /// 1 when there are no pairs.
    pub fn success_rate(&self) -> f64 {
        if self.ordered_distinct_pairs == 0 {
            return 1.0;
        }
        1.0 - self.path_failures as f64 / self.ordered_distinct_pairs as f64
    }

    pub fn within_bound_rate(&self) -> Option<f64> {
        let within = self.pairs_within_component_bound?;
        if self.ordered_distinct_pairs == 0 {
            return Some(1.0);
        }
        Some(within as f64 / self.ordered_distinct_pairs as f64)
    }
}

fn var_is_touched(f: &Formula, var: usize) -> bool {
    f.clauses().iter().any(|cl| cl.literals().iter().any(|l| l.var() == var))
}

fn build_block(
    f: &Formula,
    vars: Vec<usize>,
    per_block_limit: Option<usize>,
) -> Result<ComponentSpace> {
    let local_of: std::collections::HashMap<usize, usize> =
        vars.iter().enumerate().map(|(i, &v)| (v, i + 1)).collect();
    let mut clauses = Vec::new();
    for cl in f.clauses() {
        if !local_of.contains_key(&cl.literals()[0].var()) {
            continue;
        }
        let lits: Vec<Literal> = cl
            .literals()
            .iter()
            .map(|l| Literal::new(local_of[&l.var()], l.is_negated()))
            .collect();
        clauses.push(Clause::new(lits, f.k(), vars.len())?);
    }
    let sub_formula = Formula::new(vars.len(), f.k(), f.epsilon(), clauses, Provenance::File)?;
    let restrictions = enumerate_solutions(&sub_formula, per_block_limit);
    Ok(ComponentSpace { vars, sub_formula, restrictions })
}
