//! Geometry of a solution set: overlaps, distance-`l` clusters, holes,
//! agreement covers, and exact minimum covers.
//!
//! Overlap values are kept as exact `(agreement count, n)` pairs so histogram
//! buckets never alias through float rounding.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Assignment, Formula};
use crate::solver::{check_assignment, SolutionSet};
use crate::uf::UnionFind;

/// An exact overlap value `agree / n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OverlapFraction {
    pub agree: u32,
    pub n: u32,
}

impl OverlapFraction {
    pub fn as_f64(self) -> f64 {
        self.agree as f64 / self.n as f64
    }
}

impl PartialOrd for OverlapFraction {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OverlapFraction {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Cross-multiplied exact comparison.
        (self.agree as u64 * other.n as u64).cmp(&(other.agree as u64 * self.n as u64))
    }
}

/// Fraction of variables on which two assignments agree;
/// `overlap(a,b) = 1 - d_H(a,b)/n`.
pub fn overlap(a: &Assignment, b: &Assignment) -> Result<OverlapFraction> {
    let d = a.hamming(*b)?;
    Ok(OverlapFraction { agree: a.n() as u32 - d, n: a.n() as u32 })
}

/// Exact overlap histogram over all unordered distinct solution pairs.
#[derive(Clone, Debug, Serialize)]
pub struct OverlapStats {
    /// `histogram[i]` = number of pairs agreeing on exactly `i` variables.
    pub histogram: Vec<u64>,
    pub min_overlap: Option<OverlapFraction>,
    pub pair_count: u64,
}

pub fn overlap_stats(s: &SolutionSet) -> Result<OverlapStats> {
    require_complete(s)?;
    let n = s.n();
    let mut histogram = vec![0u64; n + 1];
    let sols = s.solutions();
    for i in 0..sols.len() {
        for j in i + 1..sols.len() {
            let agree = n as u32 - (sols[i].bits() ^ sols[j].bits()).count_ones();
            histogram[agree as usize] += 1;
        }
    }
    let pair_count = sols.len() as u64 * (sols.len() as u64 - 1) / 2;
    let min_overlap = histogram
        .iter()
        .position(|&c| c > 0)
        .map(|agree| OverlapFraction { agree: agree as u32, n: n as u32 });
    Ok(OverlapStats { histogram, min_overlap, pair_count })
}

fn require_complete(s: &SolutionSet) -> Result<()> {
    if !s.complete() {
        return Err(Error::domain("operation requires a complete solution set"));
    }
    Ok(())
}

/// Connected components of the graph on solutions with edges
/// `d_H(x, y) <= l`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClusterReport {
    pub l: u32,
    /// Partition of solution indices (into the sorted solution list);
    /// components ordered by smallest member.
    pub components: Vec<Vec<u32>>,
    pub largest_component_size: usize,
    pub is_single_cluster: bool,
}

/// Computes distance-`l` clusters, picking whichever of the two strategies
/// (all-pairs union-find, Hamming-ball probing) is cheaper. The strategies
/// are interchangeable; `tests` assert they agree.
pub fn cluster_components(s: &SolutionSet, l: u32) -> Result<ClusterReport> {
    require_complete(s)?;
    if l < 1 {
        return Err(Error::domain("connectivity radius l must be at least 1"));
    }
    let ball = hamming_ball_size(s.n() as u32, l);
    if ball < s.len() as u128 {
        Ok(cluster_components_probing(s, l))
    } else {
        Ok(cluster_components_pairwise(s, l))
    }
}

fn hamming_ball_size(n: u32, l: u32) -> u128 {
    let mut total: u128 = 0;
    let mut term: u128 = 1;
    for j in 1..=l.min(n) {
        term = term * (n - j + 1) as u128 / j as u128;
        total = total.saturating_add(term);
    }
    total
}

/// All-pairs strategy: O(|s|^2) XOR/popcount.
pub fn cluster_components_pairwise(s: &SolutionSet, l: u32) -> ClusterReport {
    let sols = s.solutions();
    let mut uf = UnionFind::new(sols.len());
    for i in 0..sols.len() {
        for j in i + 1..sols.len() {
            if (sols[i].bits() ^ sols[j].bits()).count_ones() <= l {
                uf.union(i, j);
            }
        }
    }
    finish_report(&mut uf, l)
}

/// Ball-probing strategy: hash every solution, then look up all masks within
/// Hamming distance `l` of each one. Pays off when `|s|` is large and `l`
/// small.
pub fn cluster_components_probing(s: &SolutionSet, l: u32) -> ClusterReport {
    let sols = s.solutions();
    let index: std::collections::HashMap<u64, u32> = sols
        .iter()
        .enumerate()
        .map(|(i, a)| (a.bits(), i as u32))
        .collect();
    let mut uf = UnionFind::new(sols.len());
    let n = s.n() as u32;
    let mut flips: Vec<u32> = Vec::with_capacity(l as usize);
    for (i, a) in sols.iter().enumerate() {
        probe(a.bits(), 0, n, l, &mut flips, &index, i, &mut uf);
    }
    finish_report(&mut uf, l)
}

fn probe(
    bits: u64,
    start: u32,
    n: u32,
    remaining: u32,
    flips: &mut Vec<u32>,
    index: &std::collections::HashMap<u64, u32>,
    origin: usize,
    uf: &mut UnionFind,
) {
    if remaining == 0 {
        return;
    }
    for pos in start..n {
        let flipped = bits ^ (1u64 << pos);
        if let Some(&j) = index.get(&flipped) {
            uf.union(origin, j as usize);
        }
        flips.push(pos);
        probe(flipped, pos + 1, n, remaining - 1, flips, index, origin, uf);
        flips.pop();
    }
}

fn finish_report(uf: &mut UnionFind, l: u32) -> ClusterReport {
    let components: Vec<Vec<u32>> = uf
        .groups()
        .into_iter()
        .map(|g| g.into_iter().map(|x| x as u32).collect())
        .collect();
    let largest = components.iter().map(Vec::len).max().unwrap_or(0);
    ClusterReport {
        l,
        is_single_cluster: components.len() == 1,
        largest_component_size: largest,
        components,
    }
}

/// Smallest `l` for which the whole solution set is one distance-`l`
/// cluster. Binary search is valid because single-cluster-ness is monotone
/// in `l`.
pub fn min_connect_l(s: &SolutionSet) -> Result<u32> {
    require_complete(s)?;
    if s.len() < 2 {
        return Err(Error::domain("min_connect_l needs at least two solutions"));
    }
    let mut lo = 1u32;
    let mut hi = s.n() as u32;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if cluster_components(s, mid)?.is_single_cluster {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(lo)
}

/// A maximal empty stretch between two solutions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HoleRecord {
    pub a: Assignment,
    pub b: Assignment,
    /// Hamming distance between the endpoints.
    pub size: u32,
}

/// Whether `(a, b)` is a hole: `d_H(a,b) >= 2` and no third solution lies on
/// any geodesic between them.
///
/// A candidate `c` lies on a geodesic exactly when it agrees with `a` on
/// every coordinate where `a` and `b` agree, so the scan is a mask test per
/// solution.
pub fn is_hole(f: &Formula, a: &Assignment, b: &Assignment, s: &SolutionSet) -> Result<bool> {
    require_complete(s)?;
    if !check_assignment(f, a)? || !check_assignment(f, b)? {
        return Err(Error::domain("hole endpoints must satisfy the formula"));
    }
    let d = a.hamming(*b)?;
    if d < 2 {
        return Ok(false);
    }
    Ok(!has_interior_solution(a, b, s))
}

fn has_interior_solution(a: &Assignment, b: &Assignment, s: &SolutionSet) -> bool {
    let agree_mask = !(a.bits() ^ b.bits());
    s.solutions().iter().any(|c| {
        c.bits() != a.bits() && c.bits() != b.bits() && (c.bits() ^ a.bits()) & agree_mask == 0
    })
}

/// All hole pairs of size at least `min_size`, largest first, then
/// lexicographic by endpoints.
pub fn find_holes(f: &Formula, s: &SolutionSet, min_size: u32) -> Result<Vec<HoleRecord>> {
    require_complete(s)?;
    debug_assert!(
        s.solutions().iter().all(|a| check_assignment(f, a).unwrap_or(false)),
        "solution set does not belong to this formula"
    );
    let sols = s.solutions();
    let mut out = Vec::new();
    for i in 0..sols.len() {
        for j in i + 1..sols.len() {
            let d = (sols[i].bits() ^ sols[j].bits()).count_ones();
            if d >= min_size.max(2) && !has_interior_solution(&sols[i], &sols[j], s) {
                out.push(HoleRecord { a: sols[i], b: sols[j], size: d });
            }
        }
    }
    out.sort_by(|x, y| {
        y.size
            .cmp(&x.size)
            .then_with(|| x.a.cmp(&y.a))
            .then_with(|| x.b.cmp(&y.b))
    });
    Ok(out)
}

/// The agreement set of `a` and `b` and whether it covers `f` (i.e. meets
/// every clause). When both assignments satisfy `f` the boolean is always
/// true.
pub fn agreement_is_cover(f: &Formula, a: &Assignment, b: &Assignment) -> Result<(Vec<usize>, bool)> {
    if a.n() != f.n() || b.n() != f.n() {
        return Err(Error::domain("assignment length does not match the formula"));
    }
    let agree_mask = !(a.bits() ^ b.bits()) & mask_n(f.n());
    let vars: Vec<usize> = (1..=f.n()).filter(|&v| agree_mask >> (v - 1) & 1 == 1).collect();
    let covers = (0..f.num_clauses()).all(|ci| f.clause_masks(ci).0 & agree_mask != 0);
    Ok((vars, covers))
}

fn mask_n(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Exact minimum size of a variable set meeting every clause, by
/// branch-and-bound on the hitting-set formulation: branch over the variables
/// of an uncovered clause, prune with a disjoint-clause lower bound.
pub fn min_cover_size(f: &Formula) -> usize {
    let clause_masks: Vec<u64> = (0..f.num_clauses()).map(|ci| f.clause_masks(ci).0).collect();
    if clause_masks.is_empty() {
        return 0;
    }
    let mut best = greedy_cover(&clause_masks);
    branch(&clause_masks, 0, 0, &mut best);
    best
}

fn greedy_cover(clause_masks: &[u64]) -> usize {
    let mut chosen = 0u64;
    let mut count = 0usize;
    loop {
        let uncovered: Vec<u64> =
            clause_masks.iter().copied().filter(|m| m & chosen == 0).collect();
        if uncovered.is_empty() {
            return count;
        }
        let var = (0..64)
            .max_by_key(|&v| uncovered.iter().filter(|m| *m >> v & 1 == 1).count())
            .unwrap();
        chosen |= 1u64 << var;
        count += 1;
    }
}

fn branch(clause_masks: &[u64], chosen: u64, count: usize, best: &mut usize) {
    if count >= *best {
        return;
    }
    // Pairwise-disjoint uncovered clauses each need their own variable.
    let mut used = 0u64;
    let mut lower = 0usize;
    let mut first_uncovered: Option<u64> = None;
    for &m in clause_masks {
        if m & chosen != 0 {
            continue;
        }
        if first_uncovered.is_none() {
            first_uncovered = Some(m);
        }
        if m & used == 0 {
            lower += 1;
            used |= m;
        }
    }
    let Some(target) = first_uncovered else {
        *best = count;
        return;
    };
    if count + lower >= *best {
        return;
    }
    let mut rest = target;
    while rest != 0 {
        let v = rest.trailing_zeros();
        rest &= rest - 1;
        branch(clause_masks, chosen | (1u64 << v), count + 1, best);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Clause, Literal, Provenance};
    use crate::solver::enumerate_solutions;

    fn formula(n: usize, clauses: &[&[i32]]) -> Formula {
        let built: Vec<Clause> = clauses
            .iter()
            .map(|codes| {
                let lits = codes.iter().map(|&c| Literal::from_code(c).unwrap()).collect();
                Clause::new(lits, codes.len(), n).unwrap()
            })
            .collect();
        Formula::new(n, 3, 0.5, built, Provenance::File).unwrap()
    }

    fn asg(s: &str) -> Assignment {
        Assignment::from_bitstring(s).unwrap()
    }

    fn set_of(n: usize, strs: &[&str]) -> SolutionSet {
        let sols = strs.iter().map(|s| asg(s)).collect();
        SolutionSet::new("test".into(), n, sols, true)
    }

    #[test]
    fn overlap_examples() {
        assert_eq!(overlap(&asg("000"), &asg("000")).unwrap(), OverlapFraction { agree: 3, n: 3 });
        assert_eq!(overlap(&asg("000"), &asg("111")).unwrap(), OverlapFraction { agree: 0, n: 3 });
        assert_eq!(overlap(&asg("100"), &asg("010")).unwrap(), OverlapFraction { agree: 1, n: 3 });
        assert!(overlap(&asg("00"), &asg("000")).is_err());
    }

    #[test]
    fn overlap_plus_distance_is_one() {
        // Exact rational identity over random pairs.
        use crate::rng::{rng_from_seed, uniform};
        let mut rng = rng_from_seed(5);
        for _ in 0..500 {
            let n = 1 + uniform(&mut rng, 30) as usize;
            let a = Assignment::new(n, uniform(&mut rng, 1u64 << n)).unwrap();
            let b = Assignment::new(n, uniform(&mut rng, 1u64 << n)).unwrap();
            let ov = overlap(&a, &b).unwrap();
            let d = a.hamming(b).unwrap();
            assert_eq!(ov.agree + d, n as u32);
        }
    }

    #[test]
    fn overlap_stats_unit_vectors() {
        let s = set_of(3, &["100", "010", "001"]);
        let stats = overlap_stats(&s).unwrap();
        assert_eq!(stats.pair_count, 3);
        assert_eq!(stats.histogram, vec![0, 3, 0, 0]);
        assert_eq!(stats.min_overlap, Some(OverlapFraction { agree: 1, n: 3 }));
    }

    #[test]
    fn overlap_stats_degenerate_and_full_cube() {
        let single = set_of(3, &["000"]);
        let stats = overlap_stats(&single).unwrap();
        assert_eq!(stats.pair_count, 0);
        assert!(stats.min_overlap.is_none());
        assert!(stats.histogram.iter().all(|&c| c == 0));

        // Empty formula over two variables: all four assignments.
        let f = formula(2, &[]);
        let s = enumerate_solutions(&f, None);
        let stats = overlap_stats(&s).unwrap();
        assert_eq!(stats.pair_count, 6);
        assert_eq!(stats.histogram, vec![2, 4, 0]);
    }

    #[test]
    fn cluster_examples() {
        let s = set_of(3, &["100", "010", "001"]);
        let at2 = cluster_components(&s, 2).unwrap();
        assert!(at2.is_single_cluster);
        assert_eq!(at2.largest_component_size, 3);
        let at1 = cluster_components(&s, 1).unwrap();
        assert_eq!(at1.components.len(), 3);
        assert!(!at1.is_single_cluster);

        let empty = SolutionSet::new("e".into(), 3, vec![], true);
        assert_eq!(cluster_components(&empty, 1).unwrap().components.len(), 0);
    }

    #[test]
    fn both_cluster_strategies_agree() {
        use crate::instance::{generate_counting, Density, ModelParams, SignMode};
        for seed in 0..25u64 {
            let params = ModelParams {
                n: 10,
                k: 3,
                epsilon: 0.5,
                density: Density::ClauseRatio(0.25),
                seed,
            };
            let f = generate_counting(&params, SignMode::Multinomial).unwrap();
            let s = enumerate_solutions(&f, None);
            for l in 1..=4 {
                assert_eq!(
                    cluster_components_pairwise(&s, l),
                    cluster_components_probing(&s, l),
                    "seed {seed} l {l}"
                );
            }
        }
    }

    #[test]
    fn clusters_refine_monotonically() {
        use crate::instance::{generate_counting, Density, ModelParams, SignMode};
        for seed in 40..60u64 {
            let params = ModelParams {
                n: 9,
                k: 3,
                epsilon: 0.5,
                density: Density::ClauseRatio(0.3),
                seed,
            };
            let f = generate_counting(&params, SignMode::Multinomial).unwrap();
            let s = enumerate_solutions(&f, None);
            for l in 1..(s.n() as u32) {
                let fine = cluster_components(&s, l).unwrap();
                let coarse = cluster_components(&s, l + 1).unwrap();
                // Every fine component sits inside one coarse component.
                for comp in &fine.components {
                    let holder = coarse
                        .components
                        .iter()
                        .position(|c| c.contains(&comp[0]))
                        .unwrap();
                    assert!(comp.iter().all(|x| coarse.components[holder].contains(x)));
                }
            }
        }
    }

    #[test]
    fn min_connect_examples() {
        assert_eq!(min_connect_l(&set_of(3, &["100", "010", "001"])).unwrap(), 2);
        assert_eq!(min_connect_l(&set_of(2, &["00", "11"])).unwrap(), 2);
        assert_eq!(min_connect_l(&set_of(4, &["0000", "0001"])).unwrap(), 1);
        assert!(min_connect_l(&set_of(3, &["100"])).is_err());
    }

    #[test]
    fn hole_examples() {
        let f = formula(3, &[&[1, 2, 3]]);
        let s = enumerate_solutions(&f, None);
        assert!(is_hole(&f, &asg("100"), &asg("010"), &s).unwrap());
        assert!(!is_hole(&f, &asg("100"), &asg("100"), &s).unwrap());
        assert!(is_hole(&f, &asg("110"), &asg("010"), &s).is_err());

        let g = formula(4, &[&[1, 2, 3], &[1, 2, 4]]);
        let gs = enumerate_solutions(&g, None);
        assert!(is_hole(&g, &asg("1000"), &asg("0100"), &gs).unwrap());
    }

    #[test]
    fn hole_pairs_split_at_l1_and_join_at_their_distance() {
        let f = formula(3, &[&[1, 2, 3]]);
        let s = enumerate_solutions(&f, None);
        for rec in find_holes(&f, &s, 2).unwrap() {
            let report = cluster_components(&s, 1).unwrap();
            let ia = s.solutions().iter().position(|x| *x == rec.a).unwrap() as u32;
            let ib = s.solutions().iter().position(|x| *x == rec.b).unwrap() as u32;
            let comp_of = |i: u32| report.components.iter().position(|c| c.contains(&i));
            assert_ne!(comp_of(ia), comp_of(ib), "hole endpoints 1-connected");
            let wide = cluster_components(&s, rec.size).unwrap();
            let comp_of_wide = |i: u32| wide.components.iter().position(|c| c.contains(&i));
            assert_eq!(comp_of_wide(ia), comp_of_wide(ib));
        }
    }

    #[test]
    fn find_holes_examples() {
        let f = formula(3, &[&[1, 2, 3]]);
        let s = enumerate_solutions(&f, None);
        let holes = find_holes(&f, &s, 2).unwrap();
        assert_eq!(holes.len(), 3);
        assert!(holes.iter().all(|h| h.size == 2));
        assert!(find_holes(&f, &s, 4).unwrap().is_empty());

        // The full hypercube has no holes.
        let empty_f = formula(3, &[]);
        let cube = enumerate_solutions(&empty_f, None);
        assert!(find_holes(&empty_f, &cube, 2).unwrap().is_empty());
    }

    #[test]
    fn agreement_cover_examples() {
        let f = formula(3, &[&[1, 2, 3]]);
        let (vars, covers) = agreement_is_cover(&f, &asg("100"), &asg("010")).unwrap();
        assert_eq!(vars, vec![3]);
        assert!(covers);

        let (all, covers) = agreement_is_cover(&f, &asg("101"), &asg("101")).unwrap();
        assert_eq!(all, vec![1, 2, 3]);
        assert!(covers);

        let (none, covers) = agreement_is_cover(&f, &asg("110"), &asg("001")).unwrap();
        assert!(none.is_empty());
        assert!(!covers);
    }

    #[test]
    fn min_cover_examples() {
        assert_eq!(min_cover_size(&formula(3, &[&[1, 2, 3]])), 1);
        assert_eq!(min_cover_size(&formula(6, &[&[1, 2, 3], &[4, 5, 6]])), 2);
        assert_eq!(min_cover_size(&formula(3, &[])), 0);
    }

    #[test]
    fn min_cover_matches_subset_brute_force() {
        use crate::instance::{generate_counting, Density, ModelParams, SignMode};
        for seed in 0..30u64 {
            let n = 7 + (seed % 6) as usize;
            let params = ModelParams {
                n,
                k: 3,
                epsilon: 0.5,
                density: Density::ClauseRatio(0.5),
                seed,
            };
            let f = generate_counting(&params, SignMode::Multinomial).unwrap();
            let masks: Vec<u64> = (0..f.num_clauses()).map(|ci| f.clause_masks(ci).0).collect();
            let brute = (0u64..1 << n)
                .filter(|w| masks.iter().all(|m| m & w != 0))
                .map(|w| w.count_ones() as usize)
                .min()
                .unwrap();
            assert_eq!(min_cover_size(&f), brute, "seed {seed}");
        }
    }
}
