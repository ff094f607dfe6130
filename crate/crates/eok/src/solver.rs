//! Backtracking enumeration of satisfying assignments.
//!
//! The search branches on the variable occurring in the most clauses (ties by
//! smallest index) and closes each decision under the two exactly-one rules:
//!
//! 1. a clause with a true literal forces all its other literals false;
//! 2. a clause with `k-1` false literals forces the last literal true.
//!
//! A clause with two true literals, or with all literals false, is a
//! conflict. Variables appearing in no clause are expanded by Cartesian
//! doubling after the search instead of being branched on.

use crate::error::{Error, Result};
use crate::instance::{Assignment, Formula};

/// Why a trail entry was made.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reason {
    Decision,
    Propagated { clause: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrailEntry {
    pub var: usize,
    pub value: bool,
    pub reason: Reason,
}

/// A partial assignment with its derivation trail.
#[derive(Clone, Debug)]
pub struct PartialAssignment {
    values: Vec<Option<bool>>,
    trail: Vec<TrailEntry>,
}

impl PartialAssignment {
    pub fn new(n: usize) -> Self {
        PartialAssignment { values: vec![None; n], trail: Vec::new() }
    }

    /// Records a decision. Errors if `var` is out of range or already set.
    pub fn assign(&mut self, var: usize, value: bool) -> Result<()> {
        if var < 1 || var > self.values.len() {
            return Err(Error::domain(format!("variable {var} out of range")));
        }
        if self.values[var - 1].is_some() {
            return Err(Error::domain(format!("variable {var} already assigned")));
        }
        self.values[var - 1] = Some(value);
        self.trail.push(TrailEntry { var, value, reason: Reason::Decision });
        Ok(())
    }

    pub fn value(&self, var: usize) -> Option<bool> {
        self.values[var - 1]
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn trail(&self) -> &[TrailEntry] {
        &self.trail
    }

    fn push(&mut self, var: usize, value: bool, reason: Reason) {
        self.values[var - 1] = Some(value);
        self.trail.push(TrailEntry { var, value, reason });
    }
}

/// Outcome of closing a partial assignment under the exactly-one rules.
#[derive(Clone, Debug)]
pub enum Propagation {
    Consistent(PartialAssignment),
    Conflict { clause: usize },
}

/// True iff every clause of `f` has exactly one true literal under `a`.
pub fn check_assignment(f: &Formula, a: &Assignment) -> Result<bool> {
    if a.n() != f.n() {
        return Err(Error::domain(format!(
            "assignment length {} does not match n={}",
            a.n(),
            f.n()
        )));
    }
    let bits = a.bits();
    for idx in 0..f.num_clauses() {
        let (var_mask, neg_mask) = f.clause_masks(idx);
        if ((bits ^ neg_mask) & var_mask).count_ones() != 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Occurrence table and per-clause counters shared by `propagate` and the
/// enumerator.
struct Engine<'f> {
    f: &'f Formula,
    occ: Vec<Vec<(u32, u8)>>,
    values: Vec<Option<bool>>,
    trail: Vec<TrailEntry>,
    true_count: Vec<u32>,
    false_count: Vec<u32>,
}

impl<'f> Engine<'f> {
    fn new(f: &'f Formula) -> Self {
        let mut occ = vec![Vec::new(); f.n()];
        for (ci, cl) in f.clauses().iter().enumerate() {
            for (slot, lit) in cl.literals().iter().enumerate() {
                occ[lit.var() - 1].push((ci as u32, slot as u8));
            }
        }
        Engine {
            f,
            occ,
            values: vec![None; f.n()],
            trail: Vec::new(),
            true_count: vec![0; f.num_clauses()],
            false_count: vec![0; f.num_clauses()],
        }
    }

    /// Sets one variable and updates every affected counter. Counters stay
    /// consistent with the trail even when a conflict surfaces, so `undo_to`
    /// can always unwind symmetrically.
    fn assign(&mut self, var: usize, value: bool, reason: Reason) -> Option<usize> {
        debug_assert!(self.values[var - 1].is_none());
        self.values[var - 1] = Some(value);
        self.trail.push(TrailEntry { var, value, reason });
        let f = self.f;
        let mut conflict = None;
        for &(ci, slot) in &self.occ[var - 1] {
            let ci = ci as usize;
            let lit = f.clauses()[ci].literals()[slot as usize];
            if lit.satisfied_by(value) {
                self.true_count[ci] += 1;
                if self.true_count[ci] >= 2 && conflict.is_none() {
                    conflict = Some(ci);
                }
            } else {
                self.false_count[ci] += 1;
                if self.false_count[ci] as usize == f.k() && conflict.is_none() {
                    conflict = Some(ci);
                }
            }
        }
        conflict
    }

    /// Assigns and closes under the two rules. Returns the conflicting
    /// clause, if any. The caller unwinds with `undo_to`.
    fn assign_and_propagate(&mut self, var: usize, value: bool, reason: Reason) -> Option<usize> {
        let f = self.f;
        let mut cursor = self.trail.len();
        if let Some(ci) = self.assign(var, value, reason) {
            return Some(ci);
        }
        while cursor < self.trail.len() {
            let entry = self.trail[cursor];
            cursor += 1;
            for oi in 0..self.occ[entry.var - 1].len() {
                let (ci, slot) = self.occ[entry.var - 1][oi];
                let ci = ci as usize;
                let lit = f.clauses()[ci].literals()[slot as usize];
                if lit.satisfied_by(entry.value) {
                    // Rule 1: a true literal forces the rest of the clause false.
                    for other in f.clauses()[ci].literals() {
                        if self.values[other.var() - 1].is_none() {
                            let reason = Reason::Propagated { clause: ci };
                            if let Some(c) = self.assign(other.var(), other.is_negated(), reason) {
                                return Some(c);
                            }
                        }
                    }
                } else if self.false_count[ci] as usize == f.k() - 1 && self.true_count[ci] == 0 {
                    // Rule 2: k-1 false literals force the last one true.
                    if let Some(other) =
                        f.clauses()[ci].literals().iter().find(|l| self.values[l.var() - 1].is_none())
                    {
                        let reason = Reason::Propagated { clause: ci };
                        if let Some(c) = self.assign(other.var(), !other.is_negated(), reason) {
                            return Some(c);
                        }
                    }
                }
            }
        }
        None
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let entry = self.trail.pop().unwrap();
            self.values[entry.var - 1] = None;
            for &(ci, slot) in &self.occ[entry.var - 1] {
                let lit = self.f.clauses()[ci as usize].literals()[slot as usize];
                if lit.satisfied_by(entry.value) {
                    self.true_count[ci as usize] -= 1;
                } else {
                    self.false_count[ci as usize] -= 1;
                }
            }
        }
    }
}

/// Closes `pa` under the exactly-one rules. A conflict is a normal return,
/// not an error.
pub fn propagate(f: &Formula, pa: &PartialAssignment) -> Result<Propagation> {
    if pa.n() != f.n() {
        return Err(Error::domain(format!(
            "partial assignment length {} does not match n={}",
            pa.n(),
            f.n()
        )));
    }
    let mut engine = Engine::new(f);
    // Replay the existing trail, then let propagation run.
    for entry in pa.trail() {
        if let Some(current) = engine.values[entry.var - 1] {
            if current == entry.value {
                continue;
            }
            // The replayed decision contradicts an earlier propagation; find
            // a clause that forced the other value.
            let clause = pa
                .trail()
                .iter()
                .chain(engine.trail.iter())
                .find_map(|e| match e.reason {
                    Reason::Propagated { clause } if e.var == entry.var => Some(clause),
                    _ => None,
                })
                .unwrap_or(0);
            return Ok(Propagation::Conflict { clause });
        }
        if let Some(ci) = engine.assign_and_propagate(entry.var, entry.value, entry.reason) {
            return Ok(Propagation::Conflict { clause: ci });
        }
    }
    let mut out = PartialAssignment::new(f.n());
    for entry in &engine.trail {
        out.push(entry.var, entry.value, entry.reason);
    }
    Ok(Propagation::Consistent(out))
}

/// The complete enumerated solution set of one formula.
#[derive(Clone, Debug)]
pub struct SolutionSet {
    formula_id: String,
    n: usize,
    solutions: Vec<Assignment>,
    complete: bool,
}

impl SolutionSet {
    pub fn new(formula_id: String, n: usize, mut solutions: Vec<Assignment>, complete: bool) -> Self {
        solutions.sort();
        SolutionSet { formula_id, n, solutions, complete }
    }

    pub fn formula_id(&self) -> &str {
        &self.formula_id
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Lexicographically sorted, duplicate-free.
    pub fn solutions(&self) -> &[Assignment] {
        &self.solutions
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn complete(&self) -> bool {
        self.complete
    }

    pub fn contains(&self, a: &Assignment) -> bool {
        self.solutions.binary_search(a).is_ok()
    }
}

/// Default solution cap: beyond this, `complete` is false.
pub const DEFAULT_SOLUTION_LIMIT: usize = 1 << 22;

/// Enumerates all satisfying assignments, lexicographically sorted.
///
/// When `limit` (default `2^22`) is reached the set is truncated to exactly
/// `limit` solutions, in search order, and marked incomplete.
pub fn enumerate_solutions(f: &Formula, limit: Option<usize>) -> SolutionSet {
    let limit = limit.unwrap_or(DEFAULT_SOLUTION_LIMIT);
    let mut engine = Engine::new(f);

    let mut touched: Vec<usize> = (1..=f.n()).filter(|&v| !engine.occ[v - 1].is_empty()).collect();
    touched.sort_by_key(|&v| (std::cmp::Reverse(engine.occ[v - 1].len()), v));
    let free: Vec<usize> = (1..=f.n()).filter(|&v| engine.occ[v - 1].is_empty()).collect();

    let mut collected: Vec<u64> = Vec::new();
    let mut truncated = false;
    if limit > 0 {
        search(&mut engine, &touched, &free, limit, &mut collected, &mut truncated);
    } else {
        truncated = true;
    }

    let solutions = collected
        .into_iter()
        .map(|bits| Assignment::new(f.n(), bits).expect("solver bits in range"))
        .collect();
    SolutionSet::new(f.id(), f.n(), solutions, !truncated)
}

fn search(
    engine: &mut Engine,
    branch_order: &[usize],
    free: &[usize],
    limit: usize,
    out: &mut Vec<u64>,
    truncated: &mut bool,
) {
    if *truncated {
        return;
    }
    let next = branch_order.iter().copied().find(|&v| engine.values[v - 1].is_none());
    let Some(var) = next else {
        emit(engine, free, limit, out, truncated);
        return;
    };
    for value in [false, true] {
        let mark = engine.trail.len();
        let conflict = engine.assign_and_propagate(var, value, Reason::Decision);
        if conflict.is_none() {
            search(engine, branch_order, free, limit, out, truncated);
        }
        engine.undo_to(mark);
        if *truncated {
            return;
        }
    }
}

fn emit(engine: &Engine, free: &[usize], limit: usize, out: &mut Vec<u64>, truncated: &mut bool) {
    let mut base = 0u64;
    for (idx, value) in engine.values.iter().enumerate() {
        if *value == Some(true) {
            base |= 1u64 << idx;
        }
    }
    for pattern in 0u64..(1u64 << free.len()) {
        let mut bits = base;
        for (j, &v) in free.iter().enumerate() {
            if pattern >> j & 1 == 1 {
                bits |= 1u64 << (v - 1);
            }
        }
        if out.len() == limit {
            *truncated = true;
            return;
        }
        out.push(bits);
    }
}

/// Short-circuits at the first solution.
pub fn is_satisfiable(f: &Formula) -> bool {
    !enumerate_solutions(f, Some(1)).is_empty()
}

/// Serializes a solution set: header `s eok <n> <count> <complete>` followed
/// by one bitstring per line, variable 1 leftmost.
pub fn write_solutions(s: &SolutionSet) -> String {
    let mut out = format!(
        "s eok {} {} {}\n",
        s.n(),
        s.len(),
        if s.complete() { 1 } else { 0 }
    );
    for a in s.solutions() {
        out.push_str(&a.to_bitstring());
        out.push('\n');
    }
    out
}

pub fn parse_solutions(text: &str) -> Result<SolutionSet> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (line_no, header) = lines
        .next()
        .ok_or(Error::Parse { line: 0, msg: "missing `s eok` header".into() })?;
    let fields: Vec<&str> = header.split_ascii_whitespace().collect();
    if fields.len() != 5 || fields[0] != "s" || fields[1] != "eok" {
        return Err(Error::Parse {
            line: line_no + 1,
            msg: "expected header `s eok <n> <count> <complete>`".into(),
        });
    }
    let n: usize = fields[2]
        .parse()
        .map_err(|_| Error::Parse { line: line_no + 1, msg: "bad n".into() })?;
    let count: usize = fields[3]
        .parse()
        .map_err(|_| Error::Parse { line: line_no + 1, msg: "bad count".into() })?;
    let complete = match fields[4] {
        "0" => false,
        "1" => true,
        _ => return Err(Error::Parse { line: line_no + 1, msg: "bad complete flag".into() }),
    };
    let mut solutions = Vec::with_capacity(count);
    for (idx, line) in lines {
        let a = Assignment::from_bitstring(line).map_err(|e| Error::Parse {
            line: idx + 1,
            msg: e.to_string(),
        })?;
        if a.n() != n {
            return Err(Error::Parse { line: idx + 1, msg: "bitstring length mismatch".into() });
        }
        solutions.push(a);
    }
    if solutions.len() != count {
        return Err(Error::Parse {
            line: 0,
            msg: format!("header declares {count} solutions but {} were given", solutions.len()),
        });
    }
    Ok(SolutionSet::new("file".into(), n, solutions, complete))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Clause, Literal, Provenance};

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

    fn brute_force(f: &Formula) -> Vec<Assignment> {
        let mut out: Vec<Assignment> = (0u64..1 << f.n())
            .map(|bits| Assignment::new(f.n(), bits).unwrap())
            .filter(|a| check_assignment(f, a).unwrap())
            .collect();
        out.sort();
        out
    }

    #[test]
    fn check_assignment_counts_true_literals() {
        let f = formula(3, &[&[1, 2, 3]]);
        assert!(check_assignment(&f, &asg("100")).unwrap());
        assert!(!check_assignment(&f, &asg("110")).unwrap());
        assert!(!check_assignment(&f, &asg("000")).unwrap());
        assert!(check_assignment(&f, &asg("10")).is_err());
    }

    #[test]
    fn propagate_true_literal_forces_others_false() {
        let f = formula(3, &[&[1, 2, 3]]);
        let mut pa = PartialAssignment::new(3);
        pa.assign(1, true).unwrap();
        match propagate(&f, &pa).unwrap() {
            Propagation::Consistent(out) => {
                assert_eq!(out.value(2), Some(false));
                assert_eq!(out.value(3), Some(false));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn propagate_k_minus_one_false_forces_last_true() {
        let f = formula(3, &[&[1, 2, 3]]);
        let mut pa = PartialAssignment::new(3);
        pa.assign(1, false).unwrap();
        pa.assign(2, false).unwrap();
        match propagate(&f, &pa).unwrap() {
            Propagation::Consistent(out) => assert_eq!(out.value(3), Some(true)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn propagate_two_true_is_a_conflict() {
        let f = formula(3, &[&[1, 2, 3]]);
        let mut pa = PartialAssignment::new(3);
        pa.assign(1, true).unwrap();
        pa.assign(2, true).unwrap();
        match propagate(&f, &pa).unwrap() {
            Propagation::Conflict { clause } => assert_eq!(clause, 0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn enumerates_unit_vectors_of_a_single_clause() {
        let f = formula(3, &[&[1, 2, 3]]);
        let s = enumerate_solutions(&f, None);
        let got: Vec<String> = s.solutions().iter().map(|a| a.to_bitstring()).collect();
        assert_eq!(got, ["001", "010", "100"]);
        assert!(s.complete());
    }

    #[test]
    fn enumerates_the_two_clause_example() {
        let f = formula(4, &[&[1, 2, 3], &[1, 2, 4]]);
        let s = enumerate_solutions(&f, None);
        let got: Vec<String> = s.solutions().iter().map(|a| a.to_bitstring()).collect();
        assert_eq!(got, ["0011", "0100", "1000"]);
        assert_eq!(brute_force(&f), s.solutions());
    }

    #[test]
    fn unsat_complement_pair() {
        let f = formula(3, &[&[1, 2, 3], &[-1, -2, -3]]);
        assert!(enumerate_solutions(&f, None).is_empty());
        assert!(!is_satisfiable(&f));
        assert!(brute_force(&f).is_empty());
    }

    #[test]
    fn empty_formula_is_vacuously_satisfiable() {
        let f = formula(2, &[]);
        assert!(is_satisfiable(&f));
        let s = enumerate_solutions(&f, None);
        assert_eq!(s.len(), 4);
    }

    #[test]
    fn limit_truncates_and_flags() {
        let f = formula(4, &[]);
        let s = enumerate_solutions(&f, Some(5));
        assert_eq!(s.len(), 5);
        assert!(!s.complete());
        let full = enumerate_solutions(&f, Some(16));
        assert_eq!(full.len(), 16);
        assert!(!full.complete(), "hitting the limit exactly counts as truncation");
        let roomy = enumerate_solutions(&f, Some(17));
        assert!(roomy.complete());
    }

    #[test]
    fn solver_matches_brute_force_on_random_instances() {
        use crate::instance::{generate_counting, Density, ModelParams, SignMode};
        for seed in 0..40u64 {
            let n = 6 + (seed % 7) as usize;
            let params = ModelParams {
                n,
                k: 3,
                epsilon: 0.5,
                density: Density::ClauseRatio(0.3 + 0.02 * (seed % 5) as f64),
                seed,
            };
            let f = generate_counting(&params, SignMode::Multinomial).unwrap();
            let s = enumerate_solutions(&f, None);
            assert!(s.complete());
            assert_eq!(brute_force(&f), s.solutions(), "seed {seed}");
        }
    }

    #[test]
    fn solutions_text_round_trip() {
        let f = formula(4, &[&[1, 2, 3], &[1, 2, 4]]);
        let s = enumerate_solutions(&f, None);
        let text = write_solutions(&s);
        assert!(text.starts_with("s eok 4 3 1\n"));
        let back = parse_solutions(&text).unwrap();
        assert_eq!(back.solutions(), s.solutions());
        assert_eq!(back.complete(), s.complete());
    }

    #[test]
    fn propagation_is_sound() {
        // Any total satisfying extension of a propagated partial assignment
        // agrees with every propagated value.
        use crate::instance::{generate_counting, Density, ModelParams, SignMode};
        use crate::rng::{rng_from_seed, uniform};
        let mut rng = rng_from_seed(2024);
        for seed in 0..60u64 {
            let n = 5 + (seed % 5) as usize;
            let params = ModelParams {
                n,
                k: 3,
                epsilon: 0.5,
                density: Density::ClauseRatio(0.4),
                seed,
            };
            let f = generate_counting(&params, SignMode::Multinomial).unwrap();
            let mut pa = PartialAssignment::new(n);
            let var = uniform(&mut rng, n as u64) as usize + 1;
            pa.assign(var, uniform(&mut rng, 2) == 1).unwrap();
            let Propagation::Consistent(closed) = propagate(&f, &pa).unwrap() else {
                continue;
            };
            for a in brute_force(&f) {
                let extends_decisions =
                    pa.trail().iter().all(|e| a.get(e.var) == e.value);
                if extends_decisions {
                    for e in closed.trail() {
                        assert_eq!(a.get(e.var), e.value, "seed {seed} var {}", e.var);
                    }
                }
            }
        }
    }
}
