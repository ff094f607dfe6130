//! Structural graphs of a formula and of a solution pair.
//!
//! Two graphs drive the connectivity arguments implemented here:
//!
//! * the **formula hypergraph** on variables, two variables adjacent when
//!   they share a clause — rewriting whole components turns any solution
//!   into any other through satisfying intermediates;
//! * the **labeled constraint graph H** of a solution pair `(a, b)`, built
//!   on the disagreement variables from clauses with exactly two
//!   disagreement variables. Each such clause fits one of four shapes and
//!   induces an equality or inequality constraint between its two
//!   disagreement variables.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Assignment, Clause, Formula};
use crate::solver::check_assignment;
use crate::uf::UnionFind;

/// Which of the four cells of a pair partition a variable falls into.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PairClass {
    /// `a(x) = b(x) = 0`
    V0,
    /// `a(x) = 0, b(x) = 1`
    V1,
    /// `a(x) = 1, b(x) = 0`
    V2,
    /// `a(x) = b(x) = 1`
    V3,
}

/// The partition of variables induced by a pair of assignments.
#[derive(Clone, Debug, Serialize)]
pub struct VariablePartition {
    pub v0: Vec<usize>,
    pub v1: Vec<usize>,
    pub v2: Vec<usize>,
    pub v3: Vec<usize>,
    n: usize,
    #[serde(skip)]
    class: Vec<PairClass>,
}

impl VariablePartition {
    pub fn class_of(&self, var: usize) -> PairClass {
        self.class[var - 1]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Sizes `(a, b, c, d)` of `(V0, V1, V2, V3)`.
    pub fn sizes(&self) -> (usize, usize, usize, usize) {
        (self.v0.len(), self.v1.len(), self.v2.len(), self.v3.len())
    }

    /// Sizes divided by `n`.
    pub fn fractions(&self) -> (f64, f64, f64, f64) {
        let n = self.n as f64;
        let (a, b, c, d) = self.sizes();
        (a as f64 / n, b as f64 / n, c as f64 / n, d as f64 / n)
    }

    /// The disagreement variables `V1 ∪ V2`, ascending.
    pub fn disagreement_vars(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.v1.iter().chain(self.v2.iter()).copied().collect();
        out.sort_unstable();
        out
    }
}

/// Splits variables into `V0..V3` by the values the two assignments take.
pub fn variable_partition(a: &Assignment, b: &Assignment) -> Result<VariablePartition> {
    if a.n() != b.n() {
        return Err(Error::domain(format!(
            "assignment lengths differ: {} vs {}",
            a.n(),
            b.n()
        )));
    }
    let n = a.n();
    let mut part = VariablePartition {
        v0: Vec::new(),
        v1: Vec::new(),
        v2: Vec::new(),
        v3: Vec::new(),
        n,
        class: Vec::with_capacity(n),
    };
    for v in 1..=n {
        let cls = match (a.get(v), b.get(v)) {
            (false, false) => PairClass::V0,
            (false, true) => PairClass::V1,
            (true, false) => PairClass::V2,
            (true, true) => PairClass::V3,
        };
        part.class.push(cls);
        match cls {
            PairClass::V0 => part.v0.push(v),
            PairClass::V1 => part.v1.push(v),
            PairClass::V2 => part.v2.push(v),
            PairClass::V3 => part.v3.push(v),
        }
    }
    Ok(part)
}

/// The four clause shapes that induce an H-edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ClauseTag {
    /// Two positive literals, one on a V1 variable and one on a V2 variable.
    C1,
    /// Two negated literals, one on V1 and one on V2.
    C2,
    /// Two V1 variables, exactly one negated.
    C3,
    /// Two V2 variables, exactly one negated.
    C4,
    /// Any other shape: no edge.
    None,
}

/// Classification of one clause against a pair partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClauseType {
    pub tag: ClauseTag,
    /// Number of V3 variables in the clause.
    pub v3_count: usize,
}

/// Matches a clause against the four edge-inducing shapes: exactly two
/// variables in `V1 ∪ V2`, every V0 member positive, every V3 member negated,
/// and the two special literals fitting one of the four sign/class rows.
pub fn classify_clause(cl: &Clause, part: &VariablePartition) -> ClauseType {
    let v3_count = count_v3(cl, part);
    let mut special: Vec<(PairClass, bool)> = Vec::with_capacity(2);
    let mut background_ok = true;
    for lit in cl.literals() {
        match part.class_of(lit.var()) {
            PairClass::V0 => background_ok &= !lit.is_negated(),
            PairClass::V3 => background_ok &= lit.is_negated(),
            cls => special.push((cls, lit.is_negated())),
        }
    }
    if !background_ok || special.len() != 2 {
        return ClauseType { tag: ClauseTag::None, v3_count };
    }
    let (c1, n1) = special[0];
    let (c2, n2) = special[1];
    let mixed = c1 != c2;
    let tag = match (n1, n2) {
        (false, false) if mixed => ClauseTag::C1,
        (true, true) if mixed => ClauseTag::C2,
        (a, b) if a != b && !mixed && c1 == PairClass::V1 => ClauseTag::C3,
        (a, b) if a != b && !mixed && c1 == PairClass::V2 => ClauseTag::C4,
        _ => ClauseTag::None,
    };
    ClauseType { tag, v3_count }
}

fn count_v3(cl: &Clause, part: &VariablePartition) -> usize {
    cl.literals()
        .iter()
        .filter(|l| part.class_of(l.var()) == PairClass::V3)
        .count()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeLabel {
    Equal,
    Unequal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HEdge {
    pub x: usize,
    pub y: usize,
    pub label: EdgeLabel,
    /// The clause that induced this edge.
    pub witness: usize,
}

/// The labeled constraint graph of a solution pair. Stored as a multigraph:
/// parallel edges keep their separate witness clauses.
#[derive(Clone, Debug, Serialize)]
pub struct LabeledGraph {
    pub n: usize,
    /// All disagreement variables, ascending; isolated ones included.
    pub vertices: Vec<usize>,
    pub edges: Vec<HEdge>,
}

impl LabeledGraph {
    pub fn new(n: usize, vertices: Vec<usize>, edges: Vec<HEdge>) -> Self {
        LabeledGraph { n, vertices, edges }
    }

    /// Connected components (isolated vertices as singletons), ordered by
    /// smallest variable.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let index: std::collections::HashMap<usize, usize> =
            self.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut uf = UnionFind::new(self.vertices.len());
        for e in &self.edges {
            uf.union(index[&e.x], index[&e.y]);
        }
        uf.groups()
            .into_iter()
            .map(|g| g.into_iter().map(|i| self.vertices[i]).collect())
            .collect()
    }

    pub fn largest_component_size(&self) -> usize {
        self.components().iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Graphviz rendering; unequal edges dashed.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph H {\n");
        for &v in &self.vertices {
            out.push_str(&format!("  x{v};\n"));
        }
        for e in &self.edges {
            let (style, label) = match e.label {
                EdgeLabel::Equal => ("solid", "="),
                EdgeLabel::Unequal => ("dashed", "!="),
            };
            out.push_str(&format!(
                "  x{} -- x{} [label=\"{label}\", style={style}, comment=\"clause {}\"];\n",
                e.x, e.y, e.witness
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// Builds H for a satisfying pair: one edge per clause whose classification
/// is not `None`; C1/C2 give unequal edges, C3/C4 equal edges.
pub fn build_h(f: &Formula, a: &Assignment, b: &Assignment) -> Result<LabeledGraph> {
    if !check_assignment(f, a)? || !check_assignment(f, b)? {
        return Err(Error::domain("both assignments must satisfy the formula"));
    }
    let part = variable_partition(a, b)?;
    let mut edges = Vec::new();
    for (ci, cl) in f.clauses().iter().enumerate() {
        let ct = classify_clause(cl, &part);
        if ct.tag == ClauseTag::None {
            continue;
        }
        let mut pair: Vec<usize> = cl
            .literals()
            .iter()
            .map(|l| l.var())
            .filter(|&v| matches!(part.class_of(v), PairClass::V1 | PairClass::V2))
            .collect();
        pair.sort_unstable();
        let label = match ct.tag {
            ClauseTag::C1 | ClauseTag::C2 => EdgeLabel::Unequal,
            _ => EdgeLabel::Equal,
        };
        edges.push(HEdge { x: pair[0], y: pair[1], label, witness: ci });
    }
    Ok(LabeledGraph::new(f.n(), part.disagreement_vars(), edges))
}

/// Whether the edge labels admit a two-coloring with equal edges joining
/// same colors and unequal edges joining different colors; union-find with
/// parity.
pub fn parity_consistent(h: &LabeledGraph) -> bool {
    let index: std::collections::HashMap<usize, usize> =
        h.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut parent: Vec<usize> = (0..h.vertices.len()).collect();
    let mut parity: Vec<bool> = vec![false; h.vertices.len()];

    fn find(parent: &mut Vec<usize>, parity: &mut Vec<bool>, x: usize) -> (usize, bool) {
        if parent[x] == x {
            return (x, false);
        }
        let (root, p) = find(parent, parity, parent[x]);
        parent[x] = root;
        parity[x] ^= p;
        (root, parity[x])
    }

    for e in &h.edges {
        let need = e.label == EdgeLabel::Unequal;
        let (rx, px) = find(&mut parent, &mut parity, index[&e.x]);
        let (ry, py) = find(&mut parent, &mut parity, index[&e.y]);
        if rx == ry {
            if px ^ py != need {
                return false;
            }
        } else {
            parent[rx] = ry;
            parity[rx] = px ^ py ^ need;
        }
    }
    true
}

/// Variable partition of the formula hypergraph.
#[derive(Clone, Debug, Serialize)]
pub struct ComponentPartition {
    /// Components ordered by smallest variable; isolated variables are
    /// singletons.
    pub components: Vec<Vec<usize>>,
    pub largest_size: usize,
}

/// Connected components of the formula hypergraph (variables adjacent when
/// they co-occur in a clause).
pub fn formula_components(f: &Formula) -> ComponentPartition {
    let mut uf = UnionFind::new(f.n());
    for cl in f.clauses() {
        let vars: Vec<usize> = cl.literals().iter().map(|l| l.var()).collect();
        for w in vars.windows(2) {
            uf.union(w[0] - 1, w[1] - 1);
        }
    }
    let components: Vec<Vec<usize>> = uf
        .groups()
        .into_iter()
        .map(|g| g.into_iter().map(|x| x + 1).collect())
        .collect();
    let largest_size = components.iter().map(Vec::len).max().unwrap_or(0);
    ComponentPartition { components, largest_size }
}

/// Walks from `p` to `q` by rewriting one formula-hypergraph component at a
/// time (ascending smallest variable), so every step stays within one
/// component and every intermediate keeps satisfying the formula.
///
/// An unsatisfying intermediate is impossible by construction; it is still
/// checked and reported as an internal error.
pub fn path_via_formula_components(
    f: &Formula,
    p: &Assignment,
    q: &Assignment,
) -> Result<Vec<Assignment>> {
    if !check_assignment(f, p)? || !check_assignment(f, q)? {
        return Err(Error::domain("both endpoints must satisfy the formula"));
    }
    let mut steps = vec![*p];
    let mut cur = *p;
    for comp in formula_components(f).components {
        if comp.iter().all(|&v| cur.get(v) == q.get(v)) {
            continue;
        }
        for &v in &comp {
            cur = cur.with_var(v, q.get(v));
        }
        if !check_assignment(f, &cur)? {
            return Err(Error::Internal(format!(
                "component rewrite produced an unsatisfying assignment {cur}"
            )));
        }
        steps.push(cur);
    }
    Ok(steps)
}

/// A step-by-step connection of a satisfying pair through H-component flips.
#[derive(Clone, Debug, Serialize)]
pub struct HPath {
    pub steps: Vec<Assignment>,
    /// Largest number of bits flipped in one step.
    pub max_step_width: usize,
}

/// A counterexample: flipping `flipped` produced `assignment`, which
/// violates `clause`.
#[derive(Clone, Debug, Serialize)]
pub struct HPathViolation {
    pub flipped: Vec<usize>,
    pub assignment: Assignment,
    pub clause: usize,
}

#[derive(Clone, Debug, Serialize)]
pub enum HPathOutcome {
    Path(HPath),
    Violation(HPathViolation),
}

impl HPathOutcome {
    pub fn is_path(&self) -> bool {
        matches!(self, HPathOutcome::Path(_))
    }
}

/// Flips one H-component at a time (ascending smallest variable; isolated
/// disagreement variables flip alone) and validates every intermediate.
/// Rather than asserting success, an unsatisfying intermediate is returned
/// as a `Violation` for the caller to count.
pub fn path_via_h(f: &Formula, a: &Assignment, b: &Assignment) -> Result<HPathOutcome> {
    let h = build_h(f, a, b)?;
    let mut units = h.components();
    units.sort_by_key(|u| u[0]);
    let mut steps = vec![*a];
    let mut cur = *a;
    let mut max_step_width = 0usize;
    for unit in units {
        for &v in &unit {
            cur = cur.with_var(v, b.get(v));
        }
        max_step_width = max_step_width.max(unit.len());
        if !check_assignment(f, &cur)? {
            let clause = (0..f.num_clauses())
                .find(|&ci| {
                    let (var_mask, neg_mask) = f.clause_masks(ci);
                    ((cur.bits() ^ neg_mask) & var_mask).count_ones() != 1
                })
                .expect("an unsatisfying assignment violates some clause");
            return Ok(HPathOutcome::Violation(HPathViolation {
                flipped: unit,
                assignment: cur,
                clause,
            }));
        }
        steps.push(cur);
    }
    Ok(HPathOutcome::Path(HPath { steps, max_step_width }))
}
