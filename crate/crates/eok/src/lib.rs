//! Random exactly-one-in-k SAT at desk scale.
//!
//! An instance is a set of width-`k` clauses over boolean variables, each
//! clause satisfied when *exactly one* of its literals is true; `epsilon`
//! weights how often random literals are negated. This crate provides:
//!
//! * [`instance`] — formulas, assignments, the two random ensembles
//!   (counting and constant probability), thresholds, and the text format;
//! * [`solver`] — exactly-one propagation with backtracking enumeration of
//!   all solutions;
//! * [`geometry`] — overlaps, distance-`l` clusters, holes, agreement
//!   covers, and exact minimum covers of a solution set;
//! * [`structure`] — the formula hypergraph, the labeled constraint graph of
//!   a solution pair, and the component-flip paths between solutions;
//! * [`bounds`] — closed-form bounds, special constants, and bisection
//!   roots, with big-rational cross checks;
//! * [`factor`] — the component-product decomposition of the solution space
//!   that makes exact all-pairs statistics cheap;
//! * [`experiment`] — the reproducible Monte Carlo harness behind the
//!   `eok experiment` subcommand.
//!
//! Each major capability has a runnable example under `examples/`; the `eok`
//! binary exposes the same functionality as subcommands.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod factor;
pub mod geometry;
pub mod instance;
pub mod rng;
pub mod solver;
pub mod structure;
mod uf;

pub use error::{Error, Result};
pub use instance::{Assignment, Clause, Formula, Literal, ModelParams};
pub use solver::SolutionSet;
