//! Config-driven Monte Carlo harness.
//!
//! A run is a grid of cells (variable count x density), each with a fixed
//! number of trials. Every trial seeds its own generator from
//! `(master_seed, cell, trial)`, so the report is a pure function of the
//! config: rerunning a config reproduces the CSV and JSON byte for byte,
//! regardless of worker count or scheduling.
//!
//! Per-trial wall time is tracked for the optional time cap and the stderr
//! summary but deliberately kept out of the serialized report.

use std::collections::BTreeSet;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds;
use crate::error::{Error, Result};
use crate::factor::SpaceFactorization;
use crate::geometry::{min_cover_size, OverlapFraction};
use crate::instance::{
    binomial_coefficient, generate_constant_prob, generate_counting, Density, Formula,
    ModelParams, SignMode,
};
use crate::rng::trial_seed;
use crate::structure::formula_components;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Counting,
    ConstantProb,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelKind::Counting => write!(f, "counting"),
            ModelKind::ConstantProb => write!(f, "constant_prob"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Analysis {
    Geometry,
    Holes,
    Covers,
    Hgraph,
    Paths,
}

fn default_solution_cap() -> usize {
    crate::solver::DEFAULT_SOLUTION_LIMIT
}

fn default_hole_min_frac() -> f64 {
    0.6
}

fn default_sign_mode() -> SignMode {
    SignMode::Multinomial
}

/// Full description of an experiment; parsed from flat TOML or assembled
/// from CLI flags.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub k: usize,
    pub epsilon: f64,
    pub model: ModelKind,
    /// Grid of `r` (counting) or `p` (constant probability) values.
    pub densities: Vec<f64>,
    /// Grid of variable counts.
    pub ns: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
    pub analyses: BTreeSet<Analysis>,
    #[serde(default = "default_solution_cap")]
    pub solution_cap: usize,
    /// Wall-clock cap per trial; 0 or absent disables it. A cap can truncate
    /// different trials on different machines, so reports produced with a
    /// cap are not guaranteed byte-reproducible.
    #[serde(default)]
    pub time_cap_ms: u64,
    /// Holes are counted at size `>= ceil(hole_min_frac * n)`.
    #[serde(default = "default_hole_min_frac")]
    pub hole_min_frac: f64,
    /// When set, pairs are also scored against the H-component bound
    /// `coeff * ln(n)`.
    #[serde(default)]
    pub h_component_log_coeff: Option<f64>,
    #[serde(default = "default_sign_mode")]
    pub sign_mode: SignMode,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::domain(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 3 {
            return Err(Error::domain("k must be at least 3"));
        }
        if !(0.0..=0.5).contains(&self.epsilon) {
            return Err(Error::domain("epsilon must be in [0, 1/2]"));
        }
        if self.densities.is_empty() || self.ns.is_empty() {
            return Err(Error::domain("density and n grids must be non-empty"));
        }
        if !(self.hole_min_frac > 0.0 && self.hole_min_frac <= 1.0) {
            return Err(Error::domain("hole_min_frac must be in (0, 1]"));
        }
        for &n in &self.ns {
            if n < self.k || n > crate::instance::MAX_VARS {
                return Err(Error::domain(format!("n={n} outside [k, 64]")));
            }
        }
        for &d in &self.densities {
            if !(d > 0.0) {
                return Err(Error::domain("densities must be positive"));
            }
        }
        Ok(())
    }

    /// One-line canonical form embedded in reports.
    pub fn canonical_line(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    fn wants(&self, a: Analysis) -> bool {
        self.analyses.contains(&a)
    }

    /// Density grid cells in row-major (n outer, density inner) order.
    fn cells(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for &n in &self.ns {
            for &d in &self.densities {
                out.push((out.len(), n, d));
            }
        }
        out
    }
}

fn ser_u128<S: serde::Serializer>(v: &u128, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_opt_u128<S: serde::Serializer>(
    v: &Option<u128>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_some(&x.to_string()),
        None => s.serialize_none(),
    }
}

/// One trial's measurements. Fields are present iff the corresponding
/// analysis was requested (and the trial was not truncated).
#[derive(Clone, Debug, Serialize)]
pub struct TrialRecord {
    pub cell: usize,
    pub trial: usize,
    pub n: usize,
    pub density: f64,
    pub seed: u64,
    pub clauses: usize,
    pub satisfiable: bool,
    #[serde(serialize_with = "ser_u128")]
    pub solution_count: u128,
    pub largest_formula_component: usize,
    pub min_overlap: Option<OverlapFraction>,
    pub min_connect_l: Option<u32>,
    pub largest_h_component: Option<usize>,
    #[serde(serialize_with = "ser_opt_u128")]
    pub path_pairs: Option<u128>,
    #[serde(serialize_with = "ser_opt_u128")]
    pub path_failures: Option<u128>,
    pub h_bound: Option<f64>,
    #[serde(serialize_with = "ser_opt_u128")]
    pub pairs_within_h_bound: Option<u128>,
    pub hole_min_size: Option<u32>,
    #[serde(serialize_with = "ser_opt_u128")]
    pub hole_count: Option<u128>,
    pub cover_min: Option<usize>,
    pub truncated: bool,
    #[serde(skip)]
    pub wall_time_ms: f64,
}

/// Per-cell summary over all its trials.
#[derive(Clone, Debug, Serialize)]
pub struct CellAggregate {
    pub cell: usize,
    pub n: usize,
    pub density: f64,
    pub trials: usize,
    pub sat_frequency: f64,
    pub mean_solution_count: f64,
    pub mean_largest_formula_component: f64,
    pub mean_min_connect_l: Option<f64>,
    pub max_min_connect_l: Option<u32>,
    pub min_overlap: Option<OverlapFraction>,
    pub mean_cover_min: Option<f64>,
    #[serde(serialize_with = "ser_opt_u128")]
    pub pairs_total: Option<u128>,
    #[serde(serialize_with = "ser_opt_u128")]
    pub path_failures_total: Option<u128>,
    pub path_success_rate: Option<f64>,
    pub within_h_bound_rate: Option<f64>,
    #[serde(serialize_with = "ser_opt_u128")]
    pub holes_total: Option<u128>,
    /// Small-cover threshold `q_c` at this cell's clause/variable ratio.
    pub q_c_reference: Option<f64>,
    pub truncated_trials: usize,
}

/// Least-squares fit of a per-cell mean against `ln n`.
#[derive(Clone, Debug, Serialize)]
pub struct LogFit {
    pub quantity: String,
    pub slope_per_ln_n: f64,
    pub intercept: f64,
    pub points: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub records: Vec<TrialRecord>,
    pub aggregates: Vec<CellAggregate>,
    pub fits: Vec<LogFit>,
}

/// Runs every (cell, trial) job, in parallel across a pool bounded by the
/// `EOK_THREADS` environment variable, then folds deterministic aggregates
/// over the records sorted by (cell, trial).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let cells = cfg.cells();
    let jobs: Vec<(usize, usize, f64, usize)> = cells
        .iter()
        .flat_map(|&(cell, n, d)| (0..cfg.trials).map(move |t| (cell, n, d, t)))
        .collect();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;
    let mut records: Vec<TrialRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|&(cell, n, d, trial)| run_trial(cfg, cell, n, d, trial))
            .collect::<Result<Vec<_>>>()
    })?;
    records.sort_by_key(|r| (r.cell, r.trial));

    let aggregates: Vec<CellAggregate> = if cfg.trials == 0 {
        Vec::new()
    } else {
        cells.iter().map(|&(cell, n, d)| aggregate(cfg, cell, n, d, &records)).collect()
    };
    let fits = fit_section(&aggregates);
    Ok(ExperimentReport { config: cfg.clone(), records, aggregates, fits })
}

fn worker_count() -> usize {
    std::env::var("EOK_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism().map(|v| v.get()).unwrap_or(1)
        })
}

fn run_trial(
    cfg: &ExperimentConfig,
    cell: usize,
    n: usize,
    density: f64,
    trial: usize,
) -> Result<TrialRecord> {
    let start = Instant::now();
    let seed = trial_seed(cfg.master_seed, cell as u64, trial as u64);
    let f = generate(cfg, n, density, seed)?;
    let components = formula_components(&f);
    let fact = SpaceFactorization::build(&f, Some(cfg.solution_cap))?;

    let mut rec = TrialRecord {
        cell,
        trial,
        n,
        density,
        seed,
        clauses: f.num_clauses(),
        satisfiable: fact.is_satisfiable(),
        solution_count: fact.solution_count(),
        largest_formula_component: components.largest_size,
        min_overlap: None,
        min_connect_l: None,
        largest_h_component: None,
        path_pairs: None,
        path_failures: None,
        h_bound: None,
        pairs_within_h_bound: None,
        hole_min_size: None,
        hole_count: None,
        cover_min: None,
        truncated: !fact.complete(),
        wall_time_ms: 0.0,
    };

    let over_time = |start: &Instant| cfg.time_cap_ms > 0
        && start.elapsed().as_millis() as u64 > cfg.time_cap_ms;

    if rec.satisfiable && !rec.truncated {
        if cfg.wants(Analysis::Geometry) && !over_time(&start) {
            rec.min_overlap = fact.min_overlap();
            rec.min_connect_l = fact.min_connect_l()?;
        }
        if (cfg.wants(Analysis::Hgraph) || cfg.wants(Analysis::Paths)) && !over_time(&start) {
            let bound = cfg
                .h_component_log_coeff
                .map(|coef| (coef * (n as f64).ln()).floor() as u32);
            let stats = fact.h_path_stats(bound)?;
            if cfg.wants(Analysis::Hgraph) {
                rec.largest_h_component = stats.max_h_component;
            }
            if cfg.wants(Analysis::Paths) {
                rec.path_pairs = Some(stats.ordered_distinct_pairs);
                rec.path_failures = Some(stats.path_failures);
            }
            if let Some(coef) = cfg.h_component_log_coeff {
                rec.h_bound = Some(coef * (n as f64).ln());
                rec.pairs_within_h_bound = stats.pairs_within_component_bound;
            }
        }
        if cfg.wants(Analysis::Holes) && !over_time(&start) {
            let min_size = (cfg.hole_min_frac * n as f64).ceil() as u32;
            rec.hole_min_size = Some(min_size);
            rec.hole_count = Some(fact.hole_count_at_least(min_size)?);
        }
    }
    if cfg.wants(Analysis::Covers) && !over_time(&start) {
        rec.cover_min = Some(min_cover_size(&f));
    }
    rec.truncated |= over_time(&start);
    rec.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(rec)
}

fn generate(cfg: &ExperimentConfig, n: usize, density: f64, seed: u64) -> Result<Formula> {
    let params = ModelParams {
        n,
        k: cfg.k,
        epsilon: cfg.epsilon,
        density: match cfg.model {
            ModelKind::Counting => Density::ClauseRatio(density),
            ModelKind::ConstantProb => Density::InclusionScale(density),
        },
        seed,
    };
    match cfg.model {
        ModelKind::Counting => generate_counting(&params, cfg.sign_mode),
        ModelKind::ConstantProb => generate_constant_prob(&params),
    }
}

fn aggregate(
    cfg: &ExperimentConfig,
    cell: usize,
    n: usize,
    density: f64,
    records: &[TrialRecord],
) -> CellAggregate {
    let rows: Vec<&TrialRecord> = records.iter().filter(|r| r.cell == cell).collect();
    let trials = rows.len();
    let sat = rows.iter().filter(|r| r.satisfiable).count();
    let mean = |f: &dyn Fn(&TrialRecord) -> Option<f64>| -> Option<f64> {
        let vals: Vec<f64> = rows.iter().filter_map(|r| f(r)).collect();
        if vals.is_empty() {
            None
        } else {
            Some(vals.iter().sum::<f64>() / vals.len() as f64)
        }
    };
    let sum_opt = |f: &dyn Fn(&TrialRecord) -> Option<u128>| -> Option<u128> {
        let vals: Vec<u128> = rows.iter().filter_map(|r| f(r)).collect();
        if vals.is_empty() {
            None
        } else {
            Some(vals.iter().sum())
        }
    };

    let pairs_total = sum_opt(&|r| r.path_pairs);
    let path_failures_total = sum_opt(&|r| r.path_failures);
    let within_total = sum_opt(&|r| r.pairs_within_h_bound);
    let rate = |num: Option<u128>| {
        let (total, n) = (pairs_total?, num?);
        Some(if total == 0 { 1.0 } else { n as f64 / total as f64 })
    };

    // Clause/variable ratio in the sense of the cover bound.
    let c_equiv = match cfg.model {
        ModelKind::Counting => density,
        ModelKind::ConstantProb => density * binomial_coefficient(n, cfg.k) / n as f64,
    };
    let q_c_reference = if cfg.wants(Analysis::Geometry) || cfg.wants(Analysis::Covers) {
        bounds::q_c(c_equiv, cfg.k).ok()
    } else {
        None
    };

    CellAggregate {
        cell,
        n,
        density,
        trials,
        sat_frequency: sat as f64 / trials as f64,
        mean_solution_count: rows.iter().map(|r| r.solution_count as f64).sum::<f64>()
            / trials as f64,
        mean_largest_formula_component: rows
            .iter()
            .map(|r| r.largest_formula_component as f64)
            .sum::<f64>()
            / trials as f64,
        mean_min_connect_l: mean(&|r| r.min_connect_l.map(f64::from)),
        max_min_connect_l: rows.iter().filter_map(|r| r.min_connect_l).max(),
        min_overlap: rows.iter().filter_map(|r| r.min_overlap).min(),
        mean_cover_min: mean(&|r| r.cover_min.map(|v| v as f64)),
        pairs_total,
        path_failures_total,
        path_success_rate: rate(pairs_total.zip(path_failures_total).map(|(p, f)| p - f)),
        within_h_bound_rate: rate(within_total),
        holes_total: sum_opt(&|r| r.hole_count),
        q_c_reference,
        truncated_trials: rows.iter().filter(|r| r.truncated).count(),
    }
}

fn fit_section(aggregates: &[CellAggregate]) -> Vec<LogFit> {
    let mut fits = Vec::new();
    let series: [(&str, Box<dyn Fn(&CellAggregate) -> Option<f64>>); 2] = [
        ("min_connect_l", Box::new(|a: &CellAggregate| a.mean_min_connect_l)),
        (
            "largest_formula_component",
            Box::new(|a: &CellAggregate| Some(a.mean_largest_formula_component)),
        ),
    ];
    for (name, getter) in series {
        let points: Vec<(f64, f64)> = aggregates
            .iter()
            .filter_map(|a| getter(a).map(|y| ((a.n as f64).ln(), y)))
            .collect();
        let distinct_x: BTreeSet<u64> = points.iter().map(|(x, _)| x.to_bits()).collect();
        if distinct_x.len() < 2 {
            continue;
        }
        let (slope, intercept) = least_squares(&points);
        fits.push(LogFit {
            quantity: name.to_string(),
            slope_per_ln_n: slope,
            intercept,
            points: points.len(),
        });
    }
    fits
}

fn least_squares(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    (slope, mean_y - slope * mean_x)
}

impl ExperimentReport {
    /// Versioned CSV: a trials section, an aggregates section, and a fits
    /// section. Byte-identical across reruns of the same config.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# eok experiment report v1\n");
        out.push_str(&format!("# config: {}\n", self.config.canonical_line()));
        out.push_str(
            "model,k,epsilon,density,n,cell,trial,seed,clauses,satisfiable,solution_count,\
             largest_formula_component,min_overlap,min_connect_l,largest_h_component,\
             path_pairs,path_failures,path_success_rate,h_bound,pairs_within_h_bound,\
             hole_min_size,hole_count,cover_min,truncated\n",
        );
        for r in &self.records {
            let success_rate = r.path_pairs.map(|p| {
                let failures = r.path_failures.unwrap_or(0);
                if p == 0 {
                    1.0
                } else {
                    1.0 - failures as f64 / p as f64
                }
            });
            let row = [
                self.config.model.to_string(),
                self.config.k.to_string(),
                fmt_f64(self.config.epsilon),
                fmt_f64(r.density),
                r.n.to_string(),
                r.cell.to_string(),
                r.trial.to_string(),
                r.seed.to_string(),
                r.clauses.to_string(),
                (r.satisfiable as u8).to_string(),
                r.solution_count.to_string(),
                r.largest_formula_component.to_string(),
                opt(r.min_overlap.map(|o| fmt_f64(o.as_f64()))),
                opt(r.min_connect_l.map(|v| v.to_string())),
                opt(r.largest_h_component.map(|v| v.to_string())),
                opt(r.path_pairs.map(|v| v.to_string())),
                opt(r.path_failures.map(|v| v.to_string())),
                opt(success_rate.map(fmt_f64)),
                opt(r.h_bound.map(fmt_f64)),
                opt(r.pairs_within_h_bound.map(|v| v.to_string())),
                opt(r.hole_min_size.map(|v| v.to_string())),
                opt(r.hole_count.map(|v| v.to_string())),
                opt(r.cover_min.map(|v| v.to_string())),
                (r.truncated as u8).to_string(),
            ];
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out.push_str("# aggregates\n");
        out.push_str(
            "model,k,epsilon,density,n,cell,trials,sat_frequency,mean_solution_count,\
             mean_largest_formula_component,mean_min_connect_l,max_min_connect_l,min_overlap,\
             mean_cover_min,pairs_total,path_failures_total,path_success_rate,\
             within_h_bound_rate,holes_total,q_c_reference,truncated_trials\n",
        );
        for a in &self.aggregates {
            let row = [
                self.config.model.to_string(),
                self.config.k.to_string(),
                fmt_f64(self.config.epsilon),
                fmt_f64(a.density),
                a.n.to_string(),
                a.cell.to_string(),
                a.trials.to_string(),
                fmt_f64(a.sat_frequency),
                fmt_f64(a.mean_solution_count),
                fmt_f64(a.mean_largest_formula_component),
                opt(a.mean_min_connect_l.map(fmt_f64)),
                opt(a.max_min_connect_l.map(|v| v.to_string())),
                opt(a.min_overlap.map(|o| fmt_f64(o.as_f64()))),
                opt(a.mean_cover_min.map(fmt_f64)),
                opt(a.pairs_total.map(|v| v.to_string())),
                opt(a.path_failures_total.map(|v| v.to_string())),
                opt(a.path_success_rate.map(fmt_f64)),
                opt(a.within_h_bound_rate.map(fmt_f64)),
                opt(a.holes_total.map(|v| v.to_string())),
                opt(a.q_c_reference.map(fmt_f64)),
                a.truncated_trials.to_string(),
            ];
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out.push_str("# fits\n");
        out.push_str("quantity,slope_per_ln_n,intercept,points\n");
        for fit in &self.fits {
            out.push_str(&format!(
                "{},{},{},{}\n",
                fit.quantity,
                fmt_f64(fit.slope_per_ln_n),
                fmt_f64(fit.intercept),
                fit.points
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn total_wall_time_ms(&self) -> f64 {
        self.records.iter().map(|r| r.wall_time_ms).sum()
    }
}

fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn opt(v: Option<String>) -> String {
    v.unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> ExperimentConfig {
        ExperimentConfig {
            k: 3,
            epsilon: 0.5,
            model: ModelKind::Counting,
            densities: vec![0.3],
            ns: vec![8, 10],
            trials: 12,
            master_seed: 7,
            analyses: [
                Analysis::Geometry,
                Analysis::Holes,
                Analysis::Covers,
                Analysis::Hgraph,
                Analysis::Paths,
            ]
            .into_iter()
            .collect(),
            solution_cap: default_solution_cap(),
            time_cap_ms: 0,
            hole_min_frac: 0.6,
            h_component_log_coeff: Some(12.0),
            sign_mode: SignMode::Multinomial,
        }
    }

    #[test]
    fn toml_round_trip_and_defaults() {
        let text = r#"
            k = 3
            epsilon = 0.5
            model = "counting"
            densities = [0.25, 0.3]
            ns = [8]
            trials = 2
            master_seed = 42
            analyses = ["geometry", "covers"]
        "#;
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        assert_eq!(cfg.solution_cap, default_solution_cap());
        assert_eq!(cfg.hole_min_frac, 0.6);
        assert_eq!(cfg.time_cap_ms, 0);
        assert!(cfg.wants(Analysis::Geometry));
        assert!(!cfg.wants(Analysis::Holes));
        assert!(ExperimentConfig::from_toml("k = 2").is_err());
    }

    #[test]
    fn zero_trials_gives_header_only_report() {
        let mut cfg = tiny_config();
        cfg.trials = 0;
        let report = run_experiment(&cfg).unwrap();
        assert!(report.records.is_empty());
        assert!(report.aggregates.is_empty());
        let csv = report.to_csv();
        assert!(csv.contains("model,k,epsilon"));
        assert!(csv.contains("# aggregates"));
    }

    #[test]
    fn reports_are_byte_identical_across_runs() {
        let cfg = tiny_config();
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn records_revalidate_against_the_solver() {
        let cfg = tiny_config();
        let report = run_experiment(&cfg).unwrap();
        assert_eq!(report.records.len(), 24);
        for r in &report.records {
            let f = generate(&cfg, r.n, r.density, r.seed).unwrap();
            let s = crate::solver::enumerate_solutions(&f, None);
            assert_eq!(r.satisfiable, !s.is_empty());
            assert_eq!(r.solution_count, s.len() as u128);
            assert_eq!(r.satisfiable, crate::solver::is_satisfiable(&f));
        }
    }

    #[test]
    fn analyses_gate_the_fields() {
        let mut cfg = tiny_config();
        cfg.analyses = [Analysis::Covers].into_iter().collect();
        let report = run_experiment(&cfg).unwrap();
        for r in &report.records {
            assert!(r.cover_min.is_some());
            assert!(r.min_overlap.is_none());
            assert!(r.path_pairs.is_none());
            assert!(r.hole_count.is_none());
        }
    }

    #[test]
    fn fits_need_two_distinct_sizes() {
        let mut cfg = tiny_config();
        let report = run_experiment(&cfg).unwrap();
        assert!(report.fits.iter().any(|f| f.quantity == "largest_formula_component"));
        cfg.ns = vec![9];
        let single = run_experiment(&cfg).unwrap();
        assert!(single.fits.is_empty());
    }

    #[test]
    fn least_squares_recovers_a_line() {
        let pts: Vec<(f64, f64)> = [1.0f64, 2.0, 3.0].iter().map(|&x| (x, 2.0 * x + 1.0)).collect();
        let (slope, intercept) = least_squares(&pts);
        assert!((slope - 2.0).abs() < 1e-12);
        assert!((intercept - 1.0).abs() < 1e-12);
    }
}
