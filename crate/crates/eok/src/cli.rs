//! Command-line front end. All logic lives in the library; the binary in
//! `src/main.rs` only forwards `std::env::args` here.
//!
//! Exit codes: 0 success, 1 domain/usage error, 2 I/O error. Results go to
//! stdout, diagnostics to stderr.

use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::bounds;
use crate::error::{Error, Result};
use crate::experiment::{Analysis, ExperimentConfig, ModelKind};
use crate::geometry;
use crate::instance::{
    self, generate_constant_prob, generate_counting, parse_formula, write_formula, Assignment,
    Density, Formula, ModelParams, SignMode,
};
use crate::solver::{enumerate_solutions, write_solutions};
use crate::structure;

#[derive(Parser)]
#[command(
    name = "eok",
    about = "Random exactly-one-in-k SAT: generators, exact enumeration, solution-space geometry, bounds",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance and print it in the formula format
    Gen(GenArgs),
    /// Enumerate the satisfying assignments of a formula
    Solve(SolveArgs),
    /// Overlap histogram, clusters, and connectivity radius of the solution set
    Geometry(GeometryArgs),
    /// List hole pairs of at least a given size
    Holes(HolesArgs),
    /// Labeled constraint graph of a satisfying pair
    Hgraph(HgraphArgs),
    /// Evaluate a closed-form bound, constant, or root
    Bounds(BoundsArgs),
    /// Satisfiability thresholds of the two random models
    Thresholds(ThresholdsArgs),
    /// Run a config-driven Monte Carlo experiment
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Random model: counting or constant_prob
    #[arg(long)]
    model: ModelKind,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    /// Clause/variable ratio (counting model)
    #[arg(long)]
    r: Option<f64>,
    /// Inclusion scale (constant probability model)
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sign-pattern mode for the counting model
    #[arg(long, value_enum, default_value_t = SignModeArg::Multinomial)]
    sign_mode: SignModeArg,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum SignModeArg {
    Multinomial,
    ExactCounts,
}

impl From<SignModeArg> for SignMode {
    fn from(v: SignModeArg) -> Self {
        match v {
            SignModeArg::Multinomial => SignMode::Multinomial,
            SignModeArg::ExactCounts => SignMode::ExactCounts,
        }
    }
}

impl clap::ValueEnum for ModelKind {
    fn value_variants<'a>() -> &'a [Self] {
        &[ModelKind::Counting, ModelKind::ConstantProb]
    }
    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(match self {
            ModelKind::Counting => clap::builder::PossibleValue::new("counting"),
            ModelKind::ConstantProb => clap::builder::PossibleValue::new("constant_prob"),
        })
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Formula file; `-` or absent reads stdin
    file: Option<String>,
    /// Stop after this many solutions and mark the set incomplete
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Args)]
struct GeometryArgs {
    file: Option<String>,
    /// Cluster radius; defaults to the minimum single-cluster radius
    #[arg(long)]
    l: Option<u32>,
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Args)]
struct HolesArgs {
    file: Option<String>,
    #[arg(long, default_value_t = 2)]
    min_size: u32,
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Args)]
struct HgraphArgs {
    file: Option<String>,
    /// First satisfying assignment, as a bitstring (variable 1 leftmost)
    #[arg(long)]
    a: String,
    /// Second satisfying assignment
    #[arg(long)]
    b: String,
    /// Output format: json or dot
    #[arg(long, default_value = "json")]
    format: String,
}

#[derive(Args)]
struct BoundsArgs {
    /// One of: lambda-c, condition-one, mu-bounds, epsilon-0, epsilon-c,
    /// connected-prob, cover-exponent, q-c, hole-prob, hole-rate,
    /// stirling-check
    #[arg(long)]
    quantity: String,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    i: Option<usize>,
    #[arg(long)]
    a: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    /// Emit a CSV grid `start:end:points` instead of a single value
    /// (hole-rate and cover-exponent only)
    #[arg(long)]
    scan: Option<String>,
}

#[derive(Args)]
struct ThresholdsArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    epsilon: f64,
    /// Also evaluate the constant-probability threshold at this n
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// TOML config file; flags below override its fields
    #[arg(long)]
    config: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    model: Option<ModelKind>,
    /// Comma-separated density grid
    #[arg(long)]
    densities: Option<String>,
    /// Comma-separated n grid
    #[arg(long)]
    ns: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    master_seed: Option<u64>,
    /// Comma-separated subset of geometry,holes,covers,hgraph,paths
    #[arg(long)]
    analyses: Option<String>,
    #[arg(long)]
    solution_cap: Option<usize>,
    #[arg(long)]
    time_cap_ms: Option<u64>,
    #[arg(long)]
    hole_min_frac: Option<f64>,
    #[arg(long)]
    h_component_log_coeff: Option<f64>,
    /// Output format: csv or json
    #[arg(long, default_value = "csv")]
    format: String,
    /// Output path; absent writes stdout
    #[arg(long)]
    out: Option<String>,
}

/// Parses and runs; returns the process exit code.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let mut stdout = std::io::stdout();
    dispatch_to(args, &mut stdout)
}

/// Same as `dispatch`, but command output goes to `out` (testable).
pub fn dispatch_to<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprint!("{e}");
            return 1;
        }
        Err(e) => {
            // --help / --version
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    match run(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Gen(args) => cmd_gen(args, out),
        Command::Solve(args) => cmd_solve(args, out),
        Command::Geometry(args) => cmd_geometry(args, out),
        Command::Holes(args) => cmd_holes(args, out),
        Command::Hgraph(args) => cmd_hgraph(args, out),
        Command::Bounds(args) => cmd_bounds(args, out),
        Command::Thresholds(args) => cmd_thresholds(args, out),
        Command::Experiment(args) => cmd_experiment(args, out),
    }
}

fn load_formula(path: Option<&str>) -> Result<Formula> {
    let text = match path {
        None | Some("-") => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf)?;
            buf
        }
        Some(p) => std::fs::read_to_string(p)?,
    };
    parse_formula(&text)
}

fn emit_json(out: &mut dyn Write, value: &serde_json::Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(value).expect("json serializes"))?;
    Ok(())
}

fn cmd_gen(args: GenArgs, out: &mut dyn Write) -> Result<()> {
    let density = match (args.model, args.r, args.p) {
        (ModelKind::Counting, Some(r), None) => Density::ClauseRatio(r),
        (ModelKind::ConstantProb, None, Some(p)) => Density::InclusionScale(p),
        (ModelKind::Counting, _, _) => {
            return Err(Error::domain("counting model takes --r (and not --p)"))
        }
        (ModelKind::ConstantProb, _, _) => {
            return Err(Error::domain("constant_prob model takes --p (and not --r)"))
        }
    };
    let params = ModelParams {
        n: args.n,
        k: args.k,
        epsilon: args.epsilon,
        density,
        seed: args.seed,
    };
    let f = match args.model {
        ModelKind::Counting => generate_counting(&params, args.sign_mode.into())?,
        ModelKind::ConstantProb => generate_constant_prob(&params)?,
    };
    write!(out, "{}", write_formula(&f))?;
    Ok(())
}

fn cmd_solve(args: SolveArgs, out: &mut dyn Write) -> Result<()> {
    let f = load_formula(args.file.as_deref())?;
    let s = enumerate_solutions(&f, args.limit);
    write!(out, "{}", write_solutions(&s))?;
    Ok(())
}

fn cmd_geometry(args: GeometryArgs, out: &mut dyn Write) -> Result<()> {
    let f = load_formula(args.file.as_deref())?;
    let s = enumerate_solutions(&f, args.limit);
    let stats = geometry::overlap_stats(&s)?;
    let min_l = if s.len() >= 2 { Some(geometry::min_connect_l(&s)?) } else { None };
    let cluster_l = args.l.or(min_l);
    let clusters = match cluster_l {
        Some(l) => Some(geometry::cluster_components(&s, l)?),
        None => None,
    };
    let components = structure::formula_components(&f);
    emit_json(
        out,
        &json!({
            "formula": f.id(),
            "n": f.n(),
            "solution_count": s.len(),
            "complete": s.complete(),
            "overlap": stats,
            "min_connect_l": min_l,
            "clusters": clusters,
            "largest_formula_component": components.largest_size,
        }),
    )
}

fn cmd_holes(args: HolesArgs, out: &mut dyn Write) -> Result<()> {
    let f = load_formula(args.file.as_deref())?;
    let s = enumerate_solutions(&f, args.limit);
    let holes = geometry::find_holes(&f, &s, args.min_size)?;
    emit_json(
        out,
        &json!({
            "formula": f.id(),
            "min_size": args.min_size,
            "count": holes.len(),
            "holes": holes,
        }),
    )
}

fn cmd_hgraph(args: HgraphArgs, out: &mut dyn Write) -> Result<()> {
    let f = load_formula(args.file.as_deref())?;
    let a = Assignment::from_bitstring(&args.a)?;
    let b = Assignment::from_bitstring(&args.b)?;
    let h = structure::build_h(&f, &a, &b)?;
    match args.format.as_str() {
        "dot" => {
            write!(out, "{}", h.to_dot())?;
            Ok(())
        }
        "json" => {
            let part = structure::variable_partition(&a, &b)?;
            let (s0, s1, s2, s3) = part.sizes();
            emit_json(
                out,
                &json!({
                    "formula": f.id(),
                    "a": a,
                    "b": b,
                    "partition_sizes": {"v0": s0, "v1": s1, "v2": s2, "v3": s3},
                    "graph": h,
                    "components": h.components(),
                    "largest_component": h.largest_component_size(),
                    "parity_consistent": structure::parity_consistent(&h),
                }),
            )
        }
        other => Err(Error::domain(format!("unknown format {other:?} (json or dot)"))),
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| Error::domain(format!("missing required --{flag}")))
}

fn parse_scan(spec: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::domain("scan must be start:end:points"));
    }
    let start: f64 = parts[0].parse().map_err(|_| Error::domain("bad scan start"))?;
    let end: f64 = parts[1].parse().map_err(|_| Error::domain("bad scan end"))?;
    let points: usize = parts[2].parse().map_err(|_| Error::domain("bad scan points"))?;
    if points < 2 || !(end > start) {
        return Err(Error::domain("scan needs end > start and at least 2 points"));
    }
    Ok((start, end, points))
}

fn cmd_bounds(args: BoundsArgs, out: &mut dyn Write) -> Result<()> {
    let quantity = args.quantity.as_str();
    if let Some(spec) = &args.scan {
        let (start, end, points) = parse_scan(spec)?;
        let grid = (0..points).map(move |j| start + (end - start) * j as f64 / (points - 1) as f64);
        match quantity {
            "hole-rate" => {
                let rate = bounds::hole_rate_functions(need(args.lambda, "lambda")?, need(args.k, "k")?)?;
                writeln!(out, "x,f,g")?;
                for x in grid {
                    writeln!(out, "{x},{},{}", rate.f(x), rate.g(x))?;
                }
            }
            "cover-exponent" => {
                let (c, k) = (need(args.c, "c")?, need(args.k, "k")?);
                writeln!(out, "lambda,h")?;
                for lam in grid {
                    writeln!(out, "{lam},{}", bounds::cover_exponent(lam, c, k)?)?;
                }
            }
            other => return Err(Error::domain(format!("--scan supports hole-rate and cover-exponent, not {other}"))),
        }
        return Ok(());
    }

    let value = match quantity {
        "lambda-c" => json!({
            "quantity": "lambda-c",
            "c": need(args.c, "c")?,
            "value": bounds::lambda_c(need(args.c, "c")?)?,
        }),
        "condition-one" => {
            let (q, eps, k) = (need(args.q, "q")?, need(args.epsilon, "epsilon")?, need(args.k, "k")?);
            json!({
                "quantity": "condition-one", "q": q, "epsilon": eps, "k": k,
                "holds": bounds::condition_one(q, eps, k),
            })
        }
        "mu-bounds" => {
            let (n, a, d) = (need(args.n, "n")?, need(args.a, "a")?, need(args.d, "d")?);
            let (p, eps, k) = (need(args.p, "p")?, need(args.epsilon, "epsilon")?, need(args.k, "k")?);
            let (mu_eq, mu_neq) = bounds::mu_bounds(n, a, d, p, eps, k)?;
            json!({
                "quantity": "mu-bounds", "n": n, "a": a, "d": d, "p": p, "epsilon": eps, "k": k,
                "mu_eq_bound": mu_eq, "mu_neq_bound": mu_neq,
            })
        }
        "epsilon-0" => json!({
            "quantity": "epsilon-0",
            "value": bounds::epsilon_0(),
            "residual": bounds::balance_residual(bounds::epsilon_0()),
            "other_root": bounds::epsilon_0_other_root(),
        }),
        "epsilon-c" => serde_json::to_value(bounds::epsilon_c()).expect("serializes"),
        "connected-prob" => {
            let (n, c) = (need(args.n, "n")?, need(args.c, "c")?);
            json!({
                "quantity": "connected-prob", "n": n, "c": c,
                "bound": bounds::connected_prob_bound(n, c)?,
            })
        }
        "cover-exponent" => {
            let (lam, c, k) = (need(args.lambda, "lambda")?, need(args.c, "c")?, need(args.k, "k")?);
            json!({
                "quantity": "cover-exponent", "lambda": lam, "c": c, "k": k,
                "value": bounds::cover_exponent(lam, c, k)?,
            })
        }
        "q-c" => {
            let (c, k) = (need(args.c, "c")?, need(args.k, "k")?);
            json!({ "quantity": "q-c", "c": c, "k": k, "value": bounds::q_c(c, k)? })
        }
        "hole-prob" => {
            let (n, i) = (need(args.n, "n")?, need(args.i, "i")?);
            let (lam, k) = (need(args.lambda, "lambda")?, need(args.k, "k")?);
            json!({
                "quantity": "hole-prob", "n": n, "i": i, "lambda": lam, "k": k,
                "bound": bounds::hole_prob_bound(n, i, lam, k)?,
                "bound_exact_route": bounds::hole_prob_bound_exact(n, i, lam, k)?,
            })
        }
        "hole-rate" => {
            let rate = bounds::hole_rate_functions(need(args.lambda, "lambda")?, need(args.k, "k")?)?;
            json!({
                "quantity": "hole-rate", "lambda": rate.lambda, "k": rate.k,
                "smallest_root": rate.smallest_root(),
                "g_at_1": rate.g(1.0),
            })
        }
        "stirling-check" => {
            let (alpha, lam, k) =
                (need(args.alpha, "alpha")?, need(args.lambda, "lambda")?, need(args.k, "k")?);
            json!({
                "quantity": "stirling-check", "alpha": alpha, "lambda": lam, "k": k,
                "relative_discrepancy": bounds::stirling_form_check(alpha, lam, k)?,
            })
        }
        other => return Err(Error::domain(format!("unknown quantity {other:?}"))),
    };
    emit_json(out, &value)
}

fn cmd_thresholds(args: ThresholdsArgs, out: &mut dyn Write) -> Result<()> {
    let r = instance::threshold_r(args.k, args.epsilon)?;
    let coeff = (1..=(args.k - 2)).map(|i| i as f64).product::<f64>()
        / (2.0 * args.epsilon * (1.0 - args.epsilon));
    let mut value = json!({
        "k": args.k,
        "epsilon": args.epsilon,
        "r": r,
        "p_scale": format!("{coeff}*n^{}", 1 - args.k as i64),
    });
    if let Some(n) = args.n {
        value["p"] = json!(instance::threshold_p(args.k, args.epsilon, n)?);
    }
    emit_json(out, &value)
}

fn parse_list<T: std::str::FromStr>(spec: &str, what: &str) -> Result<Vec<T>> {
    spec.split(',')
        .map(|tok| tok.trim().parse::<T>().map_err(|_| Error::domain(format!("bad {what}: {tok:?}"))))
        .collect()
}

fn cmd_experiment(args: ExperimentArgs, out: &mut dyn Write) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_toml(&std::fs::read_to_string(path)?)?,
        None => ExperimentConfig {
            k: need(args.k, "k")?,
            epsilon: need(args.epsilon, "epsilon")?,
            model: need(args.model, "model")?,
            densities: parse_list(args.densities.as_deref().unwrap_or(""), "density")?,
            ns: parse_list(args.ns.as_deref().unwrap_or(""), "n")?,
            trials: need(args.trials, "trials")?,
            master_seed: need(args.master_seed, "master-seed")?,
            analyses: Default::default(),
            solution_cap: crate::solver::DEFAULT_SOLUTION_LIMIT,
            time_cap_ms: 0,
            hole_min_frac: 0.6,
            h_component_log_coeff: None,
            sign_mode: SignMode::Multinomial,
        },
    };
    if args.config.is_some() {
        // Flag overrides on top of the file.
        if let Some(k) = args.k {
            cfg.k = k;
        }
        if let Some(eps) = args.epsilon {
            cfg.epsilon = eps;
        }
        if let Some(model) = args.model {
            cfg.model = model;
        }
        if let Some(d) = &args.densities {
            cfg.densities = parse_list(d, "density")?;
        }
        if let Some(ns) = &args.ns {
            cfg.ns = parse_list(ns, "n")?;
        }
        if let Some(t) = args.trials {
            cfg.trials = t;
        }
        if let Some(s) = args.master_seed {
            cfg.master_seed = s;
        }
    }
    if let Some(spec) = &args.analyses {
        cfg.analyses = parse_analyses(spec)?;
    } else if args.config.is_none() {
        cfg.analyses =
            [Analysis::Geometry, Analysis::Holes, Analysis::Covers, Analysis::Hgraph, Analysis::Paths]
                .into_iter()
                .collect();
    }
    if let Some(cap) = args.solution_cap {
        cfg.solution_cap = cap;
    }
    if let Some(ms) = args.time_cap_ms {
        cfg.time_cap_ms = ms;
    }
    if let Some(frac) = args.hole_min_frac {
        cfg.hole_min_frac = frac;
    }
    if let Some(coeff) = args.h_component_log_coeff {
        cfg.h_component_log_coeff = Some(coeff);
    }

    let report = crate::experiment::run_experiment(&cfg)?;
    let rendered = match args.format.as_str() {
        "csv" => report.to_csv(),
        "json" => report.to_json(),
        other => return Err(Error::domain(format!("unknown format {other:?} (csv or json)"))),
    };
    match &args.out {
        Some(path) => std::fs::write(path, rendered)?,
        None => write!(out, "{rendered}")?,
    }
    eprintln!(
        "experiment: {} records, {:.1} ms total trial time",
        report.records.len(),
        report.total_wall_time_ms()
    );
    Ok(())
}

fn parse_analyses(spec: &str) -> Result<std::collections::BTreeSet<Analysis>> {
    spec.split(',')
        .map(|tok| match tok.trim() {
            "geometry" => Ok(Analysis::Geometry),
            "holes" => Ok(Analysis::Holes),
            "covers" => Ok(Analysis::Covers),
            "hgraph" => Ok(Analysis::Hgraph),
            "paths" => Ok(Analysis::Paths),
            other => Err(Error::domain(format!("unknown analysis {other:?}"))),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String) {
        let mut buf = Vec::new();
        let code = dispatch_to(args.iter().map(|s| s.to_string()), &mut buf);
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn thresholds_json() {
        let (code, out) = run_capture(&["eok", "thresholds", "--k", "3", "--epsilon", "0.5"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!((v["r"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(v["p_scale"], "2*n^-2");
    }

    #[test]
    fn unknown_subcommand_is_exit_1() {
        let (code, _) = run_capture(&["eok", "frobnicate"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn gen_output_reparses() {
        let (code, out) = run_capture(&[
            "eok", "gen", "--model", "counting", "--n", "20", "--r", "0.3", "--k", "3",
            "--epsilon", "0.5", "--seed", "7",
        ]);
        assert_eq!(code, 0);
        let f = parse_formula(&out).unwrap();
        assert_eq!(f.n(), 20);
        assert_eq!(f.num_clauses(), 6);
    }

    #[test]
    fn bounds_epsilon_0() {
        let (code, out) = run_capture(&["eok", "bounds", "--quantity", "epsilon-0"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!((v["value"].as_f64().unwrap() - 0.2113248654).abs() < 1e-9);
    }

    #[test]
    fn missing_params_are_domain_errors() {
        let (code, _) = run_capture(&["eok", "bounds", "--quantity", "lambda-c"]);
        assert_eq!(code, 1);
        let (code, _) = run_capture(&["eok", "bounds", "--quantity", "no-such"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn help_is_exit_0() {
        let (code, out) = run_capture(&["eok", "--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("thresholds"));
    }
}
