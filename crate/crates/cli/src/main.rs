use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qlens_core::decider::{compare_conditions, decide_d3, decide_d5_prime, parse_conditions};
use qlens_core::graph::{
    build_poset0, build_skew_product, build_truncated_translation, default_depth, export_dot, hasse_graph,
    ideal_invariant, WeightVector,
};
use qlens_core::paths::{multiset_wbar_with, path_counter};
use qlens_core::pattern::{extract_pattern, pattern_in_language};
use qlens_core::residue::is_prime;
use qlens_core::search::{search_pairs, write_csv, write_jsonl, SearchBudget};
use qlens_core::solver::{exhaustive_dq_search, solve_condition_vii, ExtendedTarget};

#[derive(Parser)]
#[command(name = "qlens", version, about = "Invariants and intertwiner searches for quantum lens spaces")]
struct Cli {
    /// key=value file with defaults for budget, extended_budget and workers.
    #[arg(long, global = true, env = "QLENS_CONFIG")]
    config: Option<PathBuf>,
    /// Worker threads for parallel searches.
    #[arg(long, global = true, env = "QLENS_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Single {
    r: u32,
    #[arg(required = true, allow_negative_numbers = true)]
    m: Vec<i64>,
}

#[derive(Args)]
struct Pair {
    r: u32,
    #[arg(required = true, allow_negative_numbers = true)]
    m: Vec<i64>,
    /// Second weight vector, after `--`; options must precede the `--`.
    #[arg(last = true, required = true, allow_negative_numbers = true)]
    n: Vec<i64>,
}

impl Single {
    fn weights(&self) -> qlens_core::Result<WeightVector> {
        WeightVector::new(self.r, &self.m)
    }
}

impl Pair {
    fn weights(&self) -> qlens_core::Result<(WeightVector, WeightVector)> {
        let m = WeightVector::new(self.r, &self.m)?;
        let n = WeightVector::new(self.r, &self.n)?;
        m.same_shape(&n)?;
        Ok((m, n))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphKind {
    Skew,
    F,
    Hasse,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Dq,
    Dq1,
}

#[derive(Subcommand)]
enum Command {
    /// Gcd chain and admissible-path length tables.
    Invariants {
        #[command(flatten)]
        w: Single,
        /// Path counting strategy: enumerate or transfer.
        #[arg(long, default_value = "transfer")]
        counter: String,
    },
    /// Theorem-backed verdict where one applies, otherwise a condition report.
    Decide {
        #[command(flatten)]
        pair: Pair,
    },
    /// Intertwiner under the (VII) side conditions, or the extended search.
    SolveH {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        extended: bool,
        /// Shift tuples the extended search may examine.
        #[arg(long, env = "QLENS_EXTENDED_BUDGET")]
        budget: Option<u64>,
        #[arg(long, value_enum, default_value = "dq1")]
        target: Target,
    },
    /// Compare conditions on all normalized pairs with `k + 1` weights.
    Search {
        r: u32,
        k: usize,
        #[arg(long, default_value = "v,vi,vii")]
        conditions: String,
        /// Pairs to evaluate before truncating.
        #[arg(long, env = "QLENS_BUDGET")]
        budget: Option<u64>,
        /// Shift tuples per pair for the `extended` condition.
        #[arg(long, env = "QLENS_EXTENDED_BUDGET")]
        extended_budget: Option<u64>,
        /// JSON lines output; stdout when omitted.
        #[arg(long)]
        jsonl: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Window-type pattern of a pair and its membership in the conjectured language.
    Pattern {
        #[command(flatten)]
        pair: Pair,
    },
    /// Graphviz rendering of one of the graphs attached to a weight vector.
    ExportDot {
        #[command(flatten)]
        w: Single,
        #[arg(long, value_enum, default_value = "skew")]
        graph: GraphKind,
        /// Truncation depth of the translation graph.
        #[arg(long)]
        depth: Option<usize>,
    },
}

/// Defaults read from a key=value file; blank lines and `#` comments are skipped.
#[derive(Default)]
struct Config {
    budget: Option<u64>,
    extended_budget: Option<u64>,
    workers: Option<usize>,
}

impl Config {
    fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut entries = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("{}:{}: expected key=value", path.display(), no + 1);
            };
            entries.insert(key.trim().to_string(), value.trim().to_string());
        }
        let mut cfg = Config::default();
        for (key, value) in entries {
            let bad = || format!("{}: invalid value for {key}: {value:?}", path.display());
            match key.as_str() {
                "budget" => cfg.budget = Some(value.parse().with_context(bad)?),
                "extended_budget" => cfg.extended_budget = Some(value.parse().with_context(bad)?),
                "workers" => cfg.workers = Some(value.parse().with_context(bad)?),
                _ => bail!("{}: unknown key {key:?}", path.display()),
            }
        }
        Ok(cfg)
    }
}

fn print_json(value: &serde_json::Value) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(n) = cli.workers.or(cfg.workers) {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring workers")?;
    }
    match cli.command {
        Command::Invariants { w, counter } => {
            let w = w.weights()?;
            let Some(counter) = path_counter(&counter) else {
                return Err(qlens_core::Error::Precondition(format!("unknown path counter {counter:?}")).into());
            };
            let wbar = multiset_wbar_with(&w, counter.as_ref())?;
            print_json(&json!({
                "weights": w.to_string(),
                "gcd_chain": ideal_invariant(&w).gcd_chain,
                "counter": counter.name(),
                "wbar": wbar.to_json(),
            }))
        }
        Command::Decide { pair } => {
            let (m, n) = pair.weights()?;
            let value = if m.k() == 1 {
                let v = decide_d3(&m, &n)?;
                json!({ "theorem": "d3", "equivalent": v.equivalent, "gcd": [v.gcd_m, v.gcd_n], "certificate": v.certificate })
            } else if m.k() == 2 && is_prime(m.r()) {
                json!({ "theorem": "d5-prime", "equivalent": decide_d5_prime(&m, &n)? })
            } else {
                json!({ "theorem": null, "report": compare_conditions(&m, &n, None)? })
            };
            print_json(&value)
        }
        Command::SolveH { pair, extended, budget, target } => {
            let (m, n) = pair.weights()?;
            if extended {
                let target = match target {
                    Target::Dq => ExtendedTarget::Dq,
                    Target::Dq1 => ExtendedTarget::Dq1,
                };
                let (res, log) = exhaustive_dq_search(&m, &n, target, budget.or(cfg.extended_budget))?;
                print_json(&json!({ "result": res, "search": log }))
            } else {
                print_json(&serde_json::to_value(solve_condition_vii(&m, &n)?)?)
            }
        }
        Command::Search { r, k, conditions, budget, extended_budget, jsonl, csv } => {
            let checks = parse_conditions(&conditions)?;
            let budget = SearchBudget {
                max_pairs: budget.or(cfg.budget),
                extended: extended_budget.or(cfg.extended_budget),
            };
            let outcome = search_pairs(r, k + 1, &checks, budget)?;
            match &jsonl {
                Some(path) => write_jsonl(&outcome, BufWriter::new(create(path)?))?,
                None => write_jsonl(&outcome, io::stdout().lock())?,
            }
            if let Some(path) = &csv {
                write_csv(&outcome, BufWriter::new(create(path)?))?;
            }
            eprintln!(
                "{} of {} pairs examined, {} emitted, {} with (VII){}",
                outcome.pairs_examined,
                outcome.pairs_total,
                outcome.reports.len(),
                outcome.vii_pairs().count(),
                if outcome.truncated { ", truncated" } else { "" }
            );
            for u in &outcome.unclassified {
                eprintln!("unclassified pattern: {} {}: {}", u.m, u.n, u.reason);
            }
            Ok(())
        }
        Command::Pattern { pair } => {
            let (m, n) = pair.weights()?;
            let p = extract_pattern(&m, &n)?;
            print_json(&json!({ "pattern": p.to_string(), "in_language": pattern_in_language(&p)? }))
        }
        Command::ExportDot { w, graph, depth } => {
            let w = w.weights()?;
            let g = match graph {
                GraphKind::Skew => build_skew_product(&w),
                GraphKind::F => build_truncated_translation(&w, depth.unwrap_or_else(|| default_depth(&w)))?
                    .to_directed_graph(),
                GraphKind::Hasse => hasse_graph(&build_poset0(&w)),
            };
            io::stdout().lock().write_all(export_dot(&g).as_bytes())?;
            Ok(())
        }
    }
}

fn create(path: &Path) -> anyhow::Result<File> {
    File::create(path).with_context(|| format!("creating {}", path.display()))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<qlens_core::Error>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
