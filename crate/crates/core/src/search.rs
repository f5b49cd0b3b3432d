//! Exhaustive comparison of all normalized pairs at fixed `r` and length.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decider::{evaluate_pair, normalized_tuples, Condition, ConditionReport};
use crate::error::{Error, Result};
use crate::graph::WeightVector;
use crate::pattern::extract_pattern;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchBudget {
    /// Pairs evaluated before the search stops; `None` is unlimited.
    pub max_pairs: Option<u64>,
    /// Shift tuples per pair for the extended condition.
    pub extended: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnclassifiedPair {
    pub m: WeightVector,
    pub n: WeightVector,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub r: u32,
    pub levels: usize,
    pub conditions: Vec<String>,
    /// Emitted pairs, in the lexicographic order of `(m, n)`.
    pub reports: Vec<ConditionReport>,
    pub pairs_total: u64,
    pub pairs_examined: u64,
    pub truncated: bool,
    /// (VII)-pairs whose windows are not in the table.
    pub unclassified: Vec<UnclassifiedPair>,
}

impl SearchOutcome {
    /// Emitted pairs satisfying (VII).
    pub fn vii_pairs(&self) -> impl Iterator<Item = &ConditionReport> {
        self.reports.iter().filter(|r| r.cond_vii == Some(true))
    }
}

/// Evaluates `checks` on every unordered pair of distinct normalized tuples
/// and keeps pairs where some condition holds or the conditions disagree.
///
/// Patterns are attached to (VII)-pairs when `r ∈ {5, 8}` and there are at
/// least four weights.
pub fn search_pairs(r: u32, levels: usize, checks: &[Box<dyn Condition>], budget: SearchBudget) -> Result<SearchOutcome> {
    if checks.is_empty() {
        return Err(Error::Precondition("no conditions selected".into()));
    }
    let tuples = normalized_tuples(r, levels)?;
    let pairs: Vec<(usize, usize)> =
        (0..tuples.len()).flat_map(|i| (i + 1..tuples.len()).map(move |j| (i, j))).collect();
    let pairs_total = pairs.len() as u64;
    let take = budget.max_pairs.map_or(pairs.len(), |b| pairs.len().min(b as usize));
    let with_patterns = matches!(r, 5 | 8) && levels >= 4;

    let evaluated: Vec<(ConditionReport, Option<String>)> = pairs[..take]
        .par_iter()
        .map(|&(i, j)| -> Result<Option<(ConditionReport, Option<String>)>> {
            let (m, n) = (&tuples[i], &tuples[j]);
            let mut report = evaluate_pair(m, n, checks, budget.extended)?;
            if !(report.any_holds() || report.disagreement()) {
                return Ok(None);
            }
            let mut unclassified = None;
            if with_patterns && report.cond_vii == Some(true) {
                match extract_pattern(m, n) {
                    Ok(p) => report.pattern = Some(p.to_string()),
                    Err(e) => unclassified = Some(e.to_string()),
                }
            }
            Ok(Some((report, unclassified)))
        })
        .filter_map(|x| x.transpose())
        .collect::<Result<_>>()?;

    let mut reports = Vec::with_capacity(evaluated.len());
    let mut unclassified = Vec::new();
    for (report, reason) in evaluated {
        if let Some(reason) = reason {
            unclassified.push(UnclassifiedPair { m: report.pair.0.clone(), n: report.pair.1.clone(), reason });
        }
        reports.push(report);
    }
    // par_iter().collect() keeps input order, so this only guards the contract
    reports.sort_by(|a, b| a.pair.cmp(&b.pair));
    Ok(SearchOutcome {
        r,
        levels,
        conditions: checks.iter().map(|c| c.name().to_string()).collect(),
        reports,
        pairs_total,
        pairs_examined: take as u64,
        truncated: (take as u64) < pairs_total,
        unclassified,
    })
}

/// One report per line; a truncated search ends with a marker line.
pub fn write_jsonl<W: Write>(outcome: &SearchOutcome, mut out: W) -> Result<()> {
    let io = |e: std::io::Error| Error::Precondition(format!("write failed: {e}"));
    for report in &outcome.reports {
        let line = serde_json::to_string(report).map_err(|e| Error::Precondition(e.to_string()))?;
        writeln!(out, "{line}").map_err(io)?;
    }
    if outcome.truncated {
        let marker = serde_json::json!({
            "truncated": true,
            "pairs_examined": outcome.pairs_examined,
            "pairs_total": outcome.pairs_total,
        });
        writeln!(out, "{marker}").map_err(io)?;
    }
    Ok(())
}

fn join(w: &WeightVector) -> String {
    w.weights().iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

fn cell(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "true",
        Some(false) => "false",
        None => "",
    }
}

/// CSV summary with one row per emitted pair.
pub fn write_csv<W: Write>(outcome: &SearchOutcome, out: W) -> Result<()> {
    let err = |e: csv::Error| Error::Precondition(format!("csv: {e}"));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["r", "m", "n", "v", "vi", "vii", "dq1", "extended", "pattern"]).map_err(err)?;
    for rep in &outcome.reports {
        let r = rep.pair.0.r().to_string();
        let (m, n) = (join(&rep.pair.0), join(&rep.pair.1));
        w.write_record([
            r.as_str(),
            &m,
            &n,
            cell(rep.cond_v),
            cell(rep.cond_vi),
            cell(rep.cond_vii),
            cell(rep.dq1_witness),
            cell(rep.extended_iv),
            rep.pattern.as_deref().unwrap_or(""),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::Precondition(format!("csv: {e}")))?;
    Ok(())
}
