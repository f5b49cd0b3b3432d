//! Theorem-backed verdicts and condition reports for pairs of weight vectors.

use std::cell::OnceCell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ideal_invariant, WeightVector};
use crate::paths::{d3_certificate, wbar_equal, PathPairing};
use crate::residue::{inv_mod, is_prime, units};
use crate::solver::{check_dq1_witness, exhaustive_dq_search, solve_condition_vii, ExtendedTarget, SolverResult};

/// Scales `w` so that its first weight is 1.
pub fn normalize_weights(w: &WeightVector) -> WeightVector {
    // weights are units, so the inverse always exists
    let inv = inv_mod(i64::from(w.weight(1)), w.r()).unwrap_or(1);
    w.scaled(inv)
}

/// Lexicographic minimum over all unit multiples of `w`.
pub fn canonical_weights(w: &WeightVector) -> WeightVector {
    units(w.r())
        .into_iter()
        .map(|a| w.scaled(a))
        .min()
        .unwrap_or_else(|| w.clone())
}

/// All unit tuples of the given length with first entry 1, in lexicographic order.
///
/// Each unit-scaling orbit meets this set exactly once.
pub fn normalized_tuples(r: u32, levels: usize) -> Result<Vec<WeightVector>> {
    if levels < 2 {
        return Err(Error::TooFewWeights(levels));
    }
    let us = units(r);
    let mut out = Vec::new();
    let mut idx = vec![0usize; levels - 1];
    loop {
        let mut ws = Vec::with_capacity(levels);
        ws.push(1);
        ws.extend(idx.iter().map(|&i| us[i]));
        out.push(WeightVector::from_units(r, &ws)?);
        let mut pos = idx.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < us.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct D3Verdict {
    pub equivalent: bool,
    pub gcd_m: u32,
    pub gcd_n: u32,
    /// Length-matching pairing of generator paths, when equivalent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Vec<PathPairing>>,
}

/// Three-dimensional case: equivalence iff `gcd(m₂-m₁, r) = gcd(n₂-n₁, r)`.
pub fn decide_d3(m: &WeightVector, n: &WeightVector) -> Result<D3Verdict> {
    m.same_shape(n)?;
    if m.k() != 1 {
        return Err(Error::TheoremScope(format!("k = {} is not the three-dimensional case", m.k())));
    }
    let gcd_m = ideal_invariant(m).gcd_chain[0];
    let gcd_n = ideal_invariant(n).gcd_chain[0];
    let equivalent = gcd_m == gcd_n;
    let certificate = if equivalent { Some(d3_certificate(m, n)?) } else { None };
    Ok(D3Verdict { equivalent, gcd_m, gcd_n, certificate })
}

/// Five-dimensional case for prime `r`: equivalence iff both tuples have
/// three distinct entries, or one is a unit multiple of the other.
pub fn decide_d5_prime(m: &WeightVector, n: &WeightVector) -> Result<bool> {
    m.same_shape(n)?;
    if m.k() != 2 {
        return Err(Error::TheoremScope(format!("k = {} is not the five-dimensional case", m.k())));
    }
    if !is_prime(m.r()) {
        return Err(Error::TheoremScope(format!("r = {} is not prime", m.r())));
    }
    Ok((m.distinct_count() == 3 && n.distinct_count() == 3) || m.is_unit_multiple_of(n))
}

/// The distinctness-and-gcd-chain predicate, or a unit scaling.
pub fn condition_vi(m: &WeightVector, n: &WeightVector) -> Result<bool> {
    m.same_shape(n)?;
    let all_distinct = m.distinct_count() == m.levels() && n.distinct_count() == n.levels();
    Ok((all_distinct && ideal_invariant(m) == ideal_invariant(n)) || m.is_unit_multiple_of(n))
}

/// Inputs and memoized intermediate results shared by the condition checkers.
///
/// Intertwiner checks run on the normalized pair: the zero pattern is not
/// preserved by rescaling only one side, so verdicts on raw inputs would
/// depend on the chosen representative of each scaling orbit.
pub struct PairContext<'a> {
    pub m: &'a WeightVector,
    pub n: &'a WeightVector,
    /// Shift tuples the extended search may examine; `None` skips it.
    pub budget: Option<u64>,
    normalized: (WeightVector, WeightVector),
    vii: OnceCell<SolverResult>,
}

impl<'a> PairContext<'a> {
    pub fn new(m: &'a WeightVector, n: &'a WeightVector, budget: Option<u64>) -> Self {
        let normalized = (normalize_weights(m), normalize_weights(n));
        PairContext { m, n, budget, normalized, vii: OnceCell::new() }
    }

    pub fn normalized(&self) -> (&WeightVector, &WeightVector) {
        (&self.normalized.0, &self.normalized.1)
    }

    pub fn vii(&self) -> Result<&SolverResult> {
        if let Some(v) = self.vii.get() {
            return Ok(v);
        }
        let (m, n) = self.normalized();
        let v = solve_condition_vii(m, n)?;
        Ok(self.vii.get_or_init(|| v))
    }
}

/// Where a checker's verdict lands in a [`ConditionReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReportField {
    V,
    Vi,
    Vii,
    Dq1Witness,
    Extended,
}

/// A named check on a pair of weight vectors. `Ok(None)` means skipped.
pub trait Condition: Send + Sync {
    fn name(&self) -> &'static str;
    fn field(&self) -> ReportField;
    fn evaluate(&self, ctx: &PairContext<'_>) -> Result<Option<bool>>;
}

/// Equality of the admissible-path length multisets.
pub struct PathLengthCondition;

impl Condition for PathLengthCondition {
    fn name(&self) -> &'static str {
        "v"
    }

    fn field(&self) -> ReportField {
        ReportField::V
    }

    fn evaluate(&self, ctx: &PairContext<'_>) -> Result<Option<bool>> {
        wbar_equal(ctx.m, ctx.n).map(Some)
    }
}

pub struct DistinctGcdCondition;

impl Condition for DistinctGcdCondition {
    fn name(&self) -> &'static str {
        "vi"
    }

    fn field(&self) -> ReportField {
        ReportField::Vi
    }

    fn evaluate(&self, ctx: &PairContext<'_>) -> Result<Option<bool>> {
        condition_vi(ctx.m, ctx.n).map(Some)
    }
}

/// Intertwiner with vanishing shifts and vanishing first columns.
pub struct IntertwinerCondition;

impl Condition for IntertwinerCondition {
    fn name(&self) -> &'static str {
        "vii"
    }

    fn field(&self) -> ReportField {
        ReportField::Vii
    }

    fn evaluate(&self, ctx: &PairContext<'_>) -> Result<Option<bool>> {
        Ok(Some(ctx.vii()?.found()))
    }
}

/// Whether the (VII) intertwiner also fixes the distinguished class.
pub struct Dq1WitnessCondition;

impl Condition for Dq1WitnessCondition {
    fn name(&self) -> &'static str {
        "dq1"
    }

    fn field(&self) -> ReportField {
        ReportField::Dq1Witness
    }

    fn evaluate(&self, ctx: &PairContext<'_>) -> Result<Option<bool>> {
        match &ctx.vii()?.h {
            Some(h) => check_dq1_witness(h).map(Some),
            None => Ok(None),
        }
    }
}

/// Budgeted search over all shift tuples for an intertwiner fixing the
/// distinguished class. Inconclusive (truncated) searches count as skipped.
pub struct ExtendedCondition;

impl Condition for ExtendedCondition {
    fn name(&self) -> &'static str {
        "extended"
    }

    fn field(&self) -> ReportField {
        ReportField::Extended
    }

    fn evaluate(&self, ctx: &PairContext<'_>) -> Result<Option<bool>> {
        let Some(budget) = ctx.budget else {
            return Ok(None);
        };
        let (m, n) = ctx.normalized();
        let (res, log) = exhaustive_dq_search(m, n, ExtendedTarget::Dq1, Some(budget))?;
        if res.found() {
            return Ok(Some(true));
        }
        Ok(if log.truncated { None } else { Some(false) })
    }
}

pub fn conditions() -> Vec<Box<dyn Condition>> {
    vec![
        Box::new(PathLengthCondition),
        Box::new(DistinctGcdCondition),
        Box::new(IntertwinerCondition),
        Box::new(Dq1WitnessCondition),
        Box::new(ExtendedCondition),
    ]
}

pub fn condition(name: &str) -> Option<Box<dyn Condition>> {
    conditions().into_iter().find(|c| c.name() == name)
}

/// Resolves a comma-separated list such as `v,vi,vii`.
pub fn parse_conditions(list: &str) -> Result<Vec<Box<dyn Condition>>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            condition(&s.to_ascii_lowercase())
                .ok_or_else(|| Error::Precondition(format!("unknown condition {s:?}")))
        })
        .collect()
}

/// Verdicts for one pair; `None` marks a check that was not run or skipped.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub pair: (WeightVector, WeightVector),
    pub cond_v: Option<bool>,
    pub cond_vi: Option<bool>,
    pub cond_vii: Option<bool>,
    pub dq1_witness: Option<bool>,
    /// Extended search (ℓ ranging over all shift tuples) fixing the
    /// distinguished class; a witness implies the weaker quadruple condition.
    pub extended_iv: Option<bool>,
    pub pattern: Option<String>,
}

impl ConditionReport {
    pub fn new(m: &WeightVector, n: &WeightVector) -> Self {
        ConditionReport {
            pair: (m.clone(), n.clone()),
            cond_v: None,
            cond_vi: None,
            cond_vii: None,
            dq1_witness: None,
            extended_iv: None,
            pattern: None,
        }
    }

    pub fn set(&mut self, field: ReportField, value: Option<bool>) {
        let slot = match field {
            ReportField::V => &mut self.cond_v,
            ReportField::Vi => &mut self.cond_vi,
            ReportField::Vii => &mut self.cond_vii,
            ReportField::Dq1Witness => &mut self.dq1_witness,
            ReportField::Extended => &mut self.extended_iv,
        };
        *slot = value;
    }

    /// The evaluated main conditions (V), (VI), (VII).
    fn main_verdicts(&self) -> Vec<bool> {
        [self.cond_v, self.cond_vi, self.cond_vii].into_iter().flatten().collect()
    }

    pub fn any_holds(&self) -> bool {
        self.main_verdicts().into_iter().any(|v| v) || self.extended_iv == Some(true)
    }

    /// Some pair of evaluated main conditions disagree.
    pub fn disagreement(&self) -> bool {
        let v = self.main_verdicts();
        v.iter().any(|&x| x != v[0])
    }

    pub fn same_verdicts(&self, other: &ConditionReport) -> bool {
        (self.cond_v, self.cond_vi, self.cond_vii, self.dq1_witness, self.extended_iv)
            == (other.cond_v, other.cond_vi, other.cond_vii, other.dq1_witness, other.extended_iv)
    }
}

/// Evaluates the given checkers on one pair.
pub fn evaluate_pair(
    m: &WeightVector,
    n: &WeightVector,
    checks: &[Box<dyn Condition>],
    budget: Option<u64>,
) -> Result<ConditionReport> {
    m.same_shape(n)?;
    let ctx = PairContext::new(m, n, budget);
    let mut report = ConditionReport::new(m, n);
    for c in checks {
        report.set(c.field(), c.evaluate(&ctx)?);
    }
    Ok(report)
}

/// Full report: (V), (VI), (VII), the class check on the (VII) witness,
/// and the extended search when a budget is given.
pub fn compare_conditions(m: &WeightVector, n: &WeightVector, budget: Option<u64>) -> Result<ConditionReport> {
    evaluate_pair(m, n, &conditions(), budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wv(r: u32, ws: &[i64]) -> WeightVector {
        WeightVector::new(r, ws).unwrap()
    }

    #[test]
    fn normalization_examples() {
        assert_eq!(normalize_weights(&wv(5, &[2, 4, 1])), wv(5, &[1, 2, 3]));
        assert_eq!(normalize_weights(&wv(7, &[1, 3, 5])), wv(7, &[1, 3, 5]));
        let w = wv(7, &[3, 5, 2]);
        for a in units(7) {
            assert_eq!(canonical_weights(&w.scaled(a)), canonical_weights(&w));
        }
    }

    #[test]
    fn normalized_tuple_counts() {
        assert_eq!(normalized_tuples(13, 3).unwrap().len(), 144);
        assert_eq!(normalized_tuples(8, 4).unwrap().len(), 64);
        assert!(normalized_tuples(5, 3).unwrap().iter().all(|w| w.weight(1) == 1));
    }

    #[test]
    fn d3_examples() {
        assert!(decide_d3(&wv(5, &[1, 3]), &wv(5, &[2, 3])).unwrap().equivalent);
        assert!(!decide_d3(&wv(5, &[2, 2]), &wv(5, &[2, 3])).unwrap().equivalent);
        let v = decide_d3(&wv(8, &[1, 5]), &wv(8, &[1, 3])).unwrap();
        assert!(!v.equivalent);
        assert_eq!((v.gcd_m, v.gcd_n), (4, 2));
        assert!(v.certificate.is_none());
    }

    #[test]
    fn d5_examples() {
        assert!(decide_d5_prime(&wv(7, &[1, 2, 3]), &wv(7, &[1, 4, 6])).unwrap());
        assert!(decide_d5_prime(&wv(5, &[1, 1, 2]), &wv(5, &[2, 2, 4])).unwrap());
        assert!(!decide_d5_prime(&wv(5, &[1, 1, 2]), &wv(5, &[1, 2, 2])).unwrap());
        assert!(!solve_condition_vii(&wv(5, &[1, 1, 2]), &wv(5, &[1, 2, 2])).unwrap().found());
        let err = decide_d5_prime(&wv(8, &[1, 3, 5]), &wv(8, &[1, 5, 3])).unwrap_err();
        assert!(err.to_string().contains("theorem scope"));
    }

    #[test]
    fn registry_lookup() {
        let names: Vec<_> = parse_conditions("v, vi,VII").unwrap().iter().map(|c| c.name()).collect();
        assert_eq!(names, ["v", "vi", "vii"]);
        assert!(parse_conditions("v,ix").is_err());
    }

    #[test]
    fn discrepancy_reports() {
        let r = compare_conditions(&wv(5, &[1, 2, 3, 1]), &wv(5, &[1, 3, 2, 1]), None).unwrap();
        assert_eq!((r.cond_vii, r.cond_vi), (Some(true), Some(false)));
        let r = compare_conditions(&wv(5, &[1, 2, 3, 4]), &wv(5, &[1, 2, 4, 3]), None).unwrap();
        assert_eq!((r.cond_vii, r.cond_v), (Some(true), Some(false)));
        assert_eq!(r.extended_iv, None);
        assert!(r.disagreement());
    }
}
