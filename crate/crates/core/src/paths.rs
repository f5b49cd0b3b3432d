//! Admissible generator paths between levels, their length multisets `W`
//! and `W̄`, and a transfer-matrix counter for `W̄`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightVector;
use crate::residue::{gcd_mod, inv_mod, reduce};

/// A path that loops `loop_counts[p]` times at level `chain[p]` and jumps
/// once between consecutive chain levels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AdmissiblePath {
    pub chain: Vec<usize>,
    pub loop_counts: Vec<u32>,
}

impl AdmissiblePath {
    pub fn length(&self) -> u64 {
        self.loop_counts.iter().map(|&t| u64::from(t)).sum::<u64>() + self.chain.len() as u64 - 1
    }

    /// `m_{i_1}(t_1 + 1) + ... + m_{i_l} t_l`, zero mod `r` for a genuine path.
    pub fn weighted_sum(&self, w: &WeightVector) -> u32 {
        let last = self.chain.len() - 1;
        let total: i64 = self
            .chain
            .iter()
            .zip(&self.loop_counts)
            .enumerate()
            .map(|(p, (&lvl, &t))| {
                let steps = if p == last { i64::from(t) } else { i64::from(t) + 1 };
                i64::from(w.weight(lvl)) * steps
            })
            .sum();
        reduce(total, w.r())
    }

    /// Residues visited by the lift to `E_{r;m}` starting at `(v_{i_1}, 0)`,
    /// as `(level, residue)` per edge endpoint.
    pub fn lift(&self, w: &WeightVector) -> Vec<(usize, u32)> {
        let r = w.r();
        let mut cur = 0u32;
        let mut out = vec![(self.chain[0], 0)];
        for (p, (&lvl, &t)) in self.chain.iter().zip(&self.loop_counts).enumerate() {
            let m = w.weight(lvl);
            for _ in 0..t {
                cur = (cur + m) % r;
                out.push((lvl, cur));
            }
            if let Some(&next) = self.chain.get(p + 1) {
                cur = (cur + m) % r;
                out.push((next, cur));
            }
        }
        out
    }
}

/// Per-pair residue counts (`W̄`), optionally with the raw lengths (`W`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathMultiset {
    pub r: u32,
    pub pairs: BTreeMap<(usize, usize), Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub raw_lengths: Option<BTreeMap<(usize, usize), Vec<u64>>>,
}

impl PathMultiset {
    pub fn counts(&self, s: usize, t: usize) -> Option<&[u64]> {
        self.pairs.get(&(s, t)).map(Vec::as_slice)
    }

    /// Equality of the residue counts only.
    pub fn same_residues(&self, other: &PathMultiset) -> bool {
        self.r == other.r && self.pairs == other.pairs
    }

    /// Pairs in lexicographic order, each with its `r` counts.
    pub fn to_json(&self) -> serde_json::Value {
        let pairs: Vec<_> = self
            .pairs
            .iter()
            .map(|(&(s, t), c)| serde_json::json!({ "s": s, "t": t, "counts": c }))
            .collect();
        serde_json::json!({ "r": self.r, "pairs": pairs })
    }
}

fn check_pair(w: &WeightVector, s: usize, t: usize) -> Result<()> {
    if s == 0 || s >= t || t > w.levels() {
        return Err(Error::LevelPair { s, t, levels: w.levels() });
    }
    Ok(())
}

/// Least `u >= 1` with `e + u m = 0`, or `r` when `e = 0`.
fn first_zero(e: u32, m: u32, r: u32) -> u32 {
    if e == 0 {
        return r;
    }
    let minv = inv_mod(i64::from(m), r).expect("weights are units");
    reduce(-i64::from(e) * i64::from(minv), r)
}

/// Loops at the end level needed to return to residue 0 from `e`.
fn closing_loops(e: u32, m: u32, r: u32) -> u32 {
    if e == 0 {
        0
    } else {
        first_zero(e, m, r)
    }
}

/// All admissible paths from level `s` to level `t`, in lexicographic order
/// of `(chain, loop_counts)`.
pub fn enumerate_admissible(w: &WeightVector, s: usize, t: usize) -> Result<Vec<AdmissiblePath>> {
    check_pair(w, s, t)?;
    let mut out = Vec::new();
    let mut chain = vec![s];
    let mut loops = Vec::new();
    extend_paths(w, t, 0, true, &mut chain, &mut loops, &mut out);
    out.sort();
    Ok(out)
}

fn extend_paths(
    w: &WeightVector,
    target: usize,
    entry: u32,
    at_start: bool,
    chain: &mut Vec<usize>,
    loops: &mut Vec<u32>,
    out: &mut Vec<AdmissiblePath>,
) {
    let r = w.r();
    let level = *chain.last().expect("non-empty chain");
    let m = w.weight(level);
    if level == target {
        loops.push(closing_loops(entry, m, r));
        out.push(AdmissiblePath { chain: chain.clone(), loop_counts: loops.clone() });
        loops.pop();
        return;
    }
    if !at_start && entry == 0 {
        return;
    }
    let bound = if at_start { r } else { first_zero(entry, m, r) };
    for u in 0..bound {
        let next_entry = reduce(i64::from(entry) + i64::from(u + 1) * i64::from(m), r);
        loops.push(u);
        for next in level + 1..=target {
            chain.push(next);
            extend_paths(w, target, next_entry, false, chain, loops, out);
            chain.pop();
        }
        loops.pop();
    }
}

fn residue_counts(r: u32, lengths: impl IntoIterator<Item = u64>) -> Vec<u64> {
    let mut counts = vec![0u64; r as usize];
    for l in lengths {
        counts[(l % u64::from(r)) as usize] += 1;
    }
    counts
}

/// Length-residue counts for one level pair.
pub trait PathCounter: Send + Sync {
    fn name(&self) -> &'static str;
    fn count(&self, w: &WeightVector, s: usize, t: usize) -> Result<Vec<u64>>;
}

/// Counts by listing every admissible path.
pub struct EnumerationCounter;

impl PathCounter for EnumerationCounter {
    fn name(&self) -> &'static str {
        "enumerate"
    }

    fn count(&self, w: &WeightVector, s: usize, t: usize) -> Result<Vec<u64>> {
        let paths = enumerate_admissible(w, s, t)?;
        Ok(residue_counts(w.r(), paths.iter().map(AdmissiblePath::length)))
    }
}

/// Counts by composing per-level transfer matrices over `Z[x]/(x^r - 1)`.
pub struct TransferCounter;

impl PathCounter for TransferCounter {
    fn name(&self) -> &'static str {
        "transfer"
    }

    fn count(&self, w: &WeightVector, s: usize, t: usize) -> Result<Vec<u64>> {
        transfer_count(w, s, t)
    }
}

pub fn path_counters() -> Vec<Box<dyn PathCounter>> {
    vec![Box::new(EnumerationCounter), Box::new(TransferCounter)]
}

pub fn path_counter(name: &str) -> Option<Box<dyn PathCounter>> {
    path_counters().into_iter().find(|c| c.name() == name)
}

/// `r x r` matrix of polynomials mod `x^r - 1`; `entry(a, b)[d]` counts
/// moves from residue `a` to residue `b` of length `d` mod `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct PolyMatrix {
    r: usize,
    data: Vec<u64>,
}

impl PolyMatrix {
    fn zero(r: usize) -> Self {
        PolyMatrix { r, data: vec![0; r * r * r] }
    }

    fn slot(&self, a: usize, b: usize, d: usize) -> usize {
        (a * self.r + b) * self.r + d
    }

    fn add_monomial(&mut self, a: usize, b: usize, d: usize) {
        let i = self.slot(a, b, d % self.r);
        self.data[i] += 1;
    }

    /// Row vector of polynomials times this matrix.
    fn apply(&self, v: &[Vec<u64>]) -> Vec<Vec<u64>> {
        let r = self.r;
        let mut out = vec![vec![0u64; r]; r];
        for (a, pa) in v.iter().enumerate() {
            if pa.iter().all(|&c| c == 0) {
                continue;
            }
            for (b, ob) in out.iter_mut().enumerate() {
                let base = self.slot(a, b, 0);
                let poly = &self.data[base..base + r];
                if poly.iter().all(|&c| c == 0) {
                    continue;
                }
                for (i, &ca) in pa.iter().enumerate() {
                    if ca == 0 {
                        continue;
                    }
                    for (j, &cb) in poly.iter().enumerate() {
                        ob[(i + j) % r] += ca * cb;
                    }
                }
            }
        }
        out
    }
}

/// Loop-then-jump matrix of a level: from entry residue `e`, loop `u` times
/// while avoiding residue 0 (unless `start`), then take one jump edge.
fn level_transfer(r: u32, m: u32, start: bool) -> PolyMatrix {
    let mut mat = PolyMatrix::zero(r as usize);
    for e in 0..r {
        let bound = match (start, e) {
            (true, 0) => r,
            (true, _) => 0,
            (false, 0) => 0,
            (false, _) => first_zero(e, m, r),
        };
        for u in 0..bound {
            let b = reduce(i64::from(e) + i64::from(u + 1) * i64::from(m), r);
            mat.add_monomial(e as usize, b as usize, (u + 1) as usize);
        }
    }
    mat
}

/// `W̄` counts for the pair `(s, t)` by transfer matrices.
pub fn transfer_count(w: &WeightVector, s: usize, t: usize) -> Result<Vec<u64>> {
    check_pair(w, s, t)?;
    let r = w.r() as usize;
    // arriving[j]: polynomials indexed by entry residue at level j
    let mut arriving = vec![vec![vec![0u64; r]; r]; t + 1];
    arriving[s][0][0] = 1;
    for level in s..t {
        let mat = level_transfer(w.r(), w.weight(level), level == s);
        let out = mat.apply(&arriving[level]);
        for slot in arriving.iter_mut().take(t + 1).skip(level + 1) {
            for (acc, add) in slot.iter_mut().zip(&out) {
                for (a, b) in acc.iter_mut().zip(add) {
                    *a += b;
                }
            }
        }
    }
    let mt = w.weight(t);
    let mut counts = vec![0u64; r];
    for (e, poly) in arriving[t].iter().enumerate() {
        let close = closing_loops(e as u32, mt, w.r()) as usize;
        for (d, &c) in poly.iter().enumerate() {
            counts[(d + close) % r] += c;
        }
    }
    Ok(counts)
}

/// `{g j : j = 0..r/g}`, each `g` times, `g = gcd(m2 - m1, r)`.
pub fn pair_multiset_closed_form(r: u32, m1: u32, m2: u32) -> Result<PathMultiset> {
    let w = WeightVector::from_units(r, &[m1, m2])?;
    let g = gcd_mod(i64::from(w.weight(2)) - i64::from(w.weight(1)), r);
    let mut counts = vec![0u64; r as usize];
    for j in (0..r).step_by(g as usize) {
        counts[j as usize] = u64::from(g);
    }
    Ok(PathMultiset { r, pairs: BTreeMap::from([((1, 2), counts)]), raw_lengths: None })
}

/// `W̄(r; m)` with the given counter; raw lengths are kept when `k = 1`.
pub fn multiset_wbar_with(w: &WeightVector, counter: &dyn PathCounter) -> Result<PathMultiset> {
    let pairs: Vec<(usize, usize)> = (1..=w.levels())
        .flat_map(|s| (s + 1..=w.levels()).map(move |t| (s, t)))
        .collect();
    let counted = pairs
        .par_iter()
        .map(|&(s, t)| counter.count(w, s, t).map(|c| ((s, t), c)))
        .collect::<Result<Vec<_>>>()?;
    let raw_lengths = if w.k() == 1 {
        let mut lengths: Vec<u64> =
            enumerate_admissible(w, 1, 2)?.iter().map(AdmissiblePath::length).collect();
        lengths.sort_unstable();
        Some(BTreeMap::from([((1, 2), lengths)]))
    } else {
        None
    };
    Ok(PathMultiset { r: w.r(), pairs: counted.into_iter().collect(), raw_lengths })
}

pub fn multiset_wbar(w: &WeightVector) -> Result<PathMultiset> {
    multiset_wbar_with(w, &TransferCounter)
}

pub fn wbar_equal(m: &WeightVector, n: &WeightVector) -> Result<bool> {
    m.same_shape(n)?;
    Ok(multiset_wbar(m)?.same_residues(&multiset_wbar(n)?))
}

/// Loops at the middle of a three-level path: `t2'` to reach 0 from the
/// entry, `t2''` needed after it, `t2 = t2' + t2''` mod `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriplePathDecomposition {
    pub t2_first: u32,
    pub t2_second: u32,
    pub t2: u32,
    pub admissible: bool,
}

pub fn triple_decompose(w: &WeightVector, t1: u32, t3: u32) -> Result<TriplePathDecomposition> {
    if w.levels() != 3 {
        return Err(Error::Precondition(format!(
            "triple decomposition needs three weights, got {}",
            w.levels()
        )));
    }
    let r = w.r();
    if t1 >= r || t3 >= r {
        return Err(Error::Precondition(format!("loop counts must lie in 0..{r}")));
    }
    let (m1, m2, m3) = (i64::from(w.weight(1)), i64::from(w.weight(2)), i64::from(w.weight(3)));
    let m2inv = i64::from(inv_mod(m2, r)?);
    let t2_first = reduce(-m2inv * m1 * (i64::from(t1) + 1), r);
    let t2_second = reduce(-m2inv * m3 * i64::from(t3) - 1, r);
    let sum = t2_first + t2_second;
    Ok(TriplePathDecomposition {
        t2_first,
        t2_second,
        t2: sum % r,
        admissible: sum >= r,
    })
}

/// Lengths of the pair paths indexed by the loop count `t1` at the first level.
pub fn pair_path_lengths(r: u32, m1: u32, m2: u32) -> Result<Vec<u64>> {
    let m2inv = i64::from(inv_mod(i64::from(m2), r)?);
    Ok((0..r)
        .map(|t1| {
            let t2 = reduce(-m2inv * i64::from(m1) * (i64::from(t1) + 1), r);
            u64::from(t1) + u64::from(t2) + 1
        })
        .collect())
}

/// One entry of a length-matching bijection between generator paths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathPairing {
    pub source: AdmissiblePath,
    pub target: AdmissiblePath,
    /// `(|source| - |target|) / r`.
    pub shift: i64,
}

/// Pairs the generator paths of `m` and `n` (both with `k = 1`) so that
/// lengths agree mod `r`.
pub fn d3_certificate(m: &WeightVector, n: &WeightVector) -> Result<Vec<PathPairing>> {
    m.same_shape(n)?;
    if m.k() != 1 {
        return Err(Error::Precondition("pairings are defined for k = 1".into()));
    }
    let r = u64::from(m.r());
    let mut by_residue: BTreeMap<u64, (Vec<AdmissiblePath>, Vec<AdmissiblePath>)> = BTreeMap::new();
    for p in enumerate_admissible(m, 1, 2)? {
        by_residue.entry(p.length() % r).or_default().0.push(p);
    }
    for p in enumerate_admissible(n, 1, 2)? {
        by_residue.entry(p.length() % r).or_default().1.push(p);
    }
    let mut out = Vec::new();
    for (_, (mut left, mut right)) in by_residue {
        if left.len() != right.len() {
            return Err(Error::NoEquivariantPairing);
        }
        left.sort_by_key(|p| (p.length(), p.loop_counts.clone()));
        right.sort_by_key(|p| (p.length(), p.loop_counts.clone()));
        for (a, b) in left.into_iter().zip(right) {
            let shift = (a.length() as i64 - b.length() as i64) / r as i64;
            out.push(PathPairing { source: a, target: b, shift });
        }
    }
    out.sort_by(|a, b| a.source.cmp(&b.source));
    Ok(out)
}
