//! The graphs `L_{2k+1}`, the skew product `E_{r;m}`, finite truncations of
//! the translation graph `F_{r;m}`, and the level/residue posets whose Hasse
//! diagrams describe the gauge-invariant ideals.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::residue::{gcd_mod, reduce, Unit};

/// The parameters `(r; m_1, ..., m_{k+1})`, every weight a unit mod `r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WeightVector {
    r: u32,
    weights: Vec<u32>,
}

impl WeightVector {
    /// Reduces every weight mod `r` and checks it is a unit.
    pub fn new(r: u32, weights: &[i64]) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::TooFewWeights(weights.len()));
        }
        let weights = weights
            .iter()
            .map(|&m| Unit::new(m, r).map(Unit::value))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(WeightVector { r, weights })
    }

    pub fn from_units(r: u32, weights: &[u32]) -> Result<Self> {
        let ws: Vec<i64> = weights.iter().map(|&w| i64::from(w)).collect();
        WeightVector::new(r, &ws)
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// `k`, so that the sphere has dimension `2k+1`.
    pub fn k(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn levels(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    /// Weight at a 1-based level.
    pub fn weight(&self, level: usize) -> u32 {
        self.weights[level - 1]
    }

    pub fn scaled(&self, alpha: u32) -> WeightVector {
        let weights = self
            .weights
            .iter()
            .map(|&m| reduce(i64::from(m) * i64::from(alpha), self.r))
            .collect();
        WeightVector { r: self.r, weights }
    }

    pub fn is_unit_multiple_of(&self, other: &WeightVector) -> bool {
        self.r == other.r
            && self.levels() == other.levels()
            && crate::residue::units(self.r).into_iter().any(|a| other.scaled(a) == *self)
    }

    pub fn distinct_count(&self) -> usize {
        self.weights.iter().collect::<BTreeSet<_>>().len()
    }

    /// Flat basis index `(level - 1) * r + residue`.
    pub fn flat_index(&self, level: usize, residue: u32) -> usize {
        (level - 1) * self.r as usize + residue as usize
    }

    pub fn same_shape(&self, other: &WeightVector) -> Result<()> {
        if self.r != other.r || self.levels() != other.levels() {
            return Err(Error::ShapeMismatch {
                left_r: self.r,
                left_len: self.levels(),
                right_r: other.r,
                right_len: other.levels(),
            });
        }
        Ok(())
    }

    fn check_vertex(&self, v: SkewVertex) -> Result<()> {
        if v.level == 0 || v.level > self.levels() || v.residue >= self.r {
            return Err(Error::BadVertex {
                level: v.level,
                residue: v.residue,
                r: self.r,
                levels: self.levels(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};(", self.r)?;
        for (i, m) in self.weights.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str(")")
    }
}

/// A vertex `(v_level, residue)` of `E_{r;m}`, equally an element `(i, j)`
/// of the poset `P(r;m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SkewVertex {
    pub level: usize,
    pub residue: u32,
}

impl SkewVertex {
    pub fn new(level: usize, residue: u32) -> Self {
        SkewVertex { level, residue }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub range: usize,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DirectedGraph {
    pub name: String,
    pub vertices: Vec<String>,
    pub edges: Vec<Edge>,
}

impl DirectedGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn out_edges(&self, v: usize) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.source == v)
    }
}

/// `L_{2k+1}`: vertices `v_1..v_{k+1}`, an edge `e_ij` for every `i <= j`.
pub fn build_sphere_graph(k: usize) -> Result<DirectedGraph> {
    if k == 0 {
        return Err(Error::TooFewWeights(1));
    }
    let vertices = (1..=k + 1).map(|i| format!("v{i}")).collect();
    let mut edges = Vec::new();
    for i in 1..=k + 1 {
        for j in i..=k + 1 {
            edges.push(Edge { source: i - 1, range: j - 1, label: format!("e{i}{j}") });
        }
    }
    Ok(DirectedGraph { name: format!("L{}", 2 * k + 1), vertices, edges })
}

/// The skew product `E_{r;m}`; vertex `(v_i, l)` sits at the flat index.
/// Edge `(e_ij, l)` runs from `(v_i, l - m_i)` to `(v_j, l)`.
pub fn build_skew_product(w: &WeightVector) -> DirectedGraph {
    let r = w.r();
    let mut vertices = Vec::with_capacity(w.levels() * r as usize);
    for i in 1..=w.levels() {
        for l in 0..r {
            vertices.push(format!("(v{i},{l})"));
        }
    }
    let mut edges = Vec::new();
    for i in 1..=w.levels() {
        for j in i..=w.levels() {
            for l in 0..r {
                let src = reduce(i64::from(l) - i64::from(w.weight(i)), r);
                edges.push(Edge {
                    source: w.flat_index(i, src),
                    range: w.flat_index(j, l),
                    label: format!("(e{i}{j},{l})"),
                });
            }
        }
    }
    DirectedGraph { name: format!("E_{w}"), vertices, edges }
}

/// The orbit of residue 0 under repeated `+m_level`; a single cycle covers all of `Z/r`.
pub fn level_cycle(w: &WeightVector, level: usize) -> Vec<u32> {
    let step = w.weight(level);
    let mut orbit = vec![0u32];
    let mut cur = step % w.r();
    while cur != 0 {
        orbit.push(cur);
        cur = (cur + step) % w.r();
    }
    orbit
}

/// `gcd(m_{i+1} - m_i, r)` for `i = 1..k`; equal chains is equivalent to
/// isomorphic ideal lattices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IdealLatticeInvariant {
    pub gcd_chain: Vec<u32>,
}

pub fn ideal_invariant(w: &WeightVector) -> IdealLatticeInvariant {
    let gcd_chain = w
        .weights()
        .windows(2)
        .map(|p| gcd_mod(i64::from(p[1]) - i64::from(p[0]), w.r()))
        .collect();
    IdealLatticeInvariant { gcd_chain }
}

/// `a ⪰ b` in `P(r;m)`.
///
/// Chains through consecutive levels generate the reflexive-transitive
/// closure, so `(i, j) ⪰ (i', j')` for `i < i'` exactly when
/// `gcd(r, d_i, ..., d_{i'-1})` divides `j' - j`.
pub fn dominates(w: &WeightVector, a: SkewVertex, b: SkewVertex) -> Result<bool> {
    w.check_vertex(a)?;
    w.check_vertex(b)?;
    Ok(dominates_unchecked(w, a, b))
}

pub(crate) fn dominates_unchecked(w: &WeightVector, a: SkewVertex, b: SkewVertex) -> bool {
    if a == b {
        return true;
    }
    if a.level >= b.level {
        return false;
    }
    let g = level_span_gcd(w, a.level, b.level);
    (i64::from(b.residue) - i64::from(a.residue)).rem_euclid(i64::from(g)) == 0
}

/// `gcd(r, m_{s+1} - m_s, ..., m_t - m_{t-1})`.
pub fn level_span_gcd(w: &WeightVector, s: usize, t: usize) -> u32 {
    let mut g = i64::from(w.r());
    for i in s..t {
        g = num_integer::gcd(g, i64::from(w.weight(i + 1)) - i64::from(w.weight(i)));
    }
    g as u32
}

/// `P(r;m)` or its down-set `P_0(r;m)` generated by the `(i, 0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelResiduePoset {
    weights: WeightVector,
    elements: Vec<SkewVertex>,
}

impl LevelResiduePoset {
    pub fn full(w: &WeightVector) -> Self {
        let elements = (1..=w.levels())
            .flat_map(|i| (0..w.r()).map(move |j| SkewVertex::new(i, j)))
            .collect();
        LevelResiduePoset { weights: w.clone(), elements }
    }

    pub fn weights(&self) -> &WeightVector {
        &self.weights
    }

    pub fn elements(&self) -> &[SkewVertex] {
        &self.elements
    }

    pub fn contains(&self, v: SkewVertex) -> bool {
        self.elements.binary_search(&v).is_ok()
    }

    pub fn dominates(&self, a: SkewVertex, b: SkewVertex) -> bool {
        dominates_unchecked(&self.weights, a, b)
    }

    pub fn level_slice(&self, level: usize) -> Vec<u32> {
        self.elements.iter().filter(|v| v.level == level).map(|v| v.residue).collect()
    }

    /// Covering relations; they only join consecutive levels.
    pub fn hasse_edges(&self) -> Vec<(SkewVertex, SkewVertex)> {
        let mut edges = Vec::new();
        for &a in &self.elements {
            for &b in &self.elements {
                if b.level == a.level + 1 && self.dominates(a, b) {
                    edges.push((a, b));
                }
            }
        }
        edges
    }

    /// Elements at `level + 1` covered by `v`.
    pub fn lower_covers(&self, v: SkewVertex) -> Vec<SkewVertex> {
        self.elements
            .iter()
            .copied()
            .filter(|&b| b.level == v.level + 1 && self.dominates(v, b))
            .collect()
    }
}

/// `P_0(r;m)`: everything dominated by some `(i, 0)`.
pub fn build_poset0(w: &WeightVector) -> LevelResiduePoset {
    let tops: Vec<SkewVertex> = (1..=w.levels()).map(|i| SkewVertex::new(i, 0)).collect();
    let elements = (1..=w.levels())
        .flat_map(|i| (0..w.r()).map(move |j| SkewVertex::new(i, j)))
        .filter(|&v| tops.iter().any(|&t| dominates_unchecked(w, t, v)))
        .collect();
    LevelResiduePoset { weights: w.clone(), elements }
}

/// A vertex `((v_level, residue), coord)` of `E_{r;m} x_1 Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TranslationVertex {
    pub level: usize,
    pub residue: u32,
    pub coord: usize,
}

/// A finite piece of `F_{r;m}`: translation coordinates `0..=depth`.
#[derive(Debug, Clone)]
pub struct TranslationGraph {
    weights: WeightVector,
    depth: usize,
    vertices: Vec<TranslationVertex>,
    edges: Vec<(usize, usize)>,
}

impl TranslationGraph {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn vertices(&self) -> &[TranslationVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Indices `j` of the periodic lines present at `level`; the line through
    /// `((v_i, a), n)` meets coordinate 0 at `a - n m_i`.
    pub fn periodic_lines(&self, level: usize) -> BTreeSet<u32> {
        self.vertices
            .iter()
            .filter(|v| v.level == level)
            .map(|v| line_index(&self.weights, *v))
            .collect()
    }

    pub fn to_directed_graph(&self) -> DirectedGraph {
        DirectedGraph {
            name: format!("F_{}", self.weights),
            vertices: self
                .vertices
                .iter()
                .map(|v| format!("((v{},{}),{})", v.level, v.residue, v.coord))
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|&(s, t)| Edge { source: s, range: t, label: String::new() })
                .collect(),
        }
    }
}

fn line_index(w: &WeightVector, v: TranslationVertex) -> u32 {
    reduce(
        i64::from(v.residue) - (v.coord as i64) * i64::from(w.weight(v.level)),
        w.r(),
    )
}

/// Default truncation depth.
pub fn default_depth(w: &WeightVector) -> usize {
    w.r() as usize + w.levels()
}

/// Forward closure of `starts` in `E_{r;m} x_1 Z` up to coordinate `depth`.
fn translation_closure(
    w: &WeightVector,
    starts: &[TranslationVertex],
    depth: usize,
) -> TranslationGraph {
    let r = w.r() as usize;
    let levels = w.levels();
    let key = |v: &TranslationVertex| (v.coord * levels + v.level - 1) * r + v.residue as usize;
    let mut index = vec![usize::MAX; (depth + 1) * levels * r];
    let mut vertices = Vec::new();
    let mut queue = VecDeque::new();
    for &s in starts {
        if index[key(&s)] == usize::MAX {
            index[key(&s)] = vertices.len();
            vertices.push(s);
            queue.push_back(s);
        }
    }
    let mut edges = Vec::new();
    while let Some(v) = queue.pop_front() {
        if v.coord == depth {
            continue;
        }
        let residue = reduce(i64::from(v.residue) + i64::from(w.weight(v.level)), w.r());
        for j in v.level..=levels {
            let u = TranslationVertex { level: j, residue, coord: v.coord + 1 };
            let slot = key(&u);
            if index[slot] == usize::MAX {
                index[slot] = vertices.len();
                vertices.push(u);
                queue.push_back(u);
            }
            edges.push((index[key(&v)], index[slot]));
        }
    }
    TranslationGraph { weights: w.clone(), depth, vertices, edges }
}

/// The hereditary subgraph generated by the `((v_i, 0), 0)`, cut at `depth`.
pub fn build_truncated_translation(w: &WeightVector, depth: usize) -> Result<TranslationGraph> {
    if depth < w.levels() {
        return Err(Error::DepthTooSmall { depth, min: w.levels() });
    }
    let starts: Vec<_> = (1..=w.levels())
        .map(|i| TranslationVertex { level: i, residue: 0, coord: 0 })
        .collect();
    Ok(translation_closure(w, &starts, depth))
}

/// Periodic lines reachable from the line through `((v_i, j), 0)` by explicit search.
pub fn reachable_lines(
    w: &WeightVector,
    start: SkewVertex,
    depth: usize,
) -> Result<BTreeSet<SkewVertex>> {
    w.check_vertex(start)?;
    let s = TranslationVertex { level: start.level, residue: start.residue, coord: 0 };
    let g = translation_closure(w, &[s], depth);
    Ok(g
        .vertices
        .iter()
        .map(|&v| SkewVertex::new(v.level, line_index(w, v)))
        .collect())
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Deterministic DOT text; edges sorted by endpoints then label.
pub fn export_dot(graph: &DirectedGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", dot_escape(&graph.name));
    for v in &graph.vertices {
        let _ = writeln!(out, "  \"{}\";", dot_escape(v));
    }
    let mut edges: Vec<&Edge> = graph.edges.iter().collect();
    edges.sort_by(|a, b| (a.source, a.range, &a.label).cmp(&(b.source, b.range, &b.label)));
    for e in edges {
        let src = dot_escape(&graph.vertices[e.source]);
        let dst = dot_escape(&graph.vertices[e.range]);
        if e.label.is_empty() {
            let _ = writeln!(out, "  \"{src}\" -> \"{dst}\";");
        } else {
            let _ = writeln!(out, "  \"{src}\" -> \"{dst}\" [label=\"{}\"];", dot_escape(&e.label));
        }
    }
    out.push_str("}\n");
    out
}

/// The Hasse diagram of a poset, drawn top-down.
pub fn hasse_graph(poset: &LevelResiduePoset) -> DirectedGraph {
    let vertices: Vec<String> = poset
        .elements()
        .iter()
        .map(|v| format!("({},{})", v.level, v.residue))
        .collect();
    let position = |v: SkewVertex| poset.elements().binary_search(&v).expect("element of poset");
    let edges = poset
        .hasse_edges()
        .into_iter()
        .map(|(a, b)| Edge { source: position(a), range: position(b), label: String::new() })
        .collect();
    DirectedGraph { name: format!("P0_{}", poset.weights()), vertices, edges }
}
