//! Integer matrices for the dimension triple: shifts `S`, permutations
//! `P_α`, the translation matrix `B[r;m]`, the Δ-vector, the γ counting
//! function and the `~` classes of Δ-vectors.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{dominates_unchecked, SkewVertex, WeightVector};
use crate::residue::{inv_mod, is_prime, reduce};

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Ok(IntMatrix { rows: rows.len(), cols, data: rows.concat() })
    }

    /// `S^e` on `Z^r`: `S e_i = e_{i-1}`.
    pub fn shift(r: u32, e: i64) -> Self {
        let n = r as usize;
        let mut m = IntMatrix::zeros(n, n);
        for col in 0..r {
            m.set(shift_apply(e, col, r) as usize, col as usize, 1);
        }
        m
    }

    /// `P_α`: `P_α e_i = e_{αi}`.
    pub fn perm(r: u32, alpha: i64) -> Self {
        let n = r as usize;
        let mut m = IntMatrix::zeros(n, n);
        for col in 0..r {
            m.set(perm_apply(alpha, col, r) as usize, col as usize, 1);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] += v;
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.data.chunks(self.cols.max(1)).map(<[i64]>::to_vec).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b != 0 {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[i64]) -> Result<Vec<i64>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!("vector of length {} for {} columns", v.len(), self.cols)));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * v[j]).sum())
            .collect())
    }

    fn zip_with(&self, other: &IntMatrix, f: impl Fn(i64, i64) -> i64) -> Result<IntMatrix> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::Dimension("shapes differ".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(IntMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn add(&self, other: &IntMatrix) -> Result<IntMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &IntMatrix) -> Result<IntMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn neg(&self) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x).collect() }
    }

    /// Exact determinant by fraction-free elimination.
    pub fn determinant(&self) -> Result<i128> {
        if self.rows != self.cols {
            return Err(Error::Dimension("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a: Vec<Vec<i128>> =
            (0..n).map(|i| (0..n).map(|j| i128::from(self.get(i, j))).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&i| a[i][k] != 0) {
                    Some(p) => {
                        a.swap(k, p);
                        sign = -sign;
                    }
                    None => return Ok(0),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
                a[i][k] = 0;
            }
            prev = a[k][k];
        }
        Ok(sign * if n == 0 { 1 } else { a[n - 1][n - 1] })
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_rows() {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:>3}")).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// `S^e e_i = e_{i-e}`.
pub fn shift_apply(e: i64, i: u32, r: u32) -> u32 {
    reduce(i64::from(i) - e, r)
}

/// `P_α e_i = e_{αi}`.
pub fn perm_apply(alpha: i64, i: u32, r: u32) -> u32 {
    reduce(alpha * i64::from(i), r)
}

/// A `(k+1) x (k+1)` grid of `r x r` blocks; basis vector `(i, j)` sits at
/// flat index `(i-1) r + j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockIntegerMatrix {
    levels: usize,
    r: u32,
    blocks: Vec<IntMatrix>,
}

impl BlockIntegerMatrix {
    pub fn zeros(levels: usize, r: u32) -> Self {
        let n = r as usize;
        BlockIntegerMatrix { levels, r, blocks: vec![IntMatrix::zeros(n, n); levels * levels] }
    }

    pub fn identity(levels: usize, r: u32) -> Self {
        let mut m = BlockIntegerMatrix::zeros(levels, r);
        for c in 1..=levels {
            m.set_block(c, c, IntMatrix::identity(r as usize));
        }
        m
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// Block at 1-based block coordinates.
    pub fn block(&self, a: usize, b: usize) -> &IntMatrix {
        &self.blocks[(a - 1) * self.levels + b - 1]
    }

    pub fn set_block(&mut self, a: usize, b: usize, m: IntMatrix) {
        let idx = (a - 1) * self.levels + b - 1;
        self.blocks[idx] = m;
    }

    pub fn is_lower_triangular(&self) -> bool {
        (1..=self.levels).all(|a| (a + 1..=self.levels).all(|b| self.block(a, b).is_zero()))
    }

    pub fn to_dense(&self) -> IntMatrix {
        let r = self.r as usize;
        let n = self.levels * r;
        let mut out = IntMatrix::zeros(n, n);
        for a in 1..=self.levels {
            for b in 1..=self.levels {
                let blk = self.block(a, b);
                for i in 0..r {
                    for j in 0..r {
                        out.set((a - 1) * r + i, (b - 1) * r + j, blk.get(i, j));
                    }
                }
            }
        }
        out
    }

    pub fn from_dense(levels: usize, r: u32, dense: &IntMatrix) -> Result<Self> {
        let n = levels * r as usize;
        if dense.rows() != n || dense.cols() != n {
            return Err(Error::Dimension(format!("expected {n}x{n}")));
        }
        let ru = r as usize;
        let mut out = BlockIntegerMatrix::zeros(levels, r);
        for a in 1..=levels {
            for b in 1..=levels {
                let mut blk = IntMatrix::zeros(ru, ru);
                for i in 0..ru {
                    for j in 0..ru {
                        blk.set(i, j, dense.get((a - 1) * ru + i, (b - 1) * ru + j));
                    }
                }
                out.set_block(a, b, blk);
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &BlockIntegerMatrix) -> Result<BlockIntegerMatrix> {
        if self.levels != other.levels || self.r != other.r {
            return Err(Error::Dimension("block shapes differ".into()));
        }
        let dense = self.to_dense().mul(&other.to_dense())?;
        BlockIntegerMatrix::from_dense(self.levels, self.r, &dense)
    }

    pub fn apply(&self, v: &[i64]) -> Result<Vec<i64>> {
        self.to_dense().apply(v)
    }

    /// Nested integer rows of the dense matrix.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self.to_dense().to_rows())
    }
}

/// How the sub-diagonal blocks of `B[r;m]` are filled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum TranslationForm {
    /// Every block left of the diagonal in row `a` is `-S^{m_a}`.
    #[default]
    Full,
    /// Only the block directly left of the diagonal is `-S^{m_a}`.
    Bidiagonal,
}

/// `B[r;m]` in the default form.
pub fn build_b(w: &WeightVector) -> BlockIntegerMatrix {
    build_b_with(w, TranslationForm::default())
}

pub fn build_b_with(w: &WeightVector, form: TranslationForm) -> BlockIntegerMatrix {
    let r = w.r();
    let mut b = BlockIntegerMatrix::zeros(w.levels(), r);
    for a in 1..=w.levels() {
        let s = IntMatrix::shift(r, i64::from(w.weight(a)));
        let first = match form {
            TranslationForm::Full => 1,
            TranslationForm::Bidiagonal => a.max(2) - 1,
        };
        for col in first..a {
            b.set_block(a, col, s.neg());
        }
        b.set_block(a, a, s);
    }
    b
}

/// `Δ(Z)_i = trace(S^i Z)` and its reduction mod `r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeltaVector {
    pub entries: Vec<i64>,
    pub reduced: Vec<u32>,
}

impl DeltaVector {
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }
}

/// `trace(S^i Z) = Σ_x Z[x+i][x]`.
pub fn delta(z: &IntMatrix) -> Result<DeltaVector> {
    if z.rows() != z.cols() || z.rows() == 0 {
        return Err(Error::Dimension("delta needs a non-empty square matrix".into()));
    }
    let n = z.rows();
    let r = n as u32;
    let entries: Vec<i64> =
        (0..n).map(|i| (0..n).map(|x| z.get((x + i) % n, x)).sum()).collect();
    let reduced = entries.iter().map(|&e| reduce(e, r)).collect();
    Ok(DeltaVector { entries, reduced })
}

/// `Σ_j [(αj + β mod r) ≤ j]` by direct summation.
pub fn gamma_brute(r: u32, alpha: i64, beta: i64) -> u64 {
    (0..r)
        .filter(|&j| reduce(alpha * i64::from(j) + beta, r) <= j)
        .count() as u64
}

/// Closed form of γ for prime `r`.
pub fn gamma(r: u32, alpha: i64, beta: i64) -> Result<u64> {
    if !is_prime(r) {
        return Err(Error::TheoremScope(format!("gamma closed form needs prime r, got {r}")));
    }
    let (a, b) = (reduce(alpha, r), reduce(beta, r));
    let r64 = u64::from(r);
    Ok(match (a, b) {
        (0, 0) | (1, 0) => r64,
        (0, b) => r64 - u64::from(b),
        (1, b) => u64::from(b),
        _ => r64.div_ceil(2),
    })
}

fn check_prime_units(r: u32, vals: &[u32]) -> Result<()> {
    if !is_prime(r) {
        return Err(Error::TheoremScope(format!("r = {r} is not prime")));
    }
    for &v in vals {
        inv_mod(i64::from(v), r)?;
    }
    Ok(())
}

fn ratio(num: i64, den: i64, r: u32, what: &'static str) -> Result<u32> {
    if reduce(den, r) == 0 {
        return Err(Error::ZeroDenominator(what));
    }
    Ok(reduce(num * i64::from(inv_mod(den, r)?), r))
}

/// `Y_21` of the `d = 3` intertwiner with diagonal blocks `P_{n_1/m_1}`,
/// `P_{n_2/m_2}`, zero shifts and first column `y`.
///
/// Entry `(x, j)` with `c = j/m_1` and `u = x - c n_2` equals
/// `y[u] + #{1 ≤ s ≤ c : u = s n_2 p_N} - #{1 ≤ s ≤ c : u = s n_2 p_M}`.
pub fn y21_from_column(r: u32, m: (u32, u32), n: (u32, u32), y: &[i64]) -> Result<IntMatrix> {
    check_prime_units(r, &[m.0, m.1, n.0, n.1])?;
    if y.len() != r as usize {
        return Err(Error::Dimension(format!("first column of length {} for r = {r}", y.len())));
    }
    let (m1, m2, n1, n2) = (i64::from(m.0), i64::from(m.1), i64::from(n.0), i64::from(n.1));
    let p_n = reduce(i64::from(ratio(n1, n2, r, "n1/n2")?) - 1, r);
    let p_m = reduce(i64::from(ratio(m1, m2, r, "m1/m2")?) - 1, r);
    let m1inv = i64::from(inv_mod(m1, r)?);
    let count = |u: u32, c: u32, p: u32| -> Result<i64> {
        if p == 0 {
            return Ok(if u == 0 { i64::from(c) } else { 0 });
        }
        let s = ratio(i64::from(u), n2 * i64::from(p), r, "u/(n2 p)")?;
        Ok(i64::from(s >= 1 && s <= c))
    };
    let size = r as usize;
    let mut out = IntMatrix::zeros(size, size);
    for j in 0..r {
        let c = reduce(i64::from(j) * m1inv, r);
        for x in 0..r {
            let u = reduce(i64::from(x) - i64::from(c) * n2, r);
            let v = y[u as usize] + count(u, c, p_n)? - count(u, c, p_m)?;
            out.set(x as usize, j as usize, v);
        }
    }
    Ok(out)
}

/// Right-hand side `S^{n_2}(P_{n_1/m_1} - P_{n_2/m_2})` of the `d = 3`
/// block equation `S^{n_2} Y - Y S^{m_1} = Z`.
pub fn d3_block_rhs(r: u32, m: (u32, u32), n: (u32, u32)) -> Result<IntMatrix> {
    let a1 = ratio(i64::from(n.0), i64::from(m.0), r, "n1/m1")?;
    let a2 = ratio(i64::from(n.1), i64::from(m.1), r, "n2/m2")?;
    let diff = IntMatrix::perm(r, i64::from(a1)).sub(&IntMatrix::perm(r, i64::from(a2)))?;
    IntMatrix::shift(r, i64::from(n.1)).mul(&diff)
}

/// The `~` class of a vector over `Z/r`: least rotation after shifting its
/// first entry to 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SimClass {
    pub canonical: Vec<u32>,
}

pub fn canonicalize_sim(x: &[u32], r: u32) -> SimClass {
    let n = x.len();
    let canonical = (0..n)
        .map(|k| {
            (0..n)
                .map(|i| reduce(i64::from(x[(i + k) % n]) - i64::from(x[k]), r))
                .collect::<Vec<_>>()
        })
        .min()
        .unwrap_or_default();
    SimClass { canonical }
}

/// `(0, γ, 2γ, ..., (r-1)γ)` mod `r`.
pub fn x_gamma(r: u32, g: u32) -> Vec<u32> {
    (0..r).map(|i| reduce(i64::from(i) * i64::from(g), r)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DeltaCase {
    Four,
    ThreeA,
    ThreeB,
    ThreeC,
    ThreeD,
    TwoA,
    TwoB,
}

impl DeltaCase {
    pub fn label(self) -> &'static str {
        match self {
            DeltaCase::Four => "4",
            DeltaCase::ThreeA => "3a",
            DeltaCase::ThreeB => "3b",
            DeltaCase::ThreeC => "3c",
            DeltaCase::ThreeD => "3d",
            DeltaCase::TwoA => "2a",
            DeltaCase::TwoB => "2b",
        }
    }
}

impl fmt::Display for DeltaCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaClassification {
    pub case: DeltaCase,
    pub gamma: u32,
    pub p_m: u32,
    pub p_n: u32,
}

/// Case of `(m_1, m_2), (n_1, n_2)` by the coincidences among the four
/// weights, with the γ such that `Δ̄(Y_21) ~ x_γ` for the `y = 0` matrix.
///
/// Requires `m_1 ≠ m_2` and `n_1 ≠ n_2`.
pub fn delta_y21_classify(r: u32, m: (u32, u32), n: (u32, u32)) -> Result<DeltaClassification> {
    check_prime_units(r, &[m.0, m.1, n.0, n.1])?;
    let (m1, m2, n1, n2) = (
        reduce(i64::from(m.0), r),
        reduce(i64::from(m.1), r),
        reduce(i64::from(n.0), r),
        reduce(i64::from(n.1), r),
    );
    if m1 == m2 || n1 == n2 {
        return Err(Error::Precondition("classification needs m1 != m2 and n1 != n2".into()));
    }
    let p_n = reduce(i64::from(ratio(i64::from(n1), i64::from(n2), r, "n1/n2")?) - 1, r);
    let p_m = reduce(i64::from(ratio(i64::from(m1), i64::from(m2), r, "m1/m2")?) - 1, r);
    let inv_np = |p: u32| ratio(1, i64::from(n2) * i64::from(p), r, "1/(n2 p)");
    let distinct = [m1, m2, n1, n2].iter().collect::<std::collections::BTreeSet<_>>().len();
    let (case, g) = match distinct {
        4 => (DeltaCase::Four, 0),
        3 if m1 == n1 => (DeltaCase::ThreeA, inv_np(p_n)?),
        3 if m1 == n2 => (
            DeltaCase::ThreeB,
            reduce(i64::from(inv_np(p_m)?) - i64::from(inv_np(p_n)?), r),
        ),
        3 if m2 == n1 => (DeltaCase::ThreeC, 0),
        3 if m2 == n2 => (DeltaCase::ThreeD, reduce(-i64::from(inv_np(p_m)?), r)),
        2 if m1 == n1 && m2 == n2 => (DeltaCase::TwoA, 0),
        2 if m1 == n2 && m2 == n1 => (
            DeltaCase::TwoB,
            reduce(i64::from(inv_np(p_m)?) - i64::from(inv_np(p_n)?), r),
        ),
        _ => return Err(Error::Precondition("weights fall outside the classification".into())),
    };
    Ok(DeltaClassification { case, gamma: g, p_m, p_n })
}

/// Membership in the positive cone of `K_0`: every negative coordinate has a
/// strictly positive coordinate dominating it.
pub fn is_positive_cone(x: &[i64], w: &WeightVector) -> Result<bool> {
    let r = w.r() as usize;
    if x.len() != w.levels() * r {
        return Err(Error::Dimension(format!(
            "vector of length {} for {} coordinates",
            x.len(),
            w.levels() * r
        )));
    }
    let vertex = |idx: usize| SkewVertex::new(idx / r + 1, (idx % r) as u32);
    let positives: Vec<SkewVertex> =
        (0..x.len()).filter(|&i| x[i] > 0).map(vertex).collect();
    Ok((0..x.len()).all(|i| {
        x[i] >= 0 || positives.iter().any(|&p| dominates_unchecked(w, p, vertex(i)))
    }))
}
