//! Intertwiners `H` with `H B[r;m] = B[r;n] H`: the shift-Sylvester block
//! solve, the zero-shift/zero-column solver and an exhaustive search over
//! shift exponents with free first columns.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{dominates_unchecked, ideal_invariant, SkewVertex, WeightVector};
use crate::ktheory::{build_b_with, delta, BlockIntegerMatrix, DeltaVector, IntMatrix, TranslationForm};
use crate::residue::{inv_mod, reduce};
use crate::zlinear::solve_integer_system;

/// Outcome of `S^i Y - Y S^j = Z` for a fixed first column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SylvesterOutcome {
    Solved(IntMatrix),
    /// The closing equations fail; for `i = j = 1` the Δ-vector of `Z` is attached.
    Obstruction { delta: Option<DeltaVector> },
}

/// Propagates `Y[x+i][y+j] = Y[x][y] + Z[x][y+j]` from the first column
/// `y0` and checks the equations closing the cycle of columns.
pub fn solve_shift_sylvester(i: i64, j: i64, z: &IntMatrix, y0: &[i64]) -> Result<SylvesterOutcome> {
    let n = z.rows();
    if z.cols() != n || y0.len() != n || n == 0 {
        return Err(Error::Dimension("shift-Sylvester needs a square Z and a matching column".into()));
    }
    let r = n as u32;
    let (iu, ju) = (reduce(i, r) as usize, reduce(j, r) as usize);
    inv_mod(ju as i64, r)?;
    let mut y = IntMatrix::zeros(n, n);
    for (x, &v) in y0.iter().enumerate() {
        y.set(x, 0, v);
    }
    let mut col = 0;
    for _ in 1..n {
        let next = (col + ju) % n;
        for x in 0..n {
            y.set((x + iu) % n, next, y.get(x, col) + z.get(x, next));
        }
        col = next;
    }
    let closes = (0..n).all(|x| y.get((x + iu) % n, 0) - y.get(x, col) == z.get(x, 0));
    if !closes {
        let delta = if iu == 1 % n && ju == 1 % n { Some(delta(z)?) } else { None };
        return Ok(SylvesterOutcome::Obstruction { delta });
    }
    Ok(SylvesterOutcome::Solved(y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverStatus {
    Found,
    Inconsistent,
    DeltaObstruction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverResult {
    pub status: SolverStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<BlockIntegerMatrix>,
    /// Shift exponents of the diagonal blocks of the witness.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shifts: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl SolverResult {
    pub fn found(&self) -> bool {
        self.status == SolverStatus::Found
    }

    fn fail(status: SolverStatus, reason: String) -> Self {
        SolverResult { status, h: None, shifts: None, reason: Some(reason) }
    }
}

/// Diagonal block `S^ℓ P_{n_c/m_c}`, the solution of `H S^{m_c} = S^{n_c} H`.
pub fn diagonal_block(r: u32, m_c: u32, n_c: u32, shift: u32) -> Result<IntMatrix> {
    let alpha = reduce(i64::from(n_c) * i64::from(inv_mod(i64::from(m_c), r)?), r);
    IntMatrix::shift(r, i64::from(shift)).mul(&IntMatrix::perm(r, i64::from(alpha)))
}

/// `Y_ab(i, j)` may be nonzero only when `(b, j) ⪰ (a, i)`.
pub fn zero_pattern_holds(w: &WeightVector, h: &BlockIntegerMatrix) -> bool {
    let r = w.r();
    (2..=w.levels()).all(|a| {
        (1..a).all(|b| {
            let y = h.block(a, b);
            (0..r).all(|i| {
                (0..r).all(|j| {
                    y.get(i as usize, j as usize) == 0
                        || dominates_unchecked(w, SkewVertex::new(b, j), SkewVertex::new(a, i))
                })
            })
        })
    })
}

/// Checks `H B[r;m] = B[r;n] H` by multiplication.
pub fn verify_intertwiner(
    m: &WeightVector,
    n: &WeightVector,
    h: &BlockIntegerMatrix,
    form: TranslationForm,
) -> Result<bool> {
    let left = h.mul(&build_b_with(m, form))?;
    let right = build_b_with(n, form).mul(h)?;
    Ok(left == right)
}

/// Right-hand side of the `(a, b)` block equation
/// `S^{n_a} Y_ab - Y_ab S^{m_b} = Z_ab` given every block closer to the diagonal.
fn block_rhs(
    h: &BlockIntegerMatrix,
    bm: &BlockIntegerMatrix,
    bn: &BlockIntegerMatrix,
    a: usize,
    b: usize,
) -> Result<IntMatrix> {
    let r = h.r() as usize;
    let mut z = IntMatrix::zeros(r, r);
    for c in b + 1..=a {
        z = z.add(&h.block(a, c).mul(bm.block(c, b))?)?;
    }
    for c in b..a {
        z = z.sub(&bn.block(a, c).mul(h.block(c, b))?)?;
    }
    Ok(z)
}

pub fn solve_condition_vii(m: &WeightVector, n: &WeightVector) -> Result<SolverResult> {
    solve_condition_vii_with(m, n, TranslationForm::default())
}

/// Zero shifts, zero first columns: the sub-diagonal blocks are then unique,
/// so one propagation pass decides the condition.
pub fn solve_condition_vii_with(
    m: &WeightVector,
    n: &WeightVector,
    form: TranslationForm,
) -> Result<SolverResult> {
    m.same_shape(n)?;
    if ideal_invariant(m) != ideal_invariant(n) {
        return Ok(SolverResult::fail(SolverStatus::Inconsistent, "gcd chains differ".into()));
    }
    let r = m.r();
    let levels = m.levels();
    let bm = build_b_with(m, form);
    let bn = build_b_with(n, form);
    let mut h = BlockIntegerMatrix::zeros(levels, r);
    for c in 1..=levels {
        h.set_block(c, c, diagonal_block(r, m.weight(c), n.weight(c), 0)?);
    }
    let zero_col = vec![0i64; r as usize];
    for gap in 1..levels {
        for a in gap + 1..=levels {
            let b = a - gap;
            let z = block_rhs(&h, &bm, &bn, a, b)?;
            match solve_shift_sylvester(i64::from(n.weight(a)), i64::from(m.weight(b)), &z, &zero_col)? {
                SylvesterOutcome::Solved(y) => h.set_block(a, b, y),
                SylvesterOutcome::Obstruction { .. } => {
                    return Ok(SolverResult::fail(
                        SolverStatus::DeltaObstruction,
                        format!("block ({a},{b}) has no solution with zero first column"),
                    ));
                }
            }
        }
    }
    if !zero_pattern_holds(m, &h) {
        return Ok(SolverResult::fail(SolverStatus::Inconsistent, "zero pattern violated".into()));
    }
    if !verify_intertwiner(m, n, &h, form)? {
        return Err(Error::Precondition("propagated H fails the intertwining identity".into()));
    }
    Ok(SolverResult { status: SolverStatus::Found, h: Some(h), shifts: Some(vec![0; levels]), reason: None })
}

/// `H Σ_i e_(i,0) = Σ_i e_(i,0)`.
pub fn check_dq1_witness(h: &BlockIntegerMatrix) -> Result<bool> {
    let r = h.r() as usize;
    let mut v = vec![0i64; h.levels() * r];
    for i in 0..h.levels() {
        v[i * r] = 1;
    }
    Ok(h.apply(&v)? == v)
}

/// Which invariant the extended search targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtendedTarget {
    /// Dimension quadruple: the first shift vanishes.
    Dq,
    /// Dimension quadruple with distinguished class: additionally `H` fixes `Σ e_(i,0)`.
    Dq1,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchLog {
    pub tuples_total: u64,
    pub tuples_examined: u64,
    pub truncated: bool,
}

/// Entries affine in the free first columns: `coeffs[0]` is the constant.
#[derive(Debug, Clone)]
struct AffineMatrix {
    r: usize,
    width: usize,
    data: Vec<i64>,
}

impl AffineMatrix {
    fn zeros(r: usize, width: usize) -> Self {
        AffineMatrix { r, width, data: vec![0; r * r * width] }
    }

    fn constant(m: &IntMatrix, width: usize) -> Self {
        let r = m.rows();
        let mut out = AffineMatrix::zeros(r, width);
        for i in 0..r {
            for j in 0..r {
                out.data[(i * r + j) * width] = m.get(i, j);
            }
        }
        out
    }

    fn entry(&self, i: usize, j: usize) -> &[i64] {
        let s = (i * self.r + j) * self.width;
        &self.data[s..s + self.width]
    }

    fn entry_mut(&mut self, i: usize, j: usize) -> &mut [i64] {
        let s = (i * self.r + j) * self.width;
        &mut self.data[s..s + self.width]
    }

    /// `self += sign * (left * self_other * right)` where `left`, `right` are
    /// integer matrices (sparse signed permutations in practice).
    fn add_product(&mut self, sign: i64, left: &IntMatrix, mid: &AffineMatrix, right: &IntMatrix) {
        let r = self.r;
        for i in 0..r {
            for k in 0..r {
                let l = left.get(i, k);
                if l == 0 {
                    continue;
                }
                for q in 0..r {
                    let src = mid.entry(k, q);
                    if src.iter().all(|&c| c == 0) {
                        continue;
                    }
                    for j in 0..r {
                        let rt = right.get(q, j);
                        if rt == 0 {
                            continue;
                        }
                        let f = sign * l * rt;
                        let dst = self.entry_mut(i, j);
                        for (d, &s) in dst.iter_mut().zip(src) {
                            *d += f * s;
                        }
                    }
                }
            }
        }
    }

    fn evaluate(&self, vars: &[i128]) -> Result<IntMatrix> {
        let mut out = IntMatrix::zeros(self.r, self.r);
        for i in 0..self.r {
            for j in 0..self.r {
                let e = self.entry(i, j);
                let v = e[1..]
                    .iter()
                    .zip(vars)
                    .fold(i128::from(e[0]), |acc, (&c, &x)| acc + i128::from(c) * x);
                let v = i64::try_from(v).map_err(|_| Error::Precondition("entry overflow".into()))?;
                out.set(i, j, v);
            }
        }
        Ok(out)
    }
}

struct Frame<'a> {
    m: &'a WeightVector,
    n: &'a WeightVector,
    bm: BlockIntegerMatrix,
    bn: BlockIntegerMatrix,
    blocks: Vec<(usize, usize)>,
    target: ExtendedTarget,
    form: TranslationForm,
}

impl Frame<'_> {
    fn vars(&self) -> usize {
        self.blocks.len() * self.m.r() as usize
    }

    fn block_var(&self, a: usize, b: usize) -> usize {
        self.blocks.iter().position(|&p| p == (a, b)).expect("sub-diagonal block")
    }

    /// Tries one shift tuple; returns a verified witness if the affine system
    /// has an integer solution.
    fn attempt(&self, shifts: &[u32]) -> Result<Option<BlockIntegerMatrix>> {
        let r = self.m.r() as usize;
        let levels = self.m.levels();
        let width = self.vars() + 1;
        let mut h: Vec<Vec<AffineMatrix>> =
            (0..levels).map(|_| (0..levels).map(|_| AffineMatrix::zeros(r, width)).collect()).collect();
        for c in 1..=levels {
            let d = diagonal_block(self.m.r(), self.m.weight(c), self.n.weight(c), shifts[c - 1])?;
            h[c - 1][c - 1] = AffineMatrix::constant(&d, width);
        }
        let id = IntMatrix::identity(r);
        let mut rows: Vec<Vec<i128>> = Vec::new();
        let mut rhs: Vec<i128> = Vec::new();
        let mut push = |form: &[i64], target: i64| {
            if form.iter().all(|&c| c == 0) && target == 0 {
                return;
            }
            rows.push(form[1..].iter().map(|&c| i128::from(c)).collect());
            rhs.push(i128::from(target) - i128::from(form[0]));
        };
        for gap in 1..levels {
            for a in gap + 1..=levels {
                let b = a - gap;
                let mut z = AffineMatrix::zeros(r, width);
                for c in b + 1..=a {
                    z.add_product(1, &id, &h[a - 1][c - 1], self.bm.block(c, b));
                }
                for c in b..a {
                    z.add_product(-1, self.bn.block(a, c), &h[c - 1][b - 1], &id);
                }
                let iu = self.n.weight(a) as usize;
                let ju = self.m.weight(b) as usize;
                let base = 1 + self.block_var(a, b) * r;
                let mut y = AffineMatrix::zeros(r, width);
                for x in 0..r {
                    y.entry_mut(x, 0)[base + x] = 1;
                }
                let mut col = 0;
                for _ in 1..r {
                    let next = (col + ju) % r;
                    for x in 0..r {
                        let v: Vec<i64> =
                            y.entry(x, col).iter().zip(z.entry(x, next)).map(|(p, q)| p + q).collect();
                        y.entry_mut((x + iu) % r, next).copy_from_slice(&v);
                    }
                    col = next;
                }
                for x in 0..r {
                    let form: Vec<i64> = y
                        .entry((x + iu) % r, 0)
                        .iter()
                        .zip(y.entry(x, col))
                        .zip(z.entry(x, 0))
                        .map(|((p, q), s)| p - q - s)
                        .collect();
                    push(&form, 0);
                }
                for i in 0..r {
                    for j in 0..r {
                        let allowed = dominates_unchecked(
                            self.m,
                            SkewVertex::new(b, j as u32),
                            SkewVertex::new(a, i as u32),
                        );
                        if !allowed {
                            push(y.entry(i, j), 0);
                        }
                    }
                }
                h[a - 1][b - 1] = y;
            }
        }
        if self.target == ExtendedTarget::Dq1 {
            // row block a of H applied to e_0 summed over b must equal e_0
            for a in 1..=levels {
                for x in 0..r {
                    let mut form = vec![0i64; width];
                    for b in 1..=a {
                        for (f, &c) in form.iter_mut().zip(h[a - 1][b - 1].entry(x, 0)) {
                            *f += c;
                        }
                    }
                    push(&form, i64::from(x == 0));
                }
            }
        }
        let Some(vars) = solve_integer_system(&rows, &rhs, width - 1)? else {
            return Ok(None);
        };
        let mut out = BlockIntegerMatrix::zeros(levels, self.m.r());
        for a in 1..=levels {
            for b in 1..=a {
                out.set_block(a, b, h[a - 1][b - 1].evaluate(&vars)?);
            }
        }
        if !verify_intertwiner(self.m, self.n, &out, self.form)? || !zero_pattern_holds(self.m, &out) {
            return Err(Error::Precondition("search witness fails verification".into()));
        }
        Ok(Some(out))
    }
}

fn shifts_from_index(mut idx: u64, r: u32, levels: usize) -> Vec<u32> {
    // first shift fixed at 0, the rest in lexicographic order
    let mut out = vec![0u32; levels];
    for slot in out.iter_mut().skip(1).rev() {
        *slot = (idx % u64::from(r)) as u32;
        idx /= u64::from(r);
    }
    out
}

/// Searches every shift tuple with `ℓ_1 = 0` (required by both targets) in
/// lexicographic order, at most `budget` of them; the least witness wins.
pub fn exhaustive_dq_search(
    m: &WeightVector,
    n: &WeightVector,
    target: ExtendedTarget,
    budget: Option<u64>,
) -> Result<(SolverResult, SearchLog)> {
    exhaustive_dq_search_with(m, n, target, budget, TranslationForm::default())
}

pub fn exhaustive_dq_search_with(
    m: &WeightVector,
    n: &WeightVector,
    target: ExtendedTarget,
    budget: Option<u64>,
    form: TranslationForm,
) -> Result<(SolverResult, SearchLog)> {
    m.same_shape(n)?;
    let r = m.r();
    let levels = m.levels();
    let total = u64::from(r).checked_pow(levels as u32 - 1).unwrap_or(u64::MAX);
    if ideal_invariant(m) != ideal_invariant(n) {
        let log = SearchLog { tuples_total: total, tuples_examined: 0, truncated: false };
        return Ok((SolverResult::fail(SolverStatus::Inconsistent, "gcd chains differ".into()), log));
    }
    let limit = budget.map_or(total, |b| b.min(total));
    let frame = Frame {
        m,
        n,
        bm: build_b_with(m, form),
        bn: build_b_with(n, form),
        blocks: (2..=levels).flat_map(|a| (1..a).map(move |b| (a, b))).collect(),
        target,
        form,
    };
    let hit = (0..limit)
        .into_par_iter()
        .map(|idx| {
            let shifts = shifts_from_index(idx, r, levels);
            frame.attempt(&shifts).map(|w| w.map(|h| (idx, shifts, h)))
        })
        .find_map_first(|res| match res {
            Ok(None) => None,
            other => Some(other),
        })
        .transpose()?
        .flatten();
    let (examined, truncated) = match &hit {
        Some((idx, _, _)) => (idx + 1, false),
        None => (limit, limit < total),
    };
    let log = SearchLog { tuples_total: total, tuples_examined: examined, truncated };
    Ok(match hit {
        Some((_, shifts, h)) => {
            (SolverResult { status: SolverStatus::Found, h: Some(h), shifts: Some(shifts), reason: None }, log)
        }
        None => {
            let reason = if truncated { "budget exhausted" } else { "no shift tuple admits a solution" };
            (SolverResult::fail(SolverStatus::Inconsistent, reason.into()), log)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ktheory::{d3_block_rhs, y21_from_column};

    fn wv(r: u32, m: &[i64]) -> WeightVector {
        WeightVector::new(r, m).unwrap()
    }

    #[test]
    fn homogeneous_equation_gives_circulant() {
        let z = IntMatrix::zeros(5, 5);
        let mut e0 = vec![0; 5];
        e0[0] = 1;
        match solve_shift_sylvester(1, 1, &z, &e0).unwrap() {
            SylvesterOutcome::Solved(y) => assert_eq!(y, IntMatrix::identity(5)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn delta_obstruction_detected() {
        let mut z = IntMatrix::zeros(5, 5);
        z.set(0, 0, 1);
        match solve_shift_sylvester(1, 1, &z, &[0; 5]).unwrap() {
            SylvesterOutcome::Obstruction { delta: Some(d) } => assert_eq!(d.entries, vec![1, 0, 0, 0, 0]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sylvester_matches_closed_form() {
        let (m, n) = ((1, 2), (2, 1));
        let z = d3_block_rhs(5, m, n).unwrap();
        let y0 = [0, 1, 0, -2, 0];
        let SylvesterOutcome::Solved(y) = solve_shift_sylvester(1, 1, &z, &y0).unwrap() else {
            panic!("expected a solution");
        };
        assert_eq!(y, y21_from_column(5, m, n, &y0).unwrap());
    }

    #[test]
    fn identity_for_equal_weights() {
        let w = wv(7, &[1, 3, 2]);
        let res = solve_condition_vii(&w, &w).unwrap();
        assert!(res.found());
        assert_eq!(res.h.unwrap(), BlockIntegerMatrix::identity(3, 7));
    }

    #[test]
    fn dq1_witness_examples() {
        assert!(check_dq1_witness(&BlockIntegerMatrix::identity(2, 5)).unwrap());
        let mut h = BlockIntegerMatrix::identity(2, 5);
        h.set_block(1, 1, IntMatrix::shift(5, 1));
        assert!(!check_dq1_witness(&h).unwrap());
    }

    #[test]
    fn scaling_always_found() {
        let w = wv(7, &[1, 3, 2]);
        for a in 2..7 {
            let res = solve_condition_vii(&w, &w.scaled(a)).unwrap();
            assert!(res.found(), "alpha = {a}");
            assert!(check_dq1_witness(res.h.as_ref().unwrap()).unwrap());
        }
    }

    #[test]
    fn unequal_chains_short_circuit() {
        let res = solve_condition_vii(&wv(5, &[2, 2]), &wv(5, &[2, 3])).unwrap();
        assert_eq!(res.status, SolverStatus::Inconsistent);
        let (res, log) = exhaustive_dq_search(&wv(5, &[2, 2]), &wv(5, &[2, 3]), ExtendedTarget::Dq, None).unwrap();
        assert_eq!(res.status, SolverStatus::Inconsistent);
        assert_eq!(log.tuples_examined, 0);
    }

    #[test]
    fn extended_search_agrees_with_vii_at_d3() {
        for a in 1..3 {
            for b in 1..3 {
                for c in 1..3 {
                    for d in 1..3 {
                        let (m, n) = (wv(3, &[a, b]), wv(3, &[c, d]));
                        let vii = solve_condition_vii(&m, &n).unwrap().found();
                        let (ext, _) = exhaustive_dq_search(&m, &n, ExtendedTarget::Dq1, None).unwrap();
                        assert_eq!(vii, ext.found(), "{m} vs {n}");
                    }
                }
            }
        }
    }
}
