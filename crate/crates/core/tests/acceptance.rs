//! Acceptance gate: one PASS/FAIL line per criterion. All checks are exact.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use qlens_core::decider::{
    compare_conditions, condition_vi, decide_d3, decide_d5_prime, normalized_tuples, parse_conditions,
};
use qlens_core::graph::{ideal_invariant, WeightVector};
use qlens_core::ktheory::{
    canonicalize_sim, d3_block_rhs, delta, delta_y21_classify, gamma, gamma_brute, x_gamma, y21_from_column,
    IntMatrix, TranslationForm,
};
use qlens_core::paths::{multiset_wbar_with, pair_path_lengths, wbar_equal, EnumerationCounter, TransferCounter};
use qlens_core::pattern::{pattern_in_language, PatternString};
use qlens_core::search::{search_pairs, SearchBudget};
use qlens_core::solver::{
    check_dq1_witness, solve_condition_vii, solve_shift_sylvester, verify_intertwiner, SylvesterOutcome,
};

/// Shift tuples allowed per pair in the extended search of criterion 5.
const EXTENDED_BUDGET: u64 = 3125;

/// Criteria that cannot hold as literally stated; they still print FAIL.
const UNATTAINABLE: &[u32] = &[8];

type Criterion = (u32, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn wv(r: u32, ws: &[u32]) -> WeightVector {
    WeightVector::from_units(r, ws).unwrap()
}

fn units(r: u32) -> Vec<u32> {
    (1..r).filter(|&a| num_gcd(a, r) == 1).collect()
}

/// Every unit tuple of the given length, not just normalized ones.
fn all_tuples(r: u32, levels: usize) -> Vec<WeightVector> {
    let mut acc: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 0..levels {
        acc = acc.into_iter().flat_map(|t| units(r).into_iter().map(move |u| [t.clone(), vec![u]].concat())).collect();
    }
    acc.iter().map(|t| wv(r, t)).collect()
}

fn num_gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        num_gcd(b, a % b)
    }
}

fn pow_mod(a: u64, mut e: u64, r: u64) -> u64 {
    let (mut base, mut acc) = (a % r, 1 % r);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % r;
        }
        base = base * base % r;
        e >>= 1;
    }
    acc
}

/// Inverse mod a prime via Fermat.
fn inv_prime(a: i64, r: u32) -> u32 {
    pow_mod(a.rem_euclid(i64::from(r)) as u64, u64::from(r) - 2, u64::from(r)) as u32
}

fn d3_completeness() -> Outcome {
    let mut pairs = 0;
    let mut bad = Vec::new();
    for r in 2..=20u32 {
        let us = units(r);
        for (i, &a) in us.iter().enumerate() {
            for &b in &us[i..] {
                let (m, n) = (wv(r, &[1, a]), wv(r, &[1, b]));
                let gcd_eq = num_gcd(r, (a + r - 1) % r) == num_gcd(r, (b + r - 1) % r);
                let v = wbar_equal(&m, &n).unwrap();
                let vii = solve_condition_vii(&m, &n).unwrap().found();
                let d3 = decide_d3(&m, &n).unwrap().equivalent;
                pairs += 1;
                if !(gcd_eq == v && v == vii && vii == d3) {
                    bad.push(format!("r={r} (1,{a}) (1,{b})"));
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("{pairs} pairs, {} exceptions {:?}", bad.len(), &bad[..bad.len().min(3)]))
}

fn d5_prime() -> Outcome {
    let mut pairs = 0;
    let mut found = 0;
    let mut bad = Vec::new();
    for r in [3, 5, 7, 11, 13] {
        let tuples = normalized_tuples(r, 3).unwrap();
        for (i, m) in tuples.iter().enumerate() {
            for n in &tuples[i..] {
                let v = wbar_equal(m, n).unwrap();
                let vi = condition_vi(m, n).unwrap();
                let res = solve_condition_vii(m, n).unwrap();
                let theorem = decide_d5_prime(m, n).unwrap();
                pairs += 1;
                let mut ok = v == vi && vi == res.found() && res.found() == theorem;
                if let Some(h) = &res.h {
                    found += 1;
                    ok &= check_dq1_witness(h).unwrap();
                }
                if !ok {
                    bad.push(format!("{m} {n}"));
                }
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!("{pairs} pairs, {found} witnesses all fix the class, {} exceptions {:?}", bad.len(), &bad[..bad.len().min(3)]),
    )
}

fn small_unit_groups() -> Outcome {
    let mut pairs = 0;
    let mut bad = Vec::new();
    for r in [3, 4, 6, 12] {
        for levels in 2..=4 {
            let tuples = normalized_tuples(r, levels).unwrap();
            for (i, m) in tuples.iter().enumerate() {
                for n in &tuples[i..] {
                    pairs += 1;
                    let same_chain = ideal_invariant(m) == ideal_invariant(n);
                    if same_chain != solve_condition_vii(m, n).unwrap().found() {
                        bad.push(format!("{m} {n}"));
                    }
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("{pairs} pairs, {} exceptions {:?}", bad.len(), &bad[..bad.len().min(3)]))
}

fn x_table() -> Outcome {
    let table: [(u32, [u64; 7]); 5] = [
        (2, [4, 8, 5, 9, 6, 10, 7]),
        (3, [3, 6, 9, 5, 8, 11, 7]),
        (4, [6, 5, 4, 10, 9, 8, 7]),
        (5, [5, 3, 8, 6, 11, 9, 7]),
        (6, [2, 4, 6, 8, 10, 12, 7]),
    ];
    let mismatched: Vec<u32> = table
        .iter()
        .filter(|(m, row)| pair_path_lengths(7, 1, *m).unwrap() != row.to_vec())
        .map(|(m, _)| *m)
        .collect();
    outcome(mismatched.is_empty(), format!("5 rows, mismatched m = {mismatched:?}"))
}

fn discrepancy_examples() -> Outcome {
    let a = compare_conditions(&wv(5, &[1, 2, 3, 1]), &wv(5, &[1, 3, 2, 1]), None).unwrap();
    let first = a.cond_vii == Some(true) && a.cond_vi == Some(false);
    let b = compare_conditions(&wv(5, &[1, 2, 3, 4]), &wv(5, &[1, 2, 4, 3]), None).unwrap();
    let second = b.cond_vii == Some(true) && b.cond_v == Some(false);
    let c = compare_conditions(&wv(5, &[1, 3, 4, 1, 2, 3]), &wv(5, &[1, 4, 3, 1, 2, 4]), Some(EXTENDED_BUDGET)).unwrap();
    let third = c.extended_iv == Some(true) && c.cond_vii == Some(false);
    outcome(
        first && second && third,
        format!("VII&!VI {first}, VII&!V {second}, extended&!VII {third} (budget {EXTENDED_BUDGET})"),
    )
}

fn vii_pair_set(r: u32) -> BTreeSet<(Vec<u32>, Vec<u32>)> {
    let checks = parse_conditions("vii").unwrap();
    search_pairs(r, 4, &checks, SearchBudget::default())
        .unwrap()
        .vii_pairs()
        .map(|rep| (rep.pair.0.weights().to_vec(), rep.pair.1.weights().to_vec()))
        .collect()
}

fn unordered(rows: &[&[[u32; 4]]]) -> BTreeSet<(Vec<u32>, Vec<u32>)> {
    let mut out = BTreeSet::new();
    for row in rows {
        for (i, a) in row.iter().enumerate() {
            for b in &row[i + 1..] {
                let (x, y) = (a.to_vec(), b.to_vec());
                out.insert(if x < y { (x, y) } else { (y, x) });
            }
        }
    }
    out
}

fn nontrivial_tables() -> Outcome {
    let five = unordered(&[
        &[[1, 2, 3, 4], [1, 2, 4, 3], [1, 3, 2, 4], [1, 3, 4, 2], [1, 4, 2, 3], [1, 4, 3, 2]],
        &[[1, 2, 3, 1], [1, 3, 2, 1]],
        &[[1, 3, 4, 1], [1, 4, 3, 1]],
        &[[1, 2, 4, 1], [1, 4, 2, 1]],
    ]);
    let eight = unordered(&[
        &[[1, 3, 5, 7], [1, 7, 5, 3]],
        &[[1, 3, 7, 5], [1, 7, 3, 5]],
        &[[1, 5, 3, 7], [1, 5, 7, 3]],
        &[[1, 3, 7, 1], [1, 7, 3, 1]],
    ]);
    let (got5, got8) = (vii_pair_set(5), vii_pair_set(8));
    // the 6-tuple row: each tuple has 4 unit multiples
    let orbit = units(5).len() * 6;
    outcome(
        got5 == five && got8 == eight,
        format!(
            "r=5: {} pairs (table {}), r=8: {} pairs (table {}); type-0 row spans {orbit} unnormalized tuples",
            got5.len(),
            five.len(),
            got8.len(),
            eight.len()
        ),
    )
}

fn gamma_oracle() -> Outcome {
    let primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31];
    let mut cases = 0;
    let mut bad = 0;
    for r in primes {
        for a in 0..i64::from(r) {
            for b in 0..i64::from(r) {
                cases += 1;
                if gamma(r, a, b).unwrap() != gamma_brute(r, a, b) {
                    bad += 1;
                }
            }
        }
    }
    outcome(bad == 0, format!("{cases} cases, {bad} mismatches"))
}

/// γ exactly as tabulated, with `p_M = m1/m2 - 1`, `p_N = n1/n2 - 1`.
fn tabulated_gamma(r: u32, m: (u32, u32), n: (u32, u32)) -> (&'static str, u32) {
    let ri = i64::from(r);
    let (m1, m2, n1, n2) = (i64::from(m.0), i64::from(m.1), i64::from(n.0), i64::from(n.1));
    let p_m = (m1 * i64::from(inv_prime(m2, r)) - 1).rem_euclid(ri);
    let p_n = (n1 * i64::from(inv_prime(n2, r)) - 1).rem_euclid(ri);
    let over = |p: i64| i64::from(inv_prime(n2 * p, r));
    let distinct = [m1, m2, n1, n2].iter().collect::<BTreeSet<_>>().len();
    let (row, g) = match distinct {
        4 => ("4", 0),
        3 if m1 == n1 => ("3a", over(p_n)),
        3 if m1 == n2 => ("3b", over(p_m) - over(p_n)),
        3 if m2 == n1 => ("3c", 0),
        3 => ("3d", over(p_m)),
        _ if m1 == n1 => ("2a", 0),
        _ => ("2b", over(p_m) - over(p_n)),
    };
    (row, g.rem_euclid(ri) as u32)
}

fn delta_classification() -> Outcome {
    let r = 7;
    let us = units(r);
    let mut rows: std::collections::BTreeMap<&str, (usize, usize, usize)> = Default::default();
    for &m1 in &us {
        for &m2 in &us {
            for &n1 in &us {
                for &n2 in &us {
                    if m1 == m2 || n1 == n2 {
                        continue;
                    }
                    let (m, n) = ((m1, m2), (n1, n2));
                    let y = y21_from_column(r, m, n, &[0; 7]).unwrap();
                    let observed = canonicalize_sim(&delta(&y).unwrap().reduced, r);
                    let (row, g) = tabulated_gamma(r, m, n);
                    let classified = delta_y21_classify(r, m, n).unwrap();
                    let entry = rows.entry(row).or_default();
                    entry.0 += 1;
                    if observed == canonicalize_sim(&x_gamma(r, g), r) {
                        entry.1 += 1;
                    }
                    if observed == canonicalize_sim(&x_gamma(r, classified.gamma), r)
                        && classified.case.label() == row
                    {
                        entry.2 += 1;
                    }
                }
            }
        }
    }
    let literal_ok = rows.values().all(|&(t, lit, _)| lit == t);
    let classifier_ok = rows.values().all(|&(t, _, cls)| cls == t);
    let failing: Vec<&str> = rows.iter().filter(|(_, &(t, lit, _))| lit != t).map(|(k, _)| *k).collect();
    outcome(
        literal_ok,
        format!(
            "r=7, {} rows; tabulated γ fails on rows {failing:?}; classifier (3d with γ = -1/(n2 p_M)) matches all rows: {classifier_ok}",
            rows.len()
        ),
    )
}

fn oracle_equivalences() -> Outcome {
    let mut tuples = 0;
    let mut counter_bad = 0;
    for r in 2..=11u32 {
        for levels in 2..=4 {
            for w in all_tuples(r, levels) {
                tuples += 1;
                let a = multiset_wbar_with(&w, &EnumerationCounter).unwrap();
                let b = multiset_wbar_with(&w, &TransferCounter).unwrap();
                if !a.same_residues(&b) {
                    counter_bad += 1;
                }
            }
        }
    }
    let mut systems = 0;
    let mut sylvester_bad = 0;
    for r in [2, 3, 5, 7, 11, 13] {
        let us = units(r);
        let y0: Vec<i64> = (0..i64::from(r)).map(|i| (i * i) % 3 - 1).collect();
        for &m1 in &us {
            for &m2 in &us {
                for &n1 in &us {
                    for &n2 in &us {
                        let (m, n) = ((m1, m2), (n1, n2));
                        let z = d3_block_rhs(r, m, n).unwrap();
                        let closed = y21_from_column(r, m, n, &y0).unwrap();
                        systems += 1;
                        let ok = match solve_shift_sylvester(i64::from(n2), i64::from(m1), &z, &y0).unwrap() {
                            SylvesterOutcome::Solved(y) => y == closed,
                            // no solution: the closed form must then miss the equation
                            SylvesterOutcome::Obstruction { .. } => {
                                let s = |e: u32| IntMatrix::shift(r, i64::from(e));
                                let lhs = s(n2).mul(&closed).unwrap().sub(&closed.mul(&s(m1)).unwrap()).unwrap();
                                lhs != z
                            }
                        };
                        if !ok {
                            sylvester_bad += 1;
                        }
                    }
                }
            }
        }
    }
    let mut witnesses = 0;
    let mut verify_bad = 0;
    for (r, levels) in [(5, 4), (7, 3), (8, 4)] {
        let tuples = normalized_tuples(r, levels).unwrap();
        for (i, m) in tuples.iter().enumerate() {
            for n in &tuples[i..] {
                if let Some(h) = solve_condition_vii(m, n).unwrap().h {
                    witnesses += 1;
                    if !verify_intertwiner(m, n, &h, TranslationForm::Full).unwrap() {
                        verify_bad += 1;
                    }
                }
            }
        }
    }
    outcome(
        counter_bad == 0 && sylvester_bad == 0 && verify_bad == 0,
        format!(
            "counters on {tuples} tuples: {counter_bad} mismatches; {systems} d=3 systems: {sylvester_bad} mismatches; {witnesses} witnesses re-verified: {verify_bad} failures"
        ),
    )
}

fn pattern_language() -> Outcome {
    let checks = parse_conditions("vii").unwrap();
    let mut seen = 0;
    let mut rejected = Vec::new();
    let mut unclassified = 0;
    for (r, levels) in [(5, 4), (5, 5), (8, 4)] {
        let out = search_pairs(r, levels, &checks, SearchBudget::default()).unwrap();
        unclassified += out.unclassified.len();
        for rep in out.vii_pairs() {
            seen += 1;
            let p = rep.pattern.as_deref().unwrap_or("?");
            let ok = PatternString::parse(p, r).and_then(|p| pattern_in_language(&p)).unwrap_or(false);
            if !ok {
                rejected.push(format!("r={r} {} {} {p}", rep.pair.0, rep.pair.1));
            }
        }
    }
    let lang = |s: &str| pattern_in_language(&PatternString::parse(s, 5).unwrap()).unwrap();
    let stated = !lang("11") && !lang("202");
    outcome(
        rejected.is_empty() && unclassified == 0 && stated,
        format!(
            "{seen} (VII)-pairs, {} outside the language {rejected:?}, {unclassified} unclassified; 11 and 202 rejected: {stated}",
            rejected.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "d=3 completeness", d3_completeness),
        (2, "d=5 prime", d5_prime),
        (3, "r in {3,4,6,12} completeness", small_unit_groups),
        (4, "path-length table r=7", x_table),
        (5, "condition discrepancy examples", discrepancy_examples),
        (6, "nontrivial solution tables", nontrivial_tables),
        (7, "gamma oracle", gamma_oracle),
        (8, "delta classification", delta_classification),
        (9, "oracle equivalences", oracle_equivalences),
        (10, "pattern language", pattern_language),
    ];
    let mut unexpected = Vec::new();
    for (id, name, check) in criteria {
        let start = Instant::now();
        let o = check();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("{status} [{id:>2}] {name}: {} ({:.1?})", o.detail, start.elapsed());
        if o.pass == UNATTAINABLE.contains(&id) {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: all criteria as expected; unattainable as stated: {UNATTAINABLE:?}");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
