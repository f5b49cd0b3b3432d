//! Window-type patterns of nontrivial pairs and their conjectured languages.

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightVector;
use crate::residue::inv_mod;

const WINDOW: usize = 4;

/// Symbols are row types of the nontrivial four-entry solutions for `r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PatternString {
    pub r: u32,
    pub symbols: Vec<u8>,
}

impl PatternString {
    pub fn parse(s: &str, r: u32) -> Result<Self> {
        let max = alphabet_size(r)?;
        let symbols = s
            .chars()
            .map(|c| match c.to_digit(10) {
                Some(d) if d < max => Ok(d as u8),
                _ => Err(Error::Alphabet { symbol: c, r }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PatternString { r, symbols })
    }
}

impl std::fmt::Display for PatternString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for s in &self.symbols {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

fn alphabet_size(r: u32) -> Result<u32> {
    match r {
        5 => Ok(4),
        8 => Ok(2),
        _ => Err(Error::Precondition(format!("patterns are tabulated for r = 5 and r = 8, not {r}"))),
    }
}

/// Rows of the table beyond type 0 for r = 5, each an unordered pair.
const ROWS_5: &[(u8, [u32; 4], [u32; 4])] = &[
    (1, [1, 2, 3, 1], [1, 3, 2, 1]),
    (2, [1, 3, 4, 1], [1, 4, 3, 1]),
    (3, [1, 2, 4, 1], [1, 4, 2, 1]),
];

const ROWS_8: &[(u8, [u32; 4], [u32; 4])] = &[
    (0, [1, 3, 5, 7], [1, 7, 5, 3]),
    (0, [1, 3, 7, 5], [1, 7, 3, 5]),
    (0, [1, 5, 3, 7], [1, 5, 7, 3]),
    (1, [1, 3, 7, 1], [1, 7, 3, 1]),
];

fn rescale(window: &[u32], r: u32) -> Result<[u32; 4]> {
    let inv = u64::from(inv_mod(i64::from(window[0]), r)?);
    let mut out = [0u32; 4];
    for (o, &x) in out.iter_mut().zip(window) {
        *o = ((u64::from(x) * inv) % u64::from(r)) as u32;
    }
    Ok(out)
}

fn all_distinct(w: &[u32; 4]) -> bool {
    (0..4).all(|i| (i + 1..4).all(|j| w[i] != w[j]))
}

/// Row type of a pair of windows, both already scaled to start with 1.
pub fn window_type(r: u32, a: &[u32; 4], b: &[u32; 4]) -> Option<u8> {
    let in_row = |x: &[u32; 4], y: &[u32; 4]| (a == x || a == y) && (b == x || b == y);
    match r {
        5 if all_distinct(a) && all_distinct(b) => Some(0),
        5 => ROWS_5.iter().find(|(_, x, y)| in_row(x, y)).map(|row| row.0),
        8 => ROWS_8.iter().find(|(_, x, y)| in_row(x, y)).map(|row| row.0),
        _ => None,
    }
}

/// Slides a four-entry window over both tuples and types each rescaled pair.
pub fn extract_pattern(m: &WeightVector, n: &WeightVector) -> Result<PatternString> {
    m.same_shape(n)?;
    let r = m.r();
    alphabet_size(r)?;
    if m.levels() < WINDOW {
        return Err(Error::Precondition(format!("need at least {WINDOW} weights, got {}", m.levels())));
    }
    let symbols = m
        .weights()
        .windows(WINDOW)
        .zip(n.weights().windows(WINDOW))
        .map(|(a, b)| {
            let (a, b) = (rescale(a, r)?, rescale(b, r)?);
            window_type(r, &a, &b).ok_or_else(|| Error::UnclassifiedWindow { window: format!("{a:?} / {b:?}") })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PatternString { r, symbols })
}

fn language(r: u32) -> Result<&'static Regex> {
    static FIVE: OnceLock<Regex> = OnceLock::new();
    static EIGHT: OnceLock<Regex> = OnceLock::new();
    let common = "0*|0*1|0*(?:10(?:00)*)*0*";
    match r {
        5 => Ok(FIVE.get_or_init(|| Regex::new(&format!("^(?:{common}|0*20*|0*30*)$")).expect("valid regex"))),
        8 => Ok(EIGHT.get_or_init(|| Regex::new(&format!("^(?:{common})$")).expect("valid regex"))),
        _ => Err(Error::Precondition(format!("no conjectured language for r = {r}"))),
    }
}

/// Membership in the conjectured language of realizable patterns.
pub fn pattern_in_language(p: &PatternString) -> Result<bool> {
    Ok(language(p.r)?.is_match(&p.to_string()))
}
