use thiserror::Error;

use crate::residue::ResidueError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Residue(#[from] ResidueError),
    #[error("a weight vector needs at least two weights, got {0}")]
    TooFewWeights(usize),
    #[error("weight vectors disagree: r = {left_r}, k+1 = {left_len} vs r = {right_r}, k+1 = {right_len}")]
    ShapeMismatch { left_r: u32, left_len: usize, right_r: u32, right_len: usize },
    #[error("level pair ({s}, {t}) must satisfy 1 <= s < t <= {levels}")]
    LevelPair { s: usize, t: usize, levels: usize },
    #[error("vertex ({level}, {residue}) is not a vertex for r = {r}, k+1 = {levels}")]
    BadVertex { level: usize, residue: u32, r: u32, levels: usize },
    #[error("truncation depth {depth} is below the minimum {min}")]
    DepthTooSmall { depth: usize, min: usize },
    #[error("no equivariant pairing exists")]
    NoEquivariantPairing,
    #[error("theorem scope: {0}")]
    TheoremScope(String),
    #[error("unclassified window {window}")]
    UnclassifiedWindow { window: String },
    #[error("symbol {symbol:?} is not in the pattern alphabet for r = {r}")]
    Alphabet { symbol: char, r: u32 },
    #[error("zero denominator in {0}")]
    ZeroDenominator(&'static str),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
