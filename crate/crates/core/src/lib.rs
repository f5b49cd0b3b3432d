//! Exact computations for quantum lens spaces `C(L_q(r; m))`.

pub mod decider;
pub mod error;
pub mod graph;
pub mod ktheory;
pub mod paths;
pub mod pattern;
pub mod residue;
pub mod search;
pub mod solver;
pub mod zlinear;

pub use error::{Error, Result};
