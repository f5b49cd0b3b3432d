//! Arithmetic in `Z/r`: canonical residues, units, inverses and the gcd
//! machinery used by the ideal-lattice invariant.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ResidueError {
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("{value} is not a unit mod {modulus}")]
    NotAUnit { value: i64, modulus: u32 },
    #[error("tau is undefined at 0")]
    TauOfZero,
    #[error("gcd value {d} not realizable by units mod {r}")]
    UnrealizableGcd { d: u32, r: u32 },
}

/// Reduces `a` into the canonical range `0..r`.
pub fn reduce(a: i64, r: u32) -> u32 {
    a.rem_euclid(i64::from(r)) as u32
}

/// Non-negative gcd of `a` and `r`; `gcd(0, r) = r`.
pub fn gcd_mod(a: i64, r: u32) -> u32 {
    a.gcd(&i64::from(r)) as u32
}

/// An element of `Z/r` stored by its canonical representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Residue {
    value: u32,
    modulus: u32,
}

impl Residue {
    pub fn new(value: i64, modulus: u32) -> Result<Self, ResidueError> {
        if modulus == 0 {
            return Err(ResidueError::ZeroModulus);
        }
        Ok(Residue { value: reduce(value, modulus), modulus })
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn modulus(self) -> u32 {
        self.modulus
    }

    pub fn is_unit(self) -> bool {
        gcd_mod(i64::from(self.value), self.modulus) == 1
    }
}

macro_rules! residue_op {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr for Residue {
            type Output = Residue;

            fn $method(self, other: Residue) -> Residue {
                debug_assert_eq!(self.modulus, other.modulus);
                Residue {
                    value: reduce(i64::from(self.value) $op i64::from(other.value), self.modulus),
                    modulus: self.modulus,
                }
            }
        }
    };
}

residue_op!(Add, add, +);
residue_op!(Sub, sub, -);
residue_op!(Mul, mul, *);

impl Neg for Residue {
    type Output = Residue;

    fn neg(self) -> Residue {
        Residue { value: reduce(-i64::from(self.value), self.modulus), modulus: self.modulus }
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// A residue coprime to its modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Unit(Residue);

impl Unit {
    pub fn new(value: i64, modulus: u32) -> Result<Self, ResidueError> {
        Unit::try_from(Residue::new(value, modulus)?)
    }

    pub fn one(modulus: u32) -> Unit {
        Unit(Residue { value: 1 % modulus, modulus })
    }

    pub fn residue(self) -> Residue {
        self.0
    }

    pub fn value(self) -> u32 {
        self.0.value
    }

    pub fn modulus(self) -> u32 {
        self.0.modulus
    }

    pub fn inverse(self) -> Unit {
        // a unit always has an inverse, so the unwrap cannot fire
        mod_inverse(self.0).expect("units are invertible")
    }

}

impl Mul for Unit {
    type Output = Unit;

    fn mul(self, other: Unit) -> Unit {
        Unit(self.0 * other.0)
    }
}

impl TryFrom<Residue> for Unit {
    type Error = ResidueError;

    fn try_from(a: Residue) -> Result<Self, Self::Error> {
        if a.is_unit() {
            Ok(Unit(a))
        } else {
            Err(ResidueError::NotAUnit { value: i64::from(a.value), modulus: a.modulus })
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.value)
    }
}

pub fn mod_inverse(a: Residue) -> Result<Unit, ResidueError> {
    let r = i64::from(a.modulus);
    let ext = i64::from(a.value).extended_gcd(&r);
    if ext.gcd != 1 {
        return Err(ResidueError::NotAUnit { value: i64::from(a.value), modulus: a.modulus });
    }
    Ok(Unit(Residue { value: reduce(ext.x, a.modulus), modulus: a.modulus }))
}

/// Inverse of `a` mod `r` as a plain representative.
pub fn inv_mod(a: i64, r: u32) -> Result<u32, ResidueError> {
    mod_inverse(Residue::new(a, r)?).map(Unit::value)
}

/// All units of `Z/r` in increasing order.
pub fn units(r: u32) -> Vec<u32> {
    (0..r).filter(|&x| gcd_mod(i64::from(x), r) == 1).collect()
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Number of positive divisors of `n`.
pub fn tau(n: u64) -> Result<u64, ResidueError> {
    if n == 0 {
        return Err(ResidueError::TauOfZero);
    }
    Ok(divisors(n).len() as u64)
}

pub fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// The values `gcd(x - y, r)` can take for units `x, y`: divisors of `r`,
/// restricted to even ones when `r` is even.
pub fn admissible_gcd_set(r: u32) -> Vec<u32> {
    divisors(u64::from(r))
        .into_iter()
        .map(|d| d as u32)
        .filter(|d| r % 2 == 1 || d % 2 == 0)
        .collect()
}

/// Units `(x, 1)` with `gcd(x - 1, r) = d`, `x` as small as possible.
pub fn witness_unit_pair(r: u32, d: u32) -> Result<(Unit, Unit), ResidueError> {
    if r == 0 {
        return Err(ResidueError::ZeroModulus);
    }
    if !admissible_gcd_set(r).contains(&d) {
        return Err(ResidueError::UnrealizableGcd { d, r });
    }
    let one = Unit::one(r);
    units(r)
        .into_iter()
        .find(|&x| gcd_mod(i64::from(x) - 1, r) == d)
        .map(|x| (Unit(Residue { value: x, modulus: r }), one))
        .ok_or(ResidueError::UnrealizableGcd { d, r })
}
