//! Exact integer and rational combinatorics.
//!
//! Young diagrams, hook lengths, the dimensions of the irreducible
//! representations of `S_N` and `U(n)` labelled by a diagram, binomial
//! coefficients, and `ln Γ` at half-integer arguments. Everything that can be
//! an integer is a [`BigInt`]; conversion to floating point is left to callers.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A Young diagram: weakly decreasing, strictly positive row lengths.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    rows: Vec<usize>,
}

impl Partition {
    pub fn new(rows: Vec<usize>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidPartition("no rows".into()));
        }
        if rows.contains(&0) {
            return Err(Error::InvalidPartition(format!("{rows:?} has an empty row")));
        }
        if rows.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!("{rows:?} is not weakly decreasing")));
        }
        Ok(Partition { rows })
    }

    /// `[m]`, the fully symmetric diagram. `m` must be positive.
    pub fn single_row(m: usize) -> Result<Self> {
        Self::new(vec![m])
    }

    /// `[first, second]`; a zero second row collapses to `[first]`.
    pub fn two_row(first: usize, second: usize) -> Result<Self> {
        if second == 0 {
            Self::single_row(first)
        } else {
            Self::new(vec![first, second])
        }
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    /// Number of rows.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Total number of cells.
    pub fn size(&self) -> usize {
        self.rows.iter().sum()
    }

    /// Length of column `j` (zero-based).
    pub fn column_len(&self, j: usize) -> usize {
        self.rows.iter().take_while(|&&r| r > j).count()
    }

    /// All cells as zero-based `(row, column)` pairs, row by row.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows.iter().enumerate().flat_map(|(i, &r)| (0..r).map(move |j| (i, j)))
    }

    /// Every partition of `n`, in reverse lexicographic order (`[n]` first).
    pub fn all(n: usize) -> Vec<Partition> {
        fn go(remaining: usize, max_part: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if remaining == 0 {
                out.push(Partition { rows: prefix.clone() });
                return;
            }
            for part in (1..=remaining.min(max_part)).rev() {
                prefix.push(part);
                go(remaining - part, part, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if n > 0 {
            go(n, n, &mut Vec::new(), &mut out);
        }
        out
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;

    fn try_from(rows: Vec<usize>) -> Result<Self> {
        Partition::new(rows)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.rows
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, "]")
    }
}

/// Hook length of every cell: one plus the arm (cells to the right) plus the
/// leg (cells below).
pub fn hook_lengths(p: &Partition) -> Vec<Vec<usize>> {
    p.rows
        .iter()
        .enumerate()
        .map(|(i, &r)| (0..r).map(|j| 1 + (r - j - 1) + (p.column_len(j) - i - 1)).collect())
        .collect()
}

fn hook_product(p: &Partition) -> BigInt {
    hook_lengths(p).into_iter().flatten().fold(BigInt::one(), |acc, h| acc * BigInt::from(h))
}

fn exact_div(num: BigInt, den: &BigInt, what: &str) -> BigInt {
    let (q, r) = num.div_rem(den);
    assert!(r.is_zero(), "{what}: {num} is not divisible by {den}");
    q
}

pub fn factorial(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `f^[λ]`, the number of standard Young tableaux (hook length formula).
pub fn sym_group_dim(p: &Partition) -> BigInt {
    exact_div(factorial(p.size() as u64), &hook_product(p), "hook length formula")
}

/// `d^[λ]`, the dimension of the `U(n)` irrep labelled by `λ` (Robinson's
/// product of content factors over hooks). Zero when `λ` has more than `n` rows.
pub fn unitary_dim(p: &Partition, n: usize) -> BigInt {
    if p.len() > n {
        return BigInt::zero();
    }
    let numerator = p.cells().fold(BigInt::one(), |acc, (i, j)| acc * BigInt::from(n - i + j));
    exact_div(numerator, &hook_product(p), "Robinson formula")
}

/// `C(a, b)`, zero outside `0 <= b <= a`.
pub fn binomial(a: u64, b: i64) -> BigInt {
    if b < 0 || b as u64 > a {
        return BigInt::zero();
    }
    let b = (b as u64).min(a - b as u64);
    // Running product stays integral: C(a-b+i, i) at every step.
    let mut acc = BigInt::one();
    for i in 1..=b {
        acc = acc * BigInt::from(a - b + i) / BigInt::from(i);
    }
    acc
}

/// A nonnegative half-integer, stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HalfInteger {
    twice: u64,
}

impl HalfInteger {
    pub const fn from_twice(twice: u64) -> Self {
        HalfInteger { twice }
    }

    pub const fn from_int(v: u64) -> Self {
        HalfInteger { twice: 2 * v }
    }

    /// Parses a float that is an exact multiple of 1/2.
    pub fn from_f64(x: f64) -> Result<Self> {
        let twice = 2.0 * x;
        if !x.is_finite() || x < 0.0 || twice.fract() != 0.0 || twice > u64::MAX as f64 {
            return Err(Error::Domain(format!("{x} is not a nonnegative half-integer")));
        }
        Ok(HalfInteger { twice: twice as u64 })
    }

    pub const fn twice(self) -> u64 {
        self.twice
    }

    pub const fn is_integer(self) -> bool {
        self.twice.is_multiple_of(2)
    }

    pub fn to_f64(self) -> f64 {
        self.twice as f64 / 2.0
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// `ln Γ(x)` for a positive half-integer `x`, by recurrence from
/// `Γ(1) = 1` and `Γ(1/2) = √π`.
pub fn ln_gamma(x: HalfInteger) -> Result<f64> {
    if x.twice == 0 {
        return Err(Error::Domain("ln Γ(0) is undefined".into()));
    }
    let (mut acc, mut arg) = if x.is_integer() { (0.0, 1.0) } else { (0.5 * std::f64::consts::PI.ln(), 0.5) };
    let target = x.to_f64();
    while arg < target {
        acc += f64::ln(arg);
        arg += 1.0;
    }
    Ok(acc)
}

/// `ln Γ(x)` for `x ∈ {1/2, 1, 3/2, ...}`; any other argument is a domain error.
pub fn log_gamma_half(x: f64) -> Result<f64> {
    ln_gamma(HalfInteger::from_f64(x)?)
}

/// Converts an exact rational to the nearest-ish `f64` without overflowing
/// when numerator and denominator are individually huge.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    let (num, den) = (r.numer(), r.denom());
    if num.is_zero() {
        return 0.0;
    }
    let negative = (num.sign() == Sign::Minus) != (den.sign() == Sign::Minus);
    let num = num.magnitude();
    let den = den.magnitude();
    // Scale so the integer quotient carries ~64 significant bits.
    let shift = den.bits() as i64 - num.bits() as i64 + 64;
    let q = if shift >= 0 { (num << shift as u64) / den } else { num / (den << (-shift) as u64) };
    let mag = q.to_f64().unwrap_or(f64::INFINITY) * (2f64).powi(-shift as i32);
    if negative {
        -mag
    } else {
        mag
    }
}

/// `a / b` for big integers, as `f64`.
pub fn big_ratio_f64(a: &BigInt, b: &BigInt) -> f64 {
    ratio_to_f64(&BigRational::new(a.clone(), b.clone()))
}
