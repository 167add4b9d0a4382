//! Wigner 6j symbols by the Racah single-sum formula, in exact rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::combinatorics::{factorial, ratio_to_f64, HalfInteger};

/// Twice-valued triad `(a, b, c)` closes if it obeys the triangle rule and
/// `a + b + c` is an integer.
fn triad_closes(a: u64, b: u64, c: u64) -> bool {
    (a + b + c).is_multiple_of(2) && c <= a + b && a <= b + c && b <= a + c
}

/// `Δ(abc)²` for doubled arguments of a closing triad.
fn triangle_coefficient_sq(a: u64, b: u64, c: u64) -> BigRational {
    let num = factorial((a + b - c) / 2) * factorial((a + c - b) / 2) * factorial((b + c - a) / 2);
    BigRational::new(num, factorial((a + b + c) / 2 + 1))
}

/// `{j1 j2 j3; j4 j5 j6}`. Zero whenever one of the triads
/// `(j1 j2 j3) (j1 j5 j6) (j4 j2 j6) (j4 j5 j3)` fails to close.
pub fn wigner_6j(j: [HalfInteger; 6]) -> f64 {
    let [j1, j2, j3, j4, j5, j6] = j.map(HalfInteger::twice);
    let triads = [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3)];
    if !triads.iter().all(|&(a, b, c)| triad_closes(a, b, c)) {
        return 0.0;
    }

    let prefactor_sq = triads
        .iter()
        .map(|&(a, b, c)| triangle_coefficient_sq(a, b, c))
        .fold(BigRational::from_integer(1.into()), |acc, x| acc * x);

    // Plain integers from here on: every triad sum and quadrilateral sum is even.
    let alphas = triads.map(|(a, b, c)| (a + b + c) / 2);
    let betas = [(j1 + j2 + j4 + j5) / 2, (j2 + j3 + j5 + j6) / 2, (j3 + j1 + j6 + j4) / 2];
    let t_min = *alphas.iter().max().unwrap();
    let t_max = *betas.iter().min().unwrap();

    let mut sum = BigRational::zero();
    for t in t_min..=t_max {
        let den = alphas
            .iter()
            .map(|&a| factorial(t - a))
            .chain(betas.iter().map(|&b| factorial(b - t)))
            .fold(BigInt::from(1), |acc, x| acc * x);
        let term = BigRational::new(factorial(t + 1), den);
        if t % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return 0.0;
    }
    let magnitude = ratio_to_f64(&(&sum * &sum * prefactor_sq)).sqrt();
    if sum.is_negative() {
        -magnitude
    } else {
        magnitude
    }
}
