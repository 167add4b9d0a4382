//! Optimal unambiguous and minimum-error discrimination between the two mean
//! input states, block by block, plus their `n → ∞` limits.
//!
//! Per-block helpers ([`boundaries`], [`optimal_q`], [`block_failure`],
//! [`minerror_eigenvalues`]) work in the canonical frame of the
//! [`JordanSpectrum`] (`n_A >= n_C`). The assembled results
//! ([`total_failure`], [`minerror_probability`]) are reported in the caller's
//! original labeling.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::combinatorics::{factorial, ln_gamma, ratio_to_f64, HalfInteger};
use crate::error::{Error, Result};
use crate::serde_big;
use crate::spectrum::{canonicalize, overlap_squared, Block, JordanSpectrum, ProblemConfig};

/// Which of the three regimes of the per-block optimum applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Branch {
    /// `η₁ < c_k`: never conclude "state 1" in this block (`q1 = 1`).
    Low,
    /// `c_k <= η₁ <= d_k`: both conclusive outcomes are used.
    Middle,
    /// `η₁ > d_k`: never conclude "state 2" in this block (`q2 = 1`).
    High,
}

impl Branch {
    /// The same regime seen after exchanging the roles of ρ₁ and ρ₂.
    pub fn mirrored(self) -> Branch {
        match self {
            Branch::Low => Branch::High,
            Branch::Middle => Branch::Middle,
            Branch::High => Branch::Low,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Low => "LOW",
            Branch::Middle => "MIDDLE",
            Branch::High => "HIGH",
        }
    }
}

/// How the failure parameters of the high-prior branch are chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum QRule {
    /// `q1 = O_k²`, `q2 = 1`: the choice that attains the branch's `Q_k`.
    #[default]
    Optimal,
    /// `q1 = q2 = O_k` in the high branch. Not optimal; kept only as a
    /// negative control for the POVM certification.
    EqualOverlap,
}

fn rank_floats(spec: &JordanSpectrum) -> (f64, f64) {
    (spec.d1.to_f64().unwrap_or(f64::INFINITY), spec.d2.to_f64().unwrap_or(f64::INFINITY))
}

/// `(c_k, d_k)`: the priors `η₁` at which the optimum switches branch.
pub fn boundaries(block: &Block, spec: &JordanSpectrum) -> (f64, f64) {
    let rho = spec.rank_ratio();
    let o2 = block.overlap * block.overlap;
    // c_k = d1 O²/(d2 + d1 O²), d_k = d1/(d1 + d2 O²), divided through by d2.
    (rho * o2 / (1.0 + rho * o2), rho / (rho + o2))
}

pub fn select_branch(eta1: f64, c_k: f64, d_k: f64) -> Branch {
    if eta1 < c_k {
        Branch::Low
    } else if eta1 > d_k {
        Branch::High
    } else {
        Branch::Middle
    }
}

/// Optimal `(branch, q1, q2)`, the failure probabilities of the two Jordan
/// vectors of a block.
pub fn optimal_q(block: &Block, spec: &JordanSpectrum) -> (Branch, f64, f64) {
    optimal_q_with(block, spec, QRule::Optimal)
}

pub fn optimal_q_with(block: &Block, spec: &JordanSpectrum, rule: QRule) -> (Branch, f64, f64) {
    let (c_k, d_k) = boundaries(block, spec);
    let branch = select_branch(spec.config.eta1, c_k, d_k);
    let (q1, q2) = branch_q(branch, block, spec, rule);
    (branch, q1, q2)
}

fn branch_q(branch: Branch, block: &Block, spec: &JordanSpectrum, rule: QRule) -> (f64, f64) {
    let o = block.overlap;
    let o2 = o * o;
    let ProblemConfig { eta1, eta2, .. } = spec.config;
    match branch {
        Branch::Low => (1.0, o2),
        Branch::Middle => {
            let ratio = (eta2 * spec.rank_ratio() / eta1).sqrt();
            (ratio * o, o / ratio)
        }
        Branch::High => match rule {
            QRule::Optimal => (o2, 1.0),
            QRule::EqualOverlap => (o, o),
        },
    }
}

/// `Q_k` evaluated with the formula of a given branch, whether or not that
/// branch is the optimal one for the block.
pub fn branch_failure(branch: Branch, block: &Block, spec: &JordanSpectrum) -> f64 {
    let (d1, d2) = rank_floats(spec);
    let ProblemConfig { eta1, eta2, .. } = spec.config;
    let o = block.overlap;
    match branch {
        Branch::Low => eta1 / d1 + eta2 * o * o / d2,
        Branch::Middle => 2.0 * (eta1 * eta2 / d1 / d2).sqrt() * o,
        Branch::High => eta1 * o * o / d1 + eta2 / d2,
    }
}

/// Minimal failure probability `Q_k` of one block vector pair.
pub fn block_failure(block: &Block, spec: &JordanSpectrum) -> f64 {
    let (branch, _, _) = optimal_q(block, spec);
    branch_failure(branch, block, spec)
}

/// `d^k Q_k` through the exact ratios `d^k/d1`, `d^k/d2`.
fn weighted_block_failure(branch: Branch, block: &Block, spec: &JordanSpectrum) -> f64 {
    let (w1, w2) = spec.block_weights(block);
    let ProblemConfig { eta1, eta2, .. } = spec.config;
    let o = block.overlap;
    match branch {
        Branch::Low => w1 * eta1 + w2 * eta2 * o * o,
        Branch::Middle => 2.0 * (w1 * w2 * eta1 * eta2).sqrt() * o,
        Branch::High => w1 * eta1 * o * o + w2 * eta2,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnambiguousBlock {
    pub k: u32,
    pub branch: Branch,
    pub overlap: f64,
    #[serde(with = "serde_big")]
    pub multiplicity: BigInt,
    pub q1: f64,
    pub q2: f64,
    pub c_k: f64,
    pub d_k: f64,
    /// Failure probability contributed by one block vector pair.
    pub q_k: f64,
}

/// Optimal unambiguous discrimination, in the caller's labeling.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnambiguousResult {
    pub config: ProblemConfig,
    pub swapped: bool,
    pub blocks: Vec<UnambiguousBlock>,
    pub q_total: f64,
}

/// `Q^opt = Σ_k d^k Q_k`.
pub fn total_failure(spec: &JordanSpectrum) -> UnambiguousResult {
    total_failure_with(spec, QRule::Optimal)
}

/// As [`total_failure`], with the per-block `q`'s chosen by `rule`. The total
/// always comes from the branch failure formulas, never from the `q`'s.
pub fn total_failure_with(spec: &JordanSpectrum, rule: QRule) -> UnambiguousResult {
    let mut q_total = 0.0;
    let blocks = spec
        .blocks
        .iter()
        .map(|block| {
            let (branch, q1, q2) = optimal_q_with(block, spec, rule);
            let (c_k, d_k) = boundaries(block, spec);
            q_total += weighted_block_failure(branch, block, spec);
            let b = UnambiguousBlock {
                k: block.k,
                branch,
                overlap: block.overlap,
                multiplicity: block.multiplicity.clone(),
                q1,
                q2,
                c_k,
                d_k,
                q_k: branch_failure(branch, block, spec),
            };
            if spec.swapped {
                // Boundaries on η₁ of the caller's labeling: η₁ = 1 - η₁'.
                UnambiguousBlock { branch: branch.mirrored(), q1: q2, q2: q1, c_k: 1.0 - d_k, d_k: 1.0 - c_k, ..b }
            } else {
                b
            }
        })
        .collect();
    UnambiguousResult { config: spec.original_config(), swapped: spec.swapped, blocks, q_total }
}

/// `Q^opt = (1/d1) Σ_k d^k O_k`, the form the optimum takes for `n_A = n_C`
/// at equal priors, where every block sits in the middle branch.
pub fn equal_copies_failure(spec: &JordanSpectrum) -> Result<f64> {
    let cfg = &spec.config;
    if cfg.n_a != cfg.n_c {
        return Err(Error::Precondition(format!("equal-copies form needs n_A = n_C, got {cfg}")));
    }
    if (cfg.eta1 - 0.5).abs() > 1e-12 {
        return Err(Error::Precondition(format!("equal-copies form needs η₁ = η₂ = 1/2, got {cfg}")));
    }
    Ok(spec.blocks.iter().map(|b| spec.block_weights(b).0 * b.overlap).sum())
}

/// Eigenvalues `λ± = (c₋ ± √(c₊² − (c₊² − c₋²)O²))/2` of the 2×2 restriction
/// of `Λ = η₂ρ₂ − η₁ρ₁` to one block, `c± = η₂/d₂ ± η₁/d₁`.
pub fn minerror_eigenvalues(block: &Block, spec: &JordanSpectrum) -> (f64, f64) {
    let (d1, d2) = rank_floats(spec);
    let ProblemConfig { eta1, eta2, .. } = spec.config;
    eigenvalue_pair(eta2 / d2 + eta1 / d1, eta2 / d2 - eta1 / d1, block.overlap * block.overlap)
}

/// The radicand is rewritten as `c₊²(1 − O²) + c₋²O²`, a sum of nonnegative terms.
pub fn eigenvalue_pair(c_plus: f64, c_minus: f64, overlap_sq: f64) -> (f64, f64) {
    let root = (c_plus * c_plus * (1.0 - overlap_sq) + c_minus * c_minus * overlap_sq).sqrt();
    ((c_minus + root) / 2.0, (c_minus - root) / 2.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinErrorBlock {
    pub k: u32,
    #[serde(with = "serde_big")]
    pub multiplicity: BigInt,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
}

/// Minimum-error (Helstrom) discrimination, in the caller's labeling.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinErrorResult {
    pub config: ProblemConfig,
    pub swapped: bool,
    pub blocks: Vec<MinErrorBlock>,
    /// Eigenvalue of Λ on the unpaired part of the larger support: `η₂/d₂`
    /// normally, `−η₁/d₁` when ρ₁ has the larger support.
    pub residual_eigenvalue: f64,
    /// `|d₂ − d₁|`.
    #[serde(with = "serde_big")]
    pub residual_multiplicity: BigInt,
    pub p_me: f64,
}

pub fn minerror_probability(spec: &JordanSpectrum) -> MinErrorResult {
    let ProblemConfig { eta1, eta2, .. } = spec.config;
    let (_, d2) = rank_floats(spec);
    // Everything scaled by d1: d1 c± = a ± b.
    let a = eta2 * spec.rank_ratio();
    let b = eta1;
    let mut trace_sum = 0.0;
    let blocks = spec
        .blocks
        .iter()
        .map(|block| {
            let (w1, _) = spec.block_weights(block);
            let o2 = block.overlap * block.overlap;
            trace_sum += w1 * ((a + b) * (a + b) * (1.0 - o2) + (a - b) * (a - b) * o2).sqrt();
            let (lp, lm) = minerror_eigenvalues(block, spec);
            let (lambda_plus, lambda_minus) = if spec.swapped { (-lm, -lp) } else { (lp, lm) };
            MinErrorBlock { k: block.k, multiplicity: block.multiplicity.clone(), lambda_plus, lambda_minus }
        })
        .collect();
    let mut p_me = (a + b - trace_sum) / 2.0;
    if p_me < 0.0 && p_me > -1e-12 {
        p_me = 0.0;
    }
    let residual = eta2 / d2;
    MinErrorResult {
        config: spec.original_config(),
        swapped: spec.swapped,
        blocks,
        residual_eigenvalue: if spec.swapped { -residual } else { residual },
        residual_multiplicity: spec.unpaired(),
        p_me,
    }
}

/// Limits of the two error figures as the qudit dimension grows.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AsymptoticBounds {
    /// Only defined for `n_A = n_C`.
    pub q0: Option<f64>,
    pub p0: f64,
}

/// `Q₀ = Γ(n_A+1) Γ(n_B/2+1) / Γ(n_A+n_B/2+1)`, for `n_A = n_C`.
pub fn bound_q0(cfg: &ProblemConfig) -> Result<f64> {
    if cfg.n_a != cfg.n_c {
        return Err(Error::Precondition(format!("Q₀ needs n_A = n_C, got n_A={} n_C={}", cfg.n_a, cfg.n_c)));
    }
    let h = |twice: u32| HalfInteger::from_twice(twice as u64);
    let ln = ln_gamma(h(2 * cfg.n_a + 2))? + ln_gamma(h(cfg.n_b + 2))? - ln_gamma(h(2 * cfg.n_a + cfg.n_b + 2))?;
    Ok(ln.exp())
}

/// One term of the `P₀` sum, for the canonicalized copy counts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LimitTerm {
    pub k: u32,
    /// `lim_{n→∞} d^k/d1 = (N−2k+1) n1! n_C! / ((N−k+1) k! (N−k)!)`.
    pub weight: f64,
    pub overlap: f64,
    /// `√(1 − O_k²)`.
    pub sine: f64,
}

pub fn limit_terms(cfg: &ProblemConfig) -> Vec<LimitTerm> {
    let (c, _) = canonicalize(cfg);
    let big_n = c.total() as u64;
    (0..=c.k_max())
        .map(|k| {
            let k64 = k as u64;
            let weight = BigRational::new(
                BigInt::from(big_n - 2 * k64 + 1) * factorial(c.n1() as u64) * factorial(c.n_c as u64),
                BigInt::from(big_n - k64 + 1) * factorial(k64) * factorial(big_n - k64),
            );
            let o2 = overlap_squared(k, &c).expect("k <= k_max");
            LimitTerm {
                k,
                weight: ratio_to_f64(&weight),
                overlap: ratio_to_f64(&o2).sqrt(),
                sine: ratio_to_f64(&(BigRational::one() - o2)).sqrt(),
            }
        })
        .collect()
}

/// `P₀ = (1 − Σ_k [(N−2k+1) n1! n_C! / ((N−k+1) k! (N−k)!)] √(1 − O_k²)) / 2`,
/// evaluated as written for any copy counts (canonicalized first).
pub fn bound_p0(cfg: &ProblemConfig) -> f64 {
    let sum: f64 = limit_terms(cfg).iter().map(|t| t.weight * t.sine).sum();
    (1.0 - sum) / 2.0
}

pub fn asymptotic_bounds(cfg: &ProblemConfig) -> AsymptoticBounds {
    AsymptoticBounds { q0: bound_q0(cfg).ok(), p0: bound_p0(cfg) }
}
