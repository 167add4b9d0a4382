//! Jordan-block spectrum of the two mean input states.
//!
//! The program registers A and C hold `n_A` copies of `|φ₁⟩` and `n_C` copies
//! of `|φ₂⟩`; the data register B holds `n_B` copies of one of them. Averaging
//! over the unknown states leaves two maximally mixed states on products of
//! symmetric subspaces, and the pair decomposes into two-dimensional blocks
//! labelled by the two-row diagrams `[N-k, k]`, `k = 0..=min(n_A, n_C)`.
//! Each block has an overlap `O_k` between the two Jordan vectors and occurs
//! `d^k = d^[N-k,k]` times.

mod sixj;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, ratio_to_f64, unitary_dim, HalfInteger, Partition};
use crate::error::{Error, Result};
use crate::serde_big;

pub use sixj::wigner_6j;

/// Tolerance on `eta1 + eta2 = 1`.
pub const PRIOR_TOLERANCE: f64 = 1e-12;

/// The full problem statement: qudit dimension, copy counts and priors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfig")]
pub struct ProblemConfig {
    #[serde(rename = "n")]
    pub dim: u32,
    #[serde(rename = "n_A")]
    pub n_a: u32,
    #[serde(rename = "n_B")]
    pub n_b: u32,
    #[serde(rename = "n_C")]
    pub n_c: u32,
    pub eta1: f64,
    pub eta2: f64,
}

#[derive(Deserialize)]
struct RawConfig {
    n: u32,
    #[serde(rename = "n_A")]
    n_a: u32,
    #[serde(rename = "n_B")]
    n_b: u32,
    #[serde(rename = "n_C")]
    n_c: u32,
    eta1: f64,
    eta2: f64,
}

impl TryFrom<RawConfig> for ProblemConfig {
    type Error = Error;

    fn try_from(r: RawConfig) -> Result<Self> {
        ProblemConfig::with_priors(r.n, r.n_a, r.n_b, r.n_c, r.eta1, r.eta2)
    }
}

impl ProblemConfig {
    /// Config with `eta2 = 1 - eta1`.
    pub fn new(dim: u32, n_a: u32, n_b: u32, n_c: u32, eta1: f64) -> Result<Self> {
        Self::with_priors(dim, n_a, n_b, n_c, eta1, 1.0 - eta1)
    }

    pub fn with_priors(dim: u32, n_a: u32, n_b: u32, n_c: u32, eta1: f64, eta2: f64) -> Result<Self> {
        let cfg = ProblemConfig { dim, n_a, n_b, n_c, eta1, eta2 };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidConfig(format!("dimension must be at least 2, got {}", self.dim)));
        }
        if self.n_a == 0 || self.n_b == 0 || self.n_c == 0 {
            return Err(Error::InvalidConfig("copy counts must be positive".into()));
        }
        let valid_prior = |p: f64| p.is_finite() && (0.0..=1.0).contains(&p);
        if !valid_prior(self.eta1) || !valid_prior(self.eta2) {
            return Err(Error::InvalidConfig(format!("priors must lie in [0, 1], got ({}, {})", self.eta1, self.eta2)));
        }
        if (self.eta1 + self.eta2 - 1.0).abs() > PRIOR_TOLERANCE {
            return Err(Error::InvalidConfig(format!("priors must sum to 1, got {} + {}", self.eta1, self.eta2)));
        }
        Ok(())
    }

    /// Copies of `|φ₁⟩`: `n_A + n_B`.
    pub fn n1(&self) -> u32 {
        self.n_a + self.n_b
    }

    /// Copies of `|φ₂⟩`: `n_B + n_C`.
    pub fn n2(&self) -> u32 {
        self.n_b + self.n_c
    }

    /// Total number of sites `N`.
    pub fn total(&self) -> u32 {
        self.n_a + self.n_b + self.n_c
    }

    pub fn k_max(&self) -> u32 {
        self.n_a.min(self.n_c)
    }

    pub fn is_canonical(&self) -> bool {
        self.n_a >= self.n_c
    }

    /// Rank of ρ₁: `d^[n1] · d^[n_C]`.
    pub fn d1(&self) -> BigInt {
        sym_dim(self.n1(), self.dim) * sym_dim(self.n_c, self.dim)
    }

    /// Rank of ρ₂: `d^[n_A] · d^[n2]`.
    pub fn d2(&self) -> BigInt {
        sym_dim(self.n_a, self.dim) * sym_dim(self.n2(), self.dim)
    }

    /// Dimension `n^N` of the full tensor space, if it fits in `usize`.
    pub fn tensor_dim(&self) -> Option<usize> {
        (self.dim as usize).checked_pow(self.total())
    }

    /// Same dimension and copies with different priors.
    pub fn with_eta1(&self, eta1: f64) -> Result<Self> {
        Self::new(self.dim, self.n_a, self.n_b, self.n_c, eta1)
    }

    fn swapped(&self) -> Self {
        ProblemConfig { n_a: self.n_c, n_c: self.n_a, eta1: self.eta2, eta2: self.eta1, ..*self }
    }
}

impl fmt::Display for ProblemConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} n_A={} n_B={} n_C={} eta1={}", self.dim, self.n_a, self.n_b, self.n_c, self.eta1)
    }
}

/// `d^[m]` for dimension `n`: `C(n+m-1, n-1)`.
pub fn sym_dim(m: u32, n: u32) -> BigInt {
    binomial((n + m - 1) as u64, n as i64 - 1)
}

/// Relabels A ↔ C (and η₁ ↔ η₂) so that `n_A >= n_C`. The flag reports
/// whether a swap happened; results for the swapped problem map back by
/// exchanging the roles of ρ₁ and ρ₂.
pub fn canonicalize(cfg: &ProblemConfig) -> (ProblemConfig, bool) {
    if cfg.n_a < cfg.n_c {
        (cfg.swapped(), true)
    } else {
        (*cfg, false)
    }
}

fn check_block(k: u32, cfg: &ProblemConfig) -> Result<()> {
    if k > cfg.k_max() {
        return Err(Error::BlockOutOfRange { k, k_max: cfg.k_max() });
    }
    Ok(())
}

/// `O_k²` as an exact rational:
/// `C(n1-k, n_B) C(n2-k, n_B) / (C(n1, n_B) C(n2, n_B))`.
pub fn overlap_squared(k: u32, cfg: &ProblemConfig) -> Result<BigRational> {
    check_block(k, cfg)?;
    let nb = cfg.n_b as i64;
    let (n1, n2, k) = (cfg.n1() as u64, cfg.n2() as u64, k as u64);
    Ok(BigRational::new(binomial(n1 - k, nb) * binomial(n2 - k, nb), binomial(n1, nb) * binomial(n2, nb)))
}

/// `O_k`, the Jordan-vector overlap in block `k`.
pub fn overlap(k: u32, cfg: &ProblemConfig) -> Result<f64> {
    Ok(ratio_to_f64(&overlap_squared(k, cfg)?).sqrt())
}

/// `d^k = ((N-2k+1)/(N-k+1)) C(N+n-k-1, n-1) C(n+k-2, n-2)`, exact.
pub fn multiplicity(k: u32, cfg: &ProblemConfig) -> Result<BigInt> {
    check_block(k, cfg)?;
    let (big_n, n, k) = (cfg.total() as u64, cfg.dim as u64, k as u64);
    let num =
        BigInt::from(big_n - 2 * k + 1) * binomial(big_n + n - k - 1, n as i64 - 1) * binomial(n + k - 2, n as i64 - 2);
    let den = BigInt::from(big_n - k + 1);
    let (q, r) = num_integer::Integer::div_rem(&num, &den);
    assert!(r.is_zero(), "multiplicity d^{k} is not an integer for {cfg}");
    Ok(q)
}

/// The same overlap through the angular-momentum recoupling of three spins
/// `j_A = n_A/2`, `j_B = n_B/2`, `j_C = n_C/2` at total `J = N/2 - k`.
pub fn overlap_via_6j(k: u32, cfg: &ProblemConfig) -> Result<f64> {
    check_block(k, cfg)?;
    let h = |twice: u32| HalfInteger::from_twice(twice as u64);
    let j_total = cfg.total() - 2 * k;
    let symbol = wigner_6j([h(cfg.n_a), h(cfg.n_b), h(cfg.n1()), h(cfg.n_c), h(j_total), h(cfg.n2())]);
    // (-1)^(j_A + j_B + j_C + J) with all four summed: N - k, an integer.
    let sign = if (cfg.total() - k).is_multiple_of(2) { 1.0 } else { -1.0 };
    let norm = (((cfg.n1() + 1) * (cfg.n2() + 1)) as f64).sqrt();
    Ok(sign * norm * symbol)
}

/// One Jordan block `[N-k, k]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Block {
    pub k: u32,
    /// `O_k`.
    pub overlap: f64,
    #[serde(skip)]
    pub overlap_sq: BigRational,
    /// `d^k`.
    #[serde(with = "serde_big")]
    pub multiplicity: BigInt,
}

/// Blocks of the canonicalized problem plus the two ranks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JordanSpectrum {
    /// The canonical (`n_A >= n_C`) configuration the blocks refer to.
    pub config: ProblemConfig,
    /// Whether `config` is the caller's configuration with A and C exchanged.
    pub swapped: bool,
    pub blocks: Vec<Block>,
    #[serde(with = "serde_big")]
    pub d1: BigInt,
    #[serde(with = "serde_big")]
    pub d2: BigInt,
}

impl JordanSpectrum {
    pub fn k_max(&self) -> u32 {
        self.config.k_max()
    }

    /// `d1 / d2` as a float, from the exact ratio.
    pub fn rank_ratio(&self) -> f64 {
        ratio_to_f64(&BigRational::new(self.d1.clone(), self.d2.clone()))
    }

    /// `d^k / d1` and `d^k / d2` as floats, from exact ratios.
    pub fn block_weights(&self, block: &Block) -> (f64, f64) {
        (
            ratio_to_f64(&BigRational::new(block.multiplicity.clone(), self.d1.clone())),
            ratio_to_f64(&BigRational::new(block.multiplicity.clone(), self.d2.clone())),
        )
    }

    /// Dimension of the part of the larger support with no partner: `d2 - d1`.
    pub fn unpaired(&self) -> BigInt {
        &self.d2 - &self.d1
    }

    /// The caller's configuration (undoing the canonical relabeling).
    pub fn original_config(&self) -> ProblemConfig {
        if self.swapped {
            self.config.swapped()
        } else {
            self.config
        }
    }
}

/// Builds the block spectrum. The configuration is canonicalized first; the
/// returned spectrum records whether that swapped A and C.
pub fn jordan_spectrum(cfg: &ProblemConfig) -> Result<JordanSpectrum> {
    cfg.validate()?;
    let (config, swapped) = canonicalize(cfg);
    let blocks = (0..=config.k_max())
        .map(|k| {
            let overlap_sq = overlap_squared(k, &config)?;
            Ok(Block {
                k,
                overlap: ratio_to_f64(&overlap_sq).sqrt(),
                overlap_sq,
                multiplicity: multiplicity(k, &config)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let spectrum = JordanSpectrum { config, swapped, blocks, d1: config.d1(), d2: config.d2() };

    let total: BigInt = spectrum.blocks.iter().map(|b| &b.multiplicity).sum();
    assert_eq!(total, spectrum.d1, "block multiplicities must exhaust supp ρ₁ for {config}");
    assert!(
        spectrum.blocks.windows(2).all(|w| w[1].overlap_sq < w[0].overlap_sq),
        "overlaps must strictly decrease for {config}"
    );
    Ok(spectrum)
}

/// Prior of a block vector and the conditional priors of its two states.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BlockPriors {
    /// `η₁/d₁ + η₂/d₂`.
    pub p_block: f64,
    pub eta_block_1: f64,
    pub eta_block_2: f64,
}

pub fn block_priors(cfg: &ProblemConfig) -> BlockPriors {
    let (d1, d2) = (cfg.d1(), cfg.d2());
    let rho = ratio_to_f64(&BigRational::new(d1.clone(), d2.clone()));
    let p_block = cfg.eta1 / d1.to_f64().unwrap_or(f64::INFINITY) + cfg.eta2 / d2.to_f64().unwrap_or(f64::INFINITY);
    // η₁/(d₁ p) = η₁ / (η₁ + η₂ d₁/d₂)
    let eta_block_1 = cfg.eta1 / (cfg.eta1 + cfg.eta2 * rho);
    BlockPriors { p_block, eta_block_1, eta_block_2: 1.0 - eta_block_1 }
}

/// `[N-k, k]` as a partition (a single row when `k = 0`).
pub fn block_partition(k: u32, cfg: &ProblemConfig) -> Partition {
    Partition::two_row((cfg.total() - k) as usize, k as usize).expect("N - k >= k > 0")
}

/// `d^[N-k,k](n)` by the Robinson formula, the independent route to `d^k`.
pub fn robinson_multiplicity(k: u32, cfg: &ProblemConfig) -> BigInt {
    unitary_dim(&block_partition(k, cfg), cfg.dim as usize)
}
