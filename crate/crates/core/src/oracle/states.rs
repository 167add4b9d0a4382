//! Symmetric-subspace projectors, the two mean input states, and a Haar
//! Monte Carlo estimate of the average of `|ψ⟩⟨ψ|^{⊗m}`.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::linalg::{hermitian_eig, norm, CMatrix, DenseHermitian, C64};
use crate::error::{Error, Result};
use crate::spectrum::ProblemConfig;

/// Eigenvalues above this count towards the support of a state.
pub const SUPPORT_THRESHOLD: f64 = 1e-9;

/// Linear index of a product basis state `|i_1 … i_m⟩` of `m` sites of
/// dimension `n`, most significant site first. Registers are laid out as
/// A, then B, then C.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TensorIndex {
    pub sites: usize,
    pub dim: usize,
}

impl TensorIndex {
    pub fn new(sites: usize, dim: usize) -> Self {
        TensorIndex { sites, dim }
    }

    /// `n^m`, or `None` on overflow.
    pub fn size(&self) -> Option<usize> {
        u32::try_from(self.sites).ok().and_then(|m| self.dim.checked_pow(m))
    }

    pub fn encode(&self, digits: &[usize]) -> usize {
        debug_assert_eq!(digits.len(), self.sites);
        digits.iter().fold(0, |acc, &d| {
            debug_assert!(d < self.dim);
            acc * self.dim + d
        })
    }

    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.sites];
        for slot in digits.iter_mut().rev() {
            *slot = index % self.dim;
            index /= self.dim;
        }
        digits
    }
}

pub(crate) fn checked_size(sites: u32, dim: u32, cap: usize) -> Result<usize> {
    let size = TensorIndex::new(sites as usize, dim as usize).size().unwrap_or(usize::MAX);
    if size > cap {
        return Err(Error::DimensionCap { dim: size, cap });
    }
    Ok(size)
}

/// `𝟙^[m] = (1/m!) Σ_σ P_σ` on `(Cⁿ)^{⊗m}`, with `P_σ` the site permutations.
pub fn symmetrizer(m: u32, n: u32, cap: usize) -> Result<DenseHermitian> {
    let size = checked_size(m, n, cap)?;
    let index = TensorIndex::new(m as usize, n as usize);
    let perms: Vec<Vec<usize>> = (0..m as usize).permutations(m as usize).collect();
    let weight = 1.0 / perms.len() as f64;
    let mut p = CMatrix::zeros(size, size);
    let mut permuted = vec![0; m as usize];
    for col in 0..size {
        let digits = index.decode(col);
        for perm in &perms {
            for (slot, &src) in permuted.iter_mut().zip(perm) {
                *slot = digits[src];
            }
            p[(index.encode(&permuted), col)] += weight;
        }
    }
    DenseHermitian::new(p)
}

/// Orthonormal basis of the support of a Hermitian operator, as columns.
pub fn support_basis(m: &DenseHermitian) -> Result<CMatrix> {
    let eig = hermitian_eig(m)?;
    let cols: Vec<Vec<C64>> =
        eig.values.iter().zip(eig.vectors).filter(|(&l, _)| l > SUPPORT_THRESHOLD).map(|(_, v)| v).collect();
    if cols.is_empty() {
        return Ok(CMatrix::zeros(m.dim(), 0));
    }
    Ok(CMatrix::from_columns(&cols))
}

/// Orthonormal basis of the symmetric subspace `𝓗^[m]`.
pub fn symmetric_basis(m: u32, n: u32, cap: usize) -> Result<CMatrix> {
    support_basis(&symmetrizer(m, n, cap)?)
}

/// `ρ₁ = 𝟙^[n1]⊗𝟙^[n_C]/d₁` and `ρ₂ = 𝟙^[n_A]⊗𝟙^[n2]/d₂` on the full space.
#[derive(Clone, Debug)]
pub struct MeanStates {
    pub rho1: DenseHermitian,
    pub rho2: DenseHermitian,
}

pub fn mean_states(cfg: &ProblemConfig, cap: usize) -> Result<MeanStates> {
    cfg.validate()?;
    checked_size(cfg.total(), cfg.dim, cap)?;
    let sym = |m| symmetrizer(m, cfg.dim, cap);
    let normalized = |p: DenseHermitian| {
        let t = p.trace();
        p.scale(1.0 / t)
    };
    Ok(MeanStates {
        rho1: normalized(sym(cfg.n1())?.kron(&sym(cfg.n_c)?)),
        rho2: normalized(sym(cfg.n_a)?.kron(&sym(cfg.n2())?)),
    })
}

fn haar_rng(m: u32, n: u32, seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((m as u64) << 32) | n as u64);
    rng
}

/// A Haar-random unit vector in `Cⁿ`.
pub fn haar_vector<R: Rng>(n: usize, rng: &mut R) -> Vec<C64> {
    let mut v: Vec<C64> = (0..n).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    let r = norm(&v);
    v.iter_mut().for_each(|z| *z /= r);
    v
}

fn tensor_power(psi: &[C64], m: u32) -> Vec<C64> {
    let mut out = vec![C64::new(1.0, 0.0)];
    for _ in 0..m {
        out = super::linalg::kron_vec(&out, psi);
    }
    out
}

/// Running means of `|ψ⟩⟨ψ|^{⊗m}`, snapshotted after each of the given
/// sample counts. Snapshots of one call share a single random stream, fixed
/// by `(seed, m, n)`.
pub fn haar_average_prefixes(
    m: u32,
    n: u32,
    checkpoints: &[usize],
    seed: u64,
    cap: usize,
) -> Result<Vec<DenseHermitian>> {
    let size = checked_size(m, n, cap)?;
    if checkpoints.first().is_none_or(|&c| c == 0) || !checkpoints.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Domain("sample counts must be positive and increasing".into()));
    }
    let mut rng = haar_rng(m, n, seed);
    let mut acc = CMatrix::zeros(size, size);
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut drawn = 0;
    for &target in checkpoints {
        while drawn < target {
            let psi = tensor_power(&haar_vector(n as usize, &mut rng), m);
            acc.add_outer(1.0, &psi, &psi);
            drawn += 1;
        }
        out.push(DenseHermitian::new(acc.scale(1.0 / drawn as f64))?);
    }
    Ok(out)
}

/// Empirical mean of `|ψ⟩⟨ψ|^{⊗m}` over `samples` Haar-random states.
pub fn haar_average(m: u32, n: u32, samples: usize, seed: u64, cap: usize) -> Result<DenseHermitian> {
    Ok(haar_average_prefixes(m, n, &[samples], seed, cap)?.remove(0))
}
