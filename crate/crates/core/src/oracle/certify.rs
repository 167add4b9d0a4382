//! Numerical model of the two mean states on their joint support, the
//! spectrum of the Helstrom operator, and assembly plus certification of the
//! unambiguous POVM.
//!
//! Both supports are products of symmetric subspaces, so orthonormal bases
//! come from the factor symmetrizers. Everything downstream of the bases is
//! computed in an orthonormal basis `W` of `supp ρ₁ + supp ρ₂`, where both
//! states and all POVM elements live. Outside that span Λ vanishes and the
//! POVM is immaterial.

use std::collections::HashMap;

use serde::Serialize;

use super::angles::{jordan_pairs, JordanPairs, PrincipalAngles, GROUPING_TOLERANCE};
use super::linalg::{hermitian_eig, hermitian_eigenvalues, CMatrix, DenseHermitian, C64};
use super::states::{checked_size, mean_states, symmetric_basis};
use crate::discrimination::UnambiguousResult;
use crate::error::{Error, Result};
use crate::spectrum::ProblemConfig;

pub const POSITIVITY_TOLERANCE: f64 = 1e-10;
pub const COMPLETENESS_TOLERANCE: f64 = 1e-10;
pub const ZERO_ERROR_TOLERANCE: f64 = 1e-10;
pub const FAILURE_TOLERANCE: f64 = 1e-9;

/// Pairs whose cosine is within this of 1 span a single direction.
const DEGENERATE_GAP: f64 = 1e-9;
/// Squared norms of projected directions at or below this are shared.
const COMPLEMENT_THRESHOLD: f64 = 1e-8;

/// The two supports, their Jordan pairs, and the joint basis.
#[derive(Clone, Debug)]
pub struct OracleModel {
    pub config: ProblemConfig,
    /// `n^N`.
    pub ambient_dim: usize,
    /// Orthonormal columns spanning `supp ρ₁ = 𝓗^[n1] ⊗ 𝓗^[n_C]`.
    pub basis1: CMatrix,
    /// Orthonormal columns spanning `supp ρ₂ = 𝓗^[n_A] ⊗ 𝓗^[n2]`.
    pub basis2: CMatrix,
    pub pairs: JordanPairs,
    /// Orthonormal columns spanning `supp ρ₁ + supp ρ₂`.
    pub joint: CMatrix,
    /// `W† B₁`.
    pub coords1: CMatrix,
    /// `W† B₂`.
    pub coords2: CMatrix,
}

/// `[base | extra']` with `extra'` an orthonormal basis of the part of
/// `span(extra)` orthogonal to `base`. The complement comes from the Gram
/// matrix of the projected columns, whose eigenvalues `1 − cos²θ` keep a
/// clear gap from the discarded (shared) directions.
fn orthonormal_extension(base: &CMatrix, extra: &CMatrix) -> Result<CMatrix> {
    let projected = extra.add_scaled(&base.matmul(&base.adjoint().matmul(extra)), -1.0);
    let gram = projected.adjoint().matmul(&projected);
    let gram = DenseHermitian::new(gram.add_scaled(&gram.adjoint(), 1.0).scale(0.5))?;
    let eig = hermitian_eig(&gram)?;
    let mut cols: Vec<Vec<C64>> = (0..base.cols()).map(|j| base.column(j)).collect();
    for (&mu, e) in eig.values.iter().zip(&eig.vectors).rev() {
        if mu <= COMPLEMENT_THRESHOLD {
            break;
        }
        let mut x = projected.mul_vec(e);
        let r = mu.sqrt();
        x.iter_mut().for_each(|z| *z /= r);
        cols.push(x);
    }
    Ok(CMatrix::from_columns(&cols))
}

fn outer_sum(coords: &CMatrix, weight: f64) -> DenseHermitian {
    let n = coords.rows();
    let mut m = CMatrix::zeros(n, n);
    for j in 0..coords.cols() {
        let c = coords.column(j);
        m.add_outer(weight, &c, &c);
    }
    DenseHermitian::new(m).expect("sum of outer products is Hermitian")
}

impl OracleModel {
    /// Builds the model for the copy counts of `cfg`; the priors are unused.
    pub fn build(cfg: &ProblemConfig, cap: usize) -> Result<Self> {
        cfg.validate()?;
        let ambient_dim = checked_size(cfg.total(), cfg.dim, cap)?;
        let mut sym: HashMap<u32, CMatrix> = HashMap::new();
        for m in [cfg.n_a, cfg.n_c, cfg.n1(), cfg.n2()] {
            if let std::collections::hash_map::Entry::Vacant(e) = sym.entry(m) {
                e.insert(symmetric_basis(m, cfg.dim, cap)?);
            }
        }
        let basis1 = sym[&cfg.n1()].kron(&sym[&cfg.n_c]);
        let basis2 = sym[&cfg.n_a].kron(&sym[&cfg.n2()]);
        let pairs = jordan_pairs(&basis1, &basis2)?;
        let joint = orthonormal_extension(&basis1, &basis2)?;
        let wa = joint.adjoint();
        let coords1 = wa.matmul(&basis1);
        let coords2 = wa.matmul(&basis2);
        Ok(OracleModel { config: *cfg, ambient_dim, basis1, basis2, pairs, joint, coords1, coords2 })
    }

    pub fn rank1(&self) -> usize {
        self.basis1.cols()
    }

    pub fn rank2(&self) -> usize {
        self.basis2.cols()
    }

    pub fn joint_dim(&self) -> usize {
        self.joint.cols()
    }

    pub fn principal_angles(&self) -> PrincipalAngles {
        PrincipalAngles::from_pairs(&self.pairs, self.rank1(), self.rank2())
    }

    /// `max |W†W − I|` and `max |B − W W† B|` over both supports.
    pub fn joint_basis_defect(&self) -> f64 {
        let gram = self.joint.adjoint().matmul(&self.joint);
        let ortho = gram.max_abs_diff(&CMatrix::identity(self.joint_dim()));
        let cover = |b: &CMatrix, y: &CMatrix| self.joint.matmul(y).max_abs_diff(b);
        ortho.max(cover(&self.basis1, &self.coords1)).max(cover(&self.basis2, &self.coords2))
    }

    /// ρ₁ restricted to the joint support.
    pub fn rho1(&self) -> DenseHermitian {
        outer_sum(&self.coords1, 1.0 / self.rank1() as f64)
    }

    /// ρ₂ restricted to the joint support.
    pub fn rho2(&self) -> DenseHermitian {
        outer_sum(&self.coords2, 1.0 / self.rank2() as f64)
    }

    /// Spectrum of `Λ = η₂ρ₂ − η₁ρ₁` on the full space, ascending: the
    /// eigenvalues on the joint support plus `n^N − dim W` zeros.
    pub fn lambda_spectrum(&self, eta1: f64, eta2: f64) -> Result<Vec<f64>> {
        let lambda = self.rho2().scale(eta2).add_scaled(&self.rho1(), -eta1);
        let mut values = hermitian_eigenvalues(&lambda)?;
        values.resize(self.ambient_dim, 0.0);
        values.sort_by(f64::total_cmp);
        Ok(values)
    }
}

/// `(1 − Σ|λ_i|)/2`.
pub fn trace_norm_error(spectrum: &[f64]) -> f64 {
    (1.0 - spectrum.iter().map(|l| l.abs()).sum::<f64>()) / 2.0
}

/// Spectrum of Λ for the priors of `cfg`, through the joint-support model.
pub fn lambda_spectrum(cfg: &ProblemConfig, cap: usize) -> Result<Vec<f64>> {
    OracleModel::build(cfg, cap)?.lambda_spectrum(cfg.eta1, cfg.eta2)
}

/// Spectrum of Λ from the dense `n^N × n^N` operator.
pub fn lambda_spectrum_dense(cfg: &ProblemConfig, cap: usize) -> Result<Vec<f64>> {
    let s = mean_states(cfg, cap)?;
    hermitian_eigenvalues(&s.rho2.scale(cfg.eta2).add_scaled(&s.rho1, -cfg.eta1))
}

/// The three POVM elements in joint-support coordinates.
#[derive(Clone, Debug)]
pub struct Povm {
    /// Inconclusive outcome.
    pub pi0: DenseHermitian,
    /// Conclusive "state 1".
    pub pi1: DenseHermitian,
    /// Conclusive "state 2".
    pub pi2: DenseHermitian,
    /// Rank of the part of `Π₁ + Π₂` on unpaired support directions.
    pub perp_rank: usize,
    /// Largest `|cos θ_i − O_k|` over the pairs matched to closed-form blocks.
    pub cosine_mismatch: f64,
}

/// Assembles the POVM with the per-block failure parameters of `result`.
pub fn assemble_povm(model: &OracleModel, result: &UnambiguousResult) -> Result<Povm> {
    let (a, b) = (&model.config, &result.config);
    if (a.dim, a.n_a, a.n_b, a.n_c) != (b.dim, b.n_a, b.n_b, b.n_c) {
        return Err(Error::InvalidConfig(format!("model is for {a}, result for {b}")));
    }
    let w = model.joint_dim();
    let mut pi0 = CMatrix::zeros(w, w);
    let mut pi1 = CMatrix::zeros(w, w);
    let mut pi2 = CMatrix::zeros(w, w);
    let mut cosine_mismatch: f64 = 0.0;

    for ((&sigma, ua), vb) in model.pairs.cosines.iter().zip(&model.pairs.u).zip(&model.pairs.v) {
        let u = model.coords1.mul_vec(ua);
        if 1.0 - sigma <= DEGENERATE_GAP {
            pi0.add_outer(1.0, &u, &u);
            continue;
        }
        let block = result
            .blocks
            .iter()
            .min_by(|x, y| (x.overlap - sigma).abs().total_cmp(&(y.overlap - sigma).abs()))
            .filter(|blk| (blk.overlap - sigma).abs() <= GROUPING_TOLERANCE)
            .ok_or_else(|| Error::Certification(format!("no closed-form block has overlap {sigma}")))?;
        cosine_mismatch = cosine_mismatch.max((block.overlap - sigma).abs());

        let v = model.coords2.mul_vec(vb);
        let gap = 1.0 - sigma * sigma;
        let s = gap.sqrt();
        // ψ₁⊥ ⟂ u and ψ₂⊥ ⟂ v, both inside span{u, v}.
        let psi1: Vec<C64> = v.iter().zip(&u).map(|(vi, ui)| (vi - ui * sigma) / s).collect();
        let psi2: Vec<C64> = u.iter().zip(&v).map(|(ui, vi)| (ui - vi * sigma) / s).collect();
        let (w1, w2) = ((1.0 - block.q1) / gap, (1.0 - block.q2) / gap);
        pi1.add_outer(w1, &psi2, &psi2);
        pi2.add_outer(w2, &psi1, &psi1);
        pi0.add_outer(1.0, &u, &u);
        pi0.add_outer(1.0, &psi1, &psi1);
        pi0.add_outer(-w1, &psi2, &psi2);
        pi0.add_outer(-w2, &psi1, &psi1);
    }
    for c in &model.pairs.unpaired1 {
        let x = model.coords1.mul_vec(c);
        pi1.add_outer(1.0, &x, &x);
    }
    for c in &model.pairs.unpaired2 {
        let x = model.coords2.mul_vec(c);
        pi2.add_outer(1.0, &x, &x);
    }
    let herm = |m: CMatrix| DenseHermitian::new(m);
    Ok(Povm {
        pi0: herm(pi0)?,
        pi1: herm(pi1)?,
        pi2: herm(pi2)?,
        perp_rank: model.pairs.unpaired1.len() + model.pairs.unpaired2.len(),
        cosine_mismatch,
    })
}

/// Measured properties of an assembled POVM.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PovmReport {
    pub config: ProblemConfig,
    /// Smallest eigenvalues of `Π₀`, `Π₁`, `Π₂`.
    pub min_eigenvalues: [f64; 3],
    /// `max |Π₀ + Π₁ + Π₂ − 𝟙|` on the joint support.
    pub completeness: f64,
    /// `Tr(ρ₁ Π₂)`.
    pub error_1_as_2: f64,
    /// `Tr(ρ₂ Π₁)`.
    pub error_2_as_1: f64,
    /// `η₁ Tr(ρ₁ Π₀) + η₂ Tr(ρ₂ Π₀)`.
    pub failure: f64,
    /// The closed-form `Q^opt` being certified.
    pub expected_failure: f64,
    pub perp_rank: usize,
    pub cosine_mismatch: f64,
}

impl PovmReport {
    /// Names of the properties that do not hold, empty when certified.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, &l) in ["Π₀", "Π₁", "Π₂"].iter().zip(&self.min_eigenvalues) {
            if !(l >= -POSITIVITY_TOLERANCE) {
                out.push(format!("positivity of {name}: min eigenvalue {l:e}"));
            }
        }
        if !(self.completeness <= COMPLETENESS_TOLERANCE) {
            out.push(format!("completeness: deviation {:e}", self.completeness));
        }
        if !(self.error_1_as_2.abs() <= ZERO_ERROR_TOLERANCE) {
            out.push(format!("zero error: Tr(ρ₁Π₂) = {:e}", self.error_1_as_2));
        }
        if !(self.error_2_as_1.abs() <= ZERO_ERROR_TOLERANCE) {
            out.push(format!("zero error: Tr(ρ₂Π₁) = {:e}", self.error_2_as_1));
        }
        if !(self.failure_residual() <= FAILURE_TOLERANCE) {
            out.push(format!("failure probability: {} vs closed form {}", self.failure, self.expected_failure));
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.violations().is_empty()
    }

    pub fn failure_residual(&self) -> f64 {
        (self.failure - self.expected_failure).abs()
    }

    /// Largest deviation over all certified properties.
    pub fn max_residual(&self) -> f64 {
        let negativity = self.min_eigenvalues.iter().map(|&l| (-l).max(0.0)).fold(0.0, f64::max);
        [negativity, self.completeness, self.error_1_as_2.abs(), self.error_2_as_1.abs(), self.failure_residual()]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn verdict(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Certification(format!("{}: {}", self.config, v.join("; "))))
        }
    }
}

/// Builds the POVM for `result` on `model` and measures it.
pub fn certify_povm(model: &OracleModel, result: &UnambiguousResult) -> Result<PovmReport> {
    let povm = assemble_povm(model, result)?;
    let (rho1, rho2) = (model.rho1(), model.rho2());
    let w = model.joint_dim();
    let total = povm.pi0.matrix().add_scaled(povm.pi1.matrix(), 1.0).add_scaled(povm.pi2.matrix(), 1.0);
    let tr = |rho: &DenseHermitian, pi: &DenseHermitian| rho.matrix().trace_product(pi.matrix()).re;
    let min_eig =
        |pi: &DenseHermitian| -> Result<f64> { Ok(hermitian_eigenvalues(pi)?.first().copied().unwrap_or(0.0)) };
    let ProblemConfig { eta1, eta2, .. } = result.config;
    Ok(PovmReport {
        config: result.config,
        min_eigenvalues: [min_eig(&povm.pi0)?, min_eig(&povm.pi1)?, min_eig(&povm.pi2)?],
        completeness: total.max_abs_diff(&CMatrix::identity(w)),
        error_1_as_2: tr(&rho1, &povm.pi2),
        error_2_as_1: tr(&rho2, &povm.pi1),
        failure: eta1 * tr(&rho1, &povm.pi0) + eta2 * tr(&rho2, &povm.pi0),
        expected_failure: result.q_total,
        perp_rank: povm.perp_rank,
        cosine_mismatch: povm.cosine_mismatch,
    })
}
