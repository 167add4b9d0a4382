//! Principal angles between two subspaces and the paired (Jordan) bases that
//! realize them.

use serde::Serialize;

use super::linalg::{hermitian_eig, CMatrix, DenseHermitian, C64};
use super::states::support_basis;
use crate::error::Result;

/// Cosines closer than this are treated as one angle.
pub const GROUPING_TOLERANCE: f64 = 1e-7;

/// Singular values below this leave a direction unpaired.
const PAIRING_THRESHOLD: f64 = 1e-7;

/// Paired orthonormal bases of two subspaces with `⟨u_i|v_j⟩ = δ_ij cos θ_i`.
///
/// Vectors are stored as coefficients in the two input bases: the ambient
/// vector of `u_i` is `B₁ · u[i]`.
#[derive(Clone, Debug)]
pub struct JordanPairs {
    /// Descending.
    pub cosines: Vec<f64>,
    pub u: Vec<Vec<C64>>,
    pub v: Vec<Vec<C64>>,
    /// Directions of the first subspace orthogonal to the whole second one.
    pub unpaired1: Vec<Vec<C64>>,
    /// Directions of the second subspace orthogonal to the whole first one.
    pub unpaired2: Vec<Vec<C64>>,
}

struct OneSided {
    cosines: Vec<f64>,
    small: Vec<Vec<C64>>,
    large: Vec<Vec<C64>>,
    unpaired_small: Vec<Vec<C64>>,
    unpaired_large: Vec<Vec<C64>>,
}

/// `x` is `P†Q` with `P` the side of lower or equal rank.
fn pair_from_overlap(x: &CMatrix) -> Result<OneSided> {
    let xa = x.adjoint();
    let gram_small = DenseHermitian::new(hermitize(x.matmul(&xa)))?;
    let gram_large = DenseHermitian::new(hermitize(xa.matmul(x)))?;

    let mut out = OneSided {
        cosines: Vec::new(),
        small: Vec::new(),
        large: Vec::new(),
        unpaired_small: Vec::new(),
        unpaired_large: Vec::new(),
    };
    let eig = hermitian_eig(&gram_small)?;
    for (s2, a) in eig.values.iter().zip(eig.vectors).rev() {
        let sigma = s2.max(0.0).sqrt();
        if sigma <= PAIRING_THRESHOLD {
            out.unpaired_small.push(a);
            continue;
        }
        let mut b = xa.mul_vec(&a);
        b.iter_mut().for_each(|z| *z /= sigma);
        out.cosines.push(sigma.min(1.0));
        out.small.push(a);
        out.large.push(b);
    }
    let eig = hermitian_eig(&gram_large)?;
    out.unpaired_large = eig
        .values
        .iter()
        .zip(eig.vectors)
        .filter(|(s2, _)| s2.max(0.0).sqrt() <= PAIRING_THRESHOLD)
        .map(|(_, b)| b)
        .collect();
    Ok(out)
}

/// `(M + M†)/2`, removing roundoff asymmetry of a Gram product.
fn hermitize(m: CMatrix) -> CMatrix {
    let ma = m.adjoint();
    m.add_scaled(&ma, 1.0).scale(0.5)
}

/// Jordan pairs of the column spans of `b1` and `b2` (orthonormal columns).
pub fn jordan_pairs(b1: &CMatrix, b2: &CMatrix) -> Result<JordanPairs> {
    if b1.cols() <= b2.cols() {
        let s = pair_from_overlap(&b1.adjoint().matmul(b2))?;
        Ok(JordanPairs {
            cosines: s.cosines,
            u: s.small,
            v: s.large,
            unpaired1: s.unpaired_small,
            unpaired2: s.unpaired_large,
        })
    } else {
        let s = pair_from_overlap(&b2.adjoint().matmul(b1))?;
        Ok(JordanPairs {
            cosines: s.cosines,
            u: s.large,
            v: s.small,
            unpaired1: s.unpaired_large,
            unpaired2: s.unpaired_small,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AngleGroup {
    pub cosine: f64,
    pub multiplicity: usize,
}

/// Groups descending cosines whose neighbours differ by at most `tolerance`;
/// each group reports its mean.
pub fn group_cosines(cosines: &[f64], tolerance: f64) -> Vec<AngleGroup> {
    let mut sorted = cosines.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut groups: Vec<(f64, usize, f64)> = Vec::new();
    for c in sorted {
        match groups.last_mut() {
            Some((sum, count, last)) if (*last - c).abs() <= tolerance => {
                *sum += c;
                *count += 1;
                *last = c;
            }
            _ => groups.push((c, 1, c)),
        }
    }
    groups.into_iter().map(|(sum, count, _)| AngleGroup { cosine: sum / count as f64, multiplicity: count }).collect()
}

/// Principal-angle spectrum of two subspaces.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrincipalAngles {
    pub groups: Vec<AngleGroup>,
    pub rank1: usize,
    pub rank2: usize,
    pub unpaired1: usize,
    pub unpaired2: usize,
}

impl PrincipalAngles {
    pub fn from_pairs(pairs: &JordanPairs, rank1: usize, rank2: usize) -> Self {
        PrincipalAngles {
            groups: group_cosines(&pairs.cosines, GROUPING_TOLERANCE),
            rank1,
            rank2,
            unpaired1: pairs.unpaired1.len(),
            unpaired2: pairs.unpaired2.len(),
        }
    }
}

/// Principal angles between `supp ρ₁` and `supp ρ₂`, from dense states.
pub fn principal_angles(rho1: &DenseHermitian, rho2: &DenseHermitian) -> Result<PrincipalAngles> {
    let b1 = support_basis(rho1)?;
    let b2 = support_basis(rho2)?;
    let pairs = jordan_pairs(&b1, &b2)?;
    Ok(PrincipalAngles::from_pairs(&pairs, b1.cols(), b2.cols()))
}
