//! First-principles numerical checks of the closed forms.
//!
//! The oracle never uses the block formulas. It builds the mean states from
//! permutation symmetrizers on the tensor space `(Cⁿ)^{⊗N}` (site order A, B,
//! C, most significant first), extracts principal angles between their
//! supports, diagonalizes the Helstrom operator, and assembles the
//! unambiguous POVM from numerically found Jordan pairs.

pub mod angles;
pub mod certify;
pub mod linalg;
pub mod states;

pub use angles::{group_cosines, jordan_pairs, principal_angles, AngleGroup, JordanPairs, PrincipalAngles};
pub use certify::{
    assemble_povm, certify_povm, lambda_spectrum, lambda_spectrum_dense, trace_norm_error, OracleModel, Povm,
    PovmReport,
};
pub use linalg::{hermitian_eig, hermitian_eigenvalues, CMatrix, DenseHermitian, Eigen};
pub use states::{haar_average, haar_average_prefixes, mean_states, symmetrizer, MeanStates, TensorIndex};

/// Largest operator dimension the oracle will build by default.
pub const DEFAULT_CAP: usize = 4096;

/// Environment variable overriding [`DEFAULT_CAP`].
pub const CAP_ENV: &str = "QUDISC_MAX_DIM";

/// The dimension cap: `QUDISC_MAX_DIM` if set to a positive integer, else
/// [`DEFAULT_CAP`].
pub fn cap_from_env() -> usize {
    std::env::var(CAP_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&c| c > 0).unwrap_or(DEFAULT_CAP)
}
