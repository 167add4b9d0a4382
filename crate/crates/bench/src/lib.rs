//! Shared fixtures for the criterion benches.

use qudisc_core::ProblemConfig;

/// Configurations with growing total copy number, all at `eta1 = 0.3`.
pub fn ladder(dim: u32) -> Vec<ProblemConfig> {
    [(1, 1, 1), (2, 2, 2), (4, 3, 4), (8, 6, 8), (16, 12, 16)]
        .into_iter()
        .map(|(a, b, c)| ProblemConfig::new(dim, a, b, c, 0.3).expect("valid configuration"))
        .collect()
}

/// Oracle-sized configurations, labelled by their tensor dimension.
pub fn oracle_cases() -> Vec<(usize, ProblemConfig)> {
    [(2, 1, 1, 1), (2, 2, 2, 2), (3, 2, 1, 2), (2, 3, 3, 3), (4, 2, 1, 2)]
        .into_iter()
        .map(|(n, a, b, c)| {
            let cfg = ProblemConfig::new(n, a, b, c, 0.5).expect("valid configuration");
            (cfg.tensor_dim().expect("small"), cfg)
        })
        .collect()
}
