//! The certification grid: every closed form checked against the oracle
//! over a range of dimensions, copy counts and priors.
//!
//! Each check family yields one PASS/FAIL line with its case count and
//! largest residual. Output is a pure function of the options.

use std::fmt::Write as _;

use itertools::iproduct;
use num_bigint::BigInt;
use serde::Serialize;

use crate::discrimination::{minerror_probability, total_failure_with, QRule};
use crate::error::Result;
use crate::oracle::{
    certify_povm, haar_average_prefixes, lambda_spectrum_dense, mean_states, principal_angles, symmetrizer,
    trace_norm_error, OracleModel, PrincipalAngles, DEFAULT_CAP,
};
use crate::spectrum::{jordan_spectrum, overlap, overlap_via_6j, robinson_multiplicity, JordanSpectrum, ProblemConfig};

pub const ANGLE_TOLERANCE: f64 = 1e-9;
pub const MINERROR_TOLERANCE: f64 = 1e-9;
pub const SIXJ_TOLERANCE: f64 = 1e-12;
pub const HAAR_DISTANCE_BOUND: f64 = 0.02;
/// Quadrupling the samples should halve the error, to within ±30%.
pub const HAAR_RATIO_RANGE: (f64, f64) = (1.4, 2.6);
/// Seeds averaged over for the scaling check.
pub const HAAR_SEED_FAMILY: u64 = 32;
/// `(m, n)` pairs of the Monte Carlo check.
pub const HAAR_CASES: [(u32, u32); 4] = [(1, 2), (2, 2), (2, 3), (3, 2)];

#[derive(Clone, Debug, PartialEq)]
pub struct GridOptions {
    pub dims: Vec<u32>,
    /// Copy counts range over `1..=max_copies` in every register.
    pub max_copies: u32,
    pub etas: Vec<f64>,
    /// Largest `n^N` included in the oracle families.
    pub max_total_dim: usize,
    /// Largest `n^N` for which the dense full-space routes also run.
    pub dense_limit: usize,
    pub samples: usize,
    pub seed: u64,
    pub rule: QRule,
    pub cap: usize,
    /// Range of the exact identity and 6j families: `n <= identity_max_dim`,
    /// copies `<= identity_max_copies`.
    pub identity_max_dim: u32,
    pub identity_max_copies: u32,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions {
            dims: vec![2, 3, 4],
            max_copies: 3,
            etas: vec![0.1, 0.3, 0.5, 0.7, 0.9],
            max_total_dim: 1024,
            dense_limit: 64,
            samples: 100_000,
            seed: 2024,
            rule: QRule::Optimal,
            cap: DEFAULT_CAP,
            identity_max_dim: 6,
            identity_max_copies: 4,
        }
    }
}

impl GridOptions {
    /// Configurations of the oracle families, at equal priors.
    pub fn configs(&self) -> Vec<ProblemConfig> {
        let limit = self.max_total_dim.min(self.cap);
        let copies = 1..=self.max_copies;
        iproduct!(self.dims.iter().copied(), copies.clone(), copies.clone(), copies)
            .filter_map(|(n, a, b, c)| ProblemConfig::new(n, a, b, c, 0.5).ok())
            .filter(|cfg| cfg.tensor_dim().is_some_and(|d| d <= limit))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyReport {
    pub name: &'static str,
    pub cases: usize,
    pub max_residual: f64,
    pub failures: Vec<String>,
}

impl FamilyReport {
    fn new(name: &'static str) -> Self {
        FamilyReport { name, cases: 0, max_residual: 0.0, failures: Vec::new() }
    }

    fn record(&mut self, residual: f64, failure: Option<String>) {
        self.cases += 1;
        // NaN residuals propagate as failures through the callers' checks.
        if residual.is_nan() || residual > self.max_residual {
            self.max_residual = residual;
        }
        self.failures.extend(failure);
    }

    fn error(&mut self, context: String, err: impl std::fmt::Display) {
        self.cases += 1;
        self.failures.push(format!("{context}: {err}"));
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.cases > 0
    }

    pub fn status(&self) -> &'static str {
        if self.passed() {
            "PASS"
        } else {
            "FAIL"
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub families: Vec<FamilyReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.families.iter().all(FamilyReport::passed)
    }

    pub fn family(&self, name: &str) -> Option<&FamilyReport> {
        self.families.iter().find(|f| f.name == name)
    }

    /// One line per family, then the individual failures.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for f in &self.families {
            let _ =
                writeln!(out, "{} {:<14} cases={:<5} max_residual={:.3e}", f.status(), f.name, f.cases, f.max_residual);
        }
        for f in &self.families {
            for msg in &f.failures {
                let _ = writeln!(out, "  {}: {}", f.name, msg);
            }
        }
        let _ = writeln!(out, "{}", if self.passed() { "verify: PASS" } else { "verify: FAIL" });
        out
    }
}

/// Compares numerical principal angles with the closed-form blocks. Returns
/// the largest cosine deviation and a description of any mismatch.
pub fn compare_angles(angles: &PrincipalAngles, spec: &JordanSpectrum) -> (f64, Option<String>) {
    let cfg = spec.original_config();
    let (d1, d2) = (cfg.d1(), cfg.d2());
    let mut problems = Vec::new();
    if BigInt::from(angles.rank1) != d1 || BigInt::from(angles.rank2) != d2 {
        problems.push(format!("ranks ({}, {}) vs d1={d1}, d2={d2}", angles.rank1, angles.rank2));
    }
    let unpaired = |a: &BigInt, b: &BigInt| if a > b { a - b } else { BigInt::from(0) };
    if BigInt::from(angles.unpaired1) != unpaired(&d1, &d2) || BigInt::from(angles.unpaired2) != unpaired(&d2, &d1) {
        problems.push(format!("unpaired directions ({}, {})", angles.unpaired1, angles.unpaired2));
    }
    let mut residual: f64 = 0.0;
    if angles.groups.len() != spec.blocks.len() {
        problems.push(format!("{} distinct cosines vs {} blocks", angles.groups.len(), spec.blocks.len()));
    } else {
        for (g, b) in angles.groups.iter().zip(&spec.blocks) {
            let dev = (g.cosine - b.overlap).abs();
            residual = residual.max(dev);
            if !(dev <= ANGLE_TOLERANCE) {
                problems.push(format!("k={}: cosine {} vs O_k {}", b.k, g.cosine, b.overlap));
            }
            if BigInt::from(g.multiplicity) != b.multiplicity {
                problems.push(format!("k={}: multiplicity {} vs d^k {}", b.k, g.multiplicity, b.multiplicity));
            }
        }
    }
    let failure = (!problems.is_empty()).then(|| format!("{cfg}: {}", problems.join("; ")));
    (if failure.is_some() && residual == 0.0 { f64::INFINITY } else { residual }, failure)
}

fn check_tolerance(family: &mut FamilyReport, context: impl FnOnce() -> String, residual: f64, tolerance: f64) {
    let failure = (!(residual <= tolerance)).then(|| format!("{} (residual {residual:e})", context()));
    family.record(residual, failure);
}

struct OracleFamilies {
    angles: FamilyReport,
    minerror: FamilyReport,
    povm: FamilyReport,
}

fn run_oracle_families(opts: &GridOptions) -> OracleFamilies {
    let mut f = OracleFamilies {
        angles: FamilyReport::new("angles"),
        minerror: FamilyReport::new("minerror"),
        povm: FamilyReport::new("povm"),
    };
    for cfg in opts.configs() {
        let spec = match jordan_spectrum(&cfg) {
            Ok(s) => s,
            Err(e) => {
                f.angles.error(cfg.to_string(), e);
                continue;
            }
        };
        let model = match OracleModel::build(&cfg, opts.cap) {
            Ok(m) => m,
            Err(e) => {
                f.angles.error(cfg.to_string(), e);
                continue;
            }
        };
        let dense = cfg.tensor_dim().is_some_and(|d| d <= opts.dense_limit);

        let defect = model.joint_basis_defect();
        let (residual, failure) = compare_angles(&model.principal_angles(), &spec);
        let failure = failure.or_else(|| (defect > 1e-10).then(|| format!("{cfg}: joint basis defect {defect:e}")));
        f.angles.record(residual, failure);
        if dense {
            match mean_states(&cfg, opts.cap).and_then(|s| principal_angles(&s.rho1, &s.rho2)) {
                Ok(a) => {
                    let (r, failure) = compare_angles(&a, &spec);
                    f.angles.record(r, failure.map(|m| format!("dense route: {m}")));
                }
                Err(e) => f.angles.error(format!("{cfg} (dense)"), e),
            }
        }

        for &eta1 in &opts.etas {
            let cfg = match cfg.with_eta1(eta1) {
                Ok(c) => c,
                Err(e) => {
                    f.minerror.error(format!("{cfg} eta1={eta1}"), e);
                    continue;
                }
            };
            let spec = jordan_spectrum(&cfg).expect("validated above");
            let p_me = minerror_probability(&spec).p_me;
            match model.lambda_spectrum(cfg.eta1, cfg.eta2) {
                Ok(l) => {
                    let r = (trace_norm_error(&l) - p_me).abs();
                    check_tolerance(&mut f.minerror, || format!("{cfg}: P_ME"), r, MINERROR_TOLERANCE);
                }
                Err(e) => f.minerror.error(cfg.to_string(), e),
            }
            if dense {
                match lambda_spectrum_dense(&cfg, opts.cap) {
                    Ok(l) => {
                        let r = (trace_norm_error(&l) - p_me).abs();
                        check_tolerance(&mut f.minerror, || format!("{cfg}: dense P_ME"), r, MINERROR_TOLERANCE);
                    }
                    Err(e) => f.minerror.error(format!("{cfg} (dense)"), e),
                }
            }

            let result = total_failure_with(&spec, opts.rule);
            match certify_povm(&model, &result) {
                Ok(report) => {
                    let failure = report.verdict().err().map(|e| e.to_string());
                    f.povm.record(report.max_residual(), failure);
                }
                Err(e) => f.povm.error(cfg.to_string(), e),
            }
        }
    }
    f
}

fn identity_configs(opts: &GridOptions) -> impl Iterator<Item = ProblemConfig> {
    let copies = 1..=opts.identity_max_copies;
    iproduct!(2..=opts.identity_max_dim, copies.clone(), copies.clone(), copies)
        .filter_map(|(n, a, b, c)| ProblemConfig::new(n, a, b, c, 0.5).ok())
}

fn run_combinatorics(opts: &GridOptions) -> FamilyReport {
    let mut family = FamilyReport::new("combinatorics");
    for cfg in identity_configs(opts) {
        let spec = match jordan_spectrum(&cfg) {
            Ok(s) => s,
            Err(e) => {
                family.error(cfg.to_string(), e);
                continue;
            }
        };
        let c = spec.config;
        let mut problems = Vec::new();
        for b in &spec.blocks {
            let robinson = robinson_multiplicity(b.k, &c);
            if robinson != b.multiplicity {
                problems.push(format!("k={}: d^k {} vs Robinson {robinson}", b.k, b.multiplicity));
            }
        }
        let total: BigInt = spec.blocks.iter().map(|b| &b.multiplicity).sum();
        if total != spec.d1 {
            problems.push(format!("Σ d^k = {total} vs d1 = {}", spec.d1));
        }
        let failed = !problems.is_empty();
        family.record(
            if failed { f64::INFINITY } else { 0.0 },
            failed.then(|| format!("{cfg}: {}", problems.join("; "))),
        );
    }
    family
}

fn run_sixj(opts: &GridOptions) -> FamilyReport {
    let mut family = FamilyReport::new("sixj");
    for cfg in identity_configs(opts) {
        for k in 0..=cfg.k_max() {
            match (overlap(k, &cfg), overlap_via_6j(k, &cfg)) {
                (Ok(a), Ok(b)) => {
                    check_tolerance(&mut family, || format!("{cfg} k={k}"), (a - b).abs(), SIXJ_TOLERANCE)
                }
                (Err(e), _) | (_, Err(e)) => family.error(format!("{cfg} k={k}"), e),
            }
        }
    }
    family
}

/// Frobenius distances of Haar averages at `checkpoints` from `𝟙^[m]/d^[m]`.
pub fn haar_distances(m: u32, n: u32, checkpoints: &[usize], seed: u64, cap: usize) -> Result<Vec<f64>> {
    let sym = symmetrizer(m, n, cap)?;
    let target = sym.scale(1.0 / sym.trace());
    Ok(haar_average_prefixes(m, n, checkpoints, seed, cap)?
        .iter()
        .map(|avg| avg.matrix().add_scaled(target.matrix(), -1.0).frobenius_norm())
        .collect())
}

/// Monte Carlo check of a Haar average for one `(m, n)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HaarCheck {
    pub m: u32,
    pub n: u32,
    /// Distance at the full sample count for the base seed.
    pub distance: f64,
    /// RMS distance over the seed family at a quarter of the samples,
    /// divided by the RMS at the full count.
    pub scaling_ratio: Option<f64>,
}

impl HaarCheck {
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.distance <= HAAR_DISTANCE_BOUND) {
            out.push(format!("distance {} exceeds {HAAR_DISTANCE_BOUND}", self.distance));
        }
        if let Some(r) = self.scaling_ratio {
            if !(HAAR_RATIO_RANGE.0..=HAAR_RATIO_RANGE.1).contains(&r) {
                out.push(format!("error ratio {r} for 4x samples outside {HAAR_RATIO_RANGE:?}"));
            }
        }
        out
    }
}

pub fn haar_check(m: u32, n: u32, samples: usize, seed: u64, cap: usize) -> Result<HaarCheck> {
    let quarter = samples / 4;
    let checkpoints: Vec<usize> = if quarter >= 1 { vec![quarter, samples] } else { vec![samples] };
    let mut sq_small = 0.0;
    let mut sq_full = 0.0;
    let mut distance = f64::NAN;
    for i in 0..HAAR_SEED_FAMILY {
        let d = haar_distances(m, n, &checkpoints, seed.wrapping_add(i), cap)?;
        let full = *d.last().expect("at least one checkpoint");
        if i == 0 {
            distance = full;
        }
        sq_full += full * full;
        sq_small += d[0] * d[0];
    }
    let scaling_ratio = (checkpoints.len() == 2).then(|| (sq_small / sq_full).sqrt());
    Ok(HaarCheck { m, n, distance, scaling_ratio })
}

fn run_haar(opts: &GridOptions) -> FamilyReport {
    let mut family = FamilyReport::new("haar");
    for (m, n) in HAAR_CASES {
        match haar_check(m, n, opts.samples, opts.seed, opts.cap) {
            Ok(c) => {
                let v = c.violations();
                let failure = (!v.is_empty()).then(|| format!("m={m} n={n}: {}", v.join("; ")));
                family.record(c.distance, failure);
            }
            Err(e) => family.error(format!("m={m} n={n}"), e),
        }
    }
    family
}

/// Runs every family.
pub fn run_verify(opts: &GridOptions) -> VerifyReport {
    let oracle = run_oracle_families(opts);
    VerifyReport {
        families: vec![
            oracle.angles,
            oracle.minerror,
            oracle.povm,
            run_combinatorics(opts),
            run_sixj(opts),
            run_haar(opts),
        ],
    }
}
