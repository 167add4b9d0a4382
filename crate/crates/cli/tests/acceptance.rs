//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use qudisc_core::discrimination::{bound_p0, bound_q0, minerror_probability, total_failure, total_failure_with, QRule};
use qudisc_core::oracle::{
    certify_povm, lambda_spectrum_dense, mean_states, principal_angles, trace_norm_error, OracleModel, DEFAULT_CAP,
};
use qudisc_core::spectrum::{overlap, overlap_via_6j, robinson_multiplicity};
use qudisc_core::verify::{compare_angles, haar_check, HAAR_CASES};
use qudisc_core::{jordan_spectrum, ProblemConfig};

const ORACLE_ETAS: [f64; 3] = [0.1, 0.5, 0.9];
/// Largest n^N at which the full-space dense routes run alongside the
/// reduced ones.
const DENSE_LIMIT: usize = 256;

fn product3(r: std::ops::RangeInclusive<u32>) -> Vec<(u32, u32, u32)> {
    let mut out = Vec::new();
    for a in r.clone() {
        for b in r.clone() {
            for c in r.clone() {
                out.push((a, b, c));
            }
        }
    }
    out
}

struct Verdict {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Verdict {
    fn new(failures: Vec<String>, summary: String) -> Self {
        Verdict { pass: failures.is_empty(), summary, details: failures }
    }

    fn note(mut self, line: String) -> Self {
        self.details.push(line);
        self
    }
}

type Entry = (u32, &'static str, fn() -> Verdict);

struct Case {
    cfg: ProblemConfig,
    model: OracleModel,
}

fn cfg(n: u32, a: u32, b: u32, c: u32, eta1: f64) -> ProblemConfig {
    ProblemConfig::new(n, a, b, c, eta1).expect("valid configuration")
}

fn q_opt(c: &ProblemConfig) -> f64 {
    total_failure(&jordan_spectrum(c).unwrap()).q_total
}

fn p_me(c: &ProblemConfig) -> f64 {
    minerror_probability(&jordan_spectrum(c).unwrap()).p_me
}

fn is_dense(c: &ProblemConfig) -> bool {
    c.tensor_dim().is_some_and(|d| d <= DENSE_LIMIT)
}

fn oracle_grid() -> Vec<ProblemConfig> {
    let mut out = Vec::new();
    for n in [2, 3, 4] {
        for (a, b, c) in product3(1..=3) {
            let c = cfg(n, a, b, c, 0.5);
            if c.tensor_dim().is_some_and(|d| d <= 1024) {
                out.push(c);
            }
        }
    }
    out
}

fn criterion_1(cases: &mut Vec<Case>) -> Verdict {
    let start = Instant::now();
    let mut failures = Vec::new();
    let (mut checks, mut worst) = (0, 0.0f64);
    for c in oracle_grid() {
        let spec = jordan_spectrum(&c).unwrap();
        let model = match OracleModel::build(&c, DEFAULT_CAP) {
            Ok(m) => m,
            Err(e) => {
                failures.push(format!("{c}: {e}"));
                continue;
            }
        };
        let (r, f) = compare_angles(&model.principal_angles(), &spec);
        checks += 1;
        worst = worst.max(r);
        failures.extend(f);
        if is_dense(&c) {
            match mean_states(&c, DEFAULT_CAP).and_then(|s| principal_angles(&s.rho1, &s.rho2)) {
                Ok(a) => {
                    let (r, f) = compare_angles(&a, &spec);
                    checks += 1;
                    worst = worst.max(r);
                    failures.extend(f.map(|m| format!("full space: {m}")));
                }
                Err(e) => failures.push(format!("{c} (full space): {e}")),
            }
        }
        cases.push(Case { cfg: c, model });
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(120) {
        failures.push(format!("runtime {elapsed:?} exceeds 2 min"));
    }
    Verdict::new(
        failures,
        format!(
            "{} configs, {checks} angle checks, max |cos - O_k| = {worst:.2e}, {:.1} s",
            cases.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_2(cases: &[Case]) -> Verdict {
    let mut failures = Vec::new();
    let (mut checks, mut worst) = (0, 0.0f64);
    for case in cases {
        for eta in ORACLE_ETAS {
            let c = case.cfg.with_eta1(eta).unwrap();
            let closed = p_me(&c);
            let mut spectra = vec![("reduced", case.model.lambda_spectrum(c.eta1, c.eta2))];
            if is_dense(&c) {
                spectra.push(("full space", lambda_spectrum_dense(&c, DEFAULT_CAP)));
            }
            for (route, spectrum) in spectra {
                match spectrum {
                    Ok(l) => {
                        let r = (trace_norm_error(&l) - closed).abs();
                        checks += 1;
                        worst = worst.max(r);
                        if !(r <= 1e-9) {
                            failures.push(format!("{c} ({route}): residual {r:e}"));
                        }
                    }
                    Err(e) => failures.push(format!("{c} ({route}): {e}")),
                }
            }
        }
    }
    Verdict::new(failures, format!("{checks} trace-norm checks, max |P - P_ME| = {worst:.2e}"))
}

fn criterion_3(cases: &[Case]) -> Verdict {
    let mut failures = Vec::new();
    let (mut checks, mut worst, mut control_failures, mut control_checks) = (0, 0.0f64, 0, 0);
    for case in cases {
        for eta in ORACLE_ETAS {
            let c = case.cfg.with_eta1(eta).unwrap();
            let spec = jordan_spectrum(&c).unwrap();
            match certify_povm(&case.model, &total_failure(&spec)) {
                Ok(report) => {
                    checks += 1;
                    worst = worst.max(report.max_residual());
                    if let Err(e) = report.verdict() {
                        failures.push(e.to_string());
                    }
                }
                Err(e) => failures.push(format!("{c}: {e}")),
            }
            match certify_povm(&case.model, &total_failure_with(&spec, QRule::EqualOverlap)) {
                Ok(report) => {
                    control_checks += 1;
                    if !report.passed() {
                        control_failures += 1;
                    }
                }
                Err(_) => {
                    control_checks += 1;
                    control_failures += 1;
                }
            }
        }
    }
    if control_failures == 0 {
        failures.push("negative control (q1 = q2 = O_k in the high branch) certified everywhere".into());
    }
    Verdict::new(
        failures,
        format!(
            "{checks} POVMs certified, max residual {worst:.2e}; negative control rejected in {control_failures}/{control_checks}"
        ),
    )
}

fn identity_range() -> impl Iterator<Item = ProblemConfig> {
    (2..=6).flat_map(|n| product3(1..=4).into_iter().map(move |(a, b, c)| cfg(n, a, b, c, 0.5)))
}

fn criterion_4() -> Verdict {
    let mut failures = Vec::new();
    let (mut configs, mut blocks) = (0, 0);
    for c in identity_range() {
        let spec = jordan_spectrum(&c).unwrap();
        configs += 1;
        for b in &spec.blocks {
            blocks += 1;
            let robinson = robinson_multiplicity(b.k, &spec.config);
            if robinson != b.multiplicity {
                failures.push(format!("{c} k={}: d^k {} vs Robinson {robinson}", b.k, b.multiplicity));
            }
        }
        let total: BigInt = spec.blocks.iter().map(|b| &b.multiplicity).sum();
        if total != spec.d1 {
            failures.push(format!("{c}: sum d^k = {total} vs d1 = {}", spec.d1));
        }
    }
    Verdict::new(failures, format!("{configs} configs, {blocks} blocks, exact"))
}

fn criterion_5() -> Verdict {
    let mut failures = Vec::new();
    let (mut checks, mut worst) = (0, 0.0f64);
    for c in identity_range() {
        for k in 0..=c.k_max() {
            match (overlap(k, &c), overlap_via_6j(k, &c)) {
                (Ok(a), Ok(b)) => {
                    let r = (a - b).abs();
                    checks += 1;
                    worst = worst.max(r);
                    if !(r <= 1e-12) {
                        failures.push(format!("{c} k={k}: {a} vs {b}"));
                    }
                }
                (Err(e), _) | (_, Err(e)) => failures.push(format!("{c} k={k}: {e}")),
            }
        }
    }
    Verdict::new(failures, format!("{checks} overlaps, max deviation {worst:.2e}"))
}

fn criterion_6() -> Verdict {
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    for (m, n) in HAAR_CASES {
        match haar_check(m, n, 100_000, 2024, DEFAULT_CAP) {
            Ok(h) => {
                notes.push(format!(
                    "(m={m}, n={n}) distance {:.2e}, quarter-sample error ratio {:.3}",
                    h.distance,
                    h.scaling_ratio.unwrap_or(f64::NAN)
                ));
                failures.extend(h.violations().into_iter().map(|v| format!("(m={m}, n={n}): {v}")));
            }
            Err(e) => failures.push(format!("(m={m}, n={n}): {e}")),
        }
    }
    let mut v = Verdict::new(failures, format!("{} cases at 1e5 samples", HAAR_CASES.len()));
    for line in notes {
        v = v.note(line);
    }
    v
}

fn criterion_7() -> Verdict {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for n in 2..=200u32 {
        let q = q_opt(&cfg(n, 1, 1, 1, 0.5));
        let x = n as f64;
        let r = (q - (2.0 * x + 1.0) / (3.0 * x)).abs();
        worst = worst.max(r);
        if !(r <= 1e-12) {
            failures.push(format!("n={n}: Q_opt {q}"));
        }
    }
    let q0 = bound_q0(&cfg(2, 1, 1, 1, 0.5)).unwrap();
    if !((q0 - 2.0 / 3.0).abs() <= 1e-12) {
        failures.push(format!("Q0 = {q0}"));
    }
    let far = (q_opt(&cfg(10_000, 1, 1, 1, 0.5)) - q0).abs();
    if !(far <= 4e-5) {
        failures.push(format!("|Q_opt(1e4) - Q0| = {far:e}"));
    }
    Verdict::new(failures, format!("max deviation {worst:.2e} over n = 2..200, |Q_opt(1e4) - Q0| = {far:.2e}"))
}

fn criterion_8() -> Verdict {
    let mut failures = Vec::new();
    let mut open = Vec::new();
    let (mut worst_q, mut worst_p) = (0.0f64, 0.0f64);
    for (a, b, c) in product3(1..=3) {
        let config = cfg(2000, a, b, c, 0.5);
        let dp = (p_me(&config) - bound_p0(&config)).abs();
        if a == c {
            let dq = (q_opt(&config) - bound_q0(&config).unwrap()).abs();
            worst_q = worst_q.max(dq);
            worst_p = worst_p.max(dp);
            if !(dq <= 2e-3 && dp <= 2e-3) {
                failures.push(format!("{config}: |Q - Q0| = {dq:e}, |P - P0| = {dp:e}"));
            }
        } else {
            open.push(dp);
        }
    }
    let worst_open = open.iter().cloned().fold(0.0, f64::max);
    Verdict::new(failures, format!("max |Q - Q0| = {worst_q:.2e}, max |P - P0| = {worst_p:.2e} at n = 2000"))
        .note(format!("n_A != n_C (not gated): {} configs, max |P_ME - P0| = {worst_open:.3e}", open.len()))
}

fn criterion_9() -> Verdict {
    let mut failures = Vec::new();
    let mut checks = 0;
    for (a, b, c) in product3(1..=3) {
        let values: Vec<(f64, f64)> = (2..=50)
            .map(|n| {
                let config = cfg(n, a, b, c, 0.5);
                (q_opt(&config), p_me(&config))
            })
            .collect();
        for (i, w) in values.windows(2).enumerate() {
            checks += 1;
            if !(w[1].0 < w[0].0 && w[1].1 < w[0].1) {
                failures.push(format!("copies ({a},{b},{c}) n={}: not decreasing in n", i + 3));
            }
        }
        for n in 2..=50 {
            let base = cfg(n, a, b, c, 0.5);
            let (q, p) = (q_opt(&base), p_me(&base));
            for (da, db, dc) in [(1, 0, 0), (0, 1, 0), (0, 0, 1)] {
                let more = cfg(n, a + da, b + db, c + dc, 0.5);
                checks += 1;
                if !(q_opt(&more) < q && p_me(&more) < p) {
                    failures.push(format!("{base} -> {more}: not decreasing"));
                }
            }
        }
    }
    let bounds: Vec<(f64, f64)> = (1..=12u32)
        .map(|m| {
            let config = cfg(2, m, m, m, 0.5);
            (bound_q0(&config).unwrap(), bound_p0(&config))
        })
        .collect();
    if !bounds.windows(2).all(|w| w[1].0 < w[0].0 && w[1].1 < w[0].1) {
        failures.push(format!("bounds not decreasing: {bounds:?}"));
    }
    let (first, last) = (bounds[0], bounds[11]);
    if !(last.0 <= 1e-3 * first.0 && last.1 <= 1e-3 * first.1) {
        failures.push(format!("bounds at m=12 not near 0: Q0 {}, P0 {}", last.0, last.1));
    }
    Verdict::new(failures, format!("{checks} orderings; Q0(12) = {:.2e}, P0(12) = {:.2e}", last.0, last.1))
}

fn criterion_10() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_qudisc");
    let runs: [&[&str]; 3] = [
        &["sweep", "--dims", "2..60", "--na", "2", "--nb", "1", "--nc", "3"],
        &["sweep", "-n", "3", "--equal-copies", "1..8", "--format", "json"],
        &["verify"],
    ];
    let mut failures = Vec::new();
    let mut bytes = 0;
    for args in runs {
        let once = || Command::new(bin).args(args).output();
        match (once(), once()) {
            (Ok(x), Ok(y)) => {
                bytes += x.stdout.len();
                if x.stdout != y.stdout || x.status.code() != y.status.code() {
                    failures.push(format!("{args:?}: outputs differ"));
                }
                if x.status.code() != Some(0) {
                    failures.push(format!("{args:?}: exit {:?}", x.status.code()));
                }
            }
            (Err(e), _) | (_, Err(e)) => failures.push(format!("{args:?}: {e}")),
        }
    }
    Verdict::new(failures, format!("{} commands run twice, {bytes} bytes compared", runs.len()))
}

fn report(i: u32, name: &str, v: &Verdict) -> bool {
    println!("{} criterion {i:>2} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.summary);
    for d in v.details.iter().take(20) {
        println!("    {d}");
    }
    v.pass
}

fn main() {
    let mut passed = Vec::new();
    let mut cases = Vec::new();
    passed.push(report(1, "oracle angle equivalence", &criterion_1(&mut cases)));
    passed.push(report(2, "min-error equivalence", &criterion_2(&cases)));
    passed.push(report(3, "POVM certification", &criterion_3(&cases)));
    drop(cases);
    let rest: [Entry; 7] = [
        (4, "exact combinatorial identities", criterion_4),
        (5, "6j cross-check", criterion_5),
        (6, "Haar average Monte Carlo", criterion_6),
        (7, "all-ones closed form", criterion_7),
        (8, "asymptotic consistency", criterion_8),
        (9, "monotonicity", criterion_9),
        (10, "determinism", criterion_10),
    ];
    for (i, name, f) in rest {
        passed.push(report(i, name, &f()));
    }
    let ok = passed.iter().filter(|&&p| p).count();
    println!("acceptance: {ok}/{} criteria passed", passed.len());
    if ok != passed.len() {
        std::process::exit(1);
    }
}
