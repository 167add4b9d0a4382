//! One function per subcommand. Each returns the rendered output plus the
//! exit status; nothing here touches stdout or the filesystem.

use serde::{Deserialize, Serialize};
use serde_json::json;

use qudisc_core::discrimination::{bound_p0, bound_q0, limit_terms, minerror_probability, total_failure, LimitTerm};
use qudisc_core::spectrum::canonicalize;
use qudisc_core::verify::{run_verify, GridOptions, VerifyReport};
use qudisc_core::{jordan_spectrum, Error, ProblemConfig, QRule};

use crate::args::{BoundsArgs, ConfigArgs, CopyArgs, Format, IntRange, SweepArgs, VerifyArgs};
use crate::format::{sig, table};
use crate::{exit, CliError};

/// Rendered output of a command and the status to exit with.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub body: String,
    pub code: i32,
    /// Printed to stderr after the body.
    pub note: Option<String>,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Outcome { body, code: exit::SUCCESS, note: None }
    }
}

fn json_body(value: &impl Serialize) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize") + "\n"
}

pub fn config_of(args: &ConfigArgs) -> Result<ProblemConfig, CliError> {
    let CopyArgs { na, nb, nc } = args.copies;
    Ok(ProblemConfig::new(args.dim, na, nb, nc, args.eta1)?)
}

fn header(cfg: &ProblemConfig, swapped: bool) -> String {
    let mut s = format!("{cfg}\n");
    if swapped {
        s += "swapped: true (computed with A and C exchanged; reported in the original labels)\n";
    }
    s
}

// --- spectrum --------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumBlock {
    pub k: u32,
    pub overlap: f64,
    pub multiplicity: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumTotal {
    pub d1: String,
    pub d2: String,
    pub d2_minus_d1: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub config: ProblemConfig,
    pub swapped: bool,
    pub blocks: Vec<SpectrumBlock>,
    pub total: SpectrumTotal,
}

pub fn spectrum_report(cfg: &ProblemConfig) -> Result<SpectrumReport, CliError> {
    let s = jordan_spectrum(cfg)?;
    let (d1, d2) = (cfg.d1(), cfg.d2());
    Ok(SpectrumReport {
        config: *cfg,
        swapped: s.swapped,
        blocks: s
            .blocks
            .iter()
            .map(|b| SpectrumBlock { k: b.k, overlap: b.overlap, multiplicity: b.multiplicity.to_string() })
            .collect(),
        total: SpectrumTotal { d2_minus_d1: (&d2 - &d1).to_string(), d1: d1.to_string(), d2: d2.to_string() },
    })
}

pub fn spectrum(args: &ConfigArgs) -> Result<Outcome, CliError> {
    let r = spectrum_report(&config_of(args)?)?;
    if args.output.json {
        return Ok(Outcome::ok(json_body(&r)));
    }
    let rows: Vec<Vec<String>> =
        r.blocks.iter().map(|b| vec![b.k.to_string(), sig(b.overlap), b.multiplicity.clone()]).collect();
    let mut body = header(&r.config, r.swapped);
    body += &table(&["k", "O_k", "d^k"], &rows);
    body += &format!("d1 = {}\nd2 = {}\nd2 - d1 = {}\n", r.total.d1, r.total.d2, r.total.d2_minus_d1);
    Ok(Outcome::ok(body))
}

// --- unambiguous -----------------------------------------------------------

pub fn unambiguous_report(cfg: &ProblemConfig) -> Result<serde_json::Value, CliError> {
    let r = total_failure(&jordan_spectrum(cfg)?);
    Ok(json!({ "config": r.config, "swapped": r.swapped, "blocks": r.blocks, "total": r.q_total }))
}

pub fn unambiguous(args: &ConfigArgs) -> Result<Outcome, CliError> {
    let cfg = config_of(args)?;
    if args.output.json {
        return Ok(Outcome::ok(json_body(&unambiguous_report(&cfg)?)));
    }
    let r = total_failure(&jordan_spectrum(&cfg)?);
    let rows: Vec<Vec<String>> = r
        .blocks
        .iter()
        .map(|b| {
            vec![
                b.k.to_string(),
                b.branch.as_str().to_string(),
                sig(b.overlap),
                b.multiplicity.to_string(),
                sig(b.q1),
                sig(b.q2),
                sig(b.c_k),
                sig(b.d_k),
                sig(b.q_k),
            ]
        })
        .collect();
    let mut body = header(&r.config, r.swapped);
    body += &table(&["k", "branch", "O_k", "d^k", "q1", "q2", "c_k", "d_k", "Q_k"], &rows);
    body += &format!("Q_opt = {}\n", sig(r.q_total));
    Ok(Outcome::ok(body))
}

// --- minerror --------------------------------------------------------------

pub fn minerror_report(cfg: &ProblemConfig) -> Result<serde_json::Value, CliError> {
    let r = minerror_probability(&jordan_spectrum(cfg)?);
    Ok(json!({
        "config": r.config,
        "swapped": r.swapped,
        "blocks": r.blocks,
        "residual": { "eigenvalue": r.residual_eigenvalue, "multiplicity": r.residual_multiplicity.to_string() },
        "total": r.p_me,
    }))
}

pub fn minerror(args: &ConfigArgs) -> Result<Outcome, CliError> {
    let cfg = config_of(args)?;
    if args.output.json {
        return Ok(Outcome::ok(json_body(&minerror_report(&cfg)?)));
    }
    let r = minerror_probability(&jordan_spectrum(&cfg)?);
    let rows: Vec<Vec<String>> = r
        .blocks
        .iter()
        .map(|b| vec![b.k.to_string(), b.multiplicity.to_string(), sig(b.lambda_plus), sig(b.lambda_minus)])
        .collect();
    let mut body = header(&r.config, r.swapped);
    body += &table(&["k", "d^k", "lambda+", "lambda-"], &rows);
    body += &format!(
        "residual eigenvalue = {} (multiplicity {})\nP_ME = {}\n",
        sig(r.residual_eigenvalue),
        r.residual_multiplicity,
        sig(r.p_me)
    );
    Ok(Outcome::ok(body))
}

// --- bounds ----------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CopyCounts {
    #[serde(rename = "n_A")]
    pub n_a: u32,
    #[serde(rename = "n_B")]
    pub n_b: u32,
    #[serde(rename = "n_C")]
    pub n_c: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundsTotal {
    #[serde(rename = "Q0")]
    pub q0: Option<f64>,
    #[serde(rename = "P0")]
    pub p0: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundsReport {
    pub config: CopyCounts,
    pub swapped: bool,
    pub blocks: Vec<LimitTerm>,
    pub total: BoundsTotal,
}

/// The limits do not depend on the dimension; any valid one stands in.
fn copies_config(c: &CopyCounts) -> Result<ProblemConfig, CliError> {
    Ok(ProblemConfig::new(2, c.n_a, c.n_b, c.n_c, 0.5)?)
}

/// The report and, when `n_A ≠ n_C`, the precondition error for `Q₀`.
pub fn bounds_report(copies: CopyCounts) -> Result<(BoundsReport, Option<Error>), CliError> {
    let cfg = copies_config(&copies)?;
    let q0 = bound_q0(&cfg);
    let report = BoundsReport {
        config: copies,
        swapped: canonicalize(&cfg).1,
        blocks: limit_terms(&cfg),
        total: BoundsTotal { q0: q0.as_ref().ok().copied(), p0: bound_p0(&cfg) },
    };
    Ok((report, q0.err()))
}

pub fn bounds(args: &BoundsArgs) -> Result<Outcome, CliError> {
    let CopyArgs { na, nb, nc } = args.copies;
    let (r, q0_error) = bounds_report(CopyCounts { n_a: na, n_b: nb, n_c: nc })?;
    let body = if args.output.json {
        json_body(&r)
    } else {
        let rows: Vec<Vec<String>> =
            r.blocks.iter().map(|t| vec![t.k.to_string(), sig(t.weight), sig(t.overlap), sig(t.sine)]).collect();
        let mut body = format!("n_A={na} n_B={nb} n_C={nc}\n");
        if r.swapped {
            body += "swapped: true (computed with A and C exchanged)\n";
        }
        body += &table(&["k", "weight", "O_k", "sqrt(1-O_k^2)"], &rows);
        body += &match r.total.q0 {
            Some(q0) => format!("Q0 = {}\n", sig(q0)),
            None => "Q0 = undefined (n_A != n_C)\n".to_string(),
        };
        body + &format!("P0 = {}\n", sig(r.total.p0))
    };
    Ok(match q0_error {
        None => Outcome::ok(body),
        Some(e) => Outcome { body, code: exit::PRECONDITION, note: Some(format!("error: {e}")) },
    })
}

// --- verify ----------------------------------------------------------------

pub fn grid_options(args: &VerifyArgs) -> GridOptions {
    GridOptions {
        max_total_dim: args.max_total_dim,
        dense_limit: args.dense_limit,
        samples: args.samples as usize,
        seed: args.seed,
        rule: if args.inject_fault { QRule::EqualOverlap } else { QRule::Optimal },
        cap: qudisc_core::oracle::cap_from_env(),
        ..GridOptions::default()
    }
}

pub fn verify_outcome(report: &VerifyReport, json: bool) -> Outcome {
    let body = if json { json_body(report) } else { report.render() };
    let code = if report.passed() { exit::SUCCESS } else { exit::VERIFY_FAILED };
    Outcome { body, code, note: None }
}

pub fn verify(args: &VerifyArgs) -> Result<Outcome, CliError> {
    Ok(verify_outcome(&run_verify(&grid_options(args)), args.output.json))
}

// --- sweep -----------------------------------------------------------------

/// What a sweep varies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SweepAxis {
    /// One row per dimension at fixed copy counts.
    Dimension { dims: IntRange, copies: CopyCounts },
    /// One row per `n_A = n_B = n_C = m` at a fixed dimension.
    EqualCopies { dim: u32, copies: IntRange },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRequest {
    pub axis: SweepAxis,
    pub eta1: f64,
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: u32,
    #[serde(rename = "n_A")]
    pub n_a: u32,
    #[serde(rename = "n_B")]
    pub n_b: u32,
    #[serde(rename = "n_C")]
    pub n_c: u32,
    pub eta1: f64,
    #[serde(rename = "Q_opt")]
    pub q_opt: f64,
    #[serde(rename = "P_ME")]
    pub p_me: f64,
    #[serde(rename = "Q0")]
    pub q0: Option<f64>,
    #[serde(rename = "P0")]
    pub p0: f64,
}

pub const SWEEP_HEADER: [&str; 9] = ["n", "n_A", "n_B", "n_C", "eta1", "Q_opt", "P_ME", "Q0", "P0"];

pub fn sweep_request(args: &SweepArgs) -> Result<SweepRequest, CliError> {
    let axis = match (args.equal_copies, args.dims, args.dim) {
        (Some(copies), _, Some(dim)) => {
            if copies.start == 0 {
                return Err(CliError::Usage("copy counts must be positive".into()));
            }
            SweepAxis::EqualCopies { dim, copies }
        }
        (Some(_), _, None) => return Err(CliError::Usage("--equal-copies needs a single --dim".into())),
        (None, dims, dim) => {
            let dims = match (dims, dim) {
                (Some(r), _) => r,
                (None, Some(n)) => IntRange { start: n, end: n },
                (None, None) => return Err(CliError::Usage("sweep needs --dims A..B or --dim N".into())),
            };
            if dims.start < 2 {
                return Err(CliError::Usage(format!("dimensions must be at least 2, got {dims}")));
            }
            let copies = match (args.na, args.nb, args.nc) {
                (Some(n_a), Some(n_b), Some(n_c)) => CopyCounts { n_a, n_b, n_c },
                _ => return Err(CliError::Usage("sweep needs --na, --nb and --nc".into())),
            };
            SweepAxis::Dimension { dims, copies }
        }
    };
    Ok(SweepRequest { axis, eta1: args.eta1, format: args.format })
}

pub fn sweep_row(cfg: &ProblemConfig) -> Result<SweepRow, CliError> {
    let s = jordan_spectrum(cfg)?;
    Ok(SweepRow {
        n: cfg.dim,
        n_a: cfg.n_a,
        n_b: cfg.n_b,
        n_c: cfg.n_c,
        eta1: cfg.eta1,
        q_opt: total_failure(&s).q_total,
        p_me: minerror_probability(&s).p_me,
        q0: bound_q0(cfg).ok(),
        p0: bound_p0(cfg),
    })
}

pub fn sweep_rows(req: &SweepRequest) -> Result<Vec<SweepRow>, CliError> {
    let configs: Vec<ProblemConfig> = match req.axis {
        SweepAxis::Dimension { dims, copies } => dims
            .iter()
            .map(|n| ProblemConfig::new(n, copies.n_a, copies.n_b, copies.n_c, req.eta1))
            .collect::<Result<_, _>>()?,
        SweepAxis::EqualCopies { dim, copies } => {
            copies.iter().map(|m| ProblemConfig::new(dim, m, m, m, req.eta1)).collect::<Result<_, _>>()?
        }
    };
    configs.iter().map(sweep_row).collect()
}

pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(SWEEP_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.n_a.to_string(),
            r.n_b.to_string(),
            r.n_c.to_string(),
            sig(r.eta1),
            sig(r.q_opt),
            sig(r.p_me),
            r.q0.map(sig).unwrap_or_default(),
            sig(r.p0),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ASCII output")
}

pub fn sweep(args: &SweepArgs) -> Result<Outcome, CliError> {
    let req = sweep_request(args)?;
    let rows = sweep_rows(&req)?;
    Ok(Outcome::ok(match req.format {
        Format::Csv => render_csv(&rows),
        Format::Json => json_body(&rows),
    }))
}
