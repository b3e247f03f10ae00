//! Experiment runner behind the `qbalazs` binary.
//!
//! Four modes, selected with `--mode`:
//! - `identity`: per-n maximum relative deviation between the direct
//!   operator evaluation and the q-Bernstein connection path, over the
//!   circle grid plus a few seeded interior spot points.
//! - `thm1`: measured sup error against the explicit upper bound.
//! - `vor`: maximum first-order residual against its explicit bound; the
//!   case (i/ii/iii) is inferred from beta.
//! - `rate`: sup errors across n with a fitted log-log slope and the
//!   normalized-error window.
//!
//! Every reported quantity is recomputed at doubled precision; rows that
//! fail the agreement check are emitted with `precision_ok = false` and
//! force a nonzero exit code, so an experiment can never silently report
//! numbers the arithmetic does not support. Identical configurations
//! (including the seed) produce byte-identical output.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::funcspace::{self, FunctionSpec};
use crate::kernel::{circle_grid, precision_agree_real, Complex, NumericContext, Real};
use crate::operators::{connection_transform, eval_r, QParams};
use crate::theory::{
    check_thm1, check_thm2, estimate_rate, CaseTag, CorrectionForm, TheoremContext, VorCase,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Identity,
    Thm1,
    Vor,
    Rate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Raw command-line surface. `--config <file>` may supply the same flags
/// as `key=value` lines.
#[derive(Clone, Debug, Parser)]
#[command(name = "qbalazs", disable_help_flag = false)]
pub struct Cli {
    #[arg(long, value_enum)]
    pub mode: Mode,

    /// Catalog name: exp_neg, sin, inv_shift:<c>, e_<m>, poly:<c0,c1,...>
    #[arg(long)]
    pub function: String,

    #[arg(long)]
    pub q: f64,

    #[arg(long)]
    pub beta: f64,

    /// Radius of the circle grid the sup norm is taken on.
    #[arg(long)]
    pub r: f64,

    /// Analyticity radius of the working disk (required outside identity
    /// mode).
    #[arg(long = "R")]
    pub cap_r: Option<f64>,

    /// Comma-separated list of operator degrees, e.g. 16,32,64.
    #[arg(long = "n", value_delimiter = ',', required = true)]
    pub n_list: Vec<u32>,

    #[arg(long, default_value_t = 256)]
    pub grid_m: usize,

    #[arg(long, default_value_t = 256)]
    pub precision_bits: usize,

    /// Correction-term shape: as_lq or as_theorem2.
    #[arg(long, default_value = "as_theorem2")]
    pub variant: String,

    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub output: OutputFormat,

    /// Seed for the interior spot-check points of identity mode.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Rate mode only: bypass evaluation and inject err = [n]_q^slope,
    /// exercising the fitting path with an exact power law.
    #[arg(long)]
    pub synthetic_slope: Option<f64>,
}

/// A validated experiment: parsed flags, resolved function, numeric
/// context, and (outside identity mode) the hypothesis-checked theorem
/// context.
#[derive(Debug)]
pub struct Experiment {
    pub cli: Cli,
    pub ctx: NumericContext,
    pub function: FunctionSpec,
    pub variant: CorrectionForm,
    pub theorem: Option<TheoremContext>,
}

fn expand_config_file(args: Vec<String>) -> Result<Vec<String>> {
    let mut out = Vec::with_capacity(args.len());
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            let path = it.next().ok_or_else(|| Error::InvalidConfig {
                detail: "--config needs a file path".into(),
            })?;
            let text = std::fs::read_to_string(&path).map_err(|e| Error::InvalidConfig {
                detail: format!("cannot read config file {path}: {e}"),
            })?;
            for line in text.lines() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| Error::InvalidConfig {
                    detail: format!("config line is not key=value: '{line}'"),
                })?;
                out.push(format!("--{}", k.trim()));
                out.push(v.trim().to_string());
            }
        } else {
            out.push(a);
        }
    }
    Ok(out)
}

/// Parses and validates an experiment configuration. Constraint failures
/// are refusals naming the violated inequality, not warnings.
pub fn parse_config<I, S>(argv: I) -> Result<Experiment>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let args: Vec<String> = argv.into_iter().map(Into::into).collect();
    let args = expand_config_file(args)?;
    let cli = Cli::try_parse_from(args)
        .map_err(|e| Error::InvalidConfig { detail: e.to_string() })?;

    let ctx = NumericContext::new(cli.precision_bits)?;
    if cli.grid_m == 0 {
        return Err(Error::EmptyGrid);
    }
    if cli.n_list.is_empty() {
        return Err(Error::InvalidConfig { detail: "n list is empty".into() });
    }
    let variant = CorrectionForm::parse(&cli.variant)?;

    let radius = match (cli.mode, cli.cap_r) {
        (Mode::Identity, maybe) => maybe.unwrap_or_else(|| (2.0 * cli.r).max(1.0)),
        (_, Some(r)) => r,
        (_, None) => {
            return Err(Error::InvalidConfig {
                detail: "--R (analyticity radius) is required outside identity mode".into(),
            })
        }
    };
    let function = funcspace::by_name(&cli.function, radius)?;

    let theorem = match cli.mode {
        Mode::Identity => None,
        Mode::Thm1 => Some(TheoremContext::new(&ctx, CaseTag::T1, cli.q, cli.beta, cli.r, radius)?),
        Mode::Vor => {
            let case = VorCase::from_beta(cli.beta)?;
            Some(TheoremContext::new(&ctx, CaseTag::T2(case), cli.q, cli.beta, cli.r, radius)?)
        }
        Mode::Rate => {
            let case = VorCase::from_beta(cli.beta)?;
            Some(TheoremContext::new(&ctx, CaseTag::T3(case), cli.q, cli.beta, cli.r, radius)?)
        }
    };

    // theorem modes enforce their hypotheses up front
    if let Some(tc) = &theorem {
        if function.bound().is_none() {
            return Err(Error::UnboundedFunction { name: function.name().into() });
        }
        for &n in &cli.n_list {
            if n < tc.n0() {
                return Err(Error::HypothesisViolation {
                    detail: format!("n >= n0 fails: n = {n} < n0 = {}", tc.n0()),
                });
            }
        }
    }
    if cli.mode == Mode::Rate {
        if !cli.n_list.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidConfig {
                detail: "rate mode needs a strictly increasing n list".into(),
            });
        }
    } else {
        for &n in &cli.n_list {
            if n == 0 {
                return Err(Error::ZeroN);
            }
        }
    }

    Ok(Experiment { cli, ctx, function, variant, theorem })
}

/// One emitted result line.
#[derive(Clone, Debug)]
pub struct ReportRow {
    pub n: u32,
    pub bracket_n: Real,
    pub r: f64,
    pub lhs: Real,
    pub rhs: Option<Real>,
    pub normalized_error: Real,
    pub holds: bool,
    pub precision_ok: bool,
}

#[derive(Clone, Debug)]
struct RowCore {
    n: u32,
    bracket_n: Real,
    lhs: Real,
    rhs: Option<Real>,
    normalized: Real,
    holds: bool,
}

/// Result of [`run`]: the rows plus a human-readable summary (rate mode
/// reports the fitted slope there).
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub rows: Vec<ReportRow>,
    pub summary: Option<String>,
}

impl RunOutcome {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.holds && r.precision_ok)
    }
}

fn identity_points(exp: &Experiment, ctx: &NumericContext) -> Result<Vec<Complex>> {
    let grid = circle_grid(ctx, exp.cli.r, exp.cli.grid_m)?;
    let mut pts = grid.points().to_vec();
    // seeded interior spot checks; f64 coordinates are exact at any
    // precision, so the doubled rerun sees identical inputs
    let mut rng = ChaCha8Rng::seed_from_u64(exp.cli.seed);
    for _ in 0..4 {
        let rho = exp.cli.r * rng.gen::<f64>().sqrt();
        let theta = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
        pts.push(ctx.complex(rho * theta.cos(), rho * theta.sin()));
    }
    Ok(pts)
}

fn rows_at(exp: &Experiment, ctx: &NumericContext) -> Result<Vec<RowCore>> {
    let cli = &exp.cli;
    let f = &exp.function;
    let mut rows = Vec::with_capacity(cli.n_list.len());
    match cli.mode {
        Mode::Identity => {
            let pts = identity_points(exp, ctx)?;
            let tol = ctx.real(ctx.agreement_tol());
            let one = ctx.one();
            for &n in &cli.n_list {
                let p = QParams::new(ctx, cli.q, cli.beta, n)?;
                let mut worst = ctx.zero();
                for z in &pts {
                    let direct = eval_r(f, &p, z)?;
                    let via_connection = connection_transform(f, &p, z)?;
                    let dev = (&direct - &via_connection).modulus()
                        / one.max_val(&via_connection.modulus());
                    if worst.lt(&dev) {
                        worst = dev;
                    }
                }
                let holds = worst.le(&tol);
                rows.push(RowCore {
                    n,
                    bracket_n: p.bracket_n().clone(),
                    lhs: worst.clone(),
                    rhs: Some(tol.clone()),
                    normalized: worst / &tol,
                    holds,
                });
            }
        }
        Mode::Thm1 => {
            let tc = exp.theorem.as_ref().expect("theorem context");
            let grid = circle_grid(ctx, cli.r, cli.grid_m)?;
            for &n in &cli.n_list {
                let p = QParams::new(ctx, cli.q, cli.beta, n)?;
                let out = check_thm1(f, tc, &p, &grid)?;
                rows.push(RowCore {
                    n,
                    bracket_n: p.bracket_n().clone(),
                    normalized: safe_ratio(&out.lhs_sup, &out.rhs, ctx),
                    lhs: out.lhs_sup,
                    rhs: Some(out.rhs),
                    holds: out.holds,
                });
            }
        }
        Mode::Vor => {
            let tc = exp.theorem.as_ref().expect("theorem context");
            let grid = circle_grid(ctx, cli.r, cli.grid_m)?;
            for &n in &cli.n_list {
                let p = QParams::new(ctx, cli.q, cli.beta, n)?;
                let out = check_thm2(f, tc, &p, &grid, exp.variant)?;
                rows.push(RowCore {
                    n,
                    bracket_n: p.bracket_n().clone(),
                    normalized: safe_ratio(&out.max_residual, &out.rhs, ctx),
                    lhs: out.max_residual,
                    rhs: Some(out.rhs),
                    holds: out.holds,
                });
            }
        }
        Mode::Rate => {
            let tc = exp.theorem.as_ref().expect("theorem context");
            let expected = expected_slope(tc);
            if let Some(slope) = cli.synthetic_slope {
                // exact power law through the same fitting path
                let mut pts = Vec::new();
                for &n in &cli.n_list {
                    let p = QParams::new(ctx, cli.q, cli.beta, n)?;
                    let err = p.bracket_pow(slope);
                    pts.push((p.bracket_n().ln().to_f64(), err.ln().to_f64()));
                    let normalized = &err * &p.bracket_pow(-expected);
                    rows.push(RowCore {
                        n,
                        bracket_n: p.bracket_n().clone(),
                        lhs: err,
                        rhs: None,
                        normalized,
                        holds: true,
                    });
                }
                let fitted = crate::theory::fit_loglog(&pts);
                // the injected slope must be recovered exactly
                for row in &mut rows {
                    row.holds = (fitted - slope).abs() < 1e-9;
                }
            } else {
                let report = estimate_rate(ctx, f, tc, &cli.n_list, cli.grid_m)?;
                let confirmed = report.order_confirmed();
                for s in &report.samples {
                    rows.push(RowCore {
                        n: s.n,
                        bracket_n: s.bracket_n.clone(),
                        lhs: s.sup_error.clone(),
                        rhs: None,
                        normalized: s.normalized.clone(),
                        holds: confirmed,
                    });
                }
            }
        }
    }
    Ok(rows)
}

fn expected_slope(tc: &TheoremContext) -> f64 {
    match tc.case() {
        CaseTag::T3(VorCase::I) => -tc.beta(),
        CaseTag::T3(VorCase::II) => tc.beta() - 1.0,
        CaseTag::T3(VorCase::III) => -0.5,
        _ => 0.0,
    }
}

fn safe_ratio(lhs: &Real, rhs: &Real, ctx: &NumericContext) -> Real {
    if rhs.is_zero() {
        if lhs.is_zero() { ctx.zero() } else { ctx.real(f64::INFINITY) }
    } else {
        lhs / rhs
    }
}

/// Runs the experiment: rows at the configured precision, then the
/// doubled-precision rerun that sets each row's `precision_ok`.
pub fn run(exp: &Experiment) -> Result<RunOutcome> {
    let base = rows_at(exp, &exp.ctx)?;
    let doubled = rows_at(exp, &exp.ctx.doubled())?;
    let mut rows = Vec::with_capacity(base.len());
    for (b, d) in base.iter().zip(&doubled) {
        let mut ok = precision_agree_real(&b.lhs, &d.lhs, &exp.ctx)
            && precision_agree_real(&b.normalized, &d.normalized, &exp.ctx);
        if let (Some(br), Some(dr)) = (&b.rhs, &d.rhs) {
            ok = ok && precision_agree_real(br, dr, &exp.ctx);
        }
        rows.push(ReportRow {
            n: b.n,
            bracket_n: b.bracket_n.clone(),
            r: exp.cli.r,
            lhs: b.lhs.clone(),
            rhs: b.rhs.clone(),
            normalized_error: b.normalized.clone(),
            holds: b.holds,
            precision_ok: ok,
        });
    }

    let summary = if exp.cli.mode == Mode::Rate {
        let pts: Vec<(f64, f64)> = base
            .iter()
            .map(|r| (r.bracket_n.ln().to_f64(), r.lhs.ln().to_f64()))
            .collect();
        let fitted = crate::theory::fit_loglog(&pts);
        let tc = exp.theorem.as_ref().expect("theorem context");
        let (lo, hi) = base.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), r| {
            let v = r.normalized.to_f64();
            (lo.min(v), hi.max(v))
        });
        Some(format!(
            "fitted_slope={fitted:.6} expected_slope={:.6} window=[{lo:.6e}, {hi:.6e}] ratio={:.3}",
            expected_slope(tc),
            hi / lo,
        ))
    } else {
        None
    };

    Ok(RunOutcome { rows, summary })
}

const CSV_HEADER: &str = "n,bracket_n,r,lhs,rhs,normalized_error,holds,precision_ok";
const SIG_DIGITS: usize = 25;

/// Renders rows as CSV (fixed header, 25 significant digits) or JSON (an
/// array of objects with the same keys).
pub fn emit(rows: &[ReportRow], format: OutputFormat) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::EmptyValues);
    }
    match format {
        OutputFormat::Csv => {
            let mut out = String::new();
            out.push_str(CSV_HEADER);
            out.push('\n');
            for row in rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    row.n,
                    row.bracket_n.to_decimal(SIG_DIGITS),
                    row.r,
                    row.lhs.to_decimal(SIG_DIGITS),
                    row.rhs.as_ref().map(|v| v.to_decimal(SIG_DIGITS)).unwrap_or_default(),
                    row.normalized_error.to_decimal(SIG_DIGITS),
                    row.holds,
                    row.precision_ok
                )
                .expect("write to string");
            }
            Ok(out)
        }
        OutputFormat::Json => {
            let vals: Vec<serde_json::Value> = rows
                .iter()
                .map(|row| {
                    serde_json::json!({
                        "n": row.n,
                        "bracket_n": row.bracket_n.to_decimal(SIG_DIGITS),
                        "r": row.r,
                        "lhs": row.lhs.to_decimal(SIG_DIGITS),
                        "rhs": row.rhs.as_ref().map(|v| v.to_decimal(SIG_DIGITS)),
                        "normalized_error": row.normalized_error.to_decimal(SIG_DIGITS),
                        "holds": row.holds,
                        "precision_ok": row.precision_ok,
                    })
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&vals).expect("json");
            s.push('\n');
            Ok(s)
        }
    }
}

/// Parses rows back from [`emit`]'s CSV output.
pub fn parse_csv(text: &str, bits: usize) -> Result<Vec<ReportRow>> {
    let mut rows = Vec::new();
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => {
            return Err(Error::InvalidConfig {
                detail: format!("unexpected CSV header: {other:?}"),
            })
        }
    }
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 8 {
            return Err(Error::InvalidConfig { detail: format!("bad CSV row: '{line}'") });
        }
        rows.push(ReportRow {
            n: parts[0].parse().map_err(|_| Error::BadDecimal { text: parts[0].into() })?,
            bracket_n: Real::parse_decimal(parts[1], bits)?,
            r: parts[2].parse().map_err(|_| Error::BadDecimal { text: parts[2].into() })?,
            lhs: Real::parse_decimal(parts[3], bits)?,
            rhs: if parts[4].is_empty() { None } else { Some(Real::parse_decimal(parts[4], bits)?) },
            normalized_error: Real::parse_decimal(parts[5], bits)?,
            holds: parts[6] == "true",
            precision_ok: parts[7] == "true",
        });
    }
    Ok(rows)
}

/// Full CLI entry: parse, run, render. Returns the rendered report, the
/// overall success flag, and the optional summary line for stderr.
pub fn execute<I, S>(argv: I) -> Result<(String, RunOutcome, Option<PathBuf>)>
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let exp = parse_config(argv)?;
    let outcome = run(&exp)?;
    let text = emit(&outcome.rows, exp.cli.output)?;
    Ok((text, outcome, exp.cli.out.clone()))
}
