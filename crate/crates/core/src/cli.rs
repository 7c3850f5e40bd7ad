//! Command-line front end. [`execute`] writes the primary output to one
//! stream and diagnostics to another and returns the process exit code:
//! 0 success, 1 error, 2 every precondition failed, 3 a check was violated.

use std::io::{self, Write};
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use crate::bounds::{self, bound_all, decompose_lacunary, normalize, render_table, BoundError, BoundOutcome};
use crate::constructions::{self, ConstructedExample, ConstructionError, Family};
use crate::field::{FieldCtx, FieldError};
use crate::iteration::{best_bound, trace, DEFAULT_CAP};
use crate::poly::{PolyError, SparsePoly};
use crate::redei::{redei_check, RedeiError, RedeiReport, DEFAULT_ENUMERATION_CAP};
use crate::sweep::{self, ColorMode};
use crate::verify::{self, VerifyConfig, VerifyError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_PRECONDITIONS: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lacunary", version, about = "Root-count bounds for sparse polynomials over finite fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ColorArg {
    Case,
    Term,
    Region,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the primary output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Every applicable bound for one polynomial.
    Bound {
        /// Field: `47`, `3^2`, or `3^2:1,0,1` (modulus constant-first).
        #[arg(long)]
        q: String,
        #[arg(long)]
        f: String,
        /// Only try this divisor of q-1.
        #[arg(long)]
        d: Option<u64>,
        /// Also count roots by brute force.
        #[arg(long)]
        oracle: bool,
        /// Replace each positive exponent e by e mod (q-1) first.
        #[arg(long)]
        reduce_exponents: bool,
        /// Largest field for which discrete-log tables are built.
        #[arg(long)]
        cap: Option<u64>,
        #[command(flatten)]
        output: Output,
    },
    /// The degree-reducing iteration for `x^{M-l} + g`.
    Iterate {
        #[arg(long)]
        q: String,
        #[arg(long)]
        f: String,
        #[arg(long)]
        d: u64,
        /// Print each f_i.
        #[arg(long)]
        materialize: bool,
        #[arg(long)]
        oracle: bool,
        /// Maximum number of steps.
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u32,
        #[command(flatten)]
        output: Output,
    },
    /// Regions, regimes and bounds over every `(l, g°)`.
    Sweep {
        #[arg(long)]
        q: String,
        #[arg(long)]
        d: u64,
        /// Also write an SVG region map.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ColorArg::Case)]
        color: ColorArg,
        #[command(flatten)]
        output: Output,
    },
    /// Build a polynomial whose root count meets a bound.
    Construct {
        /// three-residues (ex1), two-residues (ex2), four-residues (ex3), cyclotomic.
        #[arg(long)]
        family: Family,
        #[arg(long)]
        q: String,
        #[arg(long)]
        r1: Option<u64>,
        #[arg(long)]
        r2: Option<u64>,
        /// Cyclotomic step D.
        #[arg(long = "step", default_value_t = 1)]
        step: u64,
        /// Cyclotomic term count minus one.
        #[arg(long, default_value_t = 1)]
        n: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Seeded random soundness check of every bound.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// Largest q drawn.
        #[arg(long, default_value_t = 997)]
        cap: u64,
        /// Extra instances `q:f`, checked after the random trials.
        #[arg(long = "inject")]
        inject: Vec<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Enumerate small divisors of x^{q-1} - 1 with a large gap below the top term.
    RedeiCheck {
        #[arg(long)]
        q: String,
        /// Every divisor >= 2 of q-1 if omitted.
        #[arg(long)]
        d: Option<u64>,
        /// Largest number of root subsets to enumerate.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: u64,
        #[command(flatten)]
        output: Output,
    },
}

impl Command {
    pub fn output(&self) -> &Output {
        match self {
            Command::Bound { output, .. }
            | Command::Iterate { output, .. }
            | Command::Sweep { output, .. }
            | Command::Construct { output, .. }
            | Command::Verify { output, .. }
            | Command::RedeiCheck { output, .. } => output,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Precondition(String),
    #[error("{0}")]
    Violation(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Redei(#[from] RedeiError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Precondition(_) => EXIT_PRECONDITIONS,
            CliError::Violation(_) => EXIT_VIOLATION,
            _ => EXIT_ERROR,
        }
    }
}

fn bound_error_is_precondition(e: &BoundError) -> bool {
    !matches!(
        e,
        BoundError::Field(_) | BoundError::Poly(PolyError::Syntax { .. } | PolyError::ExponentOverflow { .. })
            | BoundError::NonIntegralValue(_)
    )
}

fn field(spec: &str, cap: Option<u64>) -> Result<Arc<FieldCtx>, CliError> {
    let ctx: FieldCtx = spec.parse()?;
    Ok(Arc::new(match cap {
        Some(c) => ctx.with_cap(c),
        None => ctx,
    }))
}

fn aligned(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let s: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        out.push_str(s.join("  ").trim_end());
        out.push('\n');
    };
    line(header.to_vec());
    for r in rows {
        line(r.iter().map(String::as_str).collect());
    }
    out
}

fn csv_writer(out: &mut dyn Write) -> csv::Writer<&mut dyn Write> {
    csv::Writer::from_writer(out)
}

fn roots_text(ctx: &FieldCtx, roots: &[crate::field::Element]) -> String {
    roots.iter().map(|&r| ctx.fmt_element(r)).collect::<Vec<_>>().join(";")
}

/// Runs one command. The primary output goes to `out`, messages to `err`.
pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(&cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: &Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let format = cmd.output().format;
    match cmd {
        Command::Bound { q, f, d, oracle, reduce_exponents, cap, .. } => {
            cmd_bound(q, f, *d, *oracle, *reduce_exponents, *cap, format.unwrap_or(Format::Table), out)
        }
        Command::Iterate { q, f, d, materialize, oracle, cap, .. } => {
            cmd_iterate(q, f, *d, *materialize, *oracle, *cap, format.unwrap_or(Format::Table), out, err)
        }
        Command::Sweep { q, d, svg, color, .. } => cmd_sweep(q, *d, svg.as_ref(), *color, format.unwrap_or(Format::Csv), out),
        Command::Construct { family, q, r1, r2, step, n, .. } => {
            cmd_construct(*family, q, (*r1, *r2), *step, *n, format.unwrap_or(Format::Table), out)
        }
        Command::Verify { seed, trials, cap, inject, .. } => {
            cmd_verify(*seed, *trials, *cap, inject, format.unwrap_or(Format::Table), out, err)
        }
        Command::RedeiCheck { q, d, cap, .. } => cmd_redei(q, *d, *cap, format.unwrap_or(Format::Table), out, err),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_bound(
    q: &str,
    f: &str,
    d: Option<u64>,
    oracle: bool,
    reduce: bool,
    cap: Option<u64>,
    format: Format,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let ctx = field(q, cap)?;
    let mut poly = SparsePoly::parse(f, ctx.clone())?;
    if reduce {
        poly = poly.reduce_exponents();
    }
    let outcomes = bound_all(&poly, d)?;
    let roots = if oracle { Some(normalize(&poly)?.count_roots_bruteforce()?) } else { None };
    match format {
        Format::Table => {
            writeln!(out, "field {}, f = {}", ctx.spec(), poly)?;
            out.write_all(render_table(&outcomes).as_bytes())?;
            if let Some(b) = bounds::best(&outcomes) {
                let d = b.d.map(|d| format!(", d={d}")).unwrap_or_default();
                writeln!(out, "best: {} ({}{d})", b.value.expect("applicable"), b.method)?;
            }
            if let Some(r) = &roots {
                writeln!(out, "oracle: {} nonzero roots {{{}}}", r.count, roots_text(&ctx, &r.roots).replace(';', ", "))?;
            }
        }
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(BoundOutcome::CSV_HEADER)?;
            for o in &outcomes {
                w.write_record(o.csv_record())?;
            }
            if let Some(r) = &roots {
                let witness = json!({ "kind": "oracle", "roots": roots_text(&ctx, &r.roots) }).to_string();
                w.write_record(["oracle", "", "true", &r.count.to_string(), &witness])?;
            }
            w.flush()?;
        }
        Format::Json => {
            let value = json!({
                "field": ctx.spec(),
                "poly": poly.to_string(),
                "outcomes": outcomes,
                "best": bounds::best(&outcomes),
                "oracle": roots.as_ref().map(|r| json!({
                    "count": r.count,
                    "roots": r.roots.iter().map(|&x| ctx.fmt_element(x)).collect::<Vec<_>>(),
                })),
            });
            serde_json::to_writer_pretty(&mut *out, &value)?;
            writeln!(out)?;
        }
    }
    if outcomes.iter().all(|o| !o.applicable) {
        return Err(CliError::Precondition("no bound applies".into()));
    }
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn cmd_iterate(
    q: &str,
    f: &str,
    d: u64,
    materialize: bool,
    oracle: bool,
    cap: u32,
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let ctx = field(q, None)?;
    let poly = SparsePoly::parse(f, ctx.clone())?;
    let pre = |e: BoundError| {
        if bound_error_is_precondition(&e) {
            CliError::Precondition(e.to_string())
        } else {
            e.into()
        }
    };
    if d == 1 {
        return Err(pre(BoundError::DEqualsOne));
    }
    ctx.check_divisor(d)?;
    let form = decompose_lacunary(&normalize(&poly).map_err(pre)?, d).map_err(pre)?;
    let tr = trace(&form, cap, materialize).map_err(pre)?;
    let best = best_bound(&form.shape).map_err(pre)?;
    let roots = if oracle { Some(poly.count_roots_bruteforce()?) } else { None };
    let summary = format!(
        "min d(l_i + g_i): {} at i={} (k={}, stopped: {})\nregime: case {}, i={}, value {}\ndegree: {}",
        tr.lemma.value,
        tr.lemma.index,
        tr.lemma.k,
        serde_json::to_value(tr.termination)?.as_str().unwrap_or(""),
        best.case,
        best.i,
        best.value,
        form.shape.degree(),
    );
    let oracle_line = roots
        .as_ref()
        .map(|r| format!("oracle: {} nonzero roots {{{}}}", r.count, roots_text(&ctx, &r.roots).replace(';', ", ")));
    let records = tr.csv_records();
    match format {
        Format::Table => {
            let header = if materialize { &crate::iteration::IterationTrace::CSV_HEADER[..] } else { &crate::iteration::IterationTrace::CSV_HEADER[..5] };
            let rows: Vec<Vec<String>> = records.iter().map(|r| r[..header.len()].to_vec()).collect();
            out.write_all(aligned(header, &rows).as_bytes())?;
            writeln!(out, "{summary}")?;
            if let Some(l) = &oracle_line {
                writeln!(out, "{l}")?;
            }
        }
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(crate::iteration::IterationTrace::CSV_HEADER)?;
            for r in &records {
                w.write_record(r)?;
            }
            w.flush()?;
            writeln!(err, "{summary}")?;
            if let Some(l) = &oracle_line {
                writeln!(err, "{l}")?;
            }
        }
        Format::Json => {
            let rows: Vec<_> = tr
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "i": r.i,
                        "ell": r.ell.to_string(),
                        "g_degree": r.g_degree.to_string(),
                        "bound": r.bound.to_string(),
                        "below_m": r.below_m,
                        "poly": r.poly.as_ref().map(|p| p.render_signed()),
                    })
                })
                .collect();
            let value = json!({
                "field": ctx.spec(),
                "poly": poly.to_string(),
                "d": d,
                "rows": rows,
                "termination": tr.termination,
                "lemma": tr.lemma,
                "regime": best,
                "oracle": roots.as_ref().map(|r| r.count),
            });
            serde_json::to_writer_pretty(&mut *out, &value)?;
            writeln!(out)?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_sweep(q: &str, d: u64, svg: Option<&PathBuf>, color: ColorArg, format: Format, out: &mut dyn Write) -> Result<i32, CliError> {
    let ctx = field(q, None)?;
    if d < 2 {
        return Err(CliError::Precondition(BoundError::DEqualsOne.to_string()));
    }
    ctx.check_divisor(d)?;
    let rows = sweep::sweep(ctx.order(), d)?;
    match format {
        Format::Csv => sweep::write_csv(&rows, out)?,
        Format::Json => {
            serde_json::to_writer(&mut *out, &rows)?;
            writeln!(out)?;
        }
        Format::Table => {
            let body: Vec<Vec<String>> = rows.iter().map(|r| r.csv_record().to_vec()).collect();
            out.write_all(aligned(&sweep::SweepRow::CSV_HEADER, &body).as_bytes())?;
        }
    }
    if let Some(path) = svg {
        let mode = match color {
            ColorArg::Case => ColorMode::Case,
            ColorArg::Term => ColorMode::Term,
            ColorArg::Region => ColorMode::Region,
        };
        let title = format!("q = {}, d = {}", ctx.q(), d);
        std::fs::write(path, sweep::render_svg(&rows, mode, &title))?;
    }
    Ok(EXIT_OK)
}

pub fn build_example(family: Family, q: &str, r: (Option<u64>, Option<u64>), step: u64, n: u64) -> Result<ConstructedExample, CliError> {
    let ctx = field(q, None)?;
    let p = || {
        if ctx.is_prime_field() {
            Ok(ctx.p())
        } else {
            Err(CliError::Precondition(format!("{} needs a prime field", family)))
        }
    };
    Ok(match family {
        Family::ThreeResidues => constructions::three_residues(p()?)?,
        Family::TwoResidues => {
            let pair = match r {
                (Some(a), Some(b)) => Some((a, b)),
                (None, None) => None,
                _ => return Err(CliError::Precondition("give both --r1 and --r2 or neither".into())),
            };
            constructions::two_residues(p()?, pair)?
        }
        Family::FourResidues => constructions::four_residues(p()?)?,
        Family::Cyclotomic => constructions::cyclotomic(ctx.clone(), step, n)?,
    })
}

fn cmd_construct(
    family: Family,
    q: &str,
    r: (Option<u64>, Option<u64>),
    step: u64,
    n: u64,
    format: Format,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let ex = build_example(family, q, r, step, n)?;
    let ctx = ex.poly.ctx().clone();
    let roots = ex.root_strings();
    match format {
        Format::Table => {
            writeln!(out, "{}", ex.poly)?;
            let params: Vec<String> = ex.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            writeln!(out, "family {} over {} ({})", ex.family, ctx.spec(), params.join(", "))?;
            writeln!(out, "roots ({}): {}", roots.len(), roots.join(", "))?;
            writeln!(out, "{} bound: {}", ex.bound_method, ex.claimed_bound)?;
        }
        Format::Csv => {
            writeln!(out, "{}", ex.poly)?;
            let mut w = csv_writer(out);
            w.write_record(["family", "field", "poly", "bound_method", "bound", "count", "roots"])?;
            w.write_record([
                ex.family.to_string(),
                ctx.spec(),
                ex.poly.to_string(),
                ex.bound_method.to_string(),
                ex.claimed_bound.to_string(),
                roots.len().to_string(),
                roots.join(";"),
            ])?;
            w.flush()?;
        }
        Format::Json => {
            let params: serde_json::Map<String, serde_json::Value> =
                ex.params.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
            let value = json!({
                "family": ex.family,
                "field": ctx.spec(),
                "params": params,
                "poly": ex.poly.to_string(),
                "roots": roots,
                "bound_method": ex.bound_method,
                "bound": ex.claimed_bound,
            });
            serde_json::to_writer_pretty(&mut *out, &value)?;
            writeln!(out)?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_verify(
    seed: u64,
    trials: u64,
    max_q: u64,
    inject: &[String],
    format: Format,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let mut injected = Vec::with_capacity(inject.len());
    for spec in inject {
        let (q, f) = spec
            .rsplit_once(':')
            .ok_or_else(|| CliError::Precondition(format!("--inject expects q:f, got `{spec}`")))?;
        injected.push(SparsePoly::parse(f, field(q, None)?)?);
    }
    let report = verify::run(&VerifyConfig { seed, trials, max_q }, &injected)?;
    match format {
        Format::Table => {
            writeln!(out, "trials: {} (+{} injected)", report.trials, report.injected)?;
            writeln!(out, "bounds checked: {}", report.bounds_checked)?;
            if let Some(t) = report.max_tightness {
                writeln!(out, "max tightness: {:.4} ({} roots vs {} bound {})", t.ratio, t.roots, t.method, t.bound)?;
            }
            writeln!(out, "violations: {}", report.violations.len())?;
        }
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["trials", "injected", "bounds_checked", "max_tightness", "violations"])?;
            w.write_record([
                report.trials.to_string(),
                report.injected.to_string(),
                report.bounds_checked.to_string(),
                report.max_tightness.map(|t| format!("{:.6}", t.ratio)).unwrap_or_default(),
                report.violations.len().to_string(),
            ])?;
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &report)?;
            writeln!(out)?;
        }
    }
    for v in &report.violations {
        let d = v.d.map(|d| format!(" d={d}")).unwrap_or_default();
        let trial = v.trial.map(|t| format!("trial {t}")).unwrap_or_else(|| "injected".into());
        writeln!(
            err,
            "SoundnessViolation ({trial}): over F_{} f = {} has {} roots but {}{d} gives {}",
            v.field, v.poly, v.roots, v.method, v.bound
        )?;
    }
    Ok(if report.is_sound() { EXIT_OK } else { EXIT_VIOLATION })
}

fn cmd_redei(q: &str, d: Option<u64>, cap: u64, format: Format, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let ctx = field(q, None)?;
    let ds: Vec<u64> = match d {
        Some(d) => vec![d],
        None => crate::numtheory::divisors(ctx.order()).into_iter().filter(|&d| d >= 2).collect(),
    };
    let sweeping = d.is_none();
    let mut reports: Vec<RedeiReport> = Vec::new();
    for d in ds {
        match redei_check(ctx.clone(), d, cap) {
            Ok(r) => reports.push(r),
            Err(e @ RedeiError::EnumerationTooLarge { .. }) if sweeping => {
                writeln!(err, "skipping d={d}: {e}")?;
            }
            Err(e) => return Err(e.into()),
        }
    }
    let describe = |ctx: &FieldCtx, s: &crate::redei::Survivor| match s.kind {
        Some(crate::redei::SurvivorKind::EulerBinomial { alpha }) => {
            format!("binomial, alpha={}", ctx.fmt_element(crate::field::Element::from_packed(alpha)))
        }
        Some(crate::redei::SurvivorKind::SquareRootPair { beta, gamma }) => format!(
            "pair, beta={}, gamma={}",
            ctx.fmt_element(crate::field::Element::from_packed(beta)),
            ctx.fmt_element(crate::field::Element::from_packed(gamma))
        ),
        None => "UNEXPLAINED".into(),
    };
    match format {
        Format::Table => {
            for r in &reports {
                writeln!(
                    out,
                    "q={} d={}: {} subsets, {} survivors ({} expected): {}",
                    r.q,
                    r.d,
                    r.subsets,
                    r.survivors.len(),
                    r.expected,
                    if r.passes() { "PASS" } else { "FAIL" }
                )?;
                for s in &r.survivors {
                    writeln!(out, "  {}  [{}]", s.poly, describe(&ctx, s))?;
                }
            }
        }
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["q", "d", "subsets", "poly", "kind"])?;
            for r in &reports {
                for s in &r.survivors {
                    w.write_record([
                        r.q.to_string(),
                        r.d.to_string(),
                        r.subsets.to_string(),
                        s.poly.to_string(),
                        describe(&ctx, s),
                    ])?;
                }
            }
            w.flush()?;
        }
        Format::Json => {
            let value: Vec<_> = reports
                .iter()
                .map(|r| {
                    json!({
                        "q": r.q,
                        "d": r.d,
                        "subsets": r.subsets,
                        "expected": r.expected,
                        "passes": r.passes(),
                        "survivors": r.survivors.iter().map(|s| json!({
                            "poly": s.poly.to_string(),
                            "kind": s.kind,
                        })).collect::<Vec<_>>(),
                    })
                })
                .collect();
            serde_json::to_writer_pretty(&mut *out, &value)?;
            writeln!(out)?;
        }
    }
    if reports.iter().any(|r| !r.passes()) {
        return Err(CliError::Violation("a survivor has neither admissible shape".into()));
    }
    Ok(EXIT_OK)
}
