//! Command-line front end for the `qcss` library.
//!
//! Exit codes are shared by every subcommand: 0 success, 1 verification
//! failure, 2 argument error, 3 I/O error.

pub mod export;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qcss::bounds::{self, ParamTable, QcssParams};
use qcss::correlation::{self, ScanOptions};
use qcss::modarith::{self, Factorization};
use qcss::{Codebook, QcssError, SequenceFamily};
use serde_json::json;
use thiserror::Error;

use crate::export::{Bundle, BundleKind, FormatError};

pub const THREADS_ENV: &str = "QCSS_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Format(#[from] FormatError),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl From<QcssError> for CliError {
    fn from(e: QcssError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io { .. } | CliError::Format(_) => 3,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qcss",
    version,
    about = "Complete complementary codes and QCSSs over Z_N"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DataFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Text,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scope {
    Permutation,
    Ccc,
    Interset,
    Qcss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableName {
    Iii,
    Iv,
    V,
}

impl From<TableName> for ParamTable {
    fn from(t: TableName) -> Self {
        match t {
            TableName::Iii => ParamTable::Optimal,
            TableName::Iv => ParamTable::NearOptimal,
            TableName::V => ParamTable::PrimeSquare,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write phase matrices for one set, one code, or the whole QCSS.
    Generate {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        exponent: Option<u64>,
        /// Family index in [1, p0); alone it selects one complete code.
        #[arg(long)]
        k: Option<u64>,
        /// Set index in [0, N); requires --k.
        #[arg(long)]
        m: Option<u64>,
        /// Output file (single set or JSON) or directory (CSV families).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = DataFormat::Csv)]
        format: DataFormat,
    },
    /// Exhaustively check the permutation, the codes, or the QCSS.
    Verify {
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum)]
        scope: Scope,
        /// Relative tolerance; scaled by N² for zero tests and by N for
        /// magnitude tests.
        #[arg(long, default_value_t = correlation::DEFAULT_REL_TOL)]
        tol: f64,
        #[arg(long)]
        exponent: Option<u64>,
        #[arg(long)]
        json: bool,
        /// Add 1 (mod N) to one phase before verifying: `k,m,s,t`.
        #[arg(long, hide = true, value_parser = parse_corruption)]
        corrupt: Option<[u64; 4]>,
    },
    /// Evaluate the Welch and Liu bounds and, given δ_max, the factor ρ.
    Bounds {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Print one of the parameter tables.
    Tables {
        #[arg(value_enum)]
        which: TableName,
        #[arg(long, value_enum, default_value_t = TableFormat::Text)]
        format: TableFormat,
    },
    /// Write |set correlation| between sets (k1, m1) and (k2, m2) at every shift.
    Profile {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k1: u64,
        #[arg(long)]
        m1: u64,
        #[arg(long)]
        k2: u64,
        #[arg(long)]
        m2: u64,
        #[arg(long)]
        exponent: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_corruption(s: &str) -> Result<[u64; 4], String> {
    let parts: Vec<u64> = s
        .split([',', ':'])
        .map(|p| p.trim().parse::<u64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    parts
        .try_into()
        .map_err(|_| "expected four indices k,m,s,t".to_string())
}

/// Parses `QCSS_THREADS` and sizes the global pool accordingly.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "{THREADS_ENV} must be a positive integer, got {raw:?}"
        ))
    })?;
    #[cfg(feature = "parallel")]
    {
        // A pool may already exist when embedded; the cap is best effort then.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let result = configure_threads().and_then(|()| run(cli.command));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Generate {
            n,
            exponent,
            k,
            m,
            out,
            format,
        } => cmd_generate(n, exponent, k, m, out.as_deref(), format),
        Command::Verify {
            n,
            scope,
            tol,
            exponent,
            json,
            corrupt,
        } => cmd_verify(n, scope, tol, exponent, json, corrupt),
        Command::Bounds {
            k,
            m,
            n,
            delta,
            json,
        } => cmd_bounds(k, m, n, delta, json),
        Command::Tables { which, format } => cmd_tables(which.into(), format),
        Command::Profile {
            n,
            k1,
            m1,
            k2,
            m2,
            exponent,
            out,
        } => cmd_profile(n, (k1, m1), (k2, m2), exponent, out.as_deref()),
    }
}

fn codebook(n: u64, exponent: Option<u64>) -> Result<Codebook, CliError> {
    let book = match exponent {
        Some(e) => Codebook::with_exponent(n, e)?,
        None => Codebook::new(n)?,
    };
    Ok(book)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(io_err(path))
}

fn write_stdout(contents: &str) -> Result<(), CliError> {
    io::stdout()
        .write_all(contents.as_bytes())
        .map_err(io_err(Path::new("<stdout>")))
}

fn summary(book: &Codebook) -> String {
    let n = book.n();
    format!(
        "K={} M={} N={} p0={} e={}",
        n * book.family_count(),
        n,
        n,
        book.p0(),
        book.exponent()
    )
}

pub fn cmd_generate(
    n: u64,
    exponent: Option<u64>,
    k: Option<u64>,
    m: Option<u64>,
    out: Option<&Path>,
    format: DataFormat,
) -> Result<(), CliError> {
    let book = codebook(n, exponent)?;
    let e = book.exponent();
    let (kind, members) = match (k, m) {
        (Some(k), Some(m)) => (BundleKind::Set, vec![book.build_set(k, m)?]),
        (Some(k), None) => (BundleKind::Ccc, book.build_ccc(k)?.into_members()),
        (None, None) => (BundleKind::Qcss, book.build_qcss()?.into_members()),
        (None, Some(_)) => return Err(CliError::Usage("--m requires --k".into())),
    };
    let data_on_stdout = out.is_none();
    let note = summary(&book);
    if data_on_stdout {
        eprintln!("{note}");
    } else {
        println!("{note}");
    }

    match format {
        DataFormat::Json => {
            let bundle = Bundle {
                n: n as u32,
                exponent: e,
                p0: book.p0(),
                kind,
                members: members
                    .into_iter()
                    .map(|c| (book.global_index(c.k() as u64, c.m() as u64), c))
                    .collect(),
            };
            let text = export::bundle_to_json(&bundle)?;
            match out {
                Some(path) => write_file(path, &text),
                None => write_stdout(&text),
            }
        }
        DataFormat::Csv if kind == BundleKind::Set => {
            let text = export::matrix_to_csv(&members[0], e);
            match out {
                Some(path) => write_file(path, &text),
                None => write_stdout(&text),
            }
        }
        DataFormat::Csv => {
            let dir = out.ok_or_else(|| {
                CliError::Usage("CSV output of a family needs --out <directory>".into())
            })?;
            fs::create_dir_all(dir).map_err(io_err(dir))?;
            for c in &members {
                let u = book.global_index(c.k() as u64, c.m() as u64);
                let path = dir.join(format!("u{u:05}_k{}_m{}.csv", c.k(), c.m()));
                write_file(&path, &export::matrix_to_csv(c, e))?;
            }
            Ok(())
        }
    }
}

fn corrupt_family(family: &mut SequenceFamily, target: Option<[u64; 4]>) {
    let Some([k, m, s, t]) = target else { return };
    let n = family.n() as u64;
    for c in family.members_mut() {
        if c.k() as u64 == k && c.m() as u64 == m && s < n && t < n {
            let old = c.get(s as usize, t as usize);
            c.set(s as usize, t as usize, old + 1);
        }
    }
}

fn check_corruption_target(book: &Codebook, target: Option<[u64; 4]>) -> Result<(), CliError> {
    if let Some([k, m, s, t]) = target {
        book.phase(k, m, s, t)?;
    }
    Ok(())
}

fn emit(json: bool, lines: &[String], doc: serde_json::Value) {
    if json {
        println!("{doc}");
    } else {
        for line in lines {
            println!("{line}");
        }
    }
}

pub fn cmd_verify(
    n: u64,
    scope: Scope,
    rel_tol: f64,
    exponent: Option<u64>,
    json: bool,
    corrupt: Option<[u64; 4]>,
) -> Result<(), CliError> {
    if !(rel_tol.is_finite() && rel_tol >= 0.0) {
        return Err(CliError::Usage(format!(
            "--tol must be non-negative, got {rel_tol}"
        )));
    }
    let book = codebook(n, exponent)?;
    check_corruption_target(&book, corrupt)?;
    let nf = n as f64;
    let zero_tol = rel_tol * nf * nf;
    let mag_tol = rel_tol * nf;

    match scope {
        Scope::Permutation => verify_permutation(book.factorization(), &book, json),
        Scope::Ccc => {
            let mut lines = Vec::new();
            let mut reports = Vec::new();
            let mut failure = None;
            for k in 1..book.p0() {
                let mut family = book.build_ccc(k)?;
                corrupt_family(&mut family, corrupt);
                let r = correlation::verify_ccc(&family, zero_tol);
                let w = r.worst_violation.expect("non-empty family");
                let witness = format!("k={} m1={} m2={} tau={}", w.k, w.m1, w.m2, w.tau);
                if r.ok {
                    lines.push(format!(
                        "ccc k={k}: ok (worst deviation {:.3e})",
                        w.deviation
                    ));
                } else {
                    lines.push(format!(
                        "ccc k={k}: FAILED witness {witness} |R - expected|={:.6}",
                        w.deviation
                    ));
                    failure.get_or_insert(witness.clone());
                }
                reports.push(json!({
                    "k": k, "ok": r.ok, "checked": r.checked,
                    "worst_deviation": w.deviation, "min_peak": r.min_peak,
                    "witness": {"k": w.k, "m1": w.m1, "m2": w.m2, "tau": w.tau},
                }));
            }
            let ok = failure.is_none();
            lines.push(format!("ccc: {}", if ok { "ok" } else { "FAILED" }));
            emit(
                json,
                &lines,
                json!({"scope": "ccc", "n": n, "exponent": book.exponent(), "tol": zero_tol, "ok": ok, "families": reports}),
            );
            failure.map_or(Ok(()), |w| Err(CliError::Verification(w)))
        }
        Scope::Interset => {
            let mut families = Vec::new();
            for k in 1..book.p0() {
                let mut f = book.build_ccc(k)?;
                corrupt_family(&mut f, corrupt);
                families.push(f);
            }
            let mut lines = Vec::new();
            let mut reports = Vec::new();
            let mut failure = None;
            // Both orders, so negative shifts are covered too.
            for (i, f1) in families.iter().enumerate() {
                for f2 in families
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, f)| f)
                {
                    let r = correlation::verify_interset(f1, f2, mag_tol)?;
                    let (k1, k2) = (f1.members()[0].k(), f2.members()[0].k());
                    let (m1, m2, tau) = r.argmax;
                    let pass = r.ok && r.dichotomy_ok;
                    lines.push(format!(
                        "interset k1={k1} k2={k2}: max={:.6} dichotomy {} {}",
                        r.max_magnitude,
                        if r.dichotomy_ok { "ok" } else { "FAILED" },
                        if pass { "ok" } else { "FAILED" },
                    ));
                    if !pass {
                        failure.get_or_insert(format!(
                            "k1={k1} k2={k2} m1={m1} m2={m2} tau={tau} max={:.6}",
                            r.max_magnitude
                        ));
                    }
                    reports.push(json!({
                        "k1": k1, "k2": k2, "ok": r.ok, "dichotomy_ok": r.dichotomy_ok,
                        "max_magnitude": r.max_magnitude,
                        "worst_dichotomy_deviation": r.worst_dichotomy_deviation,
                        "argmax": {"m1": m1, "m2": m2, "tau": tau},
                    }));
                }
            }
            if families.len() < 2 {
                lines.push("interset: only one family (p0 = 3 has two; nothing to compare)".into());
            }
            let ok = failure.is_none();
            lines.push(format!("interset: {}", if ok { "ok" } else { "FAILED" }));
            emit(
                json,
                &lines,
                json!({"scope": "interset", "n": n, "exponent": book.exponent(), "tol": mag_tol, "ok": ok, "pairs": reports}),
            );
            failure.map_or(Ok(()), |w| Err(CliError::Verification(w)))
        }
        Scope::Qcss => {
            let mut family = book.build_qcss()?;
            corrupt_family(&mut family, corrupt);
            let r = correlation::delta_max_scan_with(family.members(), ScanOptions::new(mag_tol));
            let ok = (r.delta_max - nf).abs() <= mag_tol;
            let (u1, u2, tau) = r.argmax.unwrap_or((0, 0, 0));
            let params = QcssParams::new(family.set_size() as u64, n, n, r.delta_max);
            let opt = bounds::optimality_factor(&params)?;
            let lines = vec![
                format!("K={} M={n} N={n}", family.set_size()),
                format!("argmax u1={u1} u2={u2} tau={tau}"),
                format!(
                    "rho={:.4} ({}) {}",
                    opt.rho, opt.bound_used, opt.classification
                ),
                format!(
                    "delta_max={:.6} {}",
                    r.delta_max,
                    if ok { "ok" } else { "FAILED" }
                ),
            ];
            let histogram: Vec<_> = r
                .histogram
                .unwrap_or_default()
                .iter()
                .map(|b| json!({"magnitude": b.magnitude, "count": b.count}))
                .collect();
            emit(
                json,
                &lines,
                json!({
                    "scope": "qcss", "n": n, "exponent": book.exponent(), "tol": mag_tol,
                    "ok": ok, "set_size": family.set_size(), "delta_max": r.delta_max,
                    "argmax": {"u1": u1, "u2": u2, "tau": tau}, "rho": opt.rho,
                    "bound": opt.bound_used.to_string(), "histogram": histogram,
                }),
            );
            if ok {
                Ok(())
            } else {
                Err(CliError::Verification(format!(
                    "delta_max={:.6} at u1={u1} u2={u2} tau={tau}",
                    r.delta_max
                )))
            }
        }
    }
}

fn verify_permutation(f: &Factorization, book: &Codebook, json: bool) -> Result<(), CliError> {
    let r = modarith::verify_unique_solution(f, book.perm());
    let mut lines = vec![format!(
        "pi(Z_{}) with e={}: checked {} (tau, c) pairs",
        f.n(),
        book.exponent(),
        r.checked
    )];
    if r.ok {
        lines.push("unique-solution: ok (all τ,c)".into());
    } else {
        for v in r.violations.iter().take(10) {
            lines.push(format!(
                "unique-solution: FAILED tau={} c={} solutions={}",
                v.tau, v.c, v.solutions
            ));
        }
    }
    let violations: Vec<_> = r
        .violations
        .iter()
        .map(|v| json!({"tau": v.tau, "c": v.c, "solutions": v.solutions}))
        .collect();
    emit(
        json,
        &lines,
        json!({"scope": "permutation", "n": f.n(), "exponent": book.exponent(), "ok": r.ok, "checked": r.checked, "violations": violations}),
    );
    match r.violations.first() {
        None => Ok(()),
        Some(v) => Err(CliError::Verification(format!(
            "tau={} c={} has {} solutions",
            v.tau, v.c, v.solutions
        ))),
    }
}

pub fn cmd_bounds(k: u64, m: u64, n: u64, delta: Option<f64>, json: bool) -> Result<(), CliError> {
    let welch = bounds::welch_bound(k, m, n)?;
    let liu = bounds::liu_bound(k, m, n);
    let mut lines = vec![format!("welch={welch:.6}")];
    match &liu {
        Ok(b) => lines.push(format!("liu={b:.6}")),
        Err(e) => lines.push(format!("liu=undefined ({e})")),
    }
    let mut doc = json!({"k": k, "m": m, "n": n, "welch": welch, "liu": liu.as_ref().ok()});
    if let Some(d) = delta {
        if !(d.is_finite() && d >= 0.0) {
            return Err(CliError::Usage(format!(
                "--delta must be non-negative, got {d}"
            )));
        }
        let r = bounds::optimality_factor(&QcssParams::new(k, m, n, d))?;
        lines.push(format!(
            "rho={:.4} ({}) {}",
            bounds::round4(r.rho),
            r.bound_used,
            r.classification
        ));
        doc["delta"] = json!(d);
        doc["rho"] = json!(r.rho);
        doc["bound"] = json!(r.bound_used.to_string());
        doc["classification"] = json!(r.classification.to_string());
    }
    emit(json, &lines, doc);
    Ok(())
}

pub fn cmd_tables(table: ParamTable, format: TableFormat) -> Result<(), CliError> {
    let rows = bounds::table_rows(table);
    let text = match format {
        TableFormat::Text => export::table_to_text(table, &rows),
        TableFormat::Csv => export::table_to_csv(table, &rows),
    };
    write_stdout(&text)
}

pub fn cmd_profile(
    n: u64,
    (k1, m1): (u64, u64),
    (k2, m2): (u64, u64),
    exponent: Option<u64>,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let book = codebook(n, exponent)?;
    let a = book.build_set(k1, m1)?;
    let b = book.build_set(k2, m2)?;
    let profile = correlation::set_xcorr_profile(&a, &b)?;
    let text = export::profile_to_csv(&profile);
    match out {
        Some(path) => write_file(path, &text),
        None => write_stdout(&text),
    }
}
