//! The `mds-selfdual` command line.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 the requested
//! construction does not exist or was not found, 3 verification failed.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::construct::{
    construct, search_square_difference_set, ConstructionJson, ConstructionRequest,
    ConstructionResult, Family,
};
use crate::error::Error;
use crate::gf::{make_field_of_order, prime_power};
use crate::grs::{CodeJson, GrsCode};
use crate::par::{self, Strategy};
use crate::verify::{
    verify_code, MdsMode, VerificationReport, VerifyOptions, DEFAULT_MDS_BUDGET,
    DEFAULT_MDS_SAMPLES,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NOT_CONSTRUCTED: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "mds-selfdual",
    version,
    about = "Construct and verify MDS self-dual GRS codes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a self-dual code and print it as JSON.
    Construct(ConstructArgs),
    /// Check a code JSON file (or stdin) and print a report.
    Verify(VerifyArgs),
    /// Search for a set whose pairwise differences are nonzero squares.
    Search(SearchArgs),
    /// Construct and verify every cell of a parameter grid.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct FieldArgs {
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub e: Option<u32>,
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long)]
    pub r: Option<u64>,
    #[arg(long)]
    pub t: Option<u64>,
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    /// even-char, extended, square-set, subfield-points, roots-of-unity,
    /// theorem-3-5 or auto.
    #[arg(long, value_parser = parse_family)]
    pub family: Family,
    #[command(flatten)]
    pub field: FieldArgs,
    /// Write the JSON here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MdsModeArg {
    /// Exact if within the budget, randomized otherwise.
    Auto,
    Exact,
    Randomized,
    Structural,
}

#[derive(Debug, Args)]
pub struct MdsArgs {
    #[arg(long, value_enum, default_value_t = MdsModeArg::Auto)]
    pub mds_mode: MdsModeArg,
    /// Maximum number of column subsets for the exact MDS check.
    #[arg(long, default_value_t = DEFAULT_MDS_BUDGET as u64)]
    pub budget: u64,
    /// Number of sampled subsets for the randomized MDS check.
    #[arg(long, default_value_t = DEFAULT_MDS_SAMPLES)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl MdsArgs {
    fn mode(&self, len: usize, k: usize) -> MdsMode {
        let exact = MdsMode::Exact {
            budget: self.budget as u128,
        };
        let randomized = MdsMode::Randomized {
            samples: self.samples,
            seed: self.seed,
        };
        match self.mds_mode {
            MdsModeArg::Exact => exact,
            MdsModeArg::Randomized => randomized,
            MdsModeArg::Structural => MdsMode::Structural,
            MdsModeArg::Auto => {
                if crate::verify::binomial(len as u64, k as u64) <= self.budget as u128 {
                    exact
                } else {
                    randomized
                }
            }
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Code JSON file; reads stdin when absent or `-`.
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub mds: MdsArgs,
    /// Also check the GRS dual identity for the code's points.
    #[arg(long)]
    pub dual_identity: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub n: usize,
    /// Give up after visiting this many search nodes.
    #[arg(long)]
    pub node_budget: Option<u64>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// A construction family, or `all` for the full default grid.
    #[arg(long, default_value = "all")]
    pub family: String,
    /// Field orders (comma separated). An explicit empty list sweeps nothing.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub q: Option<Vec<u64>>,
    /// Subfield orders for subfield-points and theorem-3-5.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub r: Option<Vec<u64>>,
    /// Restrict to these lengths.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub n: Option<Vec<usize>>,
    #[command(flatten)]
    pub mds: MdsArgs,
    /// Directory for per-cell JSON artifacts.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Runs the CLI against the process's stdio.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(
        args,
        &mut io::stdin().lock(),
        &mut stdout.lock(),
        &mut stderr.lock(),
    )
}

pub fn run_with<I, T>(
    args: I,
    stdin: &mut dyn Read,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = if e.use_stderr() {
                e.render().to_string()
            } else {
                e.to_string()
            };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{text}");
            return code;
        }
    };
    let result = match cli.command {
        Command::Construct(a) => cmd_construct(&a, out),
        Command::Verify(a) => cmd_verify(&a, stdin, out),
        Command::Search(a) => cmd_search(&a, out),
        Command::Sweep(a) => cmd_sweep(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message);
            failure.code
        }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CertificateViolation(_) => EXIT_VERIFY_FAILED,
            ref e if e.is_construction_failure() => EXIT_NOT_CONSTRUCTED,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn to_json_text<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn request(family: Family, f: &FieldArgs) -> ConstructionRequest {
    ConstructionRequest {
        family: Some(family),
        p: f.p,
        e: f.e,
        q: f.q,
        r: f.r,
        t: f.t,
        n: f.n,
    }
}

pub fn cmd_construct(args: &ConstructArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let res = construct(&request(args.family, &args.field))?;
    emit(&to_json_text(&res.to_json()), args.output.as_deref(), out)?;
    Ok(EXIT_OK)
}

pub fn cmd_verify(
    args: &VerifyArgs,
    stdin: &mut dyn Read,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let (name, text) = match args.input.as_deref() {
        None => ("<stdin>".to_string(), read_all(stdin)?),
        Some(p) if p == Path::new("-") => ("<stdin>".to_string(), read_all(stdin)?),
        Some(p) => (p.display().to_string(), fs::read_to_string(p)?),
    };
    let json: CodeJson = serde_json::from_str(&text).map_err(|e| usage(format!("{name}: {e}")))?;
    let (code, g) = GrsCode::from_json(&json).map_err(|e| usage(format!("{name}: {e}")))?;
    let opts = VerifyOptions {
        mds: args.mds.mode(g.cols(), g.rows()),
        dual_identity: args.dual_identity,
        strategy: Strategy::default(),
    };
    let report = verify_code(&code, &g, opts)?;
    emit(&to_json_text(&report), args.output.as_deref(), out)?;
    Ok(if report.overall {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

fn read_all(r: &mut dyn Read) -> io::Result<String> {
    let mut s = String::new();
    r.read_to_string(&mut s)?;
    Ok(s)
}

#[derive(Debug, Serialize)]
struct SearchOutput {
    q: u64,
    n: usize,
    alpha_set: Vec<Vec<u64>>,
}

pub fn cmd_search(args: &SearchArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let field = make_field_of_order(args.q)?;
    let set = search_square_difference_set(&field, args.n, args.node_budget)?;
    let result = SearchOutput {
        q: args.q,
        n: args.n,
        alpha_set: set.iter().map(|&x| field.coeffs(x)).collect(),
    };
    emit(&to_json_text(&result), args.output.as_deref(), out)?;
    Ok(EXIT_OK)
}

/// One parameter combination of a sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub family: Family,
    pub q: u64,
    pub n: usize,
    pub t: Option<u64>,
}

impl Cell {
    fn request(&self) -> ConstructionRequest {
        let r = matches!(self.family, Family::SubfieldPoints | Family::CosetUnion)
            .then(|| prime_power(self.q).map(|(p, e)| p.pow(e / 2)))
            .flatten();
        ConstructionRequest {
            family: Some(self.family),
            q: Some(self.q),
            r,
            t: self.t,
            n: Some(self.n),
            ..Default::default()
        }
    }

    fn label(&self) -> String {
        let mut s = format!("{}_q{}_n{}", self.family, self.q, self.n);
        if let Some(t) = self.t {
            s.push_str(&format!("_t{t}"));
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellStatus {
    Pass,
    NotConstructed,
    Fail,
    Error,
}

impl CellStatus {
    fn name(self) -> &'static str {
        match self {
            CellStatus::Pass => "pass",
            CellStatus::NotConstructed => "not-constructed",
            CellStatus::Fail => "fail",
            CellStatus::Error => "error",
        }
    }
}

pub struct CellOutcome {
    pub cell: Cell,
    pub status: CellStatus,
    pub k: Option<usize>,
    pub mds_mode: String,
    pub detail: String,
    pub millis: u128,
    pub artifact: Option<String>,
}

#[derive(Serialize)]
struct CellArtifact<'a> {
    construction: &'a ConstructionJson,
    report: &'a VerificationReport,
}

fn run_cell(cell: &Cell, mds: &MdsArgs) -> CellOutcome {
    let start = Instant::now();
    let built: Result<ConstructionResult, Error> = construct(&cell.request());
    let mut outcome = CellOutcome {
        cell: cell.clone(),
        status: CellStatus::Error,
        k: None,
        mds_mode: "-".into(),
        detail: String::new(),
        millis: 0,
        artifact: None,
    };
    match built {
        Err(e) => {
            outcome.status = if e.is_construction_failure() {
                CellStatus::NotConstructed
            } else {
                CellStatus::Error
            };
            outcome.detail = e.to_string();
        }
        Ok(res) => {
            let g = res.code.generator_matrix();
            let mode = mds.mode(g.cols(), g.rows());
            outcome.k = Some(res.code.k());
            outcome.mds_mode = match mode {
                MdsMode::Exact { .. } => "exact",
                MdsMode::Randomized { .. } => "randomized",
                MdsMode::Structural => "structural",
            }
            .into();
            // Cells already run in parallel, so the checks inside run sequentially.
            let opts = VerifyOptions {
                mds: mode,
                dual_identity: false,
                strategy: Strategy::Sequential,
            };
            match verify_code(&res.code, &g, opts) {
                Ok(report) => {
                    outcome.status = if report.overall {
                        CellStatus::Pass
                    } else {
                        CellStatus::Fail
                    };
                    outcome.detail = report
                        .checks
                        .iter()
                        .find(|c| !c.passed())
                        .map(|c| format!("{}: {}", c.name, c.detail))
                        .unwrap_or_default();
                    let construction = res.to_json();
                    outcome.artifact = Some(to_json_text(&CellArtifact {
                        construction: &construction,
                        report: &report,
                    }));
                }
                Err(e) => {
                    outcome.status = CellStatus::Error;
                    outcome.detail = e.to_string();
                }
            }
        }
    }
    outcome.millis = start.elapsed().as_millis();
    outcome
}

const DEFAULT_EVEN_Q: [u64; 3] = [4, 8, 16];
const DEFAULT_EXTENDED_Q: [u64; 7] = [5, 7, 9, 13, 17, 25, 27];
const DEFAULT_SUBFIELD_R: [u64; 4] = [3, 5, 7, 9];
const DEFAULT_ROOTS_Q: [u64; 4] = [9, 25, 49, 81];
const DEFAULT_COSET_R: [u64; 2] = [3, 7];
const DEFAULT_SQUARE_SET: [(u64, usize); 2] = [(13, 2), (29, 4)];

fn even_lengths(max: u64) -> impl Iterator<Item = usize> {
    (2..=max as usize).step_by(2)
}

/// Expands the sweep flags into cells, in parameter order.
pub fn sweep_cells(
    family: &str,
    qs: Option<&[u64]>,
    rs: Option<&[u64]>,
    ns: Option<&[usize]>,
) -> Result<Vec<Cell>, Error> {
    let families: Vec<Family> = if family == "all" {
        vec![
            Family::EvenChar,
            Family::Extended,
            Family::SubfieldPoints,
            Family::RootsOfUnity,
            Family::CosetUnion,
            Family::SquareSet,
        ]
    } else {
        vec![family.parse()?]
    };
    let keep_n = |n: usize| ns.is_none_or(|ns| ns.contains(&n));
    let mut cells = Vec::new();
    let cell = |family, q, n, t| Cell { family, q, n, t };
    for fam in families {
        match fam {
            Family::EvenChar => {
                for &q in qs.unwrap_or(&DEFAULT_EVEN_Q) {
                    cells.extend(
                        even_lengths(q)
                            .filter(|&n| keep_n(n))
                            .map(|n| cell(fam, q, n, None)),
                    );
                }
            }
            Family::Extended => {
                for &q in qs.unwrap_or(&DEFAULT_EXTENDED_Q) {
                    if keep_n(q as usize + 1) {
                        cells.push(cell(fam, q, q as usize + 1, None));
                    }
                }
            }
            Family::SubfieldPoints => {
                for &r in rs.unwrap_or(&DEFAULT_SUBFIELD_R) {
                    cells.extend(
                        even_lengths(r)
                            .filter(|&n| keep_n(n))
                            .map(|n| cell(fam, r * r, n, None)),
                    );
                }
            }
            Family::RootsOfUnity => {
                for &q in qs.unwrap_or(&DEFAULT_ROOTS_Q) {
                    let lengths =
                        even_lengths(q).filter(|&n| (q - 1) % (n as u64 - 1) == 0 && keep_n(n));
                    cells.extend(lengths.map(|n| cell(fam, q, n, None)));
                }
            }
            Family::CosetUnion => {
                for &r in rs.unwrap_or(&DEFAULT_COSET_R) {
                    for t in 1..=r.saturating_sub(1) / 2 {
                        let n = (2 * t * r) as usize;
                        if keep_n(n) {
                            cells.push(cell(fam, r * r, n, Some(t)));
                        }
                    }
                }
            }
            Family::SquareSet | Family::Auto => match (qs, ns) {
                (None, None) if fam == Family::SquareSet => {
                    cells.extend(
                        DEFAULT_SQUARE_SET
                            .iter()
                            .map(|&(q, n)| cell(fam, q, n, None)),
                    );
                }
                (Some(qs), Some(ns)) => {
                    for &q in qs {
                        cells.extend(ns.iter().map(|&n| cell(fam, q, n, None)));
                    }
                }
                _ => return Err(Error::Parse(format!("{fam} sweeps need both --q and --n"))),
            },
        }
    }
    Ok(cells)
}

pub fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let cells = sweep_cells(
        &args.family,
        args.q.as_deref(),
        args.r.as_deref(),
        args.n.as_deref(),
    )
    .map_err(|e| usage(e.to_string()))?;
    if let Some(dir) = &args.output {
        fs::create_dir_all(dir)?;
    }
    let outcomes = par::map(Strategy::default(), &cells, |c| run_cell(c, &args.mds));

    let header = [
        "family", "q", "n", "k", "t", "status", "mds", "ms", "detail",
    ];
    let rows: Vec<[String; 9]> = outcomes
        .iter()
        .map(|o| {
            [
                o.cell.family.to_string(),
                o.cell.q.to_string(),
                o.cell.n.to_string(),
                o.k.map_or("-".into(), |k| k.to_string()),
                o.cell.t.map_or("-".into(), |t| t.to_string()),
                o.status.name().to_string(),
                o.mds_mode.clone(),
                o.millis.to_string(),
                o.detail.clone(),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cols: &[String]| {
        let mut s = cols
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ");
        s.truncate(s.trim_end().len());
        s.push('\n');
        s
    };
    let mut table = line(&header.map(String::from));
    for row in &rows {
        table.push_str(&line(row));
    }
    let passed = outcomes
        .iter()
        .filter(|o| o.status == CellStatus::Pass)
        .count();
    table.push_str(&format!("{passed}/{} cells passed\n", outcomes.len()));
    out.write_all(table.as_bytes())?;

    if let Some(dir) = &args.output {
        for o in &outcomes {
            if let Some(text) = &o.artifact {
                fs::write(dir.join(format!("{}.json", o.cell.label())), text)?;
            }
        }
    }
    Ok(if passed == outcomes.len() {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}
