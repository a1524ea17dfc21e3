//! `rep-lab` command line: orbit and string searches, representation
//! building, verification, decomposition and the Hénon pipeline.
//!
//! Exit codes: 0 success, 1 input error, 2 degenerate map (use `--analytic`),
//! 3 verification failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::algebra::{from_surface, henon_preset, relation_residual, AlgebraParams, SurfaceParams};
use crate::dynamics::{
    find_periodic_orbits, find_strings, first_order_analytic, henon_orbit_census_with, theta_params, PeriodicOrbit,
    SearchBox, CENSUS_RNG_SEED, CENSUS_SEEDS, DEFAULT_STRING_GRID,
};
use crate::error::{Error, Result};
use crate::io::{read_algebra, read_rep, read_trajectories, to_canonical_json, to_csv, RepFile, TrajectoryRecord};
use crate::linalg::frobenius;
use crate::repbuild::{build_loop_rep, build_string_rep, equivalent, RepKind, Representation};
use crate::specgraph::{decompose, DEFAULT_DECOMPOSE_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_DEGENERATE: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

/// Default tolerance for relation residuals, relative to 1 + ‖W‖_F³.
pub const DEFAULT_VERIFY_TOL: f64 = 1e-9;

/// Largest rotation order tried by `orbits --analytic`.
const ANALYTIC_N_MAX: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "rep-lab", version, about = "Hermitian representations from periodic orbits and strings of planar maps")]
pub struct Cli {
    /// Tolerance (command-specific default)
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Random seed for searches
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file (stdout when absent)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search for periodic orbits of the dynamical map
    Orbits {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        period: usize,
        /// Search box as d_min,d_max,dt_min,dt_max
        #[arg(long = "box", value_parser = parse_box, default_value = "0,10,0,10")]
        search_box: SearchBox,
        #[arg(long, default_value_t = 4096)]
        seeds: usize,
        /// Classify an order-one algebra analytically instead of searching
        #[arg(long)]
        analytic: bool,
    },
    /// Search for N-strings (a, 0) -> ... -> (0, b)
    Strings {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 10.0)]
        amax: f64,
        #[arg(long, default_value_t = DEFAULT_STRING_GRID)]
        grid: usize,
    },
    /// Build a loop or string representation from an orbit or string file
    BuildRep {
        /// Orbit or string file (one record or an array)
        #[arg(long)]
        from: PathBuf,
        /// Record to use when the file holds several
        #[arg(long, default_value_t = 0)]
        index: usize,
        /// Algebra file; defaults to the algebra stored in the record
        #[arg(long)]
        algebra: Option<PathBuf>,
        /// Phase of the corner entry for loops
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        phase: f64,
    },
    /// Check the defining relations for a representation
    Verify {
        #[arg(long)]
        rep: PathBuf,
        #[arg(long)]
        algebra: PathBuf,
    },
    /// Split a representation into irreducible loop and string blocks
    Decompose {
        #[arg(long)]
        rep: PathBuf,
        #[arg(long)]
        algebra: PathBuf,
    },
    /// Orbit census and loop representations of every dimension for a Hénon algebra
    Henon {
        #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
        b: f64,
        #[arg(long, default_value_t = 3.0)]
        r: f64,
        #[arg(long, default_value_t = 8)]
        max_dim: usize,
        #[arg(long, default_value_t = CENSUS_SEEDS)]
        seeds: usize,
    },
    /// Convert surface coefficients into an algebra file
    FromSurface {
        #[arg(long)]
        hbar: f64,
        #[arg(long, allow_negative_numbers = true)]
        alpha0: f64,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        beta_tilde: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        gamma_tilde: Vec<f64>,
    },
    /// Emit the order-one algebra with rotation angle k·pi/n
    Theta {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        alpha: f64,
    },
}

fn parse_box(s: &str) -> std::result::Result<SearchBox, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    match v[..] {
        [a, b, c, d] => SearchBox::new(a, b, c, d).map_err(|e| e.to_string()),
        _ => Err(format!("expected four comma-separated numbers, got {}", v.len())),
    }
}

/// Failure of a command, carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DegenerateMap { .. } => EXIT_DEGENERATE,
            _ => EXIT_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_INPUT, message: message.into() }
}

/// Where documents and human-readable summaries go.
struct Sink<'a> {
    out: Option<&'a Path>,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

impl Sink<'_> {
    fn emit(&mut self, document: &str) -> Result<()> {
        match self.out {
            Some(path) => std::fs::write(path, document)?,
            None => self.stdout.write_all(document.as_bytes())?,
        }
        Ok(())
    }

    /// Summaries go to stdout when the document goes to a file.
    fn note(&mut self, line: &str) {
        let target: &mut dyn Write = if self.out.is_some() { self.stdout } else { self.stderr };
        let _ = writeln!(target, "{line}");
    }
}

fn load_algebra(path: &Path) -> std::result::Result<AlgebraParams, Failure> {
    read_algebra(path).map_err(|e| input_error(format!("cannot read algebra {}: {e}", path.display())))
}

fn json_only(format: Format) -> std::result::Result<(), Failure> {
    match format {
        Format::Json => Ok(()),
        Format::Csv => Err(input_error("csv output is only available for tables (orbits, henon)")),
    }
}

#[derive(Serialize)]
struct PeriodRow {
    period: usize,
    orbits: usize,
    points: usize,
}

#[allow(clippy::too_many_arguments)]
fn cmd_orbits(
    sink: &mut Sink,
    format: Format,
    seed: u64,
    algebra: &Path,
    period: usize,
    search_box: &SearchBox,
    seeds: usize,
    analytic: bool,
) -> std::result::Result<i32, Failure> {
    let p = load_algebra(algebra)?;
    let orbits: Vec<PeriodicOrbit> = if analytic {
        let c = first_order_analytic(&p, ANALYTIC_N_MAX)?;
        sink.note(&format!(
            "p_hat = {}, q_hat = {}, on unit circle: {}, rotation: {}",
            c.p_hat,
            c.q_hat,
            c.on_unit_circle,
            c.rotation.map_or("none".into(), |(k, n)| format!("{k}*pi/{n}"))
        ));
        let mut orbits: Vec<PeriodicOrbit> =
            c.fixed_point.and_then(|x| PeriodicOrbit::new(&p, vec![x]).ok()).into_iter().collect();
        orbits.extend(c.sample_orbits.iter().filter(|o| period.is_multiple_of(o.period())).cloned());
        orbits
    } else {
        match find_periodic_orbits(&p, period, search_box, seeds, seed) {
            Ok(found) => found.orbits,
            Err(Error::DegenerateMap { period }) => {
                return Err(Failure {
                    code: EXIT_DEGENERATE,
                    message: format!(
                        "s^{period} is the identity on the search box, so orbits are not isolated; \
                         rerun with --analytic for the first-order classification"
                    ),
                })
            }
            Err(e) => return Err(e.into()),
        }
    };

    let mut periods: Vec<usize> = orbits.iter().map(PeriodicOrbit::period).collect();
    periods.sort_unstable();
    periods.dedup();
    let rows: Vec<PeriodRow> = periods
        .iter()
        .map(|&m| {
            let count = orbits.iter().filter(|o| o.period() == m).count();
            PeriodRow { period: m, orbits: count, points: count * m }
        })
        .collect();
    sink.note("period  orbits  points");
    for r in &rows {
        sink.note(&format!("{:>6}  {:>6}  {:>6}", r.period, r.orbits, r.points));
    }
    let doc = match format {
        Format::Json => {
            let recs: Vec<TrajectoryRecord> = orbits.iter().map(|o| TrajectoryRecord::from_orbit(o, &p)).collect();
            to_canonical_json(&recs)?
        }
        Format::Csv => to_csv(&rows)?,
    };
    sink.emit(&doc)?;
    Ok(EXIT_OK)
}

fn cmd_strings(
    sink: &mut Sink,
    format: Format,
    algebra: &Path,
    length: usize,
    amax: f64,
    grid: usize,
) -> std::result::Result<i32, Failure> {
    json_only(format)?;
    let p = load_algebra(algebra)?;
    let strings = find_strings(&p, length, amax, grid)?;
    sink.note(&format!("{} string(s) of length {length}", strings.len()));
    for s in &strings {
        let pts = s.points();
        sink.note(&format!("  a = {}, b = {}", pts[0].d, pts[pts.len() - 1].dt));
    }
    let recs: Vec<TrajectoryRecord> = strings.iter().map(|s| TrajectoryRecord::from_string(s, &p)).collect();
    sink.emit(&to_canonical_json(&recs)?)?;
    Ok(EXIT_OK)
}

fn cmd_build(
    sink: &mut Sink,
    format: Format,
    from: &Path,
    index: usize,
    algebra: Option<&Path>,
    phase: f64,
) -> std::result::Result<i32, Failure> {
    json_only(format)?;
    let records = read_trajectories(from).map_err(|e| input_error(format!("cannot read {}: {e}", from.display())))?;
    let rec = records
        .get(index)
        .ok_or_else(|| input_error(format!("index {index} out of range ({} records)", records.len())))?;
    let p = match algebra {
        Some(path) => load_algebra(path)?,
        None => rec.algebra.clone(),
    };
    let rep = match rec.kind {
        RepKind::Loop => build_loop_rep(&p, &rec.to_orbit(Some(&p))?, phase)?,
        RepKind::String => build_string_rep(&p, &rec.to_nstring(Some(&p))?)?,
        RepKind::General => return Err(input_error("records must be of kind loop or string")),
    };
    sink.note(&format!("built {}-dimensional {} representation", rep.dim(), rep.kind()));
    sink.emit(&to_canonical_json(&RepFile::from(&rep))?)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct VerifyReport {
    primary_norm: f64,
    conjugate_norm: f64,
    commutator_norm: f64,
    bound: f64,
    pass: bool,
}

fn cmd_verify(sink: &mut Sink, format: Format, tol: f64, rep: &Path, algebra: &Path) -> std::result::Result<i32, Failure> {
    json_only(format)?;
    let p = load_algebra(algebra)?;
    let rep = read_rep(rep).map_err(|e| input_error(format!("cannot read representation {}: {e}", rep.display())))?;
    let r = relation_residual(&p, rep.w())?;
    let wn = frobenius(rep.w());
    let report = VerifyReport {
        primary_norm: r.primary_norm,
        conjugate_norm: r.conjugate_norm,
        commutator_norm: r.commutator_norm,
        bound: tol * (1.0 + wn.powi(3)),
        pass: r.within(tol, wn),
    };
    sink.note(&format!(
        "residuals: primary {:e}, conjugate {:e}, commutator {:e} (bound {:e}): {}",
        report.primary_norm,
        report.conjugate_norm,
        report.commutator_norm,
        report.bound,
        if report.pass { "pass" } else { "FAIL" }
    ));
    sink.emit(&to_canonical_json(&report)?)?;
    Ok(if report.pass { EXIT_OK } else { EXIT_VERIFY })
}

fn cmd_decompose(
    sink: &mut Sink,
    format: Format,
    tol: f64,
    rep: &Path,
    algebra: &Path,
) -> std::result::Result<i32, Failure> {
    json_only(format)?;
    let p = load_algebra(algebra)?;
    let rep = read_rep(rep).map_err(|e| input_error(format!("cannot read representation {}: {e}", rep.display())))?;
    let report = decompose(&rep, &p, tol).map_err(|e| match e {
        Error::NotARepresentation(_) | Error::DecompositionFailed(_) => {
            Failure { code: EXIT_VERIFY, message: e.to_string() }
        }
        other => other.into(),
    })?;
    sink.note(&format!("{} block(s), leakage {:e}", report.blocks.len(), report.offdiag_leakage));
    for b in &report.blocks {
        let phase = b.rep.phase().map_or(String::new(), |g| format!(", phase {g}"));
        sink.note(&format!("  {} of dimension {}{phase}", b.kind(), b.dim()));
    }
    sink.emit(&to_canonical_json(&report)?)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverageRow {
    pub dim: usize,
    pub points_found: usize,
    pub minimal_orbits: usize,
    /// Pairwise inequivalent loop representations built at phase 0.
    pub loop_reps: usize,
    pub verified: usize,
}

#[derive(Serialize)]
struct HenonReport<'a> {
    a: f64,
    b: f64,
    r: f64,
    algebra: &'a AlgebraParams,
    coverage: &'a [CoverageRow],
}

/// Census, phase-0 loop representations and their verification for each
/// dimension up to `max_dim`.
pub fn henon_coverage(a: f64, b: f64, r: f64, max_dim: usize, seeds: usize, tol: f64) -> Result<Vec<CoverageRow>> {
    let p = henon_preset(a, b, r);
    let census = henon_orbit_census_with(a, b, r, max_dim, seeds, CENSUS_RNG_SEED)?;
    let mut rows = Vec::new();
    for row in &census.rows {
        let mut classes: Vec<Representation> = Vec::new();
        let mut verified = 0;
        for o in census.orbits.iter().filter(|o| o.period() == row.period) {
            let rep = build_loop_rep(&p, o, 0.0)?;
            if relation_residual(&p, rep.w())?.within(tol, frobenius(rep.w())) {
                verified += 1;
            }
            let mut fresh = true;
            for c in &classes {
                if equivalent(c, &rep, &p)? {
                    fresh = false;
                    break;
                }
            }
            if fresh {
                classes.push(rep);
            }
        }
        rows.push(CoverageRow {
            dim: row.period,
            points_found: row.points_found,
            minimal_orbits: row.minimal_orbits,
            loop_reps: classes.len(),
            verified,
        });
    }
    Ok(rows)
}

#[allow(clippy::too_many_arguments)]
fn cmd_henon(
    sink: &mut Sink,
    format: Format,
    tol: f64,
    a: f64,
    b: f64,
    r: f64,
    max_dim: usize,
    seeds: usize,
) -> std::result::Result<i32, Failure> {
    let rows = henon_coverage(a, b, r, max_dim, seeds, tol)?;
    sink.note("dim  2^n points  orbits  loop reps  verified");
    for row in &rows {
        sink.note(&format!(
            "{:>3}  {:>4} {:>6}  {:>6}  {:>9}  {:>8}",
            row.dim,
            1usize << row.dim,
            row.points_found,
            row.minimal_orbits,
            row.loop_reps,
            row.verified
        ));
    }
    let doc = match format {
        Format::Json => {
            to_canonical_json(&HenonReport { a, b, r, algebra: &henon_preset(a, b, r), coverage: &rows })?
        }
        Format::Csv => to_csv(&rows)?,
    };
    sink.emit(&doc)?;
    let all_verified = rows.iter().all(|row| row.verified == row.minimal_orbits);
    Ok(if all_verified { EXIT_OK } else { EXIT_VERIFY })
}

fn emit_algebra(sink: &mut Sink, format: Format, p: &AlgebraParams) -> std::result::Result<i32, Failure> {
    json_only(format)?;
    sink.note(&format!("alpha = {}, beta = {:?}, gamma = {:?}", p.alpha(), p.beta(), p.gamma()));
    sink.emit(&to_canonical_json(p)?)?;
    Ok(EXIT_OK)
}

fn dispatch(cli: Cli, sink: &mut Sink) -> std::result::Result<i32, Failure> {
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(input_error(format!("--tol must be positive, got {t}")));
        }
    }
    let fmt = cli.format;
    match cli.command {
        Command::Orbits { algebra, period, search_box, seeds, analytic } => {
            cmd_orbits(sink, fmt, cli.seed, &algebra, period, &search_box, seeds, analytic)
        }
        Command::Strings { algebra, length, amax, grid } => cmd_strings(sink, fmt, &algebra, length, amax, grid),
        Command::BuildRep { from, index, algebra, phase } => {
            cmd_build(sink, fmt, &from, index, algebra.as_deref(), phase)
        }
        Command::Verify { rep, algebra } => {
            cmd_verify(sink, fmt, cli.tol.unwrap_or(DEFAULT_VERIFY_TOL), &rep, &algebra)
        }
        Command::Decompose { rep, algebra } => {
            cmd_decompose(sink, fmt, cli.tol.unwrap_or(DEFAULT_DECOMPOSE_TOL), &rep, &algebra)
        }
        Command::Henon { a, b, r, max_dim, seeds } => {
            cmd_henon(sink, fmt, cli.tol.unwrap_or(DEFAULT_VERIFY_TOL), a, b, r, max_dim, seeds)
        }
        Command::FromSurface { hbar, alpha0, beta_tilde, gamma_tilde } => {
            let p = from_surface(&SurfaceParams { hbar, alpha0, beta_tilde, gamma_tilde })?;
            emit_algebra(sink, fmt, &p)
        }
        Command::Theta { n, k, alpha } => emit_algebra(sink, fmt, &theta_params(n, k, alpha)?),
    }
}

/// Runs the command line with explicit output streams and returns the exit
/// code.
pub fn run_with<'a, I, T>(args: I, stdout: &'a mut dyn Write, stderr: &'a mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = write!(if e.use_stderr() { stderr } else { stdout }, "{}", e.render());
            return code;
        }
    };
    let out = cli.out.clone();
    let mut sink = Sink { out: out.as_deref(), stdout, stderr };
    match dispatch(cli, &mut sink) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(sink.stderr, "error: {}", f.message);
            f.code
        }
    }
}

pub fn run() -> i32 {
    run_with(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
