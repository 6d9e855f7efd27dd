//! Command-line front end: subcommands over the robinspec library with
//! deterministic CSV emission.
//!
//! Exit codes: 0 success, 2 usage error, 3 numeric failure (bracketing or
//! certification), 4 config parse error, 1 other I/O failure.

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use robinspec::asymptotics::{
    e_inf, hh_expansion, lambda1_prediction, m_truncation_bound, trial_residual, TrialState,
};
use robinspec::diamag::{self, DiamagError};
use robinspec::fdsolver::{self, AnnulusParams, FdError};
use robinspec::fiber::{solve_fiber_ground, FiberError, FiberParams, Method, SolveOpts};
use robinspec::littleparks::{self, ConfigError, LittleParksError};

#[derive(Parser)]
#[command(
    name = "robinspec",
    version,
    about = "Ground-state spectrum of the magnetic Robin Laplacian on the unit disc"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Analytic,
    Fd,
}

#[derive(Subcommand)]
enum Command {
    /// Ground eigenvalue of one fiber (with --m) or of the full disc.
    Eig {
        #[arg(long)]
        b: f64,
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        /// Angular momentum; omit to minimize over all fibers.
        #[arg(long, allow_hyphen_values = true)]
        m: Option<i32>,
        /// Secular-equation root (analytic) or finite-element pencil (fd).
        #[arg(long, value_enum, default_value = "analytic")]
        method: MethodArg,
        /// Pencil resolution for fd / certification.
        #[arg(long, default_value_t = 8000)]
        n: usize,
    },
    /// Scan the disc ground energy over a field range (CSV).
    Scan {
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long = "b-min")]
        b_min: f64,
        #[arg(long = "b-max")]
        b_max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Non-monotonicity witness triple b1 < b2 < b3.
    Witness {
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long = "A")]
        a: f64,
    },
    /// Asymptotic prediction vs exact ground energy at one field value.
    Asym {
        #[arg(long)]
        b: f64,
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
    },
    /// Boundary-layer operator eigenvalues vs their expansions.
    Semiclassical {
        #[arg(long)]
        h: f64,
        #[arg(long)]
        rho: f64,
        #[arg(long, allow_hyphen_values = true)]
        m: Option<i32>,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long, default_value_t = 4000)]
        n: usize,
    },
    /// Critical-temperature curve from a key=value config file (CSV).
    LittleParks {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-fiber branches, envelope and asymptotic curve (three CSV sections).
    Figure1 {
        #[arg(long, default_value_t = -20.0, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long = "b-max", default_value_t = 16.0)]
        b_max: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// One CSV cell; floats are printed with 12 significant digits.
#[derive(Debug, Clone, Copy)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Label(&'static str),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.11e}"),
            Cell::Label(s) => (*s).to_string(),
        }
    }
}

/// Rectangular numeric table; header first, comma separation, `\n` endings,
/// byte-identical across runs for identical inputs.
#[derive(Debug, Clone)]
pub struct CsvTable {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row arity != header arity");
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Write a table to `path`, or to standard output when absent.
pub fn write_csv(table: &CsvTable, path: Option<&Path>) -> io::Result<()> {
    let rendered = table.render();
    match path {
        Some(p) => fs::write(p, rendered),
        None => io::stdout().write_all(rendered.as_bytes()),
    }
}

enum CliError {
    Numeric(String),
    Config(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Numeric(_) => 3,
            CliError::Config(_) => 4,
            CliError::Io(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Numeric(m) | CliError::Config(m) | CliError::Io(m) => m,
        }
    }
}

impl From<FiberError> for CliError {
    fn from(e: FiberError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<DiamagError> for CliError {
    fn from(e: DiamagError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<FdError> for CliError {
    fn from(e: FdError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<LittleParksError> for CliError {
    fn from(e: LittleParksError) -> Self {
        match e {
            LittleParksError::Config(c) => CliError::Config(c.to_string()),
            LittleParksError::Solver(s) => CliError::Numeric(s.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Parse and execute `argv`, returning the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.cmd) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn execute(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Eig {
            b,
            gamma,
            m,
            method,
            n,
        } => cmd_eig(b, gamma, m, method, n),
        Command::Scan {
            gamma,
            b_min,
            b_max,
            steps,
            out,
        } => cmd_scan(gamma, b_min, b_max, steps, out.as_deref()),
        Command::Witness { gamma, a } => cmd_witness(gamma, a),
        Command::Asym { b, gamma } => cmd_asym(b, gamma),
        Command::Semiclassical { h, rho, m, b, n } => cmd_semiclassical(h, rho, m, b, n),
        Command::LittleParks { config, out } => cmd_little_parks(&config, out.as_deref()),
        Command::Figure1 { gamma, b_max, out } => cmd_figure1(gamma, b_max, out.as_deref()),
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Analytic => "analytic",
        Method::FiniteDifference => "fd",
    }
}

fn print_eig(r: &robinspec::EigResult) {
    println!(
        "lambda = {:.12}  m = {}  method = {}  residual = {:.3e}  certified = {}",
        r.lambda,
        r.m,
        method_name(r.method),
        r.residual,
        r.certified
    );
}

fn cmd_eig(
    b: f64,
    gamma: f64,
    m: Option<i32>,
    method: MethodArg,
    n: usize,
) -> Result<(), CliError> {
    let mut opts = SolveOpts::default();
    opts.certify_cells = n;
    match m {
        None => {
            let r = diamag::lambda1_disc(b, gamma, &opts)?;
            print_eig(&r);
        }
        Some(m) => {
            let p = FiberParams::new(m, b, gamma)?;
            let r = match method {
                MethodArg::Analytic => solve_fiber_ground(&p, &opts)?,
                MethodArg::Fd => fd_eig(&p, n)?,
            };
            print_eig(&r);
        }
    }
    Ok(())
}

fn fd_eig(p: &FiberParams, n: usize) -> Result<robinspec::EigResult, CliError> {
    let pencil = fdsolver::build_disc_fiber_system(p, n)?;
    let lambda = fdsolver::lowest_eigenvalues(&pencil, 1, 1e-10)?[0];
    let count = pencil.eigenvalue_count_below(lambda + 1e-6)?;
    Ok(robinspec::EigResult {
        lambda,
        m: p.m,
        method: Method::FiniteDifference,
        residual: 0.0,
        certified: count == 1,
    })
}

fn scan_table(rows: &[diamag::ScanRow]) -> CsvTable {
    let mut t = CsvTable::new(vec!["b", "lambda1", "m_star", "prediction", "gap"]);
    for r in rows {
        t.push(vec![
            Cell::Float(r.b),
            Cell::Float(r.lambda1),
            Cell::Int(i64::from(r.m_star)),
            Cell::Float(r.prediction),
            Cell::Float(r.gap),
        ]);
    }
    t
}

fn cmd_scan(
    gamma: f64,
    b_min: f64,
    b_max: f64,
    steps: usize,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let rows = diamag::scan_b(gamma, b_min, b_max, steps, &SolveOpts::default())?;
    write_csv(&scan_table(&rows), out)?;
    Ok(())
}

fn cmd_witness(gamma: f64, a: f64) -> Result<(), CliError> {
    let w = diamag::find_nonmonotone_witness(gamma, a, &SolveOpts::default())?;
    println!("n0 = {}", w.n0);
    println!("b1 = {}  lambda1(b1) = {:.12}", w.b1, w.v1);
    println!("b2 = {}  lambda1(b2) = {:.12}", w.b2, w.v2);
    println!("b3 = {}  lambda1(b3) = {:.12}", w.b3, w.v3);
    println!(
        "holds = {}  (rise = {:.6}, drop = {:.6})",
        w.holds,
        w.v2 - w.v1,
        w.v2 - w.v3
    );
    Ok(())
}

fn cmd_asym(b: f64, gamma: f64) -> Result<(), CliError> {
    if !(gamma < 0.0) {
        return Err(CliError::Numeric(format!("gamma = {gamma} must be < 0")));
    }
    let pred = lambda1_prediction(b, gamma);
    let exact = diamag::lambda1_disc(b, gamma, &SolveOpts::default())?;
    println!(
        "prediction = {:.12}  (leading {:.6}, boundary {:.6}, oscillatory {:.6}, constant {:.6})",
        pred.value, pred.terms.leading, pred.terms.boundary, pred.terms.oscillatory, pred.terms.constant
    );
    println!("exact      = {:.12}  (m* = {})", exact.lambda, exact.m);
    println!("gap        = {:.12}", exact.lambda - pred.value);
    Ok(())
}

fn cmd_semiclassical(
    h: f64,
    rho: f64,
    m: Option<i32>,
    b: Option<f64>,
    n: usize,
) -> Result<(), CliError> {
    let ap = AnnulusParams::new(h, rho)?;
    let base = fdsolver::build_annulus_system(&ap, n, false)?;
    let evs = fdsolver::lowest_eigenvalues(&base, 2, 1e-11)?;
    let expansion = hh_expansion(h);
    println!("delta = {:.6}", ap.delta);
    println!(
        "lambda1 = {:.10}  expansion = {:.10}  (deviation/h = {:+.4})",
        evs[0],
        expansion,
        (evs[0] - expansion) / h
    );
    println!("lambda2 = {:.10}", evs[1]);
    match (m, b) {
        (Some(m), Some(b)) => {
            let apf = AnnulusParams::with_fiber(h, rho, m, b)?;
            let pot = fdsolver::build_annulus_system(&apf, n, true)?;
            let l1m = fdsolver::lowest_eigenvalues(&pot, 1, 1e-11)?[0];
            let target = (f64::from(m) - 0.5 * b).powi(2);
            println!(
                "lambda1(m={m}, b={b}) = {:.10}  shift/h = {:.6}  (m-b/2)^2 = {:.6}",
                l1m,
                (l1m - evs[0]) / h,
                target
            );
        }
        (None, None) => {
            // defect of the three-term trial state, for reference
            if let Ok(ts) = TrialState::new(h, rho, 512) {
                match trial_residual(&ts) {
                    Ok(res) => println!("trial defect = {:.6e}  (defect/h = {:.4})", res, res / h),
                    Err(e) => println!("trial defect unavailable: {e}"),
                }
            }
        }
        _ => {
            return Err(CliError::Numeric(
                "semiclassical fiber mode needs both --m and --b".into(),
            ))
        }
    }
    Ok(())
}

fn cmd_little_parks(config: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let text = fs::read_to_string(config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", config.display())))?;
    let cfg = littleparks::parse_config(&text)?;
    let rows = littleparks::little_parks_curve(&cfg, &SolveOpts::default())?;
    let mut t = CsvTable::new(vec!["b", "lambda1", "Tc_exact", "Tc_asym"]);
    for r in &rows {
        t.push(vec![
            Cell::Float(r.b),
            Cell::Float(r.lambda1),
            Cell::Float(r.tc_exact),
            Cell::Float(r.tc_asym),
        ]);
    }
    write_csv(&t, out)?;
    Ok(())
}

fn cmd_figure1(gamma: f64, b_max: f64, out: Option<&Path>) -> Result<(), CliError> {
    if !(gamma < 0.0) {
        return Err(CliError::Numeric(format!("gamma = {gamma} must be < 0")));
    }
    if !(b_max > 0.5) {
        return Err(CliError::Numeric(format!("b-max = {b_max} must exceed 0.5")));
    }
    let b_min = 0.5;
    let steps = ((b_max - b_min) / 0.05).round() as usize + 1;
    let grid: Vec<f64> = (0..steps)
        .map(|i| b_min + (b_max - b_min) * i as f64 / (steps - 1) as f64)
        .collect();
    // dashed branches continue across the whole range
    let branch_lo: i32 = -1;
    let branch_hi = (m_truncation_bound(b_max) + 1) as i32;
    let opts = SolveOpts::default();

    struct ColumnData {
        branch: Vec<(i32, f64)>,
        envelope: (i32, f64),
    }
    let columns: Result<Vec<ColumnData>, DiamagError> = grid
        .iter()
        .map(|&b| {
            let ring = (m_truncation_bound(b) + 2) as i32;
            let hi = ring.max(branch_hi);
            let all = diamag::solve_fiber_range(b, gamma, -ring, hi, &opts)?;
            let fiber_at = |m: i32| all[(m + ring) as usize];
            let mut best = fiber_at(-ring);
            for m in (-ring + 1)..=ring {
                let r = fiber_at(m);
                if r.lambda < best.lambda {
                    best = r;
                }
            }
            Ok(ColumnData {
                branch: (branch_lo..=branch_hi)
                    .map(|m| (m, fiber_at(m).lambda))
                    .collect(),
                envelope: (best.m, best.lambda),
            })
        })
        .collect();
    let columns = columns?;

    let mut t = CsvTable::new(vec!["section", "b", "m", "lambda"]);
    for m in branch_lo..=branch_hi {
        for (col, &b) in columns.iter().zip(&grid) {
            let lam = col.branch[(m - branch_lo) as usize].1;
            t.push(vec![
                Cell::Label("branch"),
                Cell::Float(b),
                Cell::Int(i64::from(m)),
                Cell::Float(lam),
            ]);
        }
    }
    for (col, &b) in columns.iter().zip(&grid) {
        t.push(vec![
            Cell::Label("envelope"),
            Cell::Float(b),
            Cell::Int(i64::from(col.envelope.0)),
            Cell::Float(col.envelope.1),
        ]);
    }
    for &b in &grid {
        let (_, m_star) = e_inf(b);
        t.push(vec![
            Cell::Label("asymptotic"),
            Cell::Float(b),
            Cell::Int(m_star),
            Cell::Float(lambda1_prediction(b, gamma).value),
        ]);
    }
    write_csv(&t, out)?;
    Ok(())
}
