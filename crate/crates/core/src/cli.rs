//! Command-line front end. `run` returns the process exit code:
//! 0 on success, 1 for usage and configuration errors, 2 for numerical
//! failures.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{parse_number, GridSettings, RunConfig};
use crate::error::{Error, Result};
use crate::exponents::{AdmissibilityReport, Checker, CknParams, DddParams, TraceParams};
use crate::fields::{make_halfspace, make_radial, FamilySpec, ZProfile};
use crate::grids::{make_log_grid, LogGrid, ProductGrid};
use crate::kernels::kernel_i;
use crate::multconv::{mult_convolve_direct, mult_convolve_fast, HaarFunction};
use crate::operators::{riesz_radial, TraceOperator};
use crate::verify::{
    family_scan, hardy_step_record, Kind, ParamSet, RatioRecord, ScanParams, ScanSetup,
};

/// Overrides the directory of relative `--out` paths.
pub const OUT_DIR_ENV: &str = "RADINEQ_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "radineq", version, about = "Numerical checks for weighted radial inequalities")]
struct Cli {
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write a JSON mirror next to the CSV (or JSON to stdout).
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Admissibility tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(flatten)]
    grid: GridArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct GridArgs {
    #[arg(long, global = true)]
    rmin: Option<f64>,
    #[arg(long, global = true)]
    rmax: Option<f64>,
    #[arg(long = "grid-n", global = true)]
    grid_n: Option<usize>,
    #[arg(long = "zbar-min", global = true)]
    zbar_min: Option<f64>,
    #[arg(long = "zbar-max", global = true)]
    zbar_max: Option<f64>,
    #[arg(long = "zbar-n", global = true)]
    zbar_n: Option<usize>,
}

impl GridArgs {
    fn apply(&self, mut g: GridSettings) -> GridSettings {
        g.rmin = self.rmin.unwrap_or(g.rmin);
        g.rmax = self.rmax.unwrap_or(g.rmax);
        g.n = self.grid_n.unwrap_or(g.n);
        g.zbar_min = self.zbar_min.unwrap_or(g.zbar_min);
        g.zbar_max = self.zbar_max.unwrap_or(g.zbar_max);
        g.zbar_n = self.zbar_n.unwrap_or(g.zbar_n);
        g
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate an admissibility predicate.
    CheckExponents(CheckArgs),
    /// Apply the Riesz or trace operator to a test function.
    EvalOperator(EvalArgs),
    /// Ratios of one parameter tuple over the configured families.
    Verify(ConfigArgs),
    /// Ratios over every tuple of a parameter sweep.
    Scan(ConfigArgs),
    /// Tabulate the angular kernel I(a, z).
    KernelTable(KernelArgs),
    /// Time direct against FFT multiplicative convolution.
    BenchConv(BenchArgs),
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long)]
    theorem: String,
    /// Read the tuple(s) from a config file instead of flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, value_parser = number)]
    p: Option<f64>,
    #[arg(long, value_parser = number)]
    q: Option<f64>,
    #[arg(long, value_parser = number)]
    r: Option<f64>,
    #[arg(long, value_parser = number)]
    a: Option<f64>,
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    gamma: Option<f64>,
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    sigma: Option<f64>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum OpKind {
    Riesz,
    Trace,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum FamilyKind {
    Gaussian,
    Bump,
    PowerTail,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum ZKind {
    Exponential,
    Gaussian,
}

#[derive(Args, Debug)]
struct FamilyArgs {
    #[arg(long, value_enum, default_value = "gaussian")]
    family: FamilyKind,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 1)]
    sharpness: u32,
    #[arg(long = "tail-exponent", default_value_t = 4.0)]
    tail_exponent: f64,
    #[arg(long)]
    cutoff: Option<f64>,
}

impl FamilyArgs {
    fn spec(&self) -> FamilySpec {
        match self.family {
            FamilyKind::Gaussian => FamilySpec::gaussian(self.scale),
            FamilyKind::Bump => FamilySpec::bump(self.scale, self.sharpness),
            FamilyKind::PowerTail => {
                FamilySpec::power_tail(self.scale, self.tail_exponent, self.cutoff)
            }
        }
    }
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long, value_enum)]
    op: OpKind,
    #[arg(long)]
    n: u32,
    /// Riesz exponent (Riesz operator only).
    #[arg(long, value_parser = number)]
    gamma: Option<f64>,
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, value_enum, default_value = "exponential")]
    zprofile: ZKind,
    #[arg(long = "zscale", default_value_t = 1.0)]
    zscale: f64,
}

#[derive(Args, Debug)]
struct ConfigArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the theorem named in the config.
    #[arg(long, value_parser = parse_kind)]
    theorem: Option<Kind>,
    /// Hardy runs only.
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, value_parser = number)]
    p: Option<f64>,
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    alpha: Option<f64>,
}

#[derive(Args, Debug)]
struct KernelArgs {
    #[arg(long)]
    n: u32,
    /// `lo:hi[:count]`, log-spaced.
    #[arg(long = "a-range", default_value = "0.01:100:40")]
    a_range: String,
    #[arg(long = "z-range", default_value = "0.01:100:40")]
    z_range: String,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// `lo:hi` sizes; powers of two in between are timed.
    #[arg(long, default_value = "1024:65536")]
    sizes: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip the direct sum above this size.
    #[arg(long = "max-direct", default_value_t = 8192)]
    max_direct: usize,
}

fn parse_kind(s: &str) -> std::result::Result<Kind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn number(s: &str) -> std::result::Result<f64, String> {
    parse_number(s).ok_or_else(|| format!("not a number: {s}"))
}

/// Parse `args` (including the program name) and run. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(Error::InvalidParameter(format!("thread pool: {e}"))),
        },
        None => dispatch(&cli),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. }
        | Error::NothingToScan
        | Error::InvalidParameter(_)
        | Error::Io(_)
        | Error::Inadmissible(_) => 1,
        _ => 2,
    }
}

/// Resolved output destination. Files are created before any compute.
struct Output {
    csv: Box<dyn Write>,
    json: Option<Box<dyn Write>>,
}

fn resolve(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn create(path: &Path) -> Result<Box<dyn Write>> {
    let f = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(Box::new(io::BufWriter::new(f)))
}

impl Output {
    fn open(cli: &Cli) -> Result<Self> {
        match &cli.out {
            Some(p) => {
                let p = resolve(p);
                let json = if cli.json {
                    Some(create(&p.with_extension("json"))?)
                } else {
                    None
                };
                Ok(Self { csv: create(&p)?, json })
            }
            None if cli.json => Ok(Self {
                csv: Box::new(io::sink()),
                json: Some(Box::new(io::stdout())),
            }),
            None => Ok(Self {
                csv: Box::new(io::stdout()),
                json: None,
            }),
        }
    }

    fn write<T: Serialize>(mut self, header: &[&str], rows: &[Vec<String>], json: &T) -> Result<()> {
        let mut w = csv::Writer::from_writer(&mut self.csv);
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        drop(w);
        self.csv.flush()?;
        if let Some(mut j) = self.json {
            serde_json::to_writer_pretty(&mut j, json)?;
            writeln!(j)?;
            j.flush()?;
        }
        Ok(())
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

fn checker(cli: &Cli, fallback: f64) -> Checker {
    Checker::new(cli.tol.unwrap_or(fallback))
}

fn build_grids(g: &GridSettings) -> Result<(Arc<LogGrid>, Arc<ProductGrid>)> {
    let rgrid = make_log_grid(g.rmin, g.rmax, g.n)?;
    let zgrid = make_log_grid(g.zbar_min, g.zbar_max, g.zbar_n)?;
    Ok((Arc::new(rgrid.clone()), Arc::new(ProductGrid::new(rgrid, zgrid))))
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::CheckExponents(a) => check_exponents(cli, a),
        Command::EvalOperator(a) => eval_operator(cli, a),
        Command::Verify(a) => ratios(cli, a, false),
        Command::Scan(a) => ratios(cli, a, true),
        Command::KernelTable(a) => kernel_table(cli, a),
        Command::BenchConv(a) => bench_conv(cli, a),
    }
}

const PARAM_COLUMNS: [&str; 10] = ["theorem", "n", "p", "q", "r", "a", "alpha", "beta", "gamma", "sigma"];

fn param_cells(kind: Kind, params: &ParamSet) -> Vec<String> {
    let o = |x: f64| fmt(x);
    let e = String::new;
    let mut row = vec![kind.tag().to_string()];
    match params {
        ParamSet::Ckn(p) => row.extend([
            p.n.to_string(),
            o(p.p),
            o(p.q),
            o(p.r),
            o(p.a),
            o(p.alpha),
            o(p.beta),
            o(p.gamma),
            o(p.sigma),
        ]),
        ParamSet::Trace(p) => row.extend([
            p.n.to_string(),
            o(p.p),
            o(p.q),
            e(),
            e(),
            o(p.alpha),
            o(p.beta),
            e(),
            e(),
        ]),
        ParamSet::Ddd(p) => row.extend([
            p.n.to_string(),
            o(p.p),
            o(p.q),
            e(),
            e(),
            o(p.alpha),
            o(p.beta),
            o(p.gamma),
            e(),
        ]),
        ParamSet::Hardy(p) => row.extend([
            p.n.to_string(),
            o(p.p),
            e(),
            e(),
            e(),
            o(p.alpha),
            e(),
            e(),
            e(),
        ]),
    }
    row
}

fn scan_kind(s: &ScanParams) -> (Kind, ParamSet) {
    match s {
        ScanParams::CknClassical(p) => (Kind::CknClassical, ParamSet::Ckn(*p)),
        ScanParams::CknRadial(p) => (Kind::CknRadial, ParamSet::Ckn(*p)),
        ScanParams::Trace(p) => (Kind::Trace, ParamSet::Trace(*p)),
        ScanParams::TraceOperator(p) => (Kind::TraceOperator, ParamSet::Trace(*p)),
        ScanParams::Ddd(p) => (Kind::Ddd, ParamSet::Ddd(*p)),
    }
}

fn need<T>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidParameter(format!("--{name} is required")))
}

#[derive(Serialize)]
struct CheckRow {
    params: ParamSet,
    report: AdmissibilityReport,
}

fn check_exponents(cli: &Cli, a: &CheckArgs) -> Result<()> {
    let kind: Kind = a.theorem.parse()?;
    let (cells, tol) = match &a.config {
        Some(path) => {
            let mut cfg = RunConfig::from_path(path)?;
            cfg.theorem = kind;
            let tol = cfg.tol;
            (cfg.cells()?, tol)
        }
        None => {
            let n = need(a.n, "n")?;
            let cell = match kind {
                Kind::CknClassical | Kind::CknRadial => {
                    let (p, q, r, aa) = (need(a.p, "p")?, need(a.q, "q")?, need(a.r, "r")?, need(a.a, "a")?);
                    let (al, be, ga) = (need(a.alpha, "alpha")?, need(a.beta, "beta")?, need(a.gamma, "gamma")?);
                    let params = match a.sigma {
                        Some(s) if aa > 0.0 => CknParams::new(n, p, q, r, aa, al, be, ga, s)?,
                        _ => CknParams::from_gamma(n, p, q, r, aa, al, be, ga)?,
                    };
                    if kind == Kind::CknClassical {
                        ScanParams::CknClassical(params)
                    } else {
                        ScanParams::CknRadial(params)
                    }
                }
                Kind::Trace | Kind::TraceOperator => {
                    let params = TraceParams::new(
                        n,
                        need(a.p, "p")?,
                        need(a.q, "q")?,
                        need(a.alpha, "alpha")?,
                        need(a.beta, "beta")?,
                    )?;
                    if kind == Kind::Trace {
                        ScanParams::Trace(params)
                    } else {
                        ScanParams::TraceOperator(params)
                    }
                }
                Kind::Ddd => ScanParams::Ddd(DddParams::new(
                    n,
                    need(a.p, "p")?,
                    need(a.q, "q")?,
                    need(a.alpha, "alpha")?,
                    need(a.beta, "beta")?,
                    need(a.gamma, "gamma")?,
                )?),
                Kind::Hardy => {
                    return Err(Error::InvalidParameter("hardy has no admissibility predicate".into()))
                }
            };
            (vec![cell], crate::exponents::DEFAULT_TOL)
        }
    };
    let out = Output::open(cli)?;
    let checker = checker(cli, tol);
    let mut rows = Vec::new();
    let mut json = Vec::new();
    for cell in &cells {
        let report = cell.admissibility(&checker)?;
        let (k, ps) = scan_kind(cell);
        let mut row = param_cells(k, &ps);
        let worst = report
            .conditions
            .iter()
            .map(|c| c.residual)
            .fold(f64::INFINITY, f64::min);
        row.push(report.verdict.to_string());
        row.push(report.failed_labels().join("; "));
        row.push(fmt(worst));
        rows.push(row);
        json.push(CheckRow { params: ps, report });
    }
    let mut header = PARAM_COLUMNS.to_vec();
    header.extend(["verdict", "failed", "min_residual"]);
    out.write(&header, &rows, &json)
}

#[derive(Serialize)]
struct OperatorJson {
    rho: Vec<f64>,
    values: Vec<f64>,
    truncation_warning: bool,
    corner_fraction: f64,
}

fn eval_operator(cli: &Cli, a: &EvalArgs) -> Result<()> {
    let settings = cli.grid.apply(GridSettings::default());
    let spec = a.family.spec();
    spec.validate()?;
    let out = Output::open(cli)?;
    let (grid, pgrid) = build_grids(&settings)?;
    let res = match a.op {
        OpKind::Riesz => {
            let gamma = need(a.gamma, "gamma")?;
            let v = make_radial(spec, grid)?;
            riesz_radial(&v, gamma, a.n)?
        }
        OpKind::Trace => {
            let z = match a.zprofile {
                ZKind::Exponential => ZProfile::Exponential { scale: a.zscale },
                ZKind::Gaussian => ZProfile::Gaussian { scale: a.zscale },
            };
            let f = make_halfspace(spec, z, pgrid.clone())?;
            TraceOperator::new(pgrid, a.n)?.apply(&f)?
        }
    };
    if res.truncation.warning {
        eprintln!("warning: output may be truncation dominated");
    }
    let rows: Vec<Vec<String>> = res
        .rho
        .iter()
        .zip(&res.values)
        .map(|(r, v)| vec![fmt(*r), fmt(*v)])
        .collect();
    let json = OperatorJson {
        rho: res.rho.clone(),
        values: res.values.clone(),
        truncation_warning: res.truncation.warning,
        corner_fraction: res.truncation.corner_fraction,
    };
    out.write(&["rho", "value"], &rows, &json)
}

fn record_row(r: &RatioRecord) -> Vec<String> {
    let mut row = param_cells(r.theorem, &r.params);
    row.extend([
        r.family.clone(),
        fmt(r.lhs),
        fmt(r.rhs),
        fmt_opt(r.ratio),
        r.flag_tags(),
    ]);
    row
}

fn ratios(cli: &Cli, a: &ConfigArgs, sweep: bool) -> Result<()> {
    let cfg = RunConfig::from_path_with(&a.config, a.theorem)?;
    let settings = cli.grid.apply(cfg.grid);
    let mut families = cfg.families.clone();
    if families.is_empty() {
        if sweep {
            return Err(Error::NothingToScan);
        }
        families.push(FamilySpec::gaussian(1.0));
    }
    let out = Output::open(cli)?;
    let (grid, pgrid) = build_grids(&settings)?;
    let mut records = Vec::new();
    if cfg.theorem == Kind::Hardy {
        let (n, p, alpha) = (need(a.n, "n")?, need(a.p, "p")?, need(a.alpha, "alpha")?);
        for spec in &families {
            records.push(hardy_step_record(&make_radial(*spec, grid.clone())?, alpha, p, n)?);
        }
    } else {
        let cells = cfg.cells()?;
        if cells.is_empty() {
            return Err(Error::NothingToScan);
        }
        if !sweep && cells.len() > 1 {
            return Err(Error::InvalidParameter(
                "verify takes a single tuple; use scan for sweeps".into(),
            ));
        }
        let setup = ScanSetup {
            grid,
            pgrid,
            zprofile: cfg.zprofile,
            checker: checker(cli, cfg.tol),
            require_admissible: cfg.require_admissible,
        };
        for cell in &cells {
            let scan = family_scan(&families, cell, &setup)?;
            records.extend(scan.records);
        }
    }
    let rows: Vec<Vec<String>> = records.iter().map(record_row).collect();
    let mut header = PARAM_COLUMNS.to_vec();
    header.extend(["family", "lhs", "rhs", "ratio", "flags"]);
    out.write(&header, &rows, &records)
}

fn parse_range(s: &str, default_count: usize) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::InvalidParameter(format!("bad range {s}"));
    let (lo, hi, count) = match parts.as_slice() {
        [lo, hi] => (parse_number(lo).ok_or_else(bad)?, parse_number(hi).ok_or_else(bad)?, default_count),
        [lo, hi, c] => (
            parse_number(lo).ok_or_else(bad)?,
            parse_number(hi).ok_or_else(bad)?,
            c.parse().map_err(|_| bad())?,
        ),
        _ => return Err(bad()),
    };
    if !(lo > 0.0 && hi >= lo && count >= 1) {
        return Err(bad());
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let (l0, l1) = (lo.ln(), hi.ln());
    Ok((0..count)
        .map(|k| (l0 + (l1 - l0) * k as f64 / (count - 1) as f64).exp())
        .collect())
}

#[derive(Serialize)]
struct KernelRow {
    a: f64,
    z: f64,
    value: f64,
    est_error: f64,
}

fn kernel_table(cli: &Cli, k: &KernelArgs) -> Result<()> {
    let a_vals = parse_range(&k.a_range, 40)?;
    let z_vals = parse_range(&k.z_range, 40)?;
    let out = Output::open(cli)?;
    let mut rows = Vec::new();
    let mut json = Vec::new();
    for &a in &a_vals {
        for &z in &z_vals {
            let ev = kernel_i(a, z, k.n)?;
            rows.push(vec![fmt(a), fmt(z), fmt(ev.value), fmt(ev.est_error)]);
            json.push(KernelRow { a, z, value: ev.value, est_error: ev.est_error });
        }
    }
    out.write(&["a", "z", "value", "est_error"], &rows, &json)
}

#[derive(Serialize)]
struct BenchRow {
    n: usize,
    direct_ms: Option<f64>,
    fast_ms: f64,
}

fn bench_conv(cli: &Cli, b: &BenchArgs) -> Result<()> {
    let parts: Vec<&str> = b.sizes.split(':').collect();
    let bad = || Error::InvalidParameter(format!("bad sizes {}", b.sizes));
    let (lo, hi): (usize, usize) = match parts.as_slice() {
        [lo, hi] => (lo.parse().map_err(|_| bad())?, hi.parse().map_err(|_| bad())?),
        _ => return Err(bad()),
    };
    if lo < 2 || hi < lo {
        return Err(bad());
    }
    let out = Output::open(cli)?;
    let mut rng = ChaCha8Rng::seed_from_u64(b.seed);
    let mut rows = Vec::new();
    let mut json = Vec::new();
    let mut n = lo.next_power_of_two();
    while n <= hi {
        let grid = Arc::new(make_log_grid(1e-4, 1e4, n + 1)?);
        let sample = |rng: &mut ChaCha8Rng| {
            let c: f64 = rng.gen_range(0.5..2.0);
            HaarFunction::from_fn(grid.clone(), |r| (-(r.ln() * c).powi(2) / 8.0).exp())
        };
        let f = sample(&mut rng)?;
        let g = sample(&mut rng)?;
        let t = Instant::now();
        mult_convolve_fast(&f, &g)?;
        let fast_ms = t.elapsed().as_secs_f64() * 1e3;
        let direct_ms = if n <= b.max_direct {
            let t = Instant::now();
            mult_convolve_direct(&f, &g)?;
            Some(t.elapsed().as_secs_f64() * 1e3)
        } else {
            None
        };
        rows.push(vec![n.to_string(), fmt_opt(direct_ms), fmt(fast_ms)]);
        json.push(BenchRow { n, direct_ms, fast_ms });
        n *= 2;
    }
    out.write(&["N", "direct_ms", "fast_ms"], &rows, &json)
}
