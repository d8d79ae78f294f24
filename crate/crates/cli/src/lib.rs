//! Command-line front end for detector response, X-state GME and acceleration sweeps.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use udw_core::gme::{gme_xstate, XState};
use udw_core::response::{response_amplitudes, DetectorParams, ModeSum};
use udw_core::scenarios::Scenario;
use udw_core::sweep::{assemble_records, compute_responses, linear_grid, run_sweep, SweepRecord, SweepSpec};

pub mod config;
pub mod error;
pub mod format;

pub use config::ConfigFile;
pub use error::CliError;
pub use format::Format;

use config::{parse_list, pick};
use error::io_error;
use format::{num, row};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "UDW_GME_WORKERS";
pub const HEADER: [&str; 8] = ["a", "eta0_abs", "eta1_abs", "P", "E", "dp_sign", "de_sign", "regime"];
pub const DEFAULT_OMEGAS_SMALL: [f64; 3] = [0.05, 0.5, 5.0];
pub const DEFAULT_OMEGAS_LARGE: [f64; 3] = [0.05, 0.4, 1.0];
/// Gap used for the N-partite files at each interaction time.
pub const NPARTITE_OMEGAS: [(f64, f64); 2] = [(0.4, 0.05), (5.0, 0.4)];
pub const FIGURE_SIGMAS: [f64; 2] = [0.4, 5.0];

#[derive(Debug, Parser)]
#[command(name = "udw", version, about = "Unruh-DeWitt detector response and multipartite entanglement")]
pub struct Cli {
    /// `key = value` configuration file; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Response amplitudes and transition probability at one acceleration.
    Response(ResponseArgs),
    /// GME of X states read from a file, one per line.
    Gme(GmeArgs),
    /// Sweep over an acceleration grid.
    Sweep(SweepArgs),
    /// Figure data sets for both interaction times.
    Figures(FiguresArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeSumArg {
    Auto,
    Explicit,
    Resummed,
}

impl FromStr for ModeSumArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

impl From<ModeSumArg> for ModeSum {
    fn from(m: ModeSumArg) -> Self {
        match m {
            ModeSumArg::Auto => ModeSum::Auto,
            ModeSumArg::Explicit => ModeSum::Explicit,
            ModeSumArg::Resummed => ModeSum::Resummed,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct DetectorFlags {
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Cavity length.
    #[arg(long = "L")]
    pub l: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub tau_window: Option<f64>,
    #[arg(long)]
    pub mode_cap: Option<usize>,
    #[arg(long)]
    pub mode_tol: Option<f64>,
    #[arg(long)]
    pub quad_tol: Option<f64>,
    #[arg(long)]
    pub a_eps: Option<f64>,
    #[arg(long, value_enum)]
    pub mode_sum: Option<ModeSumArg>,
}

impl DetectorFlags {
    fn resolve(&self, cfg: &ConfigFile) -> Result<DetectorParams, CliError> {
        let d = DetectorParams::default();
        let params = DetectorParams {
            a: pick(self.a, cfg, "a", d.a)?,
            omega: pick(self.omega, cfg, "omega", d.omega)?,
            sigma: pick(self.sigma, cfg, "sigma", d.sigma)?,
            l: pick(self.l, cfg, "L", d.l)?,
            lambda: pick(self.lambda, cfg, "lambda", d.lambda)?,
            tau_window: pick(self.tau_window, cfg, "tau_window", d.tau_window)?,
            mode_cap: pick(self.mode_cap, cfg, "mode_cap", d.mode_cap)?,
            mode_tol: pick(self.mode_tol, cfg, "mode_tol", d.mode_tol)?,
            quad_tol: pick(self.quad_tol, cfg, "quad_tol", d.quad_tol)?,
            a_eps: pick(self.a_eps, cfg, "a_eps", d.a_eps)?,
            mode_sum: pick(self.mode_sum, cfg, "mode_sum", ModeSumArg::Auto)?.into(),
        };
        Ok(params)
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputFlags {
    /// Output file; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl OutputFlags {
    fn resolve(&self, cfg: &ConfigFile) -> Result<(Option<PathBuf>, Format), CliError> {
        let output = match &self.output {
            Some(p) => Some(p.clone()),
            None => cfg.raw("output").map(PathBuf::from),
        };
        let format = match self.format {
            Some(f) => f,
            None => match cfg.raw("format") {
                Some(s) => <Format as ValueEnum>::from_str(s, true)
                    .map_err(|_| CliError::Validation(format!("config key 'format': unknown format '{s}'")))?,
                None => Format::Csv,
            },
        };
        Ok((output, format))
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct ScenarioFlags {
    /// Total number of detectors.
    #[arg(long)]
    pub n_total: Option<usize>,
    /// Number of accelerated detectors.
    #[arg(long)]
    pub n_accel: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
}

impl ScenarioFlags {
    fn resolve(&self, cfg: &ConfigFile) -> Result<Scenario, CliError> {
        let alpha = pick(self.alpha, cfg, "alpha", std::f64::consts::FRAC_1_SQRT_2)?;
        let n_accel = pick(self.n_accel, cfg, "n_accel", 1)?;
        let n_total = pick(self.n_total, cfg, "n_total", (n_accel + 1).max(3))?;
        Ok(Scenario::new(n_total, n_accel, alpha)?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct ResponseArgs {
    #[command(flatten)]
    pub detector: DetectorFlags,
    #[command(flatten)]
    pub out: OutputFlags,
}

#[derive(Debug, Clone, Args)]
pub struct GmeArgs {
    /// File with one serialised X state per line.
    pub state_file: PathBuf,
    #[command(flatten)]
    pub out: OutputFlags,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub detector: DetectorFlags,
    #[command(flatten)]
    pub scenario: ScenarioFlags,
    #[arg(long)]
    pub a_min: Option<f64>,
    #[arg(long)]
    pub a_max: Option<f64>,
    /// Number of grid intervals.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub fd_step: Option<f64>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[command(flatten)]
    pub out: OutputFlags,
}

#[derive(Debug, Clone, Args)]
pub struct FiguresArgs {
    #[command(flatten)]
    pub detector: DetectorFlags,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Directory receiving the data files.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Gaps for the short interaction time.
    #[arg(long)]
    pub omegas_small: Option<String>,
    /// Gaps for the long interaction time.
    #[arg(long)]
    pub omegas_large: Option<String>,
    #[arg(long)]
    pub a_max: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

fn default_workers() -> Result<usize, CliError> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Validation(format!("{WORKERS_ENV}: cannot parse '{v}'"))),
        Err(_) => Ok(1),
    }
}

/// Opens the destination before any computation.
fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| io_error(p, e))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn write_all(out: &mut dyn Write, text: &str, path: Option<&Path>) -> Result<(), CliError> {
    let where_ = path.unwrap_or(Path::new("<stdout>"));
    out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| io_error(where_, e))
}

/// Renders records under the fixed header.
pub fn render_records(records: &[SweepRecord], format: Format) -> String {
    let mut text = row(&HEADER.map(String::from), format);
    for r in records {
        let fields = [
            num(r.a),
            num(r.eta0_abs),
            num(r.eta1_abs),
            num(r.p),
            num(r.e),
            r.dp_sign.to_string(),
            r.de_sign.to_string(),
            r.regime.to_string(),
        ];
        text.push_str(&row(&fields, format));
    }
    text
}

fn cmd_response(args: &ResponseArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let params = args.detector.resolve(cfg)?;
    params.validate()?;
    let (path, format) = args.out.resolve(cfg)?;
    let mut out = open_output(path.as_deref())?;
    let r = response_amplitudes(&params)?;
    let fields = [num(params.a), num(r.eta0.norm()), num(r.eta1.norm()), num(r.p), r.modes_used.to_string()];
    write_all(out.as_mut(), &row(&fields, format), path.as_deref())
}

fn cmd_gme(args: &GmeArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let (path, format) = args.out.resolve(cfg)?;
    let text = std::fs::read_to_string(&args.state_file).map_err(|e| io_error(&args.state_file, e))?;
    let mut report = String::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let e = XState::parse_line(line)
            .and_then(|s| gme_xstate(&s))
            .map_err(|e| CliError::Validation(format!("{} line {}: {e}", args.state_file.display(), n + 1)))?;
        report.push_str(&row(&[num(e)], format));
    }
    let mut out = open_output(path.as_deref())?;
    write_all(out.as_mut(), &report, path.as_deref())
}

fn cmd_sweep(args: &SweepArgs, cfg: &ConfigFile) -> Result<(), CliError> {
    let base = args.detector.resolve(cfg)?;
    let scenario = args.scenario.resolve(cfg)?;
    let a_min = pick(args.a_min, cfg, "a_min", 0.0)?;
    let a_max = pick(args.a_max, cfg, "a_max", 0.5)?;
    let steps = pick(args.steps, cfg, "steps", 100)?;
    if !(a_min <= a_max) || steps < 1 {
        return Err(CliError::Validation(format!(
            "grid needs a_min <= a_max and steps >= 1, got [{a_min}, {a_max}] with {steps} steps"
        )));
    }
    let spec = SweepSpec {
        base,
        a_grid: linear_grid(a_min, a_max, steps),
        scenario,
        fd_step: pick(args.fd_step, cfg, "fd_step", 1.0)?,
        workers: pick(args.workers, cfg, "workers", default_workers()?)?,
    };
    spec.validate()?;
    let (path, format) = args.out.resolve(cfg)?;
    let mut out = open_output(path.as_deref())?;
    let records = run_sweep(&spec)?;
    write_all(out.as_mut(), &render_records(&records, format), path.as_deref())
}

/// One figure data file.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureFile {
    pub name: String,
    pub sigma: f64,
    pub omega: f64,
    pub n_accel: usize,
}

/// File plan for a figures run.
pub fn figure_plan(omegas_small: &[f64], omegas_large: &[f64], ext: &str) -> Vec<FigureFile> {
    let mut plan = Vec::new();
    for (sigma, omegas) in FIGURE_SIGMAS.iter().zip([omegas_small, omegas_large]) {
        for &omega in omegas {
            for n_accel in [1, 2] {
                let name = format!("sigma{}_n{n_accel}_omega{}.{ext}", num(*sigma), num(omega));
                plan.push(FigureFile { name, sigma: *sigma, omega, n_accel });
            }
        }
    }
    for (sigma, omega) in NPARTITE_OMEGAS {
        for n_accel in 1..=3 {
            let name = format!("npartite_sigma{}_n{n_accel}_omega{}.{ext}", num(sigma), num(omega));
            plan.push(FigureFile { name, sigma, omega, n_accel });
        }
    }
    plan
}

fn cmd_figures(args: &FiguresArgs, cfg: &ConfigFile) -> Result<Vec<PathBuf>, CliError> {
    let detector = args.detector.resolve(cfg)?;
    let alpha = pick(args.alpha, cfg, "alpha", std::f64::consts::FRAC_1_SQRT_2)?;
    let out_dir = match &args.out_dir {
        Some(d) => d.clone(),
        None => PathBuf::from(cfg.raw("out_dir").unwrap_or("figures")),
    };
    let list = |flag: &Option<String>, key: &str, default: &[f64]| -> Result<Vec<f64>, CliError> {
        match flag.as_deref().or(cfg.raw(key)) {
            Some(s) => parse_list(s),
            None => Ok(default.to_vec()),
        }
    };
    let small = list(&args.omegas_small, "omegas_small", &DEFAULT_OMEGAS_SMALL)?;
    let large = list(&args.omegas_large, "omegas_large", &DEFAULT_OMEGAS_LARGE)?;
    let a_max = pick(args.a_max, cfg, "a_max", 0.5)?;
    let steps = pick(args.steps, cfg, "steps", 100)?;
    let workers = pick(args.workers, cfg, "workers", default_workers()?)?;
    let format = match args.format {
        Some(f) => f,
        None => match cfg.raw("format") {
            Some(s) => <Format as ValueEnum>::from_str(s, true)
                .map_err(|_| CliError::Validation(format!("config key 'format': unknown format '{s}'")))?,
            None => Format::Csv,
        },
    };
    if !(a_max >= 0.0) || steps < 1 {
        return Err(CliError::Validation("figures need a_max >= 0 and steps >= 1".into()));
    }
    let ext = match format {
        Format::Csv => "csv",
        Format::Tsv => "tsv",
    };
    let plan = figure_plan(&small, &large, ext);
    std::fs::create_dir_all(&out_dir).map_err(|e| io_error(&out_dir, e))?;
    let mut files = Vec::with_capacity(plan.len());
    for f in &plan {
        let path = out_dir.join(&f.name);
        File::create(&path).map_err(|e| io_error(&path, e))?;
        files.push(path);
    }
    let grid = linear_grid(0.0, a_max, steps);
    let mut done: Vec<((u64, u64), udw_core::sweep::GridResponses)> = Vec::new();
    for (f, path) in plan.iter().zip(&files) {
        let key = (f.sigma.to_bits(), f.omega.to_bits());
        let scenario = Scenario::new((f.n_accel + 1).max(3), f.n_accel, alpha)?;
        if !done.iter().any(|(k, _)| *k == key) {
            let spec = SweepSpec {
                base: DetectorParams { sigma: f.sigma, omega: f.omega, ..detector },
                a_grid: grid.clone(),
                scenario,
                fd_step: 1.0,
                workers,
            };
            done.push((key, compute_responses(&spec)?));
        }
        let responses = &done.iter().find(|(k, _)| *k == key).expect("computed above").1;
        let records = assemble_records(responses, &scenario)?;
        let mut out = open_output(Some(path))?;
        write_all(out.as_mut(), &render_records(&records, format), Some(path))?;
    }
    Ok(files)
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    match &cli.command {
        Command::Response(args) => cmd_response(args, &cfg),
        Command::Gme(args) => cmd_gme(args, &cfg),
        Command::Sweep(args) => cmd_sweep(args, &cfg),
        Command::Figures(args) => cmd_figures(args, &cfg).map(|_| ()),
    }
}

/// Parses `args` and runs the selected command, reporting errors on stderr.
pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("udw: {e}");
            e.exit_code()
        }
    }
}
