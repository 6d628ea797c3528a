//! `hardlimit` command-line front end.
//!
//! Every subcommand also reads its flags from a TOML file given with
//! `--config`: top-level keys are flag names (`snr-db` or `snr_db`), values
//! are scalars, arrays (joined with commas) or booleans (switches). Flags on
//! the command line win over the file.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use hardlimit_core::bounds::{self, HybridPrior, SystemPoint};
use hardlimit_core::harness::{self, alpha_grid, sweep_loss, DEFAULT_SNR_DB};
use hardlimit_core::{
    selftest, sigma2_from_snr_db, zeta_from_snr_db, Error, ExperimentConfig, LossKind, LossMeasure,
    Mode, PilotLayout, QuadratureSpec, Receiver, SolverOptions, TableFormat,
};

/// Version string embedded in JSON output.
pub const VERSION: &str = concat!("v", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Parser)]
#[command(name = "hardlimit", version, about = "Bounds, losses and Monte Carlo for 1-bit channel estimation")]
#[command(args_override_self = true)]
struct Cli {
    /// TOML file with flag values for the subcommand
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fisher matrix and CRLBs at one point (or expected bounds in hybrid mode)
    Bounds(BoundsArgs),
    /// Quantization losses at one point
    Loss(LossArgs),
    /// Loss tables over an alpha grid and a list of SNRs
    Sweep(SweepArgs),
    /// Monte Carlo experiment
    Simulate(SimulateArgs),
    /// Oracle-equivalence checks
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    #[value(alias = "deterministic")]
    Det,
    #[value(alias = "hyb")]
    Hybrid,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Det => Mode::Deterministic,
            ModeArg::Hybrid => Mode::Hybrid,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Chi,
    #[value(name = "chi_star", alias = "chi-star")]
    ChiStar,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    #[value(name = "paper_txt", alias = "paper-txt")]
    PaperTxt,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReceiverArg {
    Ideal,
    #[value(name = "onebit_unknown", alias = "onebit-unknown")]
    OnebitUnknown,
    #[value(name = "onebit_known", alias = "onebit-known")]
    OnebitKnown,
}

#[derive(Debug, Args)]
struct PointArgs {
    /// Channel coefficient (deterministic mode)
    #[arg(long, conflicts_with = "snr_db")]
    zeta: Option<f64>,
    /// SNR in dB: zeta = 10^(s/20) deterministic, sigma² = 10^(s/10) hybrid
    #[arg(long)]
    snr_db: Option<f64>,
    /// Threshold offset
    #[arg(long)]
    alpha: f64,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct BoundsArgs {
    #[arg(long, value_enum, default_value = "det")]
    mode: ModeArg,
    #[command(flatten)]
    point: PointArgs,
    /// Pilot length (even)
    #[arg(long, default_value_t = 1000)]
    n: u64,
    /// Gauss–Hermite order for hybrid expectations
    #[arg(long, default_value_t = QuadratureSpec::DEFAULT_ORDER)]
    order: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct LossArgs {
    #[arg(long, value_enum, default_value = "det")]
    mode: ModeArg,
    #[command(flatten)]
    point: PointArgs,
    #[arg(long, default_value_t = QuadratureSpec::DEFAULT_ORDER)]
    order: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct SweepArgs {
    #[arg(long, value_enum, default_value = "det")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "chi")]
    kind: KindArg,
    #[arg(long, default_value_t = 0.0)]
    alpha_min: f64,
    #[arg(long, default_value_t = 1.0)]
    alpha_max: f64,
    #[arg(long, default_value_t = 0.05)]
    alpha_step: f64,
    /// Comma-separated SNR list in dB
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr_db: Vec<f64>,
    #[arg(long, value_enum, default_value = "paper_txt")]
    format: FormatArg,
    /// Output file (stdout if absent)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = QuadratureSpec::DEFAULT_ORDER)]
    order: usize,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct SimulateArgs {
    #[arg(long, value_enum, default_value = "det")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "onebit_unknown")]
    receiver: ReceiverArg,
    #[arg(long, conflicts_with_all = ["snr_db", "sigma2"])]
    zeta: Option<f64>,
    #[arg(long, conflicts_with = "sigma2")]
    snr_db: Option<f64>,
    /// Prior variance (hybrid mode)
    #[arg(long)]
    sigma2: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1000)]
    n: u64,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// alternating, block or shuffled:<seed>
    #[arg(long, default_value = "alternating")]
    layout: PilotLayout,
    /// Worker threads (all cores if absent); does not affect results
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value_t = SolverOptions::default().gtol)]
    gtol: f64,
    #[arg(long, default_value_t = SolverOptions::default().max_iter)]
    max_iter: usize,
    #[arg(long, default_value_t = QuadratureSpec::DEFAULT_ORDER)]
    order: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
    Quiet(i32),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(m) => Failure::Usage(m),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(format!("write failed: {e}"))
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Runs the CLI on `argv` (program name first). Returns the exit code:
/// 0 on success, 1 on runtime errors and 2 on usage errors.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let argv = match expand_config(argv) {
        Ok(a) => a,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Bounds(a) => cmd_bounds(a, out),
        Command::Loss(a) => cmd_loss(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Selftest => cmd_selftest(out),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
        Err(Failure::Runtime(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
        Err(Failure::Quiet(code)) => code,
    }
}

/// Pulls `--config FILE` out of `argv` and splices the file's flags in
/// right after the subcommand name, so explicit flags still override them.
fn expand_config(argv: Vec<String>) -> std::result::Result<Vec<String>, String> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut path = None;
    let mut it = argv.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().ok_or("--config needs a file")?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let flags = config_flags(Path::new(&path))?;
    // rest[0] is the program name; the first non-option after it is the subcommand
    let pos = rest
        .iter()
        .skip(1)
        .position(|a| !a.starts_with('-'))
        .map(|p| p + 2)
        .ok_or("--config given without a subcommand")?;
    rest.splice(pos..pos, flags);
    Ok(rest)
}

fn config_flags(path: &Path) -> std::result::Result<Vec<String>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let table: toml::Table = text.parse().map_err(|e| format!("{}: {e}", path.display()))?;
    let mut flags = Vec::new();
    for (key, value) in table {
        let flag = format!("--{}", key.replace('_', "-"));
        let scalar = |v: &toml::Value| -> std::result::Result<String, String> {
            match v {
                toml::Value::String(s) => Ok(s.clone()),
                toml::Value::Integer(i) => Ok(i.to_string()),
                toml::Value::Float(f) => Ok(f.to_string()),
                _ => Err(format!("{}: `{key}` must be a string, number, boolean or array", path.display())),
            }
        };
        match &value {
            toml::Value::Boolean(true) => flags.push(flag),
            toml::Value::Boolean(false) => {}
            toml::Value::Array(items) => {
                let parts = items.iter().map(scalar).collect::<std::result::Result<Vec<_>, _>>()?;
                flags.push(format!("{flag}={}", parts.join(",")));
            }
            v => flags.push(format!("{flag}={}", scalar(v)?)),
        }
    }
    Ok(flags)
}

fn quad(order: usize) -> std::result::Result<QuadratureSpec, Failure> {
    let q = QuadratureSpec::new(order);
    q.validate()?;
    Ok(q)
}

fn det_zeta(p: &PointArgs) -> std::result::Result<f64, Failure> {
    match (p.zeta, p.snr_db) {
        (Some(z), None) => Ok(z),
        (None, Some(s)) => Ok(zeta_from_snr_db(s)),
        _ => Err(Failure::Usage("deterministic mode needs --zeta or --snr-db".into())),
    }
}

fn hybrid_prior(p: &PointArgs) -> std::result::Result<HybridPrior, Failure> {
    match (p.zeta, p.snr_db) {
        (None, Some(s)) => Ok(HybridPrior::from_snr_db(s)?),
        (Some(_), _) => Err(Failure::Usage("hybrid mode takes --snr-db, not --zeta".into())),
        _ => Err(Failure::Usage("hybrid mode needs --snr-db".into())),
    }
}

fn emit_json(out: &mut dyn Write, config: serde_json::Value, result: impl Serialize) -> Outcome {
    let doc = json!({ "version": VERSION, "config": config, "result": result });
    let text = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Runtime(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn cmd_bounds(a: BoundsArgs, out: &mut dyn Write) -> Outcome {
    match a.mode {
        ModeArg::Det => {
            let zeta = det_zeta(&a.point)?;
            let p = SystemPoint::new(zeta, a.point.alpha, a.n)?;
            let f = bounds::fisher_1bit(&p);
            let result = json!({
                "fisher": f,
                "crlb_ideal": bounds::crlb_ideal(&p),
                "crlb_1bit_unknown": bounds::crlb_1bit_unknown(&p)?,
                "crlb_1bit_alpha": bounds::crlb_1bit_alpha(&p)?,
                "crlb_1bit_known": bounds::crlb_1bit_known(&p)?,
            });
            if a.json {
                let config = json!({ "mode": Mode::Deterministic, "zeta": zeta, "alpha": a.point.alpha, "n": a.n });
                return emit_json(out, config, result);
            }
            writeln!(out, "fisher_zz          {}", f.f_zz)?;
            writeln!(out, "fisher_za          {}", f.f_za)?;
            writeln!(out, "fisher_aa          {}", f.f_aa)?;
            for key in ["crlb_ideal", "crlb_1bit_unknown", "crlb_1bit_alpha", "crlb_1bit_known"] {
                writeln!(out, "{key:<18} {}", result[key])?;
            }
        }
        ModeArg::Hybrid => {
            let prior = hybrid_prior(&a.point)?;
            let h = bounds::hybrid_bounds(a.point.alpha, &prior, a.n, &quad(a.order)?)?;
            if a.json {
                let config = json!({ "mode": Mode::Hybrid, "sigma2": prior.sigma2, "alpha": a.point.alpha, "n": a.n, "order": a.order });
                return emit_json(out, config, h);
            }
            writeln!(out, "mse_y       {}", h.mse_y)?;
            writeln!(out, "mse_r       {}", h.mse_r)?;
            writeln!(out, "mse_r_star  {}", h.mse_r_star)?;
        }
    }
    Ok(())
}

fn cmd_loss(a: LossArgs, out: &mut dyn Write) -> Outcome {
    let (report, config) = match a.mode {
        ModeArg::Det => {
            let zeta = det_zeta(&a.point)?;
            let config = json!({ "mode": Mode::Deterministic, "zeta": zeta, "alpha": a.point.alpha });
            (bounds::loss_deterministic(zeta, a.point.alpha), config)
        }
        ModeArg::Hybrid => {
            let prior = hybrid_prior(&a.point)?;
            let config = json!({ "mode": Mode::Hybrid, "sigma2": prior.sigma2, "alpha": a.point.alpha, "order": a.order });
            (bounds::loss_hybrid(a.point.alpha, &prior, &quad(a.order)?)?, config)
        }
    };
    if a.json {
        return emit_json(out, config, report);
    }
    writeln!(out, "chi          {}", report.chi)?;
    writeln!(out, "chi_star     {}", report.chi_star)?;
    writeln!(out, "chi_db       {}", report.chi_db)?;
    writeln!(out, "chi_star_db  {}", report.chi_star_db)?;
    Ok(())
}

fn cmd_sweep(a: SweepArgs, out: &mut dyn Write) -> Outcome {
    let measure = match a.kind {
        KindArg::Chi => LossMeasure::Chi,
        KindArg::ChiStar => LossMeasure::ChiStar,
    };
    let format = match a.format {
        FormatArg::PaperTxt => TableFormat::PaperTxt,
        FormatArg::Csv => TableFormat::Csv,
        FormatArg::Json => TableFormat::Json,
    };
    let snr = if a.snr_db.is_empty() { DEFAULT_SNR_DB.to_vec() } else { a.snr_db };
    let grid = alpha_grid(a.alpha_min, a.alpha_max, a.alpha_step)?;
    let table = sweep_loss(LossKind::new(measure, a.mode.into()), &grid, &snr, &quad(a.order)?)?;
    match a.out {
        Some(path) => harness::write_table(&table, &path, format)?,
        None => write!(out, "{}", harness::render_table(&table, format)?)?,
    }
    Ok(())
}

fn simulate_config(a: &SimulateArgs) -> std::result::Result<ExperimentConfig, Failure> {
    let receiver = match a.receiver {
        ReceiverArg::Ideal => Receiver::Ideal,
        ReceiverArg::OnebitUnknown => Receiver::OnebitUnknown,
        ReceiverArg::OnebitKnown => Receiver::OnebitKnown,
    };
    let mut cfg = match a.mode {
        ModeArg::Det => {
            let zeta = match (a.zeta, a.snr_db, a.sigma2) {
                (Some(z), None, None) => z,
                (None, Some(s), None) => zeta_from_snr_db(s),
                (_, _, Some(_)) => return Err(Failure::Usage("--sigma2 needs --mode hybrid".into())),
                _ => return Err(Failure::Usage("deterministic mode needs --zeta or --snr-db".into())),
            };
            ExperimentConfig::deterministic(receiver, zeta, a.alpha, a.n, a.trials)
        }
        ModeArg::Hybrid => {
            let sigma2 = match (a.zeta, a.snr_db, a.sigma2) {
                (None, Some(s), None) => sigma2_from_snr_db(s),
                (None, None, Some(v)) => v,
                (Some(_), _, _) => return Err(Failure::Usage("hybrid mode takes --snr-db or --sigma2, not --zeta".into())),
                _ => return Err(Failure::Usage("hybrid mode needs --snr-db or --sigma2".into())),
            };
            ExperimentConfig::hybrid(receiver, sigma2, a.alpha, a.n, a.trials)
        }
    };
    cfg = cfg.with_seed(a.seed);
    cfg.pilot_layout = a.layout;
    cfg.solver = SolverOptions {
        gtol: a.gtol,
        max_iter: a.max_iter,
    };
    cfg.quadrature = QuadratureSpec::new(a.order);
    if let Some(w) = a.workers {
        if w == 0 {
            return Err(Failure::Usage("--workers must be at least 1".into()));
        }
        cfg = cfg.with_workers(w);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_simulate(a: SimulateArgs, out: &mut dyn Write) -> Outcome {
    let cfg = simulate_config(&a)?;
    let r = harness::run_monte_carlo(&cfg)?;
    if a.json {
        let config = serde_json::to_value(&cfg).map_err(|e| Failure::Runtime(e.to_string()))?;
        return emit_json(out, config, &r);
    }
    writeln!(out, "mse_zeta        {}", r.mse_zeta)?;
    writeln!(out, "crlb_ref        {}", r.crlb_ref)?;
    writeln!(out, "efficiency      {}", r.efficiency)?;
    writeln!(out, "ci95_halfwidth  {}", r.ci95_halfwidth)?;
    if let (Some(m), Some(b)) = (r.mse_alpha, r.crlb_alpha_ref) {
        writeln!(out, "mse_alpha       {m}")?;
        writeln!(out, "crlb_alpha_ref  {b}")?;
    }
    writeln!(out, "clamp_rate      {}", r.clamp_rate)?;
    writeln!(out, "trials_run      {}", r.trials_run)?;
    writeln!(out, "failures        {}", r.failures)?;
    Ok(())
}

fn cmd_selftest(out: &mut dyn Write) -> Outcome {
    let checks = selftest::run();
    for c in &checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        writeln!(out, "{status}  {}  (max error {:.3e}, tolerance {:.0e})", c.name, c.max_error, c.tolerance)?;
    }
    if checks.iter().all(|c| c.passed) {
        Ok(())
    } else {
        Err(Failure::Quiet(1))
    }
}
