//! exboot: bootstrap inference for exchangeable arrays from the command
//! line.
//!
//! Subcommands: `mean-band` (uniform bands for array means), `density-band`
//! (dyadic kernel density bands), `simulate` (Monte Carlo coverage), and
//! `lasso` (penalty-tuned l1 regression). Options resolve as
//! flag > config file > built-in default; the default seed may also come
//! from the EXBOOT_SEED environment variable. Exit codes: 0 success,
//! 2 input error, 3 degenerate scale, 1 anything else, with a JSON error
//! object on stderr.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use exboot::band::Mode;
use exboot::density::{self, BandwidthRule, DensityBandConfig, Kernel};
use exboot::error::Error;
use exboot::io::{load_dyadic_edges, load_multiway_csv};
use exboot::report::{
    coverage_csv, to_json_pretty, DensityBandReport, LassoReport, MeanBandReport,
};
use exboot::simgen::{BaseDist, DesignFamily, DesignSpec, ExperimentConfig};
use exboot::svg::band_figure;
use exboot::{joint, lasso, separable, simgen};

#[derive(Parser)]
#[command(name = "exboot", version, about = "Multiplier-bootstrap inference for exchangeable arrays")]
struct Cli {
    /// TOML config file; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// cap the rayon worker count (results do not depend on it)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Uniform confidence band for the mean of an exchangeable array
    MeanBand(MeanBandArgs),
    /// Dyadic kernel density estimate with a uniform confidence band
    DensityBand(DensityBandArgs),
    /// Monte Carlo coverage experiment for one of the built-in designs
    Simulate(SimulateArgs),
    /// Lasso fit with the bootstrap-tuned penalty
    Lasso(LassoArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Auto,
    Separable,
    Joint,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Raw,
    Studentized,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Raw => Mode::Raw,
            ModeArg::Studentized => Mode::Studentized,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BandArg {
    Constant,
    Studentized,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KernelArg {
    Epanechnikov,
    Gaussian,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RuleArg {
    A,
    B,
}

#[derive(Args)]
struct MeanBandArgs {
    /// input CSV: multiway (K index columns then p value columns) or edge
    /// list (id,id,weight)
    input: PathBuf,
    /// multiway index column count; required for multiway files
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum, default_value = "auto")]
    engine: EngineArg,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "B")]
    b: Option<usize>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// sum each directed pair of edge weights onto both ordered slots
    #[arg(long)]
    symmetrize: bool,
    /// studentize with the plain variance instead of the Bessel-corrected
    #[arg(long)]
    no_bessel: bool,
    /// include the sup-norm draws in the JSON report
    #[arg(long)]
    include_draws: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// comma list from csv,json,svg
    #[arg(long)]
    emit: Option<String>,
}

#[derive(Args)]
struct DensityBandArgs {
    /// edge list CSV (id,id,weight)
    input: PathBuf,
    #[arg(long)]
    symmetrize: bool,
    /// replace each nonzero value y with ln(y); zeros stay zero
    #[arg(long)]
    log_transform: bool,
    /// fix a_hat = 1, leaving b_hat unaltered (bands for the scaled
    /// density b)
    #[arg(long)]
    a_known_one: bool,
    /// design grid lo:hi:count
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long, value_enum)]
    kernel: Option<KernelArg>,
    #[arg(long, value_enum)]
    bandwidth_rule: Option<RuleArg>,
    /// explicit bandwidth, overriding the rule
    #[arg(long)]
    h: Option<f64>,
    #[arg(long, value_enum)]
    band: Option<BandArg>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long = "B")]
    b: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    emit: Option<String>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    design: Option<String>,
    #[arg(long)]
    base: Option<String>,
    #[arg(long)]
    p: Option<usize>,
    /// cluster sizes, e.g. 25,25 (or a single n for the dyadic designs)
    #[arg(long)]
    dims: Option<String>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long = "B")]
    b: Option<usize>,
    /// confidence levels, e.g. 0.90,0.95
    #[arg(long)]
    levels: Option<String>,
    /// comma list from raw,studentized
    #[arg(long)]
    modes: Option<String>,
    #[arg(long, value_enum)]
    bandwidth_rule: Option<RuleArg>,
    /// run at the full published scale (reps = B = 2500)
    #[arg(long)]
    paper_scale: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    emit: Option<String>,
}

#[derive(Args)]
struct LassoArgs {
    /// outcome CSV: K index columns then one value column
    #[arg(long)]
    y: PathBuf,
    /// regressor CSV: K index columns then p value columns
    #[arg(long)]
    x: PathBuf,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long = "B")]
    b: Option<usize>,
    /// fixed penalty: skip the bootstrap tuning
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    emit: Option<String>,
}

/// Values read from the optional TOML config; per-subcommand sections plus
/// [general] for seed/out/emit/threads.
struct Config {
    doc: Option<toml::Value>,
}

impl Config {
    fn load(path: Option<&Path>) -> Result<Self, Error> {
        let doc = match path {
            None => None,
            Some(p) => {
                let text = std::fs::read_to_string(p)?;
                Some(text.parse::<toml::Value>().map_err(|e| {
                    Error::InvalidParam(format!("config parse error: {e}"))
                })?)
            }
        };
        Ok(Self { doc })
    }

    fn get(&self, section: &str, key: &str) -> Option<&toml::Value> {
        let doc = self.doc.as_ref()?;
        doc.get(section)
            .and_then(|s| s.get(key))
            .or_else(|| doc.get("general").and_then(|s| s.get(key)))
    }

    fn f64(&self, section: &str, key: &str) -> Option<f64> {
        match self.get(section, key)? {
            toml::Value::Float(f) => Some(*f),
            toml::Value::Integer(i) => Some(*i as f64),
            _ => None,
        }
    }

    fn usize(&self, section: &str, key: &str) -> Option<usize> {
        match self.get(section, key)? {
            toml::Value::Integer(i) if *i >= 0 => Some(*i as usize),
            _ => None,
        }
    }

    fn u64(&self, section: &str, key: &str) -> Option<u64> {
        match self.get(section, key)? {
            toml::Value::Integer(i) if *i >= 0 => Some(*i as u64),
            _ => None,
        }
    }

    fn string(&self, section: &str, key: &str) -> Option<String> {
        match self.get(section, key)? {
            toml::Value::String(s) => Some(s.clone()),
            _ => None,
        }
    }
}

fn env_seed() -> Option<u64> {
    std::env::var("EXBOOT_SEED").ok()?.parse().ok()
}

fn resolve_seed(flag: Option<u64>, cfg: &Config, section: &str) -> u64 {
    flag.or_else(|| cfg.u64(section, "seed"))
        .or_else(env_seed)
        .unwrap_or(0)
}

struct Emit {
    csv: bool,
    json: bool,
    svg: bool,
}

fn resolve_emit(flag: Option<&str>, cfg: &Config, section: &str) -> Result<Emit, Error> {
    let spec = flag
        .map(str::to_string)
        .or_else(|| cfg.string(section, "emit"))
        .unwrap_or_else(|| "csv,json".to_string());
    let mut emit = Emit {
        csv: false,
        json: false,
        svg: false,
    };
    for tok in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match tok {
            "csv" => emit.csv = true,
            "json" => emit.json = true,
            "svg" => emit.svg = true,
            other => {
                return Err(Error::InvalidParam(format!(
                    "unknown emit target `{other}` (expected csv, json, svg)"
                )))
            }
        }
    }
    Ok(emit)
}

fn out_dir(flag: Option<PathBuf>, cfg: &Config, section: &str) -> PathBuf {
    flag.or_else(|| cfg.string(section, "out").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn write_artifact(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Error> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    println!("wrote {}", path.display());
    Ok(path)
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidParam(format!(
            "grid must be lo:hi:count, got `{spec}`"
        )));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| Error::InvalidParam(format!("bad grid lower bound `{}`", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| Error::InvalidParam(format!("bad grid upper bound `{}`", parts[1])))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| Error::InvalidParam(format!("bad grid count `{}`", parts[2])))?;
    if count == 0 || hi <= lo {
        return Err(Error::InvalidParam("grid needs hi > lo and count >= 1".into()));
    }
    Ok(density::linspace(lo, hi, count))
}

fn parse_list_f64(spec: &str) -> Result<Vec<f64>, Error> {
    spec.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::InvalidParam(format!("bad number `{t}` in list")))
        })
        .collect()
}

fn parse_list_usize(spec: &str) -> Result<Vec<usize>, Error> {
    spec.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::InvalidParam(format!("bad integer `{t}` in list")))
        })
        .collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let code = exit_code(&err);
            let payload = serde_json::json!({
                "error": {
                    "kind": error_kind(&err),
                    "message": err.to_string(),
                    "exit_code": code,
                }
            });
            eprintln!("{payload}");
            ExitCode::from(code)
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::DegenerateScale { .. } | Error::DegenerateData(_) | Error::ZeroMassOnly => 3,
        Error::Io(_)
        | Error::RaggedRow { .. }
        | Error::NonNumeric { .. }
        | Error::DuplicateIndex { .. }
        | Error::MissingCell { .. }
        | Error::SelfLoop { .. }
        | Error::DuplicateEdge { .. }
        | Error::TooFewUnits { .. }
        | Error::InvalidParam(_)
        | Error::InvalidKernel(_)
        | Error::ModeMismatch { .. }
        | Error::SupportTooLarge { .. } => 2,
    }
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::InvalidParam(_) => "invalid_param",
        Error::RaggedRow { .. } => "ragged_row",
        Error::NonNumeric { .. } => "non_numeric",
        Error::DuplicateIndex { .. } => "duplicate_index",
        Error::MissingCell { .. } => "missing_cell",
        Error::SelfLoop { .. } => "self_loop",
        Error::DuplicateEdge { .. } => "duplicate_edge",
        Error::TooFewUnits { .. } => "too_few_units",
        Error::DegenerateScale { .. } => "degenerate_scale",
        Error::DegenerateData(_) => "degenerate_data",
        Error::ModeMismatch { .. } => "mode_mismatch",
        Error::ZeroMassOnly => "zero_mass_only",
        Error::SupportTooLarge { .. } => "support_too_large",
        Error::InvalidKernel(_) => "invalid_kernel",
        Error::Io(_) => "io",
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::InvalidParam(format!("thread pool: {e}")))?;
    }
    let cfg = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::MeanBand(args) => mean_band(args, &cfg),
        Command::DensityBand(args) => density_band_cmd(args, &cfg),
        Command::Simulate(args) => simulate(args, &cfg),
        Command::Lasso(args) => lasso_cmd(args, &cfg),
    }
}

/// Peek at the first data row to tell an edge list from a multiway grid.
fn looks_like_edges(text: &str) -> bool {
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()).take(2) {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return false;
        }
        if fields[0].parse::<f64>().is_err() || fields[1].parse::<f64>().is_err() {
            return true;
        }
    }
    false
}

fn mean_band(args: MeanBandArgs, cfg: &Config) -> Result<(), Error> {
    const S: &str = "mean-band";
    let alpha = args.alpha.or_else(|| cfg.f64(S, "alpha")).unwrap_or(0.05);
    let b = args.b.or_else(|| cfg.usize(S, "B")).unwrap_or(500);
    let mode: Mode = args
        .mode
        .map(Mode::from)
        .or_else(|| match cfg.string(S, "mode").as_deref() {
            Some("raw") => Some(Mode::Raw),
            Some("studentized") => Some(Mode::Studentized),
            _ => None,
        })
        .unwrap_or(Mode::Studentized);
    let seed = resolve_seed(args.seed, cfg, S);
    let emit = resolve_emit(args.emit.as_deref(), cfg, S)?;
    let dir = out_dir(args.out, cfg, S);
    let k = args.k.or_else(|| cfg.usize(S, "k"));

    let text = std::fs::read_to_string(&args.input)?;
    let engine = match args.engine {
        EngineArg::Separable => EngineArg::Separable,
        EngineArg::Joint => EngineArg::Joint,
        EngineArg::Auto => {
            if looks_like_edges(&text) {
                EngineArg::Joint
            } else if k.is_some() {
                EngineArg::Separable
            } else {
                return Err(Error::InvalidParam(
                    "cannot infer the engine: pass --k for multiway input or --engine joint for edges"
                        .into(),
                ));
            }
        }
    };

    let report = match engine {
        EngineArg::Separable => {
            let k = k.ok_or_else(|| {
                Error::InvalidParam("--k is required for multiway input".into())
            })?;
            // column count fixes p given K
            let first = text
                .lines()
                .map(str::trim)
                .find(|l| !l.is_empty())
                .ok_or_else(|| Error::InvalidParam("empty input".into()))?;
            let cols = first.split(',').count();
            if cols <= k {
                return Err(Error::InvalidParam(format!(
                    "rows have {cols} columns but K = {k}"
                )));
            }
            let arr = load_multiway_csv(&text, k, cols - k)?;
            let res = separable::bootstrap(
                &arr,
                &separable::SepBootstrapConfig {
                    b,
                    alpha,
                    mode,
                    seed,
                    use_bessel: !args.no_bessel,
                    ..Default::default()
                },
            )?;
            let band = separable::confidence_band(&res, alpha, mode)?;
            MeanBandReport::from_separable(&res, &band, args.include_draws)
        }
        EngineArg::Joint => {
            let (arr, _edges) = load_dyadic_edges(&text, args.symmetrize)?;
            let res = joint::bootstrap(
                &arr,
                &joint::JointBootstrapConfig {
                    b,
                    alpha,
                    mode,
                    seed,
                    use_bessel: !args.no_bessel,
                    ..Default::default()
                },
            )?;
            let band = joint::confidence_band(&res, alpha, mode)?;
            MeanBandReport::from_joint(&res, &band, args.include_draws)
        }
        EngineArg::Auto => unreachable!(),
    };

    if emit.json {
        write_artifact(&dir, "mean_band.json", &to_json_pretty(&report)?)?;
    }
    if emit.csv {
        write_artifact(&dir, "mean_band.csv", &report.to_csv())?;
    }
    if emit.svg {
        let grid: Vec<f64> = (1..=report.p).map(|j| j as f64).collect();
        let lower: Vec<f64> = report
            .estimate
            .iter()
            .zip(&report.half_width)
            .map(|(e, w)| e - w)
            .collect();
        let upper: Vec<f64> = report
            .estimate
            .iter()
            .zip(&report.half_width)
            .map(|(e, w)| e + w)
            .collect();
        let svg = band_figure(
            &grid,
            &report.estimate,
            &lower,
            &upper,
            None,
            &format!(
                "{} mean, {:.0}% uniform band",
                report.engine,
                100.0 * (1.0 - report.alpha)
            ),
        );
        write_artifact(&dir, "mean_band.svg", &svg)?;
    }
    Ok(())
}

fn density_band_cmd(args: DensityBandArgs, cfg: &Config) -> Result<(), Error> {
    const S: &str = "density-band";
    let alpha = args.alpha.or_else(|| cfg.f64(S, "alpha")).unwrap_or(0.05);
    let b = args.b.or_else(|| cfg.usize(S, "B")).unwrap_or(500);
    let seed = resolve_seed(args.seed, cfg, S);
    let emit = resolve_emit(args.emit.as_deref(), cfg, S)?;
    let dir = out_dir(args.out, cfg, S);
    let grid_spec = args
        .grid
        .or_else(|| cfg.string(S, "grid"))
        .unwrap_or_else(|| "-2:2:201".to_string());
    let grid = parse_grid(&grid_spec)?;
    let kernel = match args.kernel.unwrap_or(KernelArg::Epanechnikov) {
        KernelArg::Epanechnikov => Kernel::Epanechnikov,
        KernelArg::Gaussian => Kernel::Gaussian,
    };
    kernel.validate()?;
    let band = match args.band.unwrap_or(BandArg::Studentized) {
        BandArg::Constant => Mode::Raw,
        BandArg::Studentized => Mode::Studentized,
    };
    let rule = match args.bandwidth_rule.unwrap_or(RuleArg::A) {
        RuleArg::A => BandwidthRule::SilvermanA,
        RuleArg::B => BandwidthRule::SilvermanB,
    };

    let text = std::fs::read_to_string(&args.input)?;
    let (mut arr, _edges) = load_dyadic_edges(&text, args.symmetrize)?;
    if !arr.is_symmetric() {
        arr = arr.assert_symmetric().map_err(|_| {
            Error::InvalidParam(
                "density bands need symmetric data; pass --symmetrize to fold directed flows"
                    .into(),
            )
        })?;
    }
    if args.log_transform {
        arr = log_transform(&arr)?;
    }
    let h = match args.h.or_else(|| cfg.f64(S, "h")) {
        Some(h) => h,
        None => density::bandwidth(&arr, rule, density::DEFAULT_UNDERSMOOTH_SHIFT)?,
    };
    let res = density::density_band(
        &arr,
        &grid,
        &kernel,
        h,
        &DensityBandConfig {
            alpha,
            b,
            band,
            a_known_one: args.a_known_one,
            seed,
        },
    )?;
    let kernel_name = match kernel {
        Kernel::Epanechnikov => "epanechnikov",
        Kernel::Gaussian => "gaussian",
        Kernel::Table { .. } => "table",
    };
    let report = DensityBandReport::new(&res, kernel_name);
    if emit.json {
        write_artifact(&dir, "density_band.json", &to_json_pretty(&report)?)?;
    }
    if emit.csv {
        write_artifact(&dir, "density_band.csv", &report.to_csv())?;
    }
    if emit.svg {
        let svg = band_figure(
            &res.grid,
            &res.f_hat,
            &res.lower(),
            &res.upper(),
            Some(report.zero_share),
            &format!(
                "dyadic density, {:.0}% uniform band (h = {:.4})",
                100.0 * (1.0 - alpha),
                h
            ),
        );
        write_artifact(&dir, "density_band.svg", &svg)?;
    }
    Ok(())
}

/// ln on the nonzero values; exact zeros keep encoding "no flow".
fn log_transform(arr: &exboot::DyadicArray) -> Result<exboot::DyadicArray, Error> {
    let mut collision = false;
    for (_, _, v) in arr.iter_unordered() {
        if v[0] < 0.0 {
            return Err(Error::InvalidParam(
                "log transform needs nonnegative weights".into(),
            ));
        }
        if v[0] == 1.0 {
            collision = true;
        }
    }
    if collision {
        eprintln!(
            "warning: weight 1 maps to log-value 0 and merges with the zero mass"
        );
    }
    exboot::DyadicArray::from_fn(arr.n(), 1, true, |i, j, out| {
        let v = arr.pair(i, j)[0];
        out[0] = if v == 0.0 { 0.0 } else { v.ln() };
    })
}

fn simulate(args: SimulateArgs, cfg: &Config) -> Result<(), Error> {
    const S: &str = "simulate";
    let design = args
        .design
        .or_else(|| cfg.string(S, "design"))
        .unwrap_or_else(|| "separable-k2".to_string());
    let family = match design.as_str() {
        "separable-k2" | "separable_k2" => DesignFamily::SeparableK2,
        "separable-k3" | "separable_k3" => DesignFamily::SeparableK3,
        "dyadic" => DesignFamily::Dyadic,
        "dyadic-density" | "dyadic_density" => DesignFamily::DyadicDensity,
        other => {
            return Err(Error::InvalidParam(format!(
                "unknown design `{other}` (separable-k2, separable-k3, dyadic, dyadic-density)"
            )))
        }
    };
    let base_default = match family {
        DesignFamily::DyadicDensity => "logistic",
        _ => "mixture",
    };
    let base = match args
        .base
        .or_else(|| cfg.string(S, "base"))
        .unwrap_or_else(|| base_default.to_string())
        .as_str()
    {
        "gaussian" => BaseDist::Gaussian,
        "mixture" => BaseDist::Mixture,
        "logistic" => BaseDist::Logistic,
        other => {
            return Err(Error::InvalidParam(format!(
                "unknown base `{other}` (gaussian, mixture, logistic)"
            )))
        }
    };
    let p = args.p.or_else(|| cfg.usize(S, "p")).unwrap_or(25);
    let dims = match args.dims.or_else(|| cfg.string(S, "dims")) {
        Some(s) => parse_list_usize(&s)?,
        None => match family {
            DesignFamily::SeparableK2 => vec![25, 25],
            DesignFamily::SeparableK3 => vec![25, 25, 25],
            DesignFamily::Dyadic => vec![50],
            DesignFamily::DyadicDensity => vec![250],
        },
    };
    let (mut reps, mut b) = (
        args.reps.or_else(|| cfg.usize(S, "reps")).unwrap_or(500),
        args.b.or_else(|| cfg.usize(S, "B")).unwrap_or(500),
    );
    if args.paper_scale {
        reps = 2500;
        b = 2500;
    }
    let levels = match args.levels.or_else(|| cfg.string(S, "levels")) {
        Some(s) => parse_list_f64(&s)?,
        None => vec![0.90, 0.95],
    };
    let modes = match args.modes.or_else(|| cfg.string(S, "modes")) {
        Some(s) => s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| match t {
                "raw" => Ok(Mode::Raw),
                "studentized" | "normalized" => Ok(Mode::Studentized),
                other => Err(Error::InvalidParam(format!("unknown mode `{other}`"))),
            })
            .collect::<Result<Vec<_>, _>>()?,
        None => vec![Mode::Raw, Mode::Studentized],
    };
    let rule = match args.bandwidth_rule.unwrap_or(RuleArg::A) {
        RuleArg::A => BandwidthRule::SilvermanA,
        RuleArg::B => BandwidthRule::SilvermanB,
    };
    let seed = resolve_seed(args.seed, cfg, S);
    let emit = resolve_emit(args.emit.as_deref(), cfg, S)?;
    let dir = out_dir(args.out, cfg, S);

    let spec = DesignSpec {
        family,
        base,
        p,
        dims,
    };
    let report = simgen::coverage_experiment(
        &spec,
        &ExperimentConfig {
            reps,
            b,
            levels,
            modes,
            seed,
            rule,
            grid: density::linspace(-2.0, 2.0, 201),
        },
    )?;
    if emit.json {
        write_artifact(&dir, "simulate.json", &to_json_pretty(&report)?)?;
    }
    if emit.csv {
        write_artifact(&dir, "simulate.csv", &coverage_csv(&report))?;
    }
    for cell in &report.cells {
        println!(
            "{} {} p={} dims={:?} level={:.2} mode={}: coverage {:.4}",
            report.design,
            report.base,
            report.p,
            report.dims,
            cell.level,
            cell.mode.as_str(),
            cell.coverage
        );
    }
    Ok(())
}

fn lasso_cmd(args: LassoArgs, cfg: &Config) -> Result<(), Error> {
    const S: &str = "lasso";
    let k = args
        .k
        .or_else(|| cfg.usize(S, "k"))
        .ok_or_else(|| Error::InvalidParam("--k is required".into()))?;
    let eta = args.eta.or_else(|| cfg.f64(S, "eta")).unwrap_or(0.1);
    let c = args.c.or_else(|| cfg.f64(S, "c")).unwrap_or(1.1);
    let b = args.b.or_else(|| cfg.usize(S, "B")).unwrap_or(500);
    let seed = resolve_seed(args.seed, cfg, S);
    let emit = resolve_emit(args.emit.as_deref(), cfg, S)?;
    let dir = out_dir(args.out, cfg, S);

    let y_text = std::fs::read_to_string(&args.y)?;
    let x_text = std::fs::read_to_string(&args.x)?;
    let first = x_text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .ok_or_else(|| Error::InvalidParam("empty regressor file".into()))?;
    let cols = first.split(',').count();
    if cols <= k {
        return Err(Error::InvalidParam(format!(
            "regressor rows have {cols} columns but K = {k}"
        )));
    }
    let y = load_multiway_csv(&y_text, k, 1)?;
    let x = load_multiway_csv(&x_text, k, cols - k)?;
    let problem = lasso::ClusteredRegression::new(y, x)?;

    let (fit, choice) = match args.lambda.or_else(|| cfg.f64(S, "lambda")) {
        Some(lambda) => {
            let fit = lasso::lasso_solve(
                &problem,
                lambda,
                lasso::DEFAULT_TOL,
                lasso::DEFAULT_MAX_ITER,
                None,
            )?;
            let choice = lasso::PenaltyChoice {
                lambda0: lambda,
                lambda,
                eta,
                c,
                lambda_draws: Vec::new(),
            };
            (fit, choice)
        }
        None => {
            let (fit, choice, _) = lasso::fit(&problem, eta, c, b, seed, None)?;
            (fit, choice)
        }
    };

    let report = LassoReport::new(&fit, &choice, problem.y.dims(), b, seed);
    if emit.json {
        write_artifact(&dir, "lasso.json", &to_json_pretty(&report)?)?;
    }
    if emit.csv {
        write_artifact(&dir, "lasso.csv", &report.to_csv(&fit.beta))?;
    }
    println!(
        "lambda = {:.6e} ({} active of {}), converged = {}, kkt = {:.2e}",
        fit.lambda,
        fit.active_set.len(),
        fit.beta.len(),
        fit.converged,
        fit.kkt_violation
    );
    Ok(())
}
