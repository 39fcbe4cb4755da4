//! Command-line interface over the sweep engine.
//!
//! Exit codes: 0 success, 1 validation or I/O error, 2 verification failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::channels::NoiseKind;
use crate::models::{critical_dmi, XYZDMParams};
use crate::sweep::spec::{AxisSpec, Experiment, NoiseSpec, SweepSpec};
use crate::sweep::table::{emit, OutputFormat, Table};
use crate::sweep::verify;
use crate::sweep::{run_sweep, Cell, SweepError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "spinbat",
    version,
    about = "Spin quantum battery laboratory: strong-field charging, noisy storage, ergotropy"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Single-qubit ergotropy over the drive phase under repeated noise
    Single(SingleArgs),
    /// Driven two-qubit battery, noiseless or under repeated noise
    Two(TwoArgs),
    /// Critical DM strengths, region labels, and the energy gap over D
    Regions(RegionsArgs),
    /// Asymptotic-ergotropy map over the (Jz, D) plane
    Map(MapArgs),
    /// Diagonal-population trajectory under repeated noise
    Diag(DiagArgs),
    /// Seeded randomized verification suites
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// TOML config file; explicit flags override its fields
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Output path (stdout when omitted)
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Output format: csv or jsonl
    #[arg(long)]
    format: Option<OutputFormat>,
    /// Worker threads for grid evaluation (default: all cores)
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Args)]
struct NoiseArgs {
    /// Noise channel: pf, bf, or ad
    #[arg(long)]
    noise: Option<NoiseKind>,
    /// Channel probability parameter
    #[arg(long)]
    p: Option<f64>,
    /// Application counts N, comma separated
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
}

impl NoiseArgs {
    fn any(&self) -> bool {
        self.noise.is_some() || self.p.is_some() || self.n.is_some()
    }

    fn apply(&self, noise: &mut NoiseSpec) {
        if let Some(kind) = self.noise {
            noise.kind = kind;
        }
        if let Some(p) = self.p {
            noise.p = p;
        }
        if let Some(n) = &self.n {
            noise.n = n.clone();
        }
    }
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// xy exchange strength J
    #[arg(long)]
    j: Option<f64>,
    /// z exchange strength Jz (axis syntax allowed where swept)
    #[arg(long)]
    jz: Option<String>,
    /// xy anisotropy gamma
    #[arg(long)]
    gamma: Option<f64>,
    /// DM strength D: value, list v1,v2,..., or grid start:stop:count
    #[arg(long)]
    d: Option<String>,
    /// Drive strength omega
    #[arg(long)]
    omega: Option<f64>,
    /// Charging time t: value, list, or grid start:stop:count
    #[arg(long)]
    t: Option<String>,
}

#[derive(Debug, Args)]
struct SingleArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    noise: NoiseArgs,
    /// Drive phase axis: value, list, or grid start:stop:count
    #[arg(long = "omega-t")]
    omega_t: Option<String>,
}

#[derive(Debug, Args)]
struct TwoArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    noise: NoiseArgs,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Debug, Args)]
struct RegionsArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Debug, Args)]
struct MapArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    noise: NoiseArgs,
    #[command(flatten)]
    model: ModelArgs,
    /// Cross-check every k-th grid point against brute-force iteration
    #[arg(long = "brute-every", value_name = "K")]
    brute_every: Option<usize>,
}

#[derive(Debug, Args)]
struct DiagArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[command(flatten)]
    noise: NoiseArgs,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Randomized draws per suite
    #[arg(long)]
    draws: Option<usize>,
    /// RNG seed
    #[arg(long)]
    seed: Option<u64>,
}

/// Run the CLI against the given argv; returns the process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    EXIT_OK
                }
                _ => {
                    eprint!("{e}");
                    EXIT_VALIDATION
                }
            };
        }
    };
    match run_command(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_VALIDATION
        }
    }
}

fn run_command(command: Command) -> Result<i32, SweepError> {
    match command {
        Command::Single(args) => {
            let mut spec = SweepSpec::new(Experiment::SingleQubitNoise);
            spec.noise = Some(NoiseSpec::default());
            apply_config(&mut spec, &args.common, "single")?;
            apply_common(&mut spec, &args.common);
            let mut noise = spec.noise.take().unwrap_or_default();
            args.noise.apply(&mut noise);
            spec.noise = Some(noise);
            if let Some(text) = &args.omega_t {
                spec.params.omega_t = parse_axis_flag("omega_t", text)?;
            }
            execute(spec)
        }
        Command::Two(args) => {
            let mut spec = SweepSpec::new(Experiment::TwoQubitNoiseless);
            apply_config(&mut spec, &args.common, "two")?;
            apply_common(&mut spec, &args.common);
            apply_model_flags(&mut spec, &args.model)?;
            if args.noise.any() || spec.noise.is_some() {
                if spec.noise.is_none() && args.noise.noise.is_none() {
                    return Err(SweepError::InvalidSpec {
                        field: "noise.kind".into(),
                        reason: "give --noise pf|bf|ad to enable a noise protocol".into(),
                    });
                }
                let mut noise = spec.noise.take().unwrap_or_default();
                args.noise.apply(&mut noise);
                spec.noise = Some(noise);
            }
            if spec.noise.is_some() {
                spec.experiment = Experiment::TwoQubitNoise;
            }
            execute(spec)
        }
        Command::Regions(args) => {
            let mut spec = SweepSpec::new(Experiment::RegionMap);
            apply_config(&mut spec, &args.common, "regions")?;
            apply_common(&mut spec, &args.common);
            apply_model_flags(&mut spec, &args.model)?;
            execute(spec)
        }
        Command::Map(args) => {
            let mut spec = SweepSpec::new(Experiment::AsymptoticMap);
            spec.noise = Some(NoiseSpec {
                kind: NoiseKind::AmplitudeDamping,
                p: 0.1,
                n: vec![500],
            });
            apply_config(&mut spec, &args.common, "map")?;
            apply_common(&mut spec, &args.common);
            apply_model_flags(&mut spec, &args.model)?;
            let mut noise = spec.noise.take().unwrap_or_default();
            args.noise.apply(&mut noise);
            spec.noise = Some(noise);
            if args.brute_every.is_some() {
                spec.brute_every = args.brute_every;
            }
            execute(spec)
        }
        Command::Diag(args) => {
            let mut spec = SweepSpec::new(Experiment::DiagonalDistribution);
            spec.noise = Some(NoiseSpec {
                kind: NoiseKind::AmplitudeDamping,
                p: 0.1,
                n: vec![500],
            });
            apply_config(&mut spec, &args.common, "diag")?;
            apply_common(&mut spec, &args.common);
            apply_model_flags(&mut spec, &args.model)?;
            let mut noise = spec.noise.take().unwrap_or_default();
            args.noise.apply(&mut noise);
            spec.noise = Some(noise);
            execute(spec)
        }
        Command::Verify(args) => {
            let mut spec = SweepSpec::new(Experiment::Verify);
            apply_config(&mut spec, &args.common, "verify")?;
            apply_common(&mut spec, &args.common);
            if let Some(draws) = args.draws {
                spec.draws = draws;
            }
            if let Some(seed) = args.seed {
                spec.seed = seed;
            }
            execute(spec)
        }
    }
}

fn parse_axis_flag(field: &str, text: &str) -> Result<AxisSpec, SweepError> {
    AxisSpec::parse(text).map_err(|reason| SweepError::InvalidSpec {
        field: format!("params.{field}"),
        reason,
    })
}

fn apply_common(spec: &mut SweepSpec, common: &CommonArgs) {
    if let Some(out) = &common.out {
        spec.out = Some(out.clone());
    }
    if let Some(format) = common.format {
        spec.format = format;
    }
    if let Some(workers) = common.workers {
        spec.workers = Some(workers);
    }
}

fn apply_model_flags(spec: &mut SweepSpec, model: &ModelArgs) -> Result<(), SweepError> {
    if let Some(j) = model.j {
        spec.params.j = AxisSpec::Fixed(j);
    }
    if let Some(jz) = &model.jz {
        spec.params.jz = parse_axis_flag("jz", jz)?;
    }
    if let Some(gamma) = model.gamma {
        spec.params.gamma = AxisSpec::Fixed(gamma);
    }
    if let Some(d) = &model.d {
        spec.params.d = parse_axis_flag("d", d)?;
    }
    if let Some(omega) = model.omega {
        spec.params.omega = AxisSpec::Fixed(omega);
    }
    if let Some(t) = &model.t {
        spec.params.t = parse_axis_flag("t", t)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Config files

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    experiment: Option<String>,
    format: Option<String>,
    out: Option<PathBuf>,
    workers: Option<usize>,
    seed: Option<u64>,
    draws: Option<usize>,
    brute_every: Option<usize>,
    #[serde(default)]
    params: FileParams,
    noise: Option<FileNoise>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileParams {
    omega_t: Option<RawAxis>,
    j: Option<RawAxis>,
    jz: Option<RawAxis>,
    gamma: Option<RawAxis>,
    d: Option<RawAxis>,
    omega: Option<RawAxis>,
    t: Option<RawAxis>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawAxis {
    Number(f64),
    List(Vec<f64>),
    Grid { start: f64, stop: f64, count: usize },
    Text(String),
}

impl RawAxis {
    fn into_axis(self, field: &str) -> Result<AxisSpec, SweepError> {
        match self {
            RawAxis::Number(v) => Ok(AxisSpec::Fixed(v)),
            RawAxis::List(v) => Ok(AxisSpec::List(v)),
            RawAxis::Grid { start, stop, count } => Ok(AxisSpec::Grid { start, stop, count }),
            RawAxis::Text(text) => {
                AxisSpec::parse(&text).map_err(|reason| SweepError::InvalidSpec {
                    field: format!("params.{field}"),
                    reason,
                })
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(usize),
    Many(Vec<usize>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileNoise {
    kind: String,
    p: Option<f64>,
    n: Option<OneOrMany>,
}

fn apply_config(
    spec: &mut SweepSpec,
    common: &CommonArgs,
    canonical: &str,
) -> Result<(), SweepError> {
    let Some(path) = &common.config else {
        return Ok(());
    };
    let file = load_config(path)?;
    if let Some(experiment) = &file.experiment {
        if experiment != canonical {
            return Err(SweepError::Config {
                path: path.display().to_string(),
                reason: format!("config is for experiment '{experiment}', not '{canonical}'"),
            });
        }
    }
    if let Some(format) = &file.format {
        spec.format = format.parse().map_err(|reason| SweepError::Config {
            path: path.display().to_string(),
            reason,
        })?;
    }
    if let Some(out) = file.out {
        spec.out = Some(out);
    }
    if let Some(workers) = file.workers {
        spec.workers = Some(workers);
    }
    if let Some(seed) = file.seed {
        spec.seed = seed;
    }
    if let Some(draws) = file.draws {
        spec.draws = draws;
    }
    if let Some(stride) = file.brute_every {
        spec.brute_every = Some(stride);
    }
    let p = file.params;
    if let Some(ax) = p.omega_t {
        spec.params.omega_t = ax.into_axis("omega_t")?;
    }
    if let Some(ax) = p.j {
        spec.params.j = ax.into_axis("j")?;
    }
    if let Some(ax) = p.jz {
        spec.params.jz = ax.into_axis("jz")?;
    }
    if let Some(ax) = p.gamma {
        spec.params.gamma = ax.into_axis("gamma")?;
    }
    if let Some(ax) = p.d {
        spec.params.d = ax.into_axis("d")?;
    }
    if let Some(ax) = p.omega {
        spec.params.omega = ax.into_axis("omega")?;
    }
    if let Some(ax) = p.t {
        spec.params.t = ax.into_axis("t")?;
    }
    if let Some(file_noise) = file.noise {
        let kind: NoiseKind = file_noise
            .kind
            .parse()
            .map_err(|reason| SweepError::Config {
                path: path.display().to_string(),
                reason,
            })?;
        let base = spec.noise.take().unwrap_or_default();
        spec.noise = Some(NoiseSpec {
            kind,
            p: file_noise.p.unwrap_or(base.p),
            n: match file_noise.n {
                Some(OneOrMany::One(v)) => vec![v],
                Some(OneOrMany::Many(v)) => v,
                None => base.n,
            },
        });
    }
    Ok(())
}

fn load_config(path: &Path) -> Result<FileConfig, SweepError> {
    let text = fs::read_to_string(path).map_err(|e| SweepError::Config {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    toml::from_str(&text).map_err(|e| SweepError::Config {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

// ---------------------------------------------------------------------------
// Execution

fn execute(spec: SweepSpec) -> Result<i32, SweepError> {
    spec.validate()?;
    match spec.experiment {
        Experiment::Verify => {
            let results = verify::run_all(spec.draws, spec.seed);
            let mut failed = false;
            for suite in &results {
                println!(
                    "suite {}: {} cases, {} failures",
                    suite.name,
                    suite.cases,
                    suite.failures.len()
                );
                if !suite.passed() {
                    failed = true;
                    for message in suite.failures.iter().take(5) {
                        eprintln!("  {}: {}", suite.name, message);
                    }
                    if suite.failures.len() > 5 {
                        eprintln!(
                            "  {}: ... and {} more",
                            suite.name,
                            suite.failures.len() - 5
                        );
                    }
                }
            }
            if spec.out.is_some() {
                let mut table = Table::new(vec!["suite", "cases", "failures"]);
                for suite in &results {
                    table.rows.push(vec![
                        Cell::Str(suite.name.to_string()),
                        Cell::Int(suite.cases as i64),
                        Cell::Int(suite.failures.len() as i64),
                    ]);
                }
                write_output(&table, &spec)?;
            }
            Ok(if failed { EXIT_VERIFY_FAILED } else { EXIT_OK })
        }
        Experiment::RegionMap => {
            let params = XYZDMParams::new(
                spec.params.j.fixed().expect("validated"),
                spec.params.jz.fixed().expect("validated"),
                spec.params.gamma.fixed().expect("validated"),
                0.0,
                1.0,
            )
            .map_err(|e| SweepError::Engine(e.to_string()))?;
            let cv = critical_dmi(&params);
            println!("d_c = {}, d_c_prime = {}", cv.d_c, cv.d_c_prime);
            let table = run_sweep(&spec)?;
            write_output(&table, &spec)?;
            Ok(EXIT_OK)
        }
        _ => {
            let table = run_sweep(&spec)?;
            write_output(&table, &spec)?;
            Ok(EXIT_OK)
        }
    }
}

fn write_output(table: &Table, spec: &SweepSpec) -> Result<(), SweepError> {
    match &spec.out {
        Some(path) => {
            let surface = |e: std::io::Error| SweepError::Output {
                path: path.display().to_string(),
                reason: e.to_string(),
            };
            let file = fs::File::create(path).map_err(surface)?;
            let mut writer = std::io::BufWriter::new(file);
            emit(table, spec.format, &mut writer).map_err(surface)?;
            writer.flush().map_err(surface)?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            emit(table, spec.format, &mut lock)?;
        }
    }
    Ok(())
}
