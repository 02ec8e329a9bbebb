//! The `wsnsec` command line.
//!
//! Every run is first resolved into a [`commands::Plan`] with all defaults and
//! seeds filled in. When an output file is requested, that plan is written
//! next to it as `<output>.manifest`; `wsnsec rerun --manifest <file>` replays
//! it and reproduces the outputs byte for byte.

pub mod commands;
pub mod manifest;
pub mod plot;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use wsnsec_core::games::SecurityLevel;
use wsnsec_core::seed::derive_seed;
use wsnsec_core::sim::{parse_kv, SimConfig};

use commands::*;
use manifest::{manifest_path, Manifest};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Overrides the default master seed for runs that do not pin one.
pub const SEED_ENV: &str = "WSNSEC_SEED";
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "wsnsec", version, about = "Pseudorandom sensor scheduling toolkit", arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit Blum-Blum-Shub output bits.
    Bbs(BbsArgs),
    /// Evaluate the concrete security bound for a modulus size.
    Bound(BoundArgs),
    /// Build local or global wake schedules from a bit source.
    Sched(SchedArgs),
    /// Estimate distinguisher advantages against uniform bits.
    Distinguish(DistinguishArgs),
    /// Run IND/NM/DR games, or query the implication lattice.
    Games(GamesArgs),
    /// Run the sensor-field simulation.
    Simulate(SimulateArgs),
    /// Render a time-series CSV as an SVG line chart.
    Plot(PlotArgs),
    /// Replay a run from its manifest.
    Rerun(RerunArgs),
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Write the result here (plus `<path>.manifest`) instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BbsArgs {
    /// Modulus bit length.
    #[arg(long)]
    bits: Option<u64>,
    /// Entropy seed in hex; derived from the master seed when absent.
    #[arg(long)]
    seed: Option<String>,
    #[arg(long, default_value_t = 64)]
    length: usize,
    #[arg(long, value_enum, default_value_t = BbsEmit::Bits)]
    emit: BbsEmit,
    /// Explicit primes `p,q`. For tests and demonstrations only.
    #[arg(long, value_name = "P,Q")]
    unsafe_small_primes: Option<String>,
    /// Explicit initial value s (decimal); x0 = s^2 mod N.
    #[arg(long)]
    s: Option<String>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct BoundArgs {
    #[arg(long)]
    bits: u64,
    /// Output length M.
    #[arg(long)]
    m: u64,
    #[arg(long)]
    epsilon: f64,
    /// Attacker budget in clock cycles.
    #[arg(long)]
    attacker: f64,
    #[arg(long, value_enum, default_value_t = InterpArg::Literal)]
    interpretation: InterpArg,
    #[arg(long, value_enum, default_value_t = BoundEmit::Text)]
    emit: BoundEmit,
    /// Also report whether T/epsilon is at or below this value.
    #[arg(long)]
    ratio_threshold: Option<f64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct SchedArgs {
    #[arg(long, value_enum, default_value_t = SchedMode::Local)]
    mode: SchedMode,
    #[arg(long, value_enum, default_value_t = BitsFrom::Bbs)]
    bits_from: BitsFrom,
    /// Text file of 0/1 characters, for `--bits-from file`.
    #[arg(long)]
    bits_file: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    quantum: f64,
    #[arg(long, default_value_t = 128)]
    nodes: usize,
    /// Slots per node (local) or number of toggle orders (global).
    #[arg(long, default_value_t = 64)]
    slots: usize,
    #[arg(long, default_value_t = 512)]
    modulus_bits: u64,
    #[arg(long, value_enum, default_value_t = CsvEmit::Csv)]
    emit: CsvEmit,
    #[arg(long)]
    master_seed: Option<u64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct DistinguishArgs {
    #[arg(long, value_enum, default_value_t = DistSource::Bbs)]
    source: DistSource,
    /// Modulus bit length for the BBS source.
    #[arg(long, default_value_t = 512)]
    bits: u64,
    /// Sample length in bits.
    #[arg(long, default_value_t = 128)]
    m: usize,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, value_enum, default_value_t = Battery::Default)]
    battery: Battery,
    /// Rejection level for each test.
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = CsvEmit::Csv)]
    emit: CsvEmit,
    #[arg(long)]
    master_seed: Option<u64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
#[command(args_conflicts_with_subcommands = true)]
struct GamesArgs {
    #[command(subcommand)]
    action: Option<GamesAction>,
    #[arg(long, value_enum)]
    game: Option<GameArg>,
    #[arg(long, value_enum, default_value_t = SystemArg::Xor)]
    system: SystemArg,
    #[arg(long, value_enum, default_value_t = OracleArg::Na)]
    oracle: OracleArg,
    /// Whether the adversary gets the key (IND and DR only).
    #[arg(long, value_enum, default_value_t = ExposureArg::Both)]
    exposure: ExposureArg,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, value_enum, default_value_t = CsvEmit::Csv)]
    emit: CsvEmit,
    #[arg(long)]
    master_seed: Option<u64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Subcommand, Debug)]
enum GamesAction {
    /// Does security level FROM imply level TO?
    Implies {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Key-value config file; missing keys take their defaults.
    #[arg(long)]
    config: PathBuf,
    /// Trace CSV path (stdout when absent).
    #[arg(long, value_name = "PATH")]
    emit: Option<PathBuf>,
    /// Run BBS and LCG schedules on the same field and emit both traces.
    #[arg(long)]
    compare: bool,
    /// Also write an SVG chart of energy standard deviation.
    #[arg(long, value_name = "PATH")]
    plot: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PlotArgs {
    /// CSV whose first column is time.
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated series to draw; all by default.
    #[arg(long)]
    columns: Option<String>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct RerunArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Write outputs here, keeping their file names.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

/// Output locations of one run.
#[derive(Clone, Debug, Default)]
struct Targets {
    output: Option<PathBuf>,
    plot: Option<PathBuf>,
}

impl Targets {
    fn pairs(&self) -> Vec<(String, PathBuf)> {
        let mut v = Vec::new();
        if let Some(p) = &self.output {
            v.push(("output".to_string(), p.clone()));
        }
        if let Some(p) = &self.plot {
            v.push(("plot".to_string(), p.clone()));
        }
        v
    }
}

fn default_seed(env_seed: Option<&str>) -> Result<u64, CliError> {
    match env_seed {
        None => Ok(DEFAULT_SEED),
        Some(s) => s
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{SEED_ENV}: `{s}` is not an unsigned integer"))),
    }
}

fn parse_level(s: &str) -> Result<SecurityLevel, CliError> {
    s.parse().map_err(|e: wsnsec_core::games::GameError| CliError::Usage(e.to_string()))
}

fn load_sim_config(path: &Path, seed: u64) -> Result<SimConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    let pairs = parse_kv(&text).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    let base = SimConfig {
        master_seed: seed,
        ..SimConfig::default()
    };
    base.with_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn resolve(cmd: Command, env_seed: Option<&str>) -> Result<(Plan, Targets), CliError> {
    let seed = |explicit: Option<u64>| explicit.map_or_else(|| default_seed(env_seed), Ok);
    Ok(match cmd {
        Command::Bbs(a) => {
            let seed_hex = match a.seed {
                Some(h) => h.to_ascii_lowercase(),
                None => hex::encode(derive_seed(seed(None)?, "cli/bbs", 0)),
            };
            let plan = BbsPlan {
                bits: a.bits,
                seed_hex,
                length: a.length,
                emit: a.emit,
                small_primes: a.unsafe_small_primes.as_deref().map(parse_pair).transpose()?,
                s: a.s,
            };
            if plan.bits.is_none() && plan.small_primes.is_none() {
                return Err(CliError::Usage("bbs needs --bits or --unsafe-small-primes".into()));
            }
            (
                Plan::Bbs(plan),
                Targets {
                    output: a.out.output,
                    plot: None,
                },
            )
        }
        Command::Bound(a) => (
            Plan::Bound(BoundPlan {
                bits: a.bits,
                m: a.m,
                epsilon: a.epsilon,
                attacker: a.attacker,
                interpretation: a.interpretation,
                emit: a.emit,
                ratio_threshold: a.ratio_threshold,
            }),
            Targets {
                output: a.out.output,
                plot: None,
            },
        ),
        Command::Sched(a) => (
            Plan::Sched(SchedPlan {
                mode: a.mode,
                bits_from: a.bits_from,
                bits_file: a.bits_file,
                quantum: a.quantum,
                nodes: a.nodes,
                slots: a.slots,
                modulus_bits: a.modulus_bits,
                master_seed: seed(a.master_seed)?,
            }),
            Targets {
                output: a.out.output,
                plot: None,
            },
        ),
        Command::Distinguish(a) => (
            Plan::Distinguish(DistinguishPlan {
                source: a.source,
                bits: a.bits,
                m: a.m,
                trials: a.trials,
                battery: a.battery,
                alpha: a.alpha,
                master_seed: seed(a.master_seed)?,
            }),
            Targets {
                output: a.out.output,
                plot: None,
            },
        ),
        Command::Games(a) => match a.action {
            Some(GamesAction::Implies { from, to, out }) => (
                Plan::Implies(ImpliesPlan {
                    from: parse_level(&from)?,
                    to: parse_level(&to)?,
                }),
                Targets {
                    output: out.output,
                    plot: None,
                },
            ),
            None => {
                let game = a
                    .game
                    .ok_or_else(|| CliError::Usage("games needs --game ind|nm|dr or the `implies` subcommand".into()))?;
                (
                    Plan::Games(GamesPlan {
                        game,
                        system: a.system,
                        oracle: a.oracle,
                        exposure: a.exposure,
                        trials: a.trials,
                        master_seed: seed(a.master_seed)?,
                    }),
                    Targets {
                        output: a.out.output,
                        plot: None,
                    },
                )
            }
        },
        Command::Simulate(a) => (
            Plan::Simulate(SimulatePlan {
                config: load_sim_config(&a.config, seed(None)?)?,
                compare: a.compare,
            }),
            Targets {
                output: a.emit,
                plot: a.plot,
            },
        ),
        Command::Plot(a) => (
            Plan::Plot(PlotPlan {
                input: a.input,
                columns: a.columns.map(|c| c.split(',').map(|s| s.trim().to_string()).collect()),
            }),
            Targets {
                output: a.out.output,
                plot: None,
            },
        ),
        Command::Rerun(a) => {
            let text = std::fs::read_to_string(&a.manifest)
                .map_err(|e| CliError::Runtime(format!("{}: {e}", a.manifest.display())))?;
            let m = Manifest::parse(&text)?;
            let plan = Plan::from_manifest(&m)?;
            let relocate = |p: &Path| match &a.output_dir {
                Some(dir) => dir.join(p.file_name().unwrap_or(p.as_os_str())),
                None => p.to_path_buf(),
            };
            let targets = Targets {
                output: m.output("output").map(relocate),
                plot: m.output("plot").map(relocate),
            };
            (plan, targets)
        }
    })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Runtime(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, contents).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn execute(plan: &Plan, targets: &Targets, out: &mut dyn Write) -> Result<(), CliError> {
    let r = plan.execute()?;
    let io = |e: std::io::Error| CliError::Runtime(e.to_string());
    match &targets.output {
        Some(p) => write_file(p, &r.primary)?,
        None => out.write_all(r.primary.as_bytes()).map_err(io)?,
    }
    if let (Some(p), Some(svg)) = (&targets.plot, &r.plot) {
        write_file(p, svg)?;
    }
    if let Some(anchor) = targets.output.as_ref().or(targets.plot.as_ref()) {
        write_file(&manifest_path(anchor), &plan.to_manifest(targets.pairs()).render())?;
        out.write_all(r.note.as_bytes()).map_err(io)?;
    }
    Ok(())
}

/// Runs the CLI with an explicit seed override instead of reading the
/// environment. Returns the process exit code.
pub fn dispatch_with(args: &[String], env_seed: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(std::iter::once("wsnsec".to_string()).chain(args.iter().cloned())) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    1
                }
            };
        }
    };
    let result = resolve(cli.command, env_seed).and_then(|(plan, targets)| execute(&plan, &targets, out));
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Entry point used by the binary: reads the seed override from the
/// environment.
pub fn dispatch(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let env = std::env::var(SEED_ENV).ok();
    dispatch_with(args, env.as_deref(), out, err)
}
