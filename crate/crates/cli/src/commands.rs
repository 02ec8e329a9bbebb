//! Resolved runs. Every flag is fixed before anything executes so the same
//! plan can be written to a manifest and replayed from it.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use clap::ValueEnum;
use serde_json::json;

use wsnsec_core::bbs::{derive_seed_value, generate_params, seed_state, BbsParams};
use wsnsec_core::bound::{is_secure_against, Interpretation, SecurityQuery};
use wsnsec_core::distinguish::{
    default_suite, run_suite, DistinguishError, Distinguisher, RunOptions, MIN_BATTERY_LEN,
};
use wsnsec_core::games::{
    dr_game, dr_suite, implies, ind_game, ind_suite, nm_game, nm_suite, reference_system, FlipBitRelation,
    GameConfig, GameKind, GameResult, IdentityRelation, KeyExposure, OracleModel, Relation, SecurityLevel,
    SupportSet, MESSAGE_LEN,
};
use wsnsec_core::sched::{block_width, global_schedule};
use wsnsec_core::seed::derive_seed;
use wsnsec_core::sim::{self, SimConfig};
use wsnsec_core::source::{parse_bit_text, LcgParams, SourceSpec};

use crate::manifest::Manifest;
use crate::plot::emit_plot;
use crate::{CliError, VERSION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BbsEmit {
    Hex,
    Bits,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InterpArg {
    Grouped,
    Literal,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BoundEmit {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchedMode {
    Local,
    Global,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BitsFrom {
    Bbs,
    Lcg,
    File,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DistSource {
    Bbs,
    Lcg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Battery {
    Default,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CsvEmit {
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GameArg {
    Ind,
    Nm,
    Dr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SystemArg {
    Xor,
    Broken,
    Clear,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OracleArg {
    Na,
    Ad1,
    Ad2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExposureArg {
    Literal,
    Withheld,
    Both,
}

fn name_of<E: ValueEnum>(v: E) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_string()
}

/// Typed access to `arg.*` entries of a manifest.
struct Args<'a>(BTreeMap<&'a str, &'a str>);

impl Args<'_> {
    fn raw(&self, k: &str) -> Result<&str, CliError> {
        self.0
            .get(k)
            .copied()
            .ok_or_else(|| CliError::Runtime(format!("manifest: missing arg.{k}")))
    }

    fn req<T: FromStr>(&self, k: &str) -> Result<T, CliError> {
        let v = self.raw(k)?;
        v.parse()
            .map_err(|_| CliError::Runtime(format!("manifest: bad value `{v}` for arg.{k}")))
    }

    fn opt<T: FromStr>(&self, k: &str) -> Result<Option<T>, CliError> {
        match self.0.get(k) {
            None => Ok(None),
            Some(_) => self.req(k).map(Some),
        }
    }

    fn choice<E: ValueEnum>(&self, k: &str) -> Result<E, CliError> {
        let v = self.raw(k)?;
        E::from_str(v, false).map_err(|_| CliError::Runtime(format!("manifest: bad value `{v}` for arg.{k}")))
    }
}

fn runtime<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

pub struct Rendered {
    pub primary: String,
    pub plot: Option<String>,
    /// Human-readable summary printed alongside file outputs.
    pub note: String,
}

impl Rendered {
    fn just(primary: String) -> Self {
        Self {
            primary,
            plot: None,
            note: String::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BbsPlan {
    pub bits: Option<u64>,
    pub seed_hex: String,
    pub length: usize,
    pub emit: BbsEmit,
    pub small_primes: Option<(u64, u64)>,
    pub s: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundPlan {
    pub bits: u64,
    pub m: u64,
    pub epsilon: f64,
    pub attacker: f64,
    pub interpretation: InterpArg,
    pub emit: BoundEmit,
    pub ratio_threshold: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchedPlan {
    pub mode: SchedMode,
    pub bits_from: BitsFrom,
    pub bits_file: Option<PathBuf>,
    pub quantum: f64,
    pub nodes: usize,
    pub slots: usize,
    pub modulus_bits: u64,
    pub master_seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DistinguishPlan {
    pub source: DistSource,
    pub bits: u64,
    pub m: usize,
    pub trials: usize,
    pub battery: Battery,
    pub alpha: f64,
    pub master_seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GamesPlan {
    pub game: GameArg,
    pub system: SystemArg,
    pub oracle: OracleArg,
    pub exposure: ExposureArg,
    pub trials: usize,
    pub master_seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ImpliesPlan {
    pub from: SecurityLevel,
    pub to: SecurityLevel,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulatePlan {
    pub config: SimConfig,
    pub compare: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlotPlan {
    pub input: PathBuf,
    pub columns: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Plan {
    Bbs(BbsPlan),
    Bound(BoundPlan),
    Sched(SchedPlan),
    Distinguish(DistinguishPlan),
    Games(GamesPlan),
    Implies(ImpliesPlan),
    Simulate(SimulatePlan),
    Plot(PlotPlan),
}

impl Plan {
    pub fn subcommand(&self) -> &'static str {
        match self {
            Plan::Bbs(_) => "bbs",
            Plan::Bound(_) => "bound",
            Plan::Sched(_) => "sched",
            Plan::Distinguish(_) => "distinguish",
            Plan::Games(_) => "games",
            Plan::Implies(_) => "games-implies",
            Plan::Simulate(_) => "simulate",
            Plan::Plot(_) => "plot",
        }
    }

    fn master_seed(&self) -> Option<u64> {
        match self {
            Plan::Sched(p) => Some(p.master_seed),
            Plan::Distinguish(p) => Some(p.master_seed),
            Plan::Games(p) => Some(p.master_seed),
            Plan::Simulate(p) => Some(p.config.master_seed),
            _ => None,
        }
    }

    fn args(&self) -> Vec<(String, String)> {
        let mut a: Vec<(&str, String)> = Vec::new();
        match self {
            Plan::Bbs(p) => {
                if let Some(b) = p.bits {
                    a.push(("bits", b.to_string()));
                }
                a.push(("seed", p.seed_hex.clone()));
                a.push(("length", p.length.to_string()));
                a.push(("emit", name_of(p.emit)));
                if let Some((x, y)) = p.small_primes {
                    a.push(("unsafe_small_primes", format!("{x},{y}")));
                }
                if let Some(s) = &p.s {
                    a.push(("s", s.clone()));
                }
            }
            Plan::Bound(p) => {
                a.push(("bits", p.bits.to_string()));
                a.push(("m", p.m.to_string()));
                a.push(("epsilon", p.epsilon.to_string()));
                a.push(("attacker", p.attacker.to_string()));
                a.push(("interpretation", name_of(p.interpretation)));
                a.push(("emit", name_of(p.emit)));
                if let Some(r) = p.ratio_threshold {
                    a.push(("ratio_threshold", r.to_string()));
                }
            }
            Plan::Sched(p) => {
                a.push(("mode", name_of(p.mode)));
                a.push(("bits_from", name_of(p.bits_from)));
                if let Some(f) = &p.bits_file {
                    a.push(("bits_file", f.display().to_string()));
                }
                a.push(("quantum", p.quantum.to_string()));
                a.push(("nodes", p.nodes.to_string()));
                a.push(("slots", p.slots.to_string()));
                a.push(("modulus_bits", p.modulus_bits.to_string()));
            }
            Plan::Distinguish(p) => {
                a.push(("source", name_of(p.source)));
                a.push(("bits", p.bits.to_string()));
                a.push(("m", p.m.to_string()));
                a.push(("trials", p.trials.to_string()));
                a.push(("battery", name_of(p.battery)));
                a.push(("alpha", p.alpha.to_string()));
            }
            Plan::Games(p) => {
                a.push(("game", name_of(p.game)));
                a.push(("system", name_of(p.system)));
                a.push(("oracle", name_of(p.oracle)));
                a.push(("exposure", name_of(p.exposure)));
                a.push(("trials", p.trials.to_string()));
            }
            Plan::Implies(p) => {
                a.push(("from", p.from.to_string()));
                a.push(("to", p.to.to_string()));
            }
            Plan::Simulate(p) => {
                a.push(("compare", p.compare.to_string()));
            }
            Plan::Plot(p) => {
                a.push(("input", p.input.display().to_string()));
                if let Some(c) = &p.columns {
                    a.push(("columns", c.join(",")));
                }
            }
        }
        a.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    pub fn to_manifest(&self, outputs: Vec<(String, PathBuf)>) -> Manifest {
        Manifest {
            subcommand: self.subcommand().into(),
            tool_version: VERSION.into(),
            master_seed: self.master_seed(),
            outputs,
            args: self.args(),
            config: match self {
                Plan::Simulate(p) => p.config.to_pairs().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
                _ => Vec::new(),
            },
        }
    }

    pub fn from_manifest(m: &Manifest) -> Result<Self, CliError> {
        let a = Args(m.arg_map());
        let seed = || {
            m.master_seed
                .ok_or_else(|| CliError::Runtime("manifest: missing master_seed".into()))
        };
        Ok(match m.subcommand.as_str() {
            "bbs" => Plan::Bbs(BbsPlan {
                bits: a.opt("bits")?,
                seed_hex: a.req("seed")?,
                length: a.req("length")?,
                emit: a.choice("emit")?,
                small_primes: a.opt::<String>("unsafe_small_primes")?.map(|s| parse_pair(&s)).transpose()?,
                s: a.opt("s")?,
            }),
            "bound" => Plan::Bound(BoundPlan {
                bits: a.req("bits")?,
                m: a.req("m")?,
                epsilon: a.req("epsilon")?,
                attacker: a.req("attacker")?,
                interpretation: a.choice("interpretation")?,
                emit: a.choice("emit")?,
                ratio_threshold: a.opt("ratio_threshold")?,
            }),
            "sched" => Plan::Sched(SchedPlan {
                mode: a.choice("mode")?,
                bits_from: a.choice("bits_from")?,
                bits_file: a.opt("bits_file")?,
                quantum: a.req("quantum")?,
                nodes: a.req("nodes")?,
                slots: a.req("slots")?,
                modulus_bits: a.req("modulus_bits")?,
                master_seed: seed()?,
            }),
            "distinguish" => Plan::Distinguish(DistinguishPlan {
                source: a.choice("source")?,
                bits: a.req("bits")?,
                m: a.req("m")?,
                trials: a.req("trials")?,
                battery: a.choice("battery")?,
                alpha: a.req("alpha")?,
                master_seed: seed()?,
            }),
            "games" => Plan::Games(GamesPlan {
                game: a.choice("game")?,
                system: a.choice("system")?,
                oracle: a.choice("oracle")?,
                exposure: a.choice("exposure")?,
                trials: a.req("trials")?,
                master_seed: seed()?,
            }),
            "games-implies" => Plan::Implies(ImpliesPlan {
                from: a.req::<String>("from")?.parse().map_err(runtime)?,
                to: a.req::<String>("to")?.parse().map_err(runtime)?,
            }),
            "simulate" => {
                let pairs = m.config.iter().map(|(k, v)| (k.as_str(), v.as_str()));
                Plan::Simulate(SimulatePlan {
                    config: SimConfig::default().with_pairs(pairs).map_err(runtime)?,
                    compare: a.req("compare")?,
                })
            }
            "plot" => Plan::Plot(PlotPlan {
                input: a.req("input")?,
                columns: a
                    .opt::<String>("columns")?
                    .map(|c| c.split(',').map(str::to_string).collect()),
            }),
            other => return Err(CliError::Runtime(format!("manifest: unknown subcommand `{other}`"))),
        })
    }

    pub fn execute(&self) -> Result<Rendered, CliError> {
        match self {
            Plan::Bbs(p) => run_bbs(p),
            Plan::Bound(p) => run_bound(p),
            Plan::Sched(p) => run_sched(p),
            Plan::Distinguish(p) => run_distinguish(p),
            Plan::Games(p) => run_games(p),
            Plan::Implies(p) => Ok(Rendered::just(format!(
                "{} => {}: {}\n",
                p.from,
                p.to,
                implies(p.from, p.to)
            ))),
            Plan::Simulate(p) => run_simulate(p),
            Plan::Plot(p) => {
                let text = std::fs::read_to_string(&p.input)
                    .map_err(|e| CliError::Runtime(format!("{}: {e}", p.input.display())))?;
                Ok(Rendered::just(emit_plot(&text, p.columns.as_deref()).map_err(runtime)?))
            }
        }
    }
}

pub fn parse_pair(s: &str) -> Result<(u64, u64), CliError> {
    let bad = || CliError::Usage(format!("expected `p,q`, got `{s}`"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn bbs_params(p: &BbsPlan, entropy: &[u8]) -> Result<BbsParams, CliError> {
    match (p.small_primes, p.bits) {
        (Some((x, y)), _) => BbsParams::from_primes(x, y).map_err(runtime),
        (None, Some(bits)) => generate_params(bits, entropy).map_err(runtime),
        (None, None) => Err(CliError::Usage("bbs needs --bits or --unsafe-small-primes".into())),
    }
}

fn run_bbs(p: &BbsPlan) -> Result<Rendered, CliError> {
    let entropy = hex::decode(&p.seed_hex).map_err(|e| CliError::Usage(format!("--seed: {e}")))?;
    if entropy.is_empty() {
        return Err(CliError::Usage("--seed must not be empty".into()));
    }
    let params = bbs_params(p, &entropy)?;
    let s = match &p.s {
        Some(v) => v.parse().map_err(|_| CliError::Usage(format!("--s: `{v}` is not a decimal integer")))?,
        None => derive_seed_value(&params, &entropy),
    };
    let mut st = seed_state(&params, &s).map_err(runtime)?;
    let mut out = String::new();
    match p.emit {
        BbsEmit::Bits => {
            out.extend(st.generate(p.length).into_iter().map(|b| if b { '1' } else { '0' }));
            out.push('\n');
        }
        BbsEmit::Hex => {
            let bits = st.generate(p.length);
            let bytes: Vec<u8> = bits
                .chunks(8)
                .map(|c| c.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | ((b as u8) << (7 - i))))
                .collect();
            out.push_str(&hex::encode(bytes));
            out.push('\n');
        }
        BbsEmit::Csv => {
            out.push_str("index,x,bit\n");
            for i in 0..p.length {
                let b = st.next_bit();
                let _ = writeln!(out, "{i},{},{}", st.x(), b as u8);
            }
        }
    }
    Ok(Rendered {
        primary: out,
        plot: None,
        note: format!("modulus_bits={}\n", params.bit_length()),
    })
}

fn interpretations(i: InterpArg) -> Vec<Interpretation> {
    match i {
        InterpArg::Grouped => vec![Interpretation::Grouped],
        InterpArg::Literal => vec![Interpretation::Literal],
        InterpArg::Both => Interpretation::ALL.to_vec(),
    }
}

fn run_bound(p: &BoundPlan) -> Result<Rendered, CliError> {
    let q = SecurityQuery {
        n_bits: p.bits,
        m_len: p.m,
        epsilon: p.epsilon,
        attacker_cycles: p.attacker,
    };
    q.validate().map_err(CliError::Usage)?;
    let reports: Vec<_> = interpretations(p.interpretation)
        .into_iter()
        .map(|i| is_secure_against(q, i))
        .collect();
    let ratio = |r: &wsnsec_core::BoundReport| p.ratio_threshold.map(|t| r.ratio_within(t));
    let mut out = String::new();
    match p.emit {
        BoundEmit::Text => {
            for r in &reports {
                let _ = writeln!(out, "interpretation: {}", r.interpretation.as_str());
                let _ = writeln!(out, "  factoring cost L: {} cycles", r.gnfs_cost);
                let _ = writeln!(out, "  t_max: {} cycles", r.t_max);
                let _ = writeln!(out, "  t_max (log-domain): {}", r.t_max_log.to_ext());
                let _ = writeln!(out, "  route disagreement: {:.3e}", r.route_disagreement());
                let _ = writeln!(
                    out,
                    "  attacker: {} cycles at epsilon {} (T/eps = {:e})",
                    q.attacker_cycles, q.epsilon, r.time_success_ratio
                );
                if let Some(ok) = ratio(r) {
                    let _ = writeln!(out, "  T/eps within threshold: {ok}");
                }
                let _ = writeln!(out, "  verdict: {}", r.verdict.as_str());
            }
        }
        BoundEmit::Csv => {
            out.push_str("interpretation,n_bits,m_len,epsilon,attacker_cycles,gnfs_cost,log10_gnfs_cost,t_max,t_max_negative,log10_abs_t_max,route_disagreement,time_success_ratio,ratio_within,verdict\n");
            for r in &reports {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{:e},{},{:.12},{},{},{:.12},{:.3e},{:e},{},{}",
                    r.interpretation.as_str(),
                    q.n_bits,
                    q.m_len,
                    q.epsilon,
                    q.attacker_cycles,
                    r.gnfs_cost,
                    r.gnfs_cost.log10_abs(),
                    r.t_max,
                    r.t_max.is_sign_negative(),
                    r.t_max.log10_abs(),
                    r.route_disagreement(),
                    r.time_success_ratio,
                    ratio(r).map(|b| b.to_string()).unwrap_or_default(),
                    r.verdict.as_str()
                );
            }
        }
        BoundEmit::Json => {
            let items: Vec<_> = reports
                .iter()
                .map(|r| {
                    json!({
                        "interpretation": r.interpretation.as_str(),
                        "gnfs_cost": r.gnfs_cost.to_string(),
                        "log10_gnfs_cost": r.gnfs_cost.log10_abs(),
                        "t_max": r.t_max.to_string(),
                        "t_max_negative": r.t_max.is_sign_negative(),
                        "log10_abs_t_max": r.t_max.log10_abs(),
                        "route_disagreement": r.route_disagreement(),
                        "time_success_ratio": r.time_success_ratio,
                        "ratio_within": ratio(r),
                        "verdict": r.verdict.as_str(),
                    })
                })
                .collect();
            let doc = json!({
                "query": {
                    "n_bits": q.n_bits,
                    "m_len": q.m_len,
                    "epsilon": q.epsilon,
                    "attacker_cycles": q.attacker_cycles,
                },
                "reports": items,
            });
            out = serde_json::to_string_pretty(&doc).map_err(runtime)? + "\n";
        }
    }
    Ok(Rendered::just(out))
}

fn sched_source(p: &SchedPlan) -> Result<SourceSpec, CliError> {
    Ok(match p.bits_from {
        BitsFrom::Lcg => SourceSpec::Lcg(LcgParams::default()),
        BitsFrom::Bbs => {
            let entropy = derive_seed(p.master_seed, "cli/sched/modulus", 0);
            SourceSpec::Bbs(Arc::new(generate_params(p.modulus_bits, &entropy).map_err(runtime)?))
        }
        BitsFrom::File => {
            let path = p
                .bits_file
                .as_ref()
                .ok_or_else(|| CliError::Usage("--bits-from file needs --bits-file".into()))?;
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
            let bits = parse_bit_text(&text)
                .map_err(|c| CliError::Runtime(format!("{}: unexpected character `{c}`", path.display())))?;
            if bits.is_empty() {
                return Err(CliError::Runtime(format!("{}: no bits", path.display())));
            }
            SourceSpec::File(Arc::new(bits))
        }
    })
}

fn run_sched(p: &SchedPlan) -> Result<Rendered, CliError> {
    if p.nodes == 0 || p.slots == 0 || !(p.quantum > 0.0) {
        return Err(CliError::Usage("--nodes, --slots and --quantum must be positive".into()));
    }
    let src = sched_source(p)?;
    let mut out = String::new();
    match p.mode {
        SchedMode::Local => {
            out.push_str("node_id,slot,time,awake\n");
            for node in 0..p.nodes {
                let bits = src
                    .instantiate(derive_seed(p.master_seed, "cli/sched/node", node as u64), node as u64, p.slots)
                    .take_bits(p.slots);
                for (k, b) in bits.into_iter().enumerate() {
                    let _ = writeln!(out, "{node},{k},{},{}", k as f64 * p.quantum, b as u8);
                }
            }
        }
        SchedMode::Global => {
            // generous cap so a pathological source cannot spin forever
            let cap = p.slots * block_width(p.nodes) * 64;
            let bits = src
                .instantiate(derive_seed(p.master_seed, "cli/sched/global", 0), 0, cap)
                .take_bits(cap);
            let orders: Vec<_> = global_schedule(&bits, p.nodes).into_iter().take(p.slots).collect();
            if orders.len() < p.slots {
                return Err(CliError::Runtime(format!(
                    "bitstream yielded only {} valid toggle orders out of {}",
                    orders.len(),
                    p.slots
                )));
            }
            out.push_str("time_slot,time,node_id\n");
            for o in orders {
                let _ = writeln!(out, "{},{},{}", o.time_slot, o.time_slot as f64 * p.quantum, o.node_id);
            }
        }
    }
    Ok(Rendered::just(out))
}

fn run_distinguish(p: &DistinguishPlan) -> Result<Rendered, CliError> {
    if p.m < MIN_BATTERY_LEN {
        let e = DistinguishError::SequenceTooShort {
            got: p.m,
            min: MIN_BATTERY_LEN,
        };
        return Err(CliError::Usage(e.to_string()));
    }
    let source = match p.source {
        DistSource::Lcg => SourceSpec::Lcg(LcgParams::default()),
        DistSource::Bbs => {
            let entropy = derive_seed(p.master_seed, "cli/distinguish/modulus", 0);
            SourceSpec::Bbs(Arc::new(generate_params(p.bits, &entropy).map_err(runtime)?))
        }
    };
    let suite = match p.battery {
        Battery::Default => default_suite(p.alpha),
    };
    let refs: Vec<&dyn Distinguisher> = suite.iter().map(|d| d.as_ref()).collect();
    let opts = RunOptions {
        m_len: p.m,
        trials: p.trials,
        master_seed: p.master_seed,
        budget: None,
    };
    let est = run_suite(&refs, &source, &opts).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut out = String::from("test_name,trials,p1_hat,p2_hat,advantage,ci95\n");
    for e in &est {
        let _ = writeln!(
            out,
            "{},{},{:.6},{:.6},{:.6},{:.6}",
            e.name, e.trials, e.p1_hat, e.p2_hat, e.raw_advantage, e.ci_halfwidth
        );
    }
    Ok(Rendered::just(out))
}

fn game_row(out: &mut String, r: &GameResult, exposure: &str, relation: &str) {
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{},{},{},{:.6},{:.6},{:.6}",
        r.game.as_str(),
        r.system,
        r.oracle.as_str(),
        exposure,
        r.adversary,
        relation,
        r.trials,
        r.successes,
        r.invalidated,
        r.success_prob,
        r.normalized_advantage,
        r.ci_halfwidth
    );
}

fn run_games(p: &GamesPlan) -> Result<Rendered, CliError> {
    if p.trials == 0 {
        return Err(CliError::Usage("--trials must be positive".into()));
    }
    let system = reference_system(&name_of(p.system)).map_err(runtime)?;
    let oracle: OracleModel = name_of(p.oracle).parse().map_err(runtime)?;
    let exposures = match p.exposure {
        ExposureArg::Literal => vec![KeyExposure::Literal],
        ExposureArg::Withheld => vec![KeyExposure::Withheld],
        ExposureArg::Both => vec![KeyExposure::Literal, KeyExposure::Withheld],
    };
    let supports = SupportSet::generate(64, system.support_len(), p.master_seed);
    let game: GameKind = name_of(p.game).parse().map_err(runtime)?;
    let mut out = String::from(
        "game,system,oracle,exposure,adversary,relation,trials,successes,invalidated,success_prob,normalized_advantage,ci95\n",
    );
    let cfg = |exposure| GameConfig {
        oracle,
        exposure,
        trials: p.trials,
        master_seed: p.master_seed,
    };
    match game {
        GameKind::Ind => {
            for e in exposures {
                for a in ind_suite() {
                    game_row(&mut out, &ind_game(system.as_ref(), a.as_ref(), &cfg(e)), e.as_str(), "");
                }
            }
        }
        GameKind::Dr => {
            for e in exposures {
                for a in dr_suite() {
                    game_row(&mut out, &dr_game(system.as_ref(), a.as_ref(), &supports, &cfg(e)), e.as_str(), "");
                }
            }
        }
        GameKind::Nm => {
            // the forger never sees the key, so exposure does not apply
            let message = derive_seed(p.master_seed, "cli/games/message", 0)[..MESSAGE_LEN].to_vec();
            let relations: Vec<Box<dyn Relation>> =
                vec![Box::new(IdentityRelation), Box::new(FlipBitRelation { bit: 0 })];
            for a in nm_suite() {
                for rel in &relations {
                    let r = nm_game(
                        system.as_ref(),
                        a.as_ref(),
                        rel.as_ref(),
                        &message,
                        &supports,
                        &cfg(KeyExposure::Withheld),
                    );
                    game_row(&mut out, &r, "none", &rel.name());
                }
            }
        }
    }
    Ok(Rendered::just(out))
}

fn run_simulate(p: &SimulatePlan) -> Result<Rendered, CliError> {
    if p.compare {
        let c = sim::compare_schedulers(&p.config).map_err(runtime)?;
        for o in [&c.first, &c.second] {
            sim::verify_all(o).map_err(|e| CliError::Runtime(format!("invalid trace: {e}")))?;
        }
        let csv = c.to_csv();
        let cols: Vec<String> = csv
            .lines()
            .next()
            .unwrap_or("")
            .split(',')
            .filter(|h| h.ends_with("_energy_stddev"))
            .map(str::to_string)
            .collect();
        Ok(Rendered {
            plot: Some(emit_plot(&csv, Some(&cols)).map_err(runtime)?),
            primary: csv,
            note: c.summary_text(),
        })
    } else {
        let o = sim::run(&p.config).map_err(runtime)?;
        sim::verify_all(&o).map_err(|e| CliError::Runtime(format!("invalid trace: {e}")))?;
        let csv = o.trace.to_csv();
        let u = sim::wake_uniformity(&o.scheduled_awake, p.config.slots());
        Ok(Rendered {
            plot: Some(emit_plot(&csv, Some(&["energy_stddev".to_string()])).map_err(runtime)?),
            primary: csv,
            note: format!(
                "{}: mean_energy_stddev={:.6} wake_chi2={:.4} df={} p={:.6}\n",
                p.config.scheduler.as_str(),
                o.trace.mean_energy_stddev(),
                u.statistic,
                u.df,
                u.p_value
            ),
        })
    }
}
