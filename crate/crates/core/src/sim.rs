//! Deterministic duty-cycle simulation of a sensor field.
//!
//! Time advances in fixed slots of `quantum` seconds. In each slot the
//! scheduler decides which nodes are awake, point intrusions arrive as a
//! Poisson process, an intrusion is detected iff an awake, alive node lies
//! within `sensing_radius`, and every node pays the energy cost of its state.
//! Energy is tracked in integer micro-units so that per-node conservation is
//! exact. A row of field statistics is recorded every `sample_period`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Poisson};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

use crate::bbs::{generate_params, BbsError};
use crate::sched::ToggleDecoder;
use crate::seed::{derive_rng, derive_seed};
use crate::source::{BitStream, LcgParams, SourceSpec};

/// Energy units per unit in the integer ledger.
pub const MICRO: f64 = 1e6;

pub const TRACE_HEADER: &str =
    "time,active_fraction,alive_fraction,energy_mean,energy_stddev,detections_cum,intrusions_cum";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    Value { key: String, value: String, reason: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error(transparent)]
    Bbs(#[from] BbsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheduler {
    Bbs,
    Lcg,
    AlwaysAwake,
}

impl Scheduler {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheduler::Bbs => "bbs",
            Scheduler::Lcg => "lcg",
            Scheduler::AlwaysAwake => "always-awake",
        }
    }
}

impl FromStr for Scheduler {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "bbs" => Ok(Scheduler::Bbs),
            "lcg" => Ok(Scheduler::Lcg),
            "always-awake" => Ok(Scheduler::AlwaysAwake),
            _ => Err("expected bbs|lcg|always-awake".into()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScheduleMode {
    Local,
    Global,
}

impl ScheduleMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ScheduleMode::Local => "local",
            ScheduleMode::Global => "global",
        }
    }
}

impl FromStr for ScheduleMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "local" => Ok(ScheduleMode::Local),
            "global" => Ok(ScheduleMode::Global),
            _ => Err("expected local|global".into()),
        }
    }
}

/// Simulation parameters. Energy figures are in abstract units; the defaults
/// are arbitrary but fixed so runs are comparable.
#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub area_width: f64,
    pub area_height: f64,
    pub node_count: usize,
    pub initial_energy: f64,
    /// Units per second while awake.
    pub awake_cost: f64,
    /// Units per second while asleep.
    pub asleep_cost: f64,
    /// Units per detection report sent.
    pub radio_cost: f64,
    pub sensing_radius: f64,
    pub quantum: f64,
    pub horizon: f64,
    pub sample_period: f64,
    /// Intrusions per second over the whole field.
    pub intrusion_rate: f64,
    pub scheduler: Scheduler,
    pub schedule_mode: ScheduleMode,
    pub bbs_modulus_bits: u64,
    pub lcg: LcgParams,
    /// Toggle orders issued per slot in global mode.
    pub global_orders_per_slot: usize,
    pub master_seed: u64,
}

impl Default for SimConfig {
    /// 128 nodes on a 75 m × 75 m field, sampled every 10 s.
    fn default() -> Self {
        Self {
            area_width: 75.0,
            area_height: 75.0,
            node_count: 128,
            initial_energy: 1000.0,
            awake_cost: 1.0,
            asleep_cost: 0.01,
            radio_cost: 0.05,
            sensing_radius: 10.0,
            quantum: 1.0,
            horizon: 2400.0,
            sample_period: 10.0,
            intrusion_rate: 0.05,
            scheduler: Scheduler::Bbs,
            schedule_mode: ScheduleMode::Local,
            bbs_modulus_bits: 512,
            lcg: LcgParams::default(),
            global_orders_per_slot: 8,
            master_seed: 1,
        }
    }
}

fn whole_ratio(a: f64, b: f64) -> Option<usize> {
    let r = (a / b).round();
    ((r * b - a).abs() <= 1e-9 * a.abs().max(1.0) && r >= 1.0).then_some(r as usize)
}

impl SimConfig {
    pub const KEYS: [&'static str; 21] = [
        "area_width",
        "area_height",
        "node_count",
        "initial_energy",
        "awake_cost",
        "asleep_cost",
        "radio_cost",
        "sensing_radius",
        "quantum",
        "horizon",
        "sample_period",
        "intrusion_rate",
        "scheduler",
        "schedule_mode",
        "bbs_modulus_bits",
        "lcg_multiplier",
        "lcg_increment",
        "lcg_modulus_bits",
        "lcg_output_bits",
        "global_orders_per_slot",
        "master_seed",
    ];

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        let positive = [
            ("area_width", self.area_width),
            ("area_height", self.area_height),
            ("initial_energy", self.initial_energy),
            ("awake_cost", self.awake_cost),
            ("sensing_radius", self.sensing_radius),
            ("quantum", self.quantum),
            ("horizon", self.horizon),
            ("sample_period", self.sample_period),
        ];
        for (k, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{k} must be positive, got {v}"));
            }
        }
        for (k, v) in [
            ("asleep_cost", self.asleep_cost),
            ("radio_cost", self.radio_cost),
            ("intrusion_rate", self.intrusion_rate),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{k} must be >= 0, got {v}"));
            }
        }
        if self.node_count == 0 {
            return bad("node_count must be positive".into());
        }
        if self.asleep_cost >= self.awake_cost {
            return bad("asleep_cost must be below awake_cost".into());
        }
        if whole_ratio(self.horizon, self.quantum).is_none() {
            return bad("horizon must be a whole number of quanta".into());
        }
        if whole_ratio(self.sample_period, self.quantum).is_none() {
            return bad("sample_period must be a multiple of quantum".into());
        }
        if self.global_orders_per_slot == 0 {
            return bad("global_orders_per_slot must be positive".into());
        }
        let l = self.lcg;
        if !(1..=63).contains(&l.modulus_bits) || !(1..=l.modulus_bits).contains(&l.output_bits) {
            return bad("lcg_modulus_bits must be in 1..=63 and lcg_output_bits in 1..=lcg_modulus_bits".into());
        }
        if self.scheduler == Scheduler::Bbs && self.bbs_modulus_bits < crate::bbs::MIN_MODULUS_BITS {
            return Err(BbsError::ModulusTooSmall(self.bbs_modulus_bits).into());
        }
        Ok(())
    }

    pub fn slots(&self) -> usize {
        whole_ratio(self.horizon, self.quantum).expect("validated")
    }

    pub fn slots_per_sample(&self) -> usize {
        whole_ratio(self.sample_period, self.quantum).expect("validated")
    }

    /// Ordered `(key, value)` pairs. Floats use shortest round-trip formatting.
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        vec![
            ("area_width", self.area_width.to_string()),
            ("area_height", self.area_height.to_string()),
            ("node_count", self.node_count.to_string()),
            ("initial_energy", self.initial_energy.to_string()),
            ("awake_cost", self.awake_cost.to_string()),
            ("asleep_cost", self.asleep_cost.to_string()),
            ("radio_cost", self.radio_cost.to_string()),
            ("sensing_radius", self.sensing_radius.to_string()),
            ("quantum", self.quantum.to_string()),
            ("horizon", self.horizon.to_string()),
            ("sample_period", self.sample_period.to_string()),
            ("intrusion_rate", self.intrusion_rate.to_string()),
            ("scheduler", self.scheduler.as_str().into()),
            ("schedule_mode", self.schedule_mode.as_str().into()),
            ("bbs_modulus_bits", self.bbs_modulus_bits.to_string()),
            ("lcg_multiplier", self.lcg.multiplier.to_string()),
            ("lcg_increment", self.lcg.increment.to_string()),
            ("lcg_modulus_bits", self.lcg.modulus_bits.to_string()),
            ("lcg_output_bits", self.lcg.output_bits.to_string()),
            ("global_orders_per_slot", self.global_orders_per_slot.to_string()),
            ("master_seed", self.master_seed.to_string()),
        ]
    }

    pub fn to_kv(&self) -> String {
        self.to_pairs()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    /// Applies `key = value` pairs on top of `self`, then validates.
    pub fn with_pairs<'a>(mut self, pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self, ConfigError> {
        for (k, v) in pairs {
            self.set(k, v)?;
        }
        self.validate()?;
        Ok(self)
    }

    /// Parses a config file; keys not present keep their defaults.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let pairs = parse_kv(text)?;
        SimConfig::default().with_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))
    }

    fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
        where
            T::Err: fmt::Display,
        {
            value.parse::<T>().map_err(|e| ConfigError::Value {
                key: key.into(),
                value: value.into(),
                reason: e.to_string(),
            })
        }
        fn word<T: FromStr<Err = String>>(key: &str, value: &str) -> Result<T, ConfigError> {
            value.parse::<T>().map_err(|reason| ConfigError::Value {
                key: key.into(),
                value: value.into(),
                reason,
            })
        }
        match key {
            "area_width" => self.area_width = num(key, value)?,
            "area_height" => self.area_height = num(key, value)?,
            "node_count" => self.node_count = num(key, value)?,
            "initial_energy" => self.initial_energy = num(key, value)?,
            "awake_cost" => self.awake_cost = num(key, value)?,
            "asleep_cost" => self.asleep_cost = num(key, value)?,
            "radio_cost" => self.radio_cost = num(key, value)?,
            "sensing_radius" => self.sensing_radius = num(key, value)?,
            "quantum" => self.quantum = num(key, value)?,
            "horizon" => self.horizon = num(key, value)?,
            "sample_period" => self.sample_period = num(key, value)?,
            "intrusion_rate" => self.intrusion_rate = num(key, value)?,
            "scheduler" => self.scheduler = word(key, value)?,
            "schedule_mode" => self.schedule_mode = word(key, value)?,
            "bbs_modulus_bits" => self.bbs_modulus_bits = num(key, value)?,
            "lcg_multiplier" => self.lcg.multiplier = num(key, value)?,
            "lcg_increment" => self.lcg.increment = num(key, value)?,
            "lcg_modulus_bits" => self.lcg.modulus_bits = num(key, value)?,
            "lcg_output_bits" => self.lcg.output_bits = num(key, value)?,
            "global_orders_per_slot" => self.global_orders_per_slot = num(key, value)?,
            "master_seed" => self.master_seed = num(key, value)?,
            other => return Err(ConfigError::UnknownKey(other.into())),
        }
        Ok(())
    }
}

/// Parses `key = value` lines. `#` starts a comment; blank lines are skipped.
/// Later duplicates override earlier ones.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: i + 1,
            text: raw.to_string(),
        })?;
        let k = k.trim();
        if k.is_empty() {
            return Err(ConfigError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            });
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct NodeState {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    /// Micro-units.
    pub energy: i64,
    pub awake: bool,
    pub alive: bool,
}

struct StreamBits(Box<dyn BitStream + Send>);

impl Iterator for StreamBits {
    type Item = bool;
    fn next(&mut self) -> Option<bool> {
        Some(self.0.next_bit())
    }
}

enum Schedule {
    Always,
    Local(Vec<Box<dyn BitStream + Send>>),
    Global {
        decoder: ToggleDecoder<StreamBits>,
        per_slot: usize,
    },
}

/// Field, scheduler and randomness at a point in the simulation.
pub struct World {
    pub nodes: Vec<NodeState>,
    /// What the scheduler asks of each node, whether or not it is still alive.
    pub scheduled: Vec<bool>,
    schedule: Schedule,
    intrusion_rng: ChaCha20Rng,
}

fn source_for(cfg: &SimConfig) -> Result<Option<SourceSpec>, ConfigError> {
    Ok(match cfg.scheduler {
        Scheduler::AlwaysAwake => None,
        Scheduler::Lcg => Some(SourceSpec::Lcg(cfg.lcg)),
        Scheduler::Bbs => {
            // one public modulus for the field; each node gets its own secret seed
            let entropy = derive_seed(cfg.master_seed, "sim/bbs-modulus", 0);
            let params = generate_params(cfg.bbs_modulus_bits, &entropy)?;
            Some(SourceSpec::Bbs(Arc::new(params)))
        }
    })
}

impl World {
    fn advance_schedule(&mut self) {
        match &mut self.schedule {
            Schedule::Always => self.scheduled.iter_mut().for_each(|s| *s = true),
            Schedule::Local(streams) => {
                for (s, st) in self.scheduled.iter_mut().zip(streams.iter_mut()) {
                    *s = st.next_bit();
                }
            }
            Schedule::Global { decoder, per_slot } => {
                for _ in 0..*per_slot {
                    let id = decoder.next_id().expect("infinite stream");
                    self.scheduled[id] = !self.scheduled[id];
                }
            }
        }
        for (n, &s) in self.nodes.iter_mut().zip(&self.scheduled) {
            // dead nodes ignore orders
            n.awake = n.alive && s;
        }
    }
}

/// Deploys nodes uniformly over the field and applies the slot-0 schedule.
pub fn init_field(cfg: &SimConfig) -> Result<World, ConfigError> {
    cfg.validate()?;
    let mut deploy = derive_rng(cfg.master_seed, "sim/deploy", 0);
    let energy = (cfg.initial_energy * MICRO).round() as i64;
    let nodes: Vec<NodeState> = (0..cfg.node_count)
        .map(|id| NodeState {
            id,
            x: deploy.gen_range(0.0..=cfg.area_width),
            y: deploy.gen_range(0.0..=cfg.area_height),
            energy,
            awake: false,
            alive: true,
        })
        .collect();
    let source = source_for(cfg)?;
    let schedule = match (source, cfg.schedule_mode) {
        (None, _) => Schedule::Always,
        (Some(src), ScheduleMode::Local) => Schedule::Local(
            (0..cfg.node_count)
                .map(|id| src.instantiate(derive_seed(cfg.master_seed, "sim/schedule", id as u64), id as u64, 0))
                .collect(),
        ),
        (Some(src), ScheduleMode::Global) => {
            let stream = src.instantiate(derive_seed(cfg.master_seed, "sim/schedule-global", 0), 0, 0);
            Schedule::Global {
                decoder: ToggleDecoder::new(StreamBits(stream), cfg.node_count),
                per_slot: cfg.global_orders_per_slot,
            }
        }
    };
    let mut world = World {
        nodes,
        // global mode starts with every node awake
        scheduled: vec![true; cfg.node_count],
        schedule,
        intrusion_rng: derive_rng(cfg.master_seed, "sim/intrusions", 0),
    };
    world.advance_schedule();
    Ok(world)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub time: f64,
    pub active_fraction: f64,
    pub alive_fraction: f64,
    pub energy_mean: f64,
    pub energy_stddev: f64,
    pub detections_cum: u64,
    pub intrusions_cum: u64,
}

impl TraceRow {
    fn csv_fields(&self) -> String {
        format!(
            "{:.6},{:.6},{:.6},{:.6},{:.6},{},{}",
            self.time,
            self.active_fraction,
            self.alive_fraction,
            self.energy_mean,
            self.energy_stddev,
            self.detections_cum,
            self.intrusions_cum
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SimTrace {
    pub rows: Vec<TraceRow>,
}

impl SimTrace {
    pub fn to_csv(&self) -> String {
        let mut s = String::from(TRACE_HEADER);
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.csv_fields());
            s.push('\n');
        }
        s
    }

    /// Time average of `energy_stddev` over all rows.
    pub fn mean_energy_stddev(&self) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        self.rows.iter().map(|r| r.energy_stddev).sum::<f64>() / self.rows.len() as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Intrusion {
    pub slot: usize,
    pub x: f64,
    pub y: f64,
    /// Lowest-id awake, alive node within range, if any.
    pub witness: Option<usize>,
}

/// Everything a run produces, including the logs needed to re-check it.
#[derive(Clone, Debug)]
pub struct SimOutcome {
    pub config: SimConfig,
    pub trace: SimTrace,
    pub positions: Vec<(f64, f64)>,
    pub initial_energy: i64,
    pub final_energy: Vec<i64>,
    /// Sum of every per-slot and per-report debit, kept separately from the
    /// balance itself.
    pub drained: Vec<i64>,
    /// Slot at which each node ran out of energy.
    pub death_slot: Vec<Option<usize>>,
    /// Actual awake flags, one row per slot.
    pub awake_history: Vec<Vec<bool>>,
    /// Slots each node was scheduled awake over the horizon, alive or not.
    pub scheduled_awake: Vec<u64>,
    pub intrusions: Vec<Intrusion>,
}

impl SimOutcome {
    pub fn detections(&self) -> impl Iterator<Item = &Intrusion> {
        self.intrusions.iter().filter(|i| i.witness.is_some())
    }
}

fn row(time: f64, nodes: &[NodeState], detections: u64, intrusions: u64) -> TraceRow {
    let n = nodes.len() as f64;
    let alive = nodes.iter().filter(|x| x.alive).count() as f64;
    let active = nodes.iter().filter(|x| x.alive && x.awake).count() as f64;
    let energies: Vec<f64> = nodes.iter().map(|x| x.energy as f64 / MICRO).collect();
    let mean = energies.iter().sum::<f64>() / n;
    let var = energies.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / n;
    TraceRow {
        time,
        active_fraction: active / n,
        alive_fraction: alive / n,
        energy_mean: mean,
        energy_stddev: var.sqrt(),
        detections_cum: detections,
        intrusions_cum: intrusions,
    }
}

fn debit(node: &mut NodeState, drained: &mut i64, amount: i64) {
    let take = amount.min(node.energy);
    node.energy -= take;
    *drained += take;
}

/// Runs the simulation to the horizon.
pub fn run(cfg: &SimConfig) -> Result<SimOutcome, ConfigError> {
    let mut world = init_field(cfg)?;
    let slots = cfg.slots();
    let per_sample = cfg.slots_per_sample();
    let awake_cost = (cfg.awake_cost * cfg.quantum * MICRO).round() as i64;
    let asleep_cost = (cfg.asleep_cost * cfg.quantum * MICRO).round() as i64;
    let radio_cost = (cfg.radio_cost * MICRO).round() as i64;
    let r2 = cfg.sensing_radius * cfg.sensing_radius;
    let arrivals = (cfg.intrusion_rate > 0.0).then(|| Poisson::new(cfg.intrusion_rate * cfg.quantum).unwrap());

    let n = cfg.node_count;
    let initial_energy = world.nodes[0].energy;
    let mut drained = vec![0i64; n];
    let mut death_slot = vec![None; n];
    let mut awake_history = Vec::with_capacity(slots);
    let mut scheduled_awake = vec![0u64; n];
    let mut intrusions = Vec::new();
    let mut detections = 0u64;
    let mut rows = vec![row(0.0, &world.nodes, 0, 0)];

    for slot in 0..slots {
        if slot > 0 {
            world.advance_schedule();
        }
        for (c, &s) in scheduled_awake.iter_mut().zip(&world.scheduled) {
            *c += s as u64;
        }
        awake_history.push(world.nodes.iter().map(|x| x.awake).collect::<Vec<_>>());

        let count = arrivals
            .as_ref()
            .map(|p| p.sample(&mut world.intrusion_rng) as u64)
            .unwrap_or(0);
        for _ in 0..count {
            let x = world.intrusion_rng.gen_range(0.0..=cfg.area_width);
            let y = world.intrusion_rng.gen_range(0.0..=cfg.area_height);
            let mut witness = None;
            for node in world.nodes.iter_mut() {
                let d2 = (node.x - x).powi(2) + (node.y - y).powi(2);
                if node.alive && node.awake && d2 <= r2 {
                    witness.get_or_insert(node.id);
                    debit(node, &mut drained[node.id], radio_cost);
                }
            }
            detections += witness.is_some() as u64;
            intrusions.push(Intrusion { slot, x, y, witness });
        }

        for node in world.nodes.iter_mut().filter(|x| x.alive) {
            let cost = if node.awake { awake_cost } else { asleep_cost };
            debit(node, &mut drained[node.id], cost);
        }
        for node in world.nodes.iter_mut() {
            if node.alive && node.energy <= 0 {
                node.alive = false;
                node.awake = false;
                death_slot[node.id] = Some(slot);
            }
        }

        if (slot + 1) % per_sample == 0 {
            let t = (slot + 1) as f64 * cfg.quantum;
            rows.push(row(t, &world.nodes, detections, intrusions.len() as u64));
        }
    }

    Ok(SimOutcome {
        config: cfg.clone(),
        trace: SimTrace { rows },
        positions: world.nodes.iter().map(|x| (x.x, x.y)).collect(),
        initial_energy,
        final_energy: world.nodes.iter().map(|x| x.energy).collect(),
        drained,
        death_slot,
        awake_history,
        scheduled_awake,
        intrusions,
    })
}

/// Checks the trace-level invariants: rows at every sampling tick, alive
/// fraction non-increasing, `active ≤ alive`, detections never ahead of
/// intrusions.
pub fn verify_trace(out: &SimOutcome) -> Result<(), String> {
    let rows = &out.trace.rows;
    let expected_rows = out.config.slots() / out.config.slots_per_sample() + 1;
    if rows.len() != expected_rows {
        return Err(format!("expected {expected_rows} rows, got {}", rows.len()));
    }
    for (i, r) in rows.iter().enumerate() {
        let t = i as f64 * out.config.sample_period;
        if (r.time - t).abs() > 1e-9 * t.max(1.0) {
            return Err(format!("row {i} at t={} instead of {t}", r.time));
        }
        if r.active_fraction > r.alive_fraction {
            return Err(format!("row {i}: active {} > alive {}", r.active_fraction, r.alive_fraction));
        }
        if r.detections_cum > r.intrusions_cum {
            return Err(format!("row {i}: more detections than intrusions"));
        }
    }
    for (i, w) in rows.windows(2).enumerate() {
        if w[1].alive_fraction > w[0].alive_fraction {
            return Err(format!("alive fraction rises between rows {i} and {}", i + 1));
        }
    }
    Ok(())
}

/// `initial − final = Σ debits` for every node, and energy stays in range.
pub fn verify_energy(out: &SimOutcome) -> Result<(), String> {
    for (id, (&f, &d)) in out.final_energy.iter().zip(&out.drained).enumerate() {
        if out.initial_energy - f != d {
            return Err(format!("node {id}: initial {} - final {f} != drained {d}", out.initial_energy));
        }
        if !(0..=out.initial_energy).contains(&f) {
            return Err(format!("node {id}: energy {f} out of range"));
        }
    }
    Ok(())
}

/// Every node that dies stays dead and asleep; nodes awake only while alive.
pub fn verify_deaths(out: &SimOutcome) -> Result<(), String> {
    for (id, death) in out.death_slot.iter().enumerate() {
        let Some(d) = *death else {
            if out.final_energy[id] <= 0 {
                return Err(format!("node {id} has no energy but no recorded death"));
            }
            continue;
        };
        if out.final_energy[id] != 0 {
            return Err(format!("node {id} died with energy left"));
        }
        if let Some(k) = (d + 1..out.awake_history.len()).find(|&k| out.awake_history[k][id]) {
            return Err(format!("node {id} awake at slot {k} after dying at {d}"));
        }
    }
    Ok(())
}

/// Re-derives every detection from the logs: the named witness must have
/// been awake in that slot (hence alive) and within sensing range.
pub fn verify_detections(out: &SimOutcome) -> Result<(), String> {
    let r2 = out.config.sensing_radius.powi(2);
    for ev in &out.intrusions {
        let Some(w) = ev.witness else {
            continue;
        };
        if !out.awake_history[ev.slot][w] {
            return Err(format!("witness {w} asleep at slot {}", ev.slot));
        }
        let (x, y) = out.positions[w];
        if (x - ev.x).powi(2) + (y - ev.y).powi(2) > r2 {
            return Err(format!("witness {w} out of range at slot {}", ev.slot));
        }
    }
    Ok(())
}

pub fn verify_all(out: &SimOutcome) -> Result<(), String> {
    verify_trace(out)?;
    verify_energy(out)?;
    verify_deaths(out)?;
    verify_detections(out)
}

/// Pearson statistic for "every node is awake in each slot independently
/// with probability ½": `Σ (cᵢ − H/2)² / (H/4)` over the scheduled wake counts,
/// `node_count` degrees of freedom, upper-tail p-value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WakeUniformity {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

pub fn wake_uniformity(scheduled_awake: &[u64], slots: usize) -> WakeUniformity {
    let h = slots as f64;
    let statistic: f64 = scheduled_awake
        .iter()
        .map(|&c| (c as f64 - h / 2.0).powi(2) / (h / 4.0))
        .sum();
    let df = scheduled_awake.len();
    let p_value = ChiSquared::new(df as f64).map(|d| d.sf(statistic)).unwrap_or(f64::NAN);
    WakeUniformity { statistic, df, p_value }
}

#[derive(Clone, Debug)]
pub struct SchedulerSummary {
    pub scheduler: Scheduler,
    pub mean_energy_stddev: f64,
    pub wake_uniformity: WakeUniformity,
}

#[derive(Clone, Debug)]
pub struct Comparison {
    pub first: SimOutcome,
    pub second: SimOutcome,
    pub first_summary: SchedulerSummary,
    pub second_summary: SchedulerSummary,
}

impl Comparison {
    /// `second − first` time-averaged energy std-dev. Positive means the
    /// first scheduler spread energy use more evenly.
    pub fn stddev_difference(&self) -> f64 {
        self.second_summary.mean_energy_stddev - self.first_summary.mean_energy_stddev
    }

    /// Side-by-side trace; columns are prefixed with each scheduler's name.
    pub fn to_csv(&self) -> String {
        let names = [
            self.first.config.scheduler.as_str().replace('-', "_"),
            self.second.config.scheduler.as_str().replace('-', "_"),
        ];
        let labels = if names[0] == names[1] {
            [format!("{}_a", names[0]), format!("{}_b", names[1])]
        } else {
            names
        };
        let fields = &TRACE_HEADER.split(',').skip(1).collect::<Vec<_>>();
        let mut s = String::from("time");
        for l in &labels {
            for f in fields {
                s.push_str(&format!(",{l}_{f}"));
            }
        }
        s.push('\n');
        for (a, b) in self.first.trace.rows.iter().zip(&self.second.trace.rows) {
            let strip = |r: &TraceRow| r.csv_fields().split_once(',').unwrap().1.to_string();
            s.push_str(&format!("{:.6},{},{}\n", a.time, strip(a), strip(b)));
        }
        s
    }

    pub fn summary_text(&self) -> String {
        let line = |s: &SchedulerSummary| {
            format!(
                "{}: mean_energy_stddev={:.6} wake_chi2={:.4} df={} p={:.6}\n",
                s.scheduler.as_str(),
                s.mean_energy_stddev,
                s.wake_uniformity.statistic,
                s.wake_uniformity.df,
                s.wake_uniformity.p_value
            )
        };
        format!(
            "{}{}stddev_difference({} - {})={:.6}\n",
            line(&self.first_summary),
            line(&self.second_summary),
            self.second_summary.scheduler.as_str(),
            self.first_summary.scheduler.as_str(),
            self.stddev_difference()
        )
    }
}

fn summarize(out: &SimOutcome) -> SchedulerSummary {
    SchedulerSummary {
        scheduler: out.config.scheduler,
        mean_energy_stddev: out.trace.mean_energy_stddev(),
        wake_uniformity: wake_uniformity(&out.scheduled_awake, out.config.slots()),
    }
}

/// Runs the same deployment and intrusion sequence under two schedulers.
pub fn compare(cfg: &SimConfig, first: Scheduler, second: Scheduler) -> Result<Comparison, ConfigError> {
    let a_cfg = SimConfig {
        scheduler: first,
        ..cfg.clone()
    };
    let b_cfg = SimConfig {
        scheduler: second,
        ..cfg.clone()
    };
    let (a, b) = rayon::join(|| run(&a_cfg), || run(&b_cfg));
    let (a, b) = (a?, b?);
    Ok(Comparison {
        first_summary: summarize(&a),
        second_summary: summarize(&b),
        first: a,
        second: b,
    })
}

/// BBS against the LCG baseline.
pub fn compare_schedulers(cfg: &SimConfig) -> Result<Comparison, ConfigError> {
    compare(cfg, Scheduler::Bbs, Scheduler::Lcg)
}
