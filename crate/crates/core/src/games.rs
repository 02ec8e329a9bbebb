//! Game-based security evaluation of communication systems.
//!
//! A communication system embeds a message into a transmission support under
//! a key (`insert`), recovers it with the extraction key (`extract`,
//! `inv`). Three experiments are run by Monte Carlo:
//!
//! * **IND**: `A₁(k)` picks `(m₀, m₁, s)`, the challenger embeds `m_b` into
//!   `s`, and `A₂` must recover `b`.
//! * **NM**: `A` sees `I(s, m, k)` and must output data whose extracted message
//!   lies in `R(m)`.
//! * **DR**: `A₂` sees an unordered pair `{M_b, I(M_{1−b}, m, k)}` and must
//!   point at the decoy `M_b`.
//!
//! The experiments as written hand the key to the adversary, which makes every
//! correct symmetric system trivially breakable. [`KeyExposure::Withheld`]
//! runs the same experiment with the key kept from the adversary; results
//! carry the exposure they were produced under.
//!
//! Insecurity is a maximum over all adversaries of a given running time. The
//! harness maximises over a registered finite suite, so every reported
//! insecurity is a lower bound.

use std::collections::VecDeque;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::distinguish::Z95;
use crate::seed::derive_rng;

pub const NONCE_LEN: usize = 8;
pub const MESSAGE_LEN: usize = 16;
pub const SUPPORT_LEN: usize = 48;
pub const KEY_LEN: usize = 16;

const PAYLOAD: Range<usize> = NONCE_LEN..NONCE_LEN + MESSAGE_LEN;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtractError {
    #[error("transmitted data has length {got}, expected {expected}")]
    Malformed { got: usize, expected: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("adversary suite is empty")]
    EmptySuite,
    #[error("message set is empty")]
    EmptyMessageSet,
    #[error("unknown {what} `{got}`")]
    Parse { what: &'static str, got: String },
}

/// `(I, E, inv)` over supports of `support_len()` bytes, messages of
/// `message_len()` bytes and keys of `key_len_bits()` bits.
pub trait CommSystem: Sync {
    fn name(&self) -> &str;
    fn key_len_bits(&self) -> usize;
    fn support_len(&self) -> usize;
    fn message_len(&self) -> usize;
    /// Byte range of the support that carries the (possibly masked) message.
    /// Part of the public algorithm description.
    fn payload_range(&self) -> Range<usize>;
    fn insert(&self, support: &[u8], message: &[u8], key: &[u8], rng: &mut dyn RngCore) -> Vec<u8>;
    fn extract(&self, data: &[u8], key: &[u8]) -> Result<Vec<u8>, ExtractError>;
    /// Extraction key for embedding key `k`. Identity for symmetric systems.
    fn inv(&self, key: &[u8]) -> Vec<u8> {
        key.to_vec()
    }
}

fn keystream(key: &[u8], nonce: &[u8], len: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(len);
    let mut ctr = 0u32;
    while out.len() < len {
        let mut h = Sha256::new();
        h.update(b"wsnsec/keystream");
        h.update(key);
        h.update(nonce);
        h.update(ctr.to_be_bytes());
        out.extend_from_slice(&h.finalize());
        ctr += 1;
    }
    out.truncate(len);
    out
}

fn check_len(data: &[u8]) -> Result<(), ExtractError> {
    if data.len() != SUPPORT_LEN {
        return Err(ExtractError::Malformed {
            got: data.len(),
            expected: SUPPORT_LEN,
        });
    }
    Ok(())
}

/// Writes a nonce into the first bytes of the support and XORs the message,
/// masked by `SHA-256(key ‖ nonce ‖ ctr)`, into the payload bytes.
/// With `fixed_nonce` the nonce is always zero, making insertion
/// deterministic.
#[derive(Clone, Copy, Debug)]
pub struct XorEmbedder {
    fixed_nonce: bool,
}

impl XorEmbedder {
    pub fn fresh() -> Self {
        Self { fixed_nonce: false }
    }

    pub fn broken() -> Self {
        Self { fixed_nonce: true }
    }
}

impl CommSystem for XorEmbedder {
    fn name(&self) -> &str {
        if self.fixed_nonce {
            "broken"
        } else {
            "xor"
        }
    }
    fn key_len_bits(&self) -> usize {
        KEY_LEN * 8
    }
    fn support_len(&self) -> usize {
        SUPPORT_LEN
    }
    fn message_len(&self) -> usize {
        MESSAGE_LEN
    }
    fn payload_range(&self) -> Range<usize> {
        PAYLOAD
    }

    fn insert(&self, support: &[u8], message: &[u8], key: &[u8], rng: &mut dyn RngCore) -> Vec<u8> {
        assert_eq!(support.len(), SUPPORT_LEN);
        assert_eq!(message.len(), MESSAGE_LEN);
        let mut out = support.to_vec();
        let mut nonce = [0u8; NONCE_LEN];
        if !self.fixed_nonce {
            rng.fill_bytes(&mut nonce);
        }
        out[..NONCE_LEN].copy_from_slice(&nonce);
        let ks = keystream(key, &nonce, MESSAGE_LEN);
        for (i, (m, k)) in message.iter().zip(ks).enumerate() {
            out[PAYLOAD.start + i] = m ^ k;
        }
        out
    }

    fn extract(&self, data: &[u8], key: &[u8]) -> Result<Vec<u8>, ExtractError> {
        check_len(data)?;
        let ks = keystream(key, &data[..NONCE_LEN], MESSAGE_LEN);
        Ok(data[PAYLOAD].iter().zip(ks).map(|(c, k)| c ^ k).collect())
    }
}

/// Fresh nonce, but the message is written into the payload bytes in clear.
#[derive(Clone, Copy, Debug, Default)]
pub struct ClearEmbedder;

impl CommSystem for ClearEmbedder {
    fn name(&self) -> &str {
        "clear"
    }
    fn key_len_bits(&self) -> usize {
        KEY_LEN * 8
    }
    fn support_len(&self) -> usize {
        SUPPORT_LEN
    }
    fn message_len(&self) -> usize {
        MESSAGE_LEN
    }
    fn payload_range(&self) -> Range<usize> {
        PAYLOAD
    }

    fn insert(&self, support: &[u8], message: &[u8], _key: &[u8], rng: &mut dyn RngCore) -> Vec<u8> {
        assert_eq!(support.len(), SUPPORT_LEN);
        assert_eq!(message.len(), MESSAGE_LEN);
        let mut out = support.to_vec();
        rng.fill_bytes(&mut out[..NONCE_LEN]);
        out[PAYLOAD].copy_from_slice(message);
        out
    }

    fn extract(&self, data: &[u8], _key: &[u8]) -> Result<Vec<u8>, ExtractError> {
        check_len(data)?;
        Ok(data[PAYLOAD].to_vec())
    }
}

/// Looks up a shipped reference system by name (`xor`, `broken`, `clear`).
pub fn reference_system(name: &str) -> Result<Box<dyn CommSystem>, GameError> {
    match name {
        "xor" => Ok(Box::new(XorEmbedder::fresh())),
        "broken" => Ok(Box::new(XorEmbedder::broken())),
        "clear" => Ok(Box::new(ClearEmbedder)),
        other => Err(GameError::Parse {
            what: "system",
            got: other.into(),
        }),
    }
}

fn random_bytes(rng: &mut dyn RngCore, n: usize) -> Vec<u8> {
    let mut v = vec![0; n];
    rng.fill_bytes(&mut v);
    v
}

fn sample_key(system: &dyn CommSystem, rng: &mut dyn RngCore) -> Vec<u8> {
    random_bytes(rng, system.key_len_bits().div_ceil(8))
}

/// A declared finite support set; the DR game samples it uniformly.
#[derive(Clone, Debug)]
pub struct SupportSet {
    members: Vec<Vec<u8>>,
}

impl SupportSet {
    pub fn generate(size: usize, len: usize, seed: u64) -> Self {
        assert!(size > 0, "support set must be non-empty");
        let mut rng = derive_rng(seed, "games/support-set", 0);
        Self {
            members: (0..size).map(|_| random_bytes(&mut rng, len)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> &[u8] {
        &self.members[rng.gen_range(0..self.members.len())]
    }
}

/// Checks `extract(insert(s, m, k, r), inv(k)) = m` on random triples.
/// Returns the number of failures.
pub fn correctness_failures(system: &dyn CommSystem, samples: usize, seed: u64) -> usize {
    let mut rng = derive_rng(seed, "games/correctness", 0);
    (0..samples)
        .filter(|_| {
            let s = random_bytes(&mut rng, system.support_len());
            let m = random_bytes(&mut rng, system.message_len());
            let k = sample_key(system, &mut rng);
            let data = system.insert(&s, &m, &k, &mut rng);
            system.extract(&data, &system.inv(&k)).as_deref() != Ok(&m[..])
        })
        .count()
}

/// Fraction of `(s, m, k)` for which two insertions with fresh randomness
/// produce different data.
pub fn probabilistic_fraction(system: &dyn CommSystem, samples: usize, seed: u64) -> f64 {
    let mut rng = derive_rng(seed, "games/probabilistic", 0);
    let distinct = (0..samples)
        .filter(|_| {
            let s = random_bytes(&mut rng, system.support_len());
            let m = random_bytes(&mut rng, system.message_len());
            let k = sample_key(system, &mut rng);
            system.insert(&s, &m, &k, &mut rng) != system.insert(&s, &m, &k, &mut rng)
        })
        .count();
    distinct as f64 / samples.max(1) as f64
}

pub fn is_symmetric(system: &dyn CommSystem, samples: usize, seed: u64) -> bool {
    let mut rng = derive_rng(seed, "games/symmetric", 0);
    (0..samples).all(|_| {
        let k = sample_key(system, &mut rng);
        system.inv(&k) == k
    })
}

/// Extraction-oracle access model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OracleModel {
    /// No oracle. Mirrors the chosen-information attack (CIA).
    Na,
    /// First stage only. Mirrors the non-adaptive chosen-data attack (CDA1).
    Ad1,
    /// Both stages, except on the challenge. Mirrors CDA2.
    Ad2,
}

impl OracleModel {
    pub const ALL: [OracleModel; 3] = [OracleModel::Na, OracleModel::Ad1, OracleModel::Ad2];

    pub fn as_str(self) -> &'static str {
        match self {
            OracleModel::Na => "na",
            OracleModel::Ad1 => "ad1",
            OracleModel::Ad2 => "ad2",
        }
    }

    pub fn attack(self) -> Attack {
        match self {
            OracleModel::Na => Attack::Cia,
            OracleModel::Ad1 => Attack::Cda1,
            OracleModel::Ad2 => Attack::Cda2,
        }
    }

    fn first_stage(self) -> bool {
        self != OracleModel::Na
    }

    fn second_stage(self) -> bool {
        self == OracleModel::Ad2
    }
}

impl FromStr for OracleModel {
    type Err = GameError;
    fn from_str(s: &str) -> Result<Self, GameError> {
        match s.to_ascii_lowercase().as_str() {
            "na" => Ok(OracleModel::Na),
            "ad1" => Ok(OracleModel::Ad1),
            "ad2" => Ok(OracleModel::Ad2),
            _ => Err(GameError::Parse {
                what: "oracle model",
                got: s.into(),
            }),
        }
    }
}

/// Whether the adversary is handed the embedding key.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KeyExposure {
    /// The key is given to the adversary, as in the printed experiments.
    Literal,
    /// The key never reaches the adversary.
    Withheld,
}

impl KeyExposure {
    pub fn as_str(self) -> &'static str {
        match self {
            KeyExposure::Literal => "literal",
            KeyExposure::Withheld => "withheld",
        }
    }
}

impl FromStr for KeyExposure {
    type Err = GameError;
    fn from_str(s: &str) -> Result<Self, GameError> {
        match s {
            "literal" => Ok(KeyExposure::Literal),
            "withheld" | "keyless" => Ok(KeyExposure::Withheld),
            _ => Err(GameError::Parse {
                what: "key exposure",
                got: s.into(),
            }),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("no oracle access in this stage")]
    NoAccess,
    #[error("query on the challenge datum is not allowed")]
    ChallengeQuery,
    #[error(transparent)]
    Extract(#[from] ExtractError),
}

/// Extraction oracle bound to the hidden extraction key. Queries that the
/// current model forbids are refused and counted as violations; a trial with
/// any violation is invalidated.
pub struct ExtractionOracle<'a> {
    system: &'a dyn CommSystem,
    key: &'a [u8],
    enabled: bool,
    forbidden: Vec<Vec<u8>>,
    queries: usize,
    violations: usize,
}

impl<'a> ExtractionOracle<'a> {
    fn new(system: &'a dyn CommSystem, key: &'a [u8], enabled: bool, forbidden: Vec<Vec<u8>>) -> Self {
        Self {
            system,
            key,
            enabled,
            forbidden,
            queries: 0,
            violations: 0,
        }
    }

    pub fn available(&self) -> bool {
        self.enabled
    }

    pub fn query(&mut self, data: &[u8]) -> Result<Vec<u8>, OracleError> {
        if !self.enabled {
            self.violations += 1;
            return Err(OracleError::NoAccess);
        }
        if self.forbidden.iter().any(|f| f == data) {
            self.violations += 1;
            return Err(OracleError::ChallengeQuery);
        }
        self.queries += 1;
        Ok(self.system.extract(data, self.key)?)
    }

    pub fn queries(&self) -> usize {
        self.queries
    }

    pub fn violations(&self) -> usize {
        self.violations
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GameKind {
    Ind,
    Nm,
    Dr,
}

impl GameKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GameKind::Ind => "IND",
            GameKind::Nm => "NM",
            GameKind::Dr => "DR",
        }
    }
}

impl FromStr for GameKind {
    type Err = GameError;
    fn from_str(s: &str) -> Result<Self, GameError> {
        match s.to_ascii_lowercase().as_str() {
            "ind" => Ok(GameKind::Ind),
            "nm" => Ok(GameKind::Nm),
            "dr" => Ok(GameKind::Dr),
            _ => Err(GameError::Parse {
                what: "game",
                got: s.into(),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GameConfig {
    pub oracle: OracleModel,
    pub exposure: KeyExposure,
    pub trials: usize,
    pub master_seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GameResult {
    pub game: GameKind,
    pub system: String,
    pub adversary: String,
    pub oracle: OracleModel,
    pub exposure: KeyExposure,
    /// Valid trials.
    pub trials: usize,
    pub successes: usize,
    /// Trials discarded because the adversary broke the oracle rules.
    pub invalidated: usize,
    /// Raw success probability, as in the printed advantage.
    pub success_prob: f64,
    /// `2·|p − ½|` for IND and DR; `p` for NM.
    pub normalized_advantage: f64,
    /// 95% half-width on `success_prob`.
    pub ci_halfwidth: f64,
    /// Set when NM extraction had to use `inv(k)` instead of `k`.
    pub used_inverse_key: bool,
}

impl GameResult {
    /// 95% half-width on `normalized_advantage`.
    pub fn normalized_ci(&self) -> f64 {
        match self.game {
            GameKind::Nm => self.ci_halfwidth,
            GameKind::Ind | GameKind::Dr => 2.0 * self.ci_halfwidth,
        }
    }
}

#[derive(Clone, Copy, Default)]
struct Tally {
    valid: usize,
    wins: usize,
    invalid: usize,
}

impl Tally {
    fn add(self, o: Tally) -> Tally {
        Tally {
            valid: self.valid + o.valid,
            wins: self.wins + o.wins,
            invalid: self.invalid + o.invalid,
        }
    }

    fn outcome(won: Option<bool>) -> Tally {
        match won {
            Some(w) => Tally {
                valid: 1,
                wins: w as usize,
                invalid: 0,
            },
            None => Tally {
                valid: 0,
                wins: 0,
                invalid: 1,
            },
        }
    }
}

fn tally_trials(trials: usize, f: impl Fn(u64) -> Option<bool> + Sync) -> Tally {
    (0..trials as u64)
        .into_par_iter()
        .map(|t| Tally::outcome(f(t)))
        .reduce(Tally::default, Tally::add)
}

fn result(game: GameKind, system: &dyn CommSystem, adversary: String, cfg: &GameConfig, t: Tally) -> GameResult {
    let p = if t.valid == 0 { 0.0 } else { t.wins as f64 / t.valid as f64 };
    GameResult {
        game,
        system: system.name().into(),
        adversary,
        oracle: cfg.oracle,
        exposure: cfg.exposure,
        trials: t.valid,
        successes: t.wins,
        invalidated: t.invalid,
        success_prob: p,
        normalized_advantage: match game {
            GameKind::Nm => p,
            GameKind::Ind | GameKind::Dr => 2.0 * (p - 0.5).abs(),
        },
        ci_halfwidth: Z95 * (p * (1.0 - p) / t.valid.max(1) as f64).sqrt(),
        used_inverse_key: false,
    }
}

struct TrialRngs {
    challenger: ChaCha20Rng,
    adversary: ChaCha20Rng,
    insertion: ChaCha20Rng,
}

fn trial_rngs(master: u64, game: &str, t: u64) -> TrialRngs {
    TrialRngs {
        challenger: derive_rng(master, &format!("games/{game}/challenger"), t),
        adversary: derive_rng(master, &format!("games/{game}/adversary"), t),
        insertion: derive_rng(master, &format!("games/{game}/insert"), t),
    }
}

// ---------------------------------------------------------------- IND

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndChallenge {
    pub m0: Vec<u8>,
    pub m1: Vec<u8>,
    pub support: Vec<u8>,
}

pub struct IndView<'a> {
    pub system: &'a dyn CommSystem,
    pub key: Option<&'a [u8]>,
    pub oracle_model: OracleModel,
}

/// `(A₁, A₂)`. Implementations must be stateless across trials.
pub trait IndAdversary: Sync {
    fn name(&self) -> String;
    fn choose(&self, view: &IndView, oracle: &mut ExtractionOracle, rng: &mut dyn RngCore) -> IndChallenge;
    /// Returns the guessed bit (`true` = 1).
    fn guess(
        &self,
        view: &IndView,
        challenge: &IndChallenge,
        alpha: &[u8],
        oracle: &mut ExtractionOracle,
        rng: &mut dyn RngCore,
    ) -> bool;
}

fn random_challenge(system: &dyn CommSystem, rng: &mut dyn RngCore) -> IndChallenge {
    let m0 = random_bytes(rng, system.message_len());
    let mut m1 = random_bytes(rng, system.message_len());
    if m1 == m0 {
        m1[0] ^= 1;
    }
    IndChallenge {
        m0,
        m1,
        support: random_bytes(rng, system.support_len()),
    }
}

fn coin(rng: &mut dyn RngCore) -> bool {
    rng.next_u32() & 1 == 1
}

/// Flips the last byte of the data, which lies outside nonce and payload.
fn tweak(data: &[u8]) -> Vec<u8> {
    let mut v = data.to_vec();
    if let Some(last) = v.last_mut() {
        *last ^= 0x01;
    }
    v
}

pub struct RandomGuess;

impl IndAdversary for RandomGuess {
    fn name(&self) -> String {
        "random_guess".into()
    }
    fn choose(&self, view: &IndView, _: &mut ExtractionOracle, rng: &mut dyn RngCore) -> IndChallenge {
        random_challenge(view.system, rng)
    }
    fn guess(&self, _: &IndView, _: &IndChallenge, _: &[u8], _: &mut ExtractionOracle, rng: &mut dyn RngCore) -> bool {
        coin(rng)
    }
}

/// Re-runs the insertion of `m₀` with a fixed random tape and compares the
/// result to the challenge. Wins outright against deterministic insertion.
pub struct ReEmbed;

impl IndAdversary for ReEmbed {
    fn name(&self) -> String {
        "re_embed".into()
    }
    fn choose(&self, view: &IndView, _: &mut ExtractionOracle, rng: &mut dyn RngCore) -> IndChallenge {
        random_challenge(view.system, rng)
    }
    fn guess(&self, view: &IndView, c: &IndChallenge, alpha: &[u8], _: &mut ExtractionOracle, rng: &mut dyn RngCore) -> bool {
        let Some(key) = view.key else {
            return coin(rng);
        };
        let mut tape = ChaCha20Rng::from_seed([0; 32]);
        view.system.insert(&c.support, &c.m0, key, &mut tape) != alpha
    }
}

/// Extracts with the handed-over key.
pub struct KeyExtract;

impl IndAdversary for KeyExtract {
    fn name(&self) -> String {
        "key_extract".into()
    }
    fn choose(&self, view: &IndView, _: &mut ExtractionOracle, rng: &mut dyn RngCore) -> IndChallenge {
        random_challenge(view.system, rng)
    }
    fn guess(&self, view: &IndView, c: &IndChallenge, alpha: &[u8], _: &mut ExtractionOracle, rng: &mut dyn RngCore) -> bool {
        let Some(key) = view.key else {
            return coin(rng);
        };
        match view.system.extract(alpha, &view.system.inv(key)) {
            Ok(m) if m == c.m0 => false,
            Ok(m) if m == c.m1 => true,
            _ => coin(rng),
        }
    }
}

fn contains(hay: &[u8], needle: &[u8]) -> bool {
    !needle.is_empty() && hay.windows(needle.len()).any(|w| w == needle)
}

/// Looks for either message verbatim inside the transmitted data.
pub struct ClearSearch;

impl IndAdversary for ClearSearch {
    fn name(&self) -> String {
        "clear_search".into()
    }
    fn choose(&self, view: &IndView, _: &mut ExtractionOracle, rng: &mut dyn RngCore) -> IndChallenge {
        random_challenge(view.system, rng)
    }
    fn guess(&self, _: &IndView, c: &IndChallenge, alpha: &[u8], _: &mut ExtractionOracle, rng: &mut dyn RngCore) -> bool {
        match (contains(alpha, &c.m0), contains(alpha, &c.m1)) {
            (true, false) => false,
            (false, true) => true,
            _ => coin(rng),
        }
    }
}

/// Under AD2, submits a copy of the challenge with one byte outside the
/// payload changed. A malleable system answers with the embedded message.
pub struct OracleTweak;

impl IndAdversary for OracleTweak {
    fn name(&self) -> String {
        "oracle_tweak".into()
    }
    fn choose(&self, view: &IndView, _: &mut ExtractionOracle, rng: &mut dyn RngCore) -> IndChallenge {
        random_challenge(view.system, rng)
    }
    fn guess(&self, _: &IndView, c: &IndChallenge, alpha: &[u8], oracle: &mut ExtractionOracle, rng: &mut dyn RngCore) -> bool {
        if !oracle.available() {
            return coin(rng);
        }
        match oracle.query(&tweak(alpha)) {
            Ok(m) if m == c.m0 => false,
            Ok(m) if m == c.m1 => true,
            _ => coin(rng),
        }
    }
}

pub fn ind_suite() -> Vec<Box<dyn IndAdversary>> {
    vec![
        Box::new(RandomGuess),
        Box::new(ReEmbed),
        Box::new(KeyExtract),
        Box::new(ClearSearch),
        Box::new(OracleTweak),
    ]
}

fn ind_trial(system: &dyn CommSystem, adv: &dyn IndAdversary, cfg: &GameConfig, t: u64) -> Option<bool> {
    let mut r = trial_rngs(cfg.master_seed, "ind", t);
    let key = sample_key(system, &mut r.challenger);
    let ext_key = system.inv(&key);
    let view = IndView {
        system,
        key: (cfg.exposure == KeyExposure::Literal).then_some(&key[..]),
        oracle_model: cfg.oracle,
    };
    let mut o1 = ExtractionOracle::new(system, &ext_key, cfg.oracle.first_stage(), vec![]);
    let c = adv.choose(&view, &mut o1, &mut r.adversary);
    let well_formed = c.m0 != c.m1
        && c.m0.len() == system.message_len()
        && c.m1.len() == system.message_len()
        && c.support.len() == system.support_len();
    if o1.violations() > 0 || !well_formed {
        return None;
    }
    let b = coin(&mut r.challenger);
    let mb = if b { &c.m1 } else { &c.m0 };
    let alpha = system.insert(&c.support, mb, &key, &mut r.insertion);
    let mut o2 = ExtractionOracle::new(system, &ext_key, cfg.oracle.second_stage(), vec![alpha.clone()]);
    let g = adv.guess(&view, &c, &alpha, &mut o2, &mut r.adversary);
    if o2.violations() > 0 {
        return None;
    }
    Some(g == b)
}

pub fn ind_game(system: &dyn CommSystem, adv: &dyn IndAdversary, cfg: &GameConfig) -> GameResult {
    let t = tally_trials(cfg.trials, |i| ind_trial(system, adv, cfg, i));
    result(GameKind::Ind, system, adv.name(), cfg, t)
}

// ---------------------------------------------------------------- NM

pub trait Relation: Sync {
    fn name(&self) -> String;
    fn related(&self, m: &[u8], candidate: &[u8]) -> bool;
}

/// `R(m) = {m}`.
pub struct IdentityRelation;

impl Relation for IdentityRelation {
    fn name(&self) -> String {
        "identity".into()
    }
    fn related(&self, m: &[u8], c: &[u8]) -> bool {
        m == c
    }
}

/// `R(m) = ∅`.
pub struct EmptyRelation;

impl Relation for EmptyRelation {
    fn name(&self) -> String {
        "empty".into()
    }
    fn related(&self, _: &[u8], _: &[u8]) -> bool {
        false
    }
}

/// `R(m) = {m ⊕ e_bit}`: `m` with one message bit flipped.
pub struct FlipBitRelation {
    pub bit: usize,
}

impl Relation for FlipBitRelation {
    fn name(&self) -> String {
        format!("flip_bit_{}", self.bit)
    }
    fn related(&self, m: &[u8], c: &[u8]) -> bool {
        let mut want = m.to_vec();
        match want.get_mut(self.bit / 8) {
            Some(byte) => *byte ^= 1 << (self.bit % 8),
            None => return false,
        }
        want == c
    }
}

pub struct NmView<'a> {
    pub system: &'a dyn CommSystem,
    pub oracle_model: OracleModel,
}

pub trait NmAdversary: Sync {
    fn name(&self) -> String;
    fn forge(&self, view: &NmView, alpha: &[u8], oracle: &mut ExtractionOracle, rng: &mut dyn RngCore) -> Vec<u8>;
}

/// Retransmits the observed data unchanged.
pub struct CopyForger;

impl NmAdversary for CopyForger {
    fn name(&self) -> String {
        "copy".into()
    }
    fn forge(&self, _: &NmView, alpha: &[u8], _: &mut ExtractionOracle, _: &mut dyn RngCore) -> Vec<u8> {
        alpha.to_vec()
    }
}

/// Flips message bit `bit` in the payload region of the observed data.
pub struct BitFlipForger {
    pub bit: usize,
}

impl NmAdversary for BitFlipForger {
    fn name(&self) -> String {
        format!("bit_flip_{}", self.bit)
    }
    fn forge(&self, view: &NmView, alpha: &[u8], _: &mut ExtractionOracle, _: &mut dyn RngCore) -> Vec<u8> {
        let mut v = alpha.to_vec();
        let pos = view.system.payload_range().start + self.bit / 8;
        if let Some(b) = v.get_mut(pos) {
            *b ^= 1 << (self.bit % 8);
        }
        v
    }
}

/// Emits fresh random data of the right length.
pub struct RandomForger;

impl NmAdversary for RandomForger {
    fn name(&self) -> String {
        "random".into()
    }
    fn forge(&self, view: &NmView, _: &[u8], _: &mut ExtractionOracle, rng: &mut dyn RngCore) -> Vec<u8> {
        random_bytes(rng, view.system.support_len())
    }
}

pub fn nm_suite() -> Vec<Box<dyn NmAdversary>> {
    vec![
        Box::new(CopyForger),
        Box::new(BitFlipForger { bit: 0 }),
        Box::new(RandomForger),
    ]
}

/// The NM adversary has a single stage that starts after it sees the data, so
/// only AD2 grants it oracle access (never on the observed data itself).
pub fn nm_game(
    system: &dyn CommSystem,
    adv: &dyn NmAdversary,
    relation: &dyn Relation,
    message: &[u8],
    supports: &SupportSet,
    cfg: &GameConfig,
) -> GameResult {
    let symmetric = is_symmetric(system, 16, cfg.master_seed);
    let t = tally_trials(cfg.trials, |i| {
        let mut r = trial_rngs(cfg.master_seed, "nm", i);
        let s = supports.sample(&mut r.challenger).to_vec();
        let key = sample_key(system, &mut r.challenger);
        let ext_key = system.inv(&key);
        let alpha = system.insert(&s, message, &key, &mut r.insertion);
        let view = NmView {
            system,
            oracle_model: cfg.oracle,
        };
        let mut oracle = ExtractionOracle::new(system, &ext_key, cfg.oracle.second_stage(), vec![alpha.clone()]);
        let forged = adv.forge(&view, &alpha, &mut oracle, &mut r.adversary);
        if oracle.violations() > 0 {
            return None;
        }
        // k and inv(k) coincide for symmetric systems
        Some(match system.extract(&forged, &ext_key) {
            Ok(m2) => relation.related(message, &m2),
            Err(_) => false,
        })
    });
    let mut res = result(GameKind::Nm, system, adv.name(), cfg, t);
    res.used_inverse_key = !symmetric;
    res
}

// ---------------------------------------------------------------- DR

pub struct DrView<'a> {
    pub system: &'a dyn CommSystem,
    pub key: Option<&'a [u8]>,
    pub oracle_model: OracleModel,
}

pub trait DrAdversary: Sync {
    fn name(&self) -> String;
    fn choose(&self, view: &DrView, oracle: &mut ExtractionOracle, rng: &mut dyn RngCore) -> Vec<u8>;
    /// Index (0 or 1) of the element believed to be the decoy.
    fn identify(
        &self,
        view: &DrView,
        message: &[u8],
        pair: [&[u8]; 2],
        oracle: &mut ExtractionOracle,
        rng: &mut dyn RngCore,
    ) -> usize;
}

fn random_message(view: &DrView, rng: &mut dyn RngCore) -> Vec<u8> {
    random_bytes(rng, view.system.message_len())
}

fn pick(rng: &mut dyn RngCore) -> usize {
    coin(rng) as usize
}

/// Picks the decoy index given which elements look like they carry `m`.
fn decoy_from_hits(hits: [bool; 2], rng: &mut dyn RngCore) -> usize {
    match hits {
        [true, false] => 1,
        [false, true] => 0,
        _ => pick(rng),
    }
}

impl DrAdversary for RandomGuess {
    fn name(&self) -> String {
        "random_guess".into()
    }
    fn choose(&self, view: &DrView, _: &mut ExtractionOracle, rng: &mut dyn RngCore) -> Vec<u8> {
        random_message(view, rng)
    }
    fn identify(&self, _: &DrView, _: &[u8], _: [&[u8]; 2], _: &mut ExtractionOracle, rng: &mut dyn RngCore) -> usize {
        pick(rng)
    }
}

impl DrAdversary for ClearSearch {
    fn name(&self) -> String {
        "clear_search".into()
    }
    fn choose(&self, view: &DrView, _: &mut ExtractionOracle, rng: &mut dyn RngCore) -> Vec<u8> {
        random_message(view, rng)
    }
    fn identify(&self, _: &DrView, m: &[u8], pair: [&[u8]; 2], _: &mut ExtractionOracle, rng: &mut dyn RngCore) -> usize {
        decoy_from_hits([contains(pair[0], m), contains(pair[1], m)], rng)
    }
}

impl DrAdversary for KeyExtract {
    fn name(&self) -> String {
        "key_extract".into()
    }
    fn choose(&self, view: &DrView, _: &mut ExtractionOracle, rng: &mut dyn RngCore) -> Vec<u8> {
        random_message(view, rng)
    }
    fn identify(&self, view: &DrView, m: &[u8], pair: [&[u8]; 2], _: &mut ExtractionOracle, rng: &mut dyn RngCore) -> usize {
        let Some(key) = view.key else {
            return pick(rng);
        };
        let k = view.system.inv(key);
        let hit = |d: &[u8]| view.system.extract(d, &k).as_deref() == Ok(m);
        decoy_from_hits([hit(pair[0]), hit(pair[1])], rng)
    }
}

/// Inspects the nonce field: an all-zero nonce marks deterministic embedding.
pub struct ZeroNonce;

impl DrAdversary for ZeroNonce {
    fn name(&self) -> String {
        "zero_nonce".into()
    }
    fn choose(&self, view: &DrView, _: &mut ExtractionOracle, rng: &mut dyn RngCore) -> Vec<u8> {
        random_message(view, rng)
    }
    fn identify(&self, _: &DrView, _: &[u8], pair: [&[u8]; 2], _: &mut ExtractionOracle, rng: &mut dyn RngCore) -> usize {
        let zero = |d: &[u8]| d.iter().take(NONCE_LEN).all(|&b| b == 0);
        decoy_from_hits([zero(pair[0]), zero(pair[1])], rng)
    }
}

impl DrAdversary for OracleTweak {
    fn name(&self) -> String {
        "oracle_tweak".into()
    }
    fn choose(&self, view: &DrView, _: &mut ExtractionOracle, rng: &mut dyn RngCore) -> Vec<u8> {
        random_message(view, rng)
    }
    fn identify(&self, _: &DrView, m: &[u8], pair: [&[u8]; 2], oracle: &mut ExtractionOracle, rng: &mut dyn RngCore) -> usize {
        if !oracle.available() {
            return pick(rng);
        }
        let mut hit = |d: &[u8]| oracle.query(&tweak(d)).as_deref() == Ok(m);
        let hits = [hit(pair[0]), hit(pair[1])];
        decoy_from_hits(hits, rng)
    }
}

pub fn dr_suite() -> Vec<Box<dyn DrAdversary>> {
    vec![
        Box::new(RandomGuess),
        Box::new(ClearSearch),
        Box::new(KeyExtract),
        Box::new(ZeroNonce),
        Box::new(OracleTweak),
    ]
}

pub fn dr_game(system: &dyn CommSystem, adv: &dyn DrAdversary, supports: &SupportSet, cfg: &GameConfig) -> GameResult {
    let t = tally_trials(cfg.trials, |i| {
        let mut r = trial_rngs(cfg.master_seed, "dr", i);
        let supports_drawn = [
            supports.sample(&mut r.challenger).to_vec(),
            supports.sample(&mut r.challenger).to_vec(),
        ];
        let key = sample_key(system, &mut r.challenger);
        let ext_key = system.inv(&key);
        let view = DrView {
            system,
            key: (cfg.exposure == KeyExposure::Literal).then_some(&key[..]),
            oracle_model: cfg.oracle,
        };
        let mut o1 = ExtractionOracle::new(system, &ext_key, cfg.oracle.first_stage(), vec![]);
        let m = adv.choose(&view, &mut o1, &mut r.adversary);
        if o1.violations() > 0 || m.len() != system.message_len() {
            return None;
        }
        let b = pick(&mut r.challenger);
        let decoy = supports_drawn[b].clone();
        let carrier = system.insert(&supports_drawn[1 - b], &m, &key, &mut r.insertion);
        // unordered pair: shown in a random order
        let decoy_at = pick(&mut r.challenger);
        let pair: [&[u8]; 2] = if decoy_at == 0 {
            [&decoy, &carrier]
        } else {
            [&carrier, &decoy]
        };
        let mut o2 = ExtractionOracle::new(
            system,
            &ext_key,
            cfg.oracle.second_stage(),
            vec![decoy.clone(), carrier.clone()],
        );
        let guess = adv.identify(&view, &m, pair, &mut o2, &mut r.adversary);
        if o2.violations() > 0 {
            return None;
        }
        Some(guess == decoy_at)
    });
    result(GameKind::Dr, system, adv.name(), cfg, t)
}

// ---------------------------------------------------------------- insecurity

/// Largest normalized advantage over a suite, plus every individual result.
#[derive(Clone, Debug)]
pub struct Insecurity {
    pub best: GameResult,
    pub results: Vec<GameResult>,
}

fn maximise(results: Vec<GameResult>) -> Result<Insecurity, GameError> {
    let best = results
        .iter()
        .max_by(|a, b| a.normalized_advantage.total_cmp(&b.normalized_advantage))
        .cloned()
        .ok_or(GameError::EmptySuite)?;
    Ok(Insecurity { best, results })
}

pub fn ind_insecurity(
    system: &dyn CommSystem,
    suite: &[Box<dyn IndAdversary>],
    cfg: &GameConfig,
) -> Result<Insecurity, GameError> {
    maximise(suite.iter().map(|a| ind_game(system, a.as_ref(), cfg)).collect())
}

pub fn dr_insecurity(
    system: &dyn CommSystem,
    suite: &[Box<dyn DrAdversary>],
    supports: &SupportSet,
    cfg: &GameConfig,
) -> Result<Insecurity, GameError> {
    maximise(suite.iter().map(|a| dr_game(system, a.as_ref(), supports, cfg)).collect())
}

/// Maximum over both the adversary suite and the supplied message set.
pub fn nm_insecurity(
    system: &dyn CommSystem,
    suite: &[Box<dyn NmAdversary>],
    relation: &dyn Relation,
    messages: &[Vec<u8>],
    supports: &SupportSet,
    cfg: &GameConfig,
) -> Result<Insecurity, GameError> {
    if suite.is_empty() {
        return Err(GameError::EmptySuite);
    }
    if messages.is_empty() {
        return Err(GameError::EmptyMessageSet);
    }
    let mut all = Vec::new();
    for a in suite {
        for m in messages {
            all.push(nm_game(system, a.as_ref(), relation, m, supports, cfg));
        }
    }
    maximise(all)
}

// ---------------------------------------------------------------- lattice

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Goal {
    Nm,
    Ind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Attack {
    Cia,
    Cda1,
    Cda2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SecurityLevel {
    pub goal: Goal,
    pub attack: Attack,
}

impl SecurityLevel {
    pub const fn new(goal: Goal, attack: Attack) -> Self {
        Self { goal, attack }
    }

    pub fn all() -> [SecurityLevel; 6] {
        use Attack::*;
        use Goal::*;
        [
            Self::new(Nm, Cda2),
            Self::new(Nm, Cda1),
            Self::new(Nm, Cia),
            Self::new(Ind, Cda2),
            Self::new(Ind, Cda1),
            Self::new(Ind, Cia),
        ]
    }

    /// Direct implications: the two attack-strength chains, NM ⇒ IND under
    /// CIA and CDA1, and NM ⇔ IND under CDA2.
    fn successors(self) -> Vec<SecurityLevel> {
        use Attack::*;
        use Goal::*;
        let mut out = Vec::new();
        match self.attack {
            Cda2 => out.push(Self::new(self.goal, Cda1)),
            Cda1 => out.push(Self::new(self.goal, Cia)),
            Cia => {}
        }
        match (self.goal, self.attack) {
            (Nm, a) => out.push(Self::new(Ind, a)),
            (Ind, Cda2) => out.push(Self::new(Nm, Cda2)),
            (Ind, _) => {}
        }
        out
    }
}

impl fmt::Display for SecurityLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = match self.goal {
            Goal::Nm => "NM",
            Goal::Ind => "IND",
        };
        let a = match self.attack {
            Attack::Cia => "CIA",
            Attack::Cda1 => "CDA1",
            Attack::Cda2 => "CDA2",
        };
        write!(f, "{g},{a}")
    }
}

impl FromStr for SecurityLevel {
    type Err = GameError;
    fn from_str(s: &str) -> Result<Self, GameError> {
        let err = || GameError::Parse {
            what: "security level",
            got: s.into(),
        };
        let cleaned = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (g, a) = cleaned.split_once(',').ok_or_else(err)?;
        let goal = match g.trim().to_ascii_uppercase().as_str() {
            "NM" => Goal::Nm,
            "IND" => Goal::Ind,
            _ => return Err(err()),
        };
        let attack = match a.trim().to_ascii_uppercase().as_str() {
            "CIA" => Attack::Cia,
            "CDA1" => Attack::Cda1,
            "CDA2" => Attack::Cda2,
            _ => return Err(err()),
        };
        Ok(Self { goal, attack })
    }
}

/// Whether level `a` implies level `b` (reachability over direct implications).
pub fn implies(a: SecurityLevel, b: SecurityLevel) -> bool {
    let mut seen = vec![a];
    let mut queue = VecDeque::from([a]);
    while let Some(cur) = queue.pop_front() {
        if cur == b {
            return true;
        }
        for next in cur.successors() {
            if !seen.contains(&next) {
                seen.push(next);
                queue.push_back(next);
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(oracle: OracleModel, exposure: KeyExposure, trials: usize) -> GameConfig {
        GameConfig {
            oracle,
            exposure,
            trials,
            master_seed: 5,
        }
    }

    #[test]
    fn reference_systems_are_correct() {
        for name in ["xor", "broken", "clear"] {
            let s = reference_system(name).unwrap();
            assert_eq!(correctness_failures(s.as_ref(), 2000, 1), 0, "{name}");
            assert!(is_symmetric(s.as_ref(), 100, 1));
        }
        assert!(reference_system("rot13").is_err());
    }

    #[test]
    fn insertion_randomness() {
        assert_eq!(probabilistic_fraction(&XorEmbedder::fresh(), 500, 2), 1.0);
        assert_eq!(probabilistic_fraction(&ClearEmbedder, 500, 2), 1.0);
        assert_eq!(probabilistic_fraction(&XorEmbedder::broken(), 500, 2), 0.0);
    }

    #[test]
    fn malformed_extract() {
        assert_eq!(
            XorEmbedder::fresh().extract(&[0; 3], &[0; KEY_LEN]),
            Err(ExtractError::Malformed { got: 3, expected: SUPPORT_LEN })
        );
    }

    #[test]
    fn oracle_discipline() {
        let sys = XorEmbedder::fresh();
        let key = [1u8; KEY_LEN];
        let mut off = ExtractionOracle::new(&sys, &key, false, vec![]);
        assert_eq!(off.query(&[0; SUPPORT_LEN]), Err(OracleError::NoAccess));
        assert_eq!(off.violations(), 1);
        let mut on = ExtractionOracle::new(&sys, &key, true, vec![vec![7; SUPPORT_LEN]]);
        assert_eq!(on.query(&[7; SUPPORT_LEN]), Err(OracleError::ChallengeQuery));
        assert!(on.query(&[8; SUPPORT_LEN]).is_ok());
        assert_eq!((on.queries(), on.violations()), (1, 1));
    }

    /// Queries the challenge itself under AD2; every trial must be thrown out.
    struct Cheater;
    impl IndAdversary for Cheater {
        fn name(&self) -> String {
            "cheater".into()
        }
        fn choose(&self, view: &IndView, _: &mut ExtractionOracle, rng: &mut dyn RngCore) -> IndChallenge {
            random_challenge(view.system, rng)
        }
        fn guess(&self, _: &IndView, c: &IndChallenge, alpha: &[u8], o: &mut ExtractionOracle, _: &mut dyn RngCore) -> bool {
            match o.query(alpha) {
                Ok(m) => m == c.m1,
                Err(_) => false,
            }
        }
    }

    #[test]
    fn challenge_queries_invalidate_trials() {
        let r = ind_game(&XorEmbedder::fresh(), &Cheater, &cfg(OracleModel::Ad2, KeyExposure::Withheld, 200));
        assert_eq!(r.invalidated, 200);
        assert_eq!(r.trials, 0);
        assert_eq!(r.successes, 0);
    }

    #[test]
    fn first_stage_oracle_misuse_under_na() {
        struct EagerQuery;
        impl IndAdversary for EagerQuery {
            fn name(&self) -> String {
                "eager".into()
            }
            fn choose(&self, view: &IndView, o: &mut ExtractionOracle, rng: &mut dyn RngCore) -> IndChallenge {
                let _ = o.query(&[0; SUPPORT_LEN]);
                random_challenge(view.system, rng)
            }
            fn guess(&self, _: &IndView, _: &IndChallenge, _: &[u8], _: &mut ExtractionOracle, _: &mut dyn RngCore) -> bool {
                true
            }
        }
        let r = ind_game(&XorEmbedder::fresh(), &EagerQuery, &cfg(OracleModel::Na, KeyExposure::Withheld, 50));
        assert_eq!(r.invalidated, 50);
        let r = ind_game(&XorEmbedder::fresh(), &EagerQuery, &cfg(OracleModel::Ad1, KeyExposure::Withheld, 50));
        assert_eq!(r.invalidated, 0);
    }

    #[test]
    fn ind_examples() {
        let c = cfg(OracleModel::Na, KeyExposure::Literal, 1000);
        let guess = ind_game(&XorEmbedder::fresh(), &RandomGuess, &c);
        assert!(guess.normalized_advantage <= guess.normalized_ci() * 1.5 + 0.01);
        let broken = ind_game(&XorEmbedder::broken(), &ReEmbed, &c);
        assert_eq!(broken.success_prob, 1.0);
        // the key alone breaks the literal experiment
        let lit = ind_game(&XorEmbedder::fresh(), &KeyExtract, &c);
        assert_eq!(lit.success_prob, 1.0);
        let clear = ind_game(&ClearEmbedder, &ClearSearch, &cfg(OracleModel::Na, KeyExposure::Withheld, 300));
        assert_eq!(clear.success_prob, 1.0);
    }

    #[test]
    fn ad2_malleability_attack() {
        let r = ind_game(&XorEmbedder::fresh(), &OracleTweak, &cfg(OracleModel::Ad2, KeyExposure::Withheld, 300));
        assert_eq!(r.success_prob, 1.0);
        assert_eq!(r.invalidated, 0);
        let r = ind_game(&XorEmbedder::fresh(), &OracleTweak, &cfg(OracleModel::Ad1, KeyExposure::Withheld, 2000));
        assert!(r.normalized_advantage < 0.1);
    }

    #[test]
    fn nm_examples() {
        let sup = SupportSet::generate(64, SUPPORT_LEN, 1);
        let m = vec![0x5a; MESSAGE_LEN];
        let c = cfg(OracleModel::Na, KeyExposure::Withheld, 500);
        let sys = XorEmbedder::fresh();
        assert_eq!(nm_game(&sys, &CopyForger, &IdentityRelation, &m, &sup, &c).success_prob, 1.0);
        assert_eq!(nm_game(&sys, &CopyForger, &EmptyRelation, &m, &sup, &c).success_prob, 0.0);
        let flip = nm_game(&sys, &BitFlipForger { bit: 3 }, &FlipBitRelation { bit: 3 }, &m, &sup, &c);
        assert_eq!(flip.success_prob, 1.0);
        assert!(!flip.used_inverse_key);
        let rand = nm_game(&sys, &RandomForger, &IdentityRelation, &m, &sup, &c);
        assert_eq!(rand.success_prob, 0.0);
    }

    #[test]
    fn nm_malformed_forgery_fails() {
        struct Short;
        impl NmAdversary for Short {
            fn name(&self) -> String {
                "short".into()
            }
            fn forge(&self, _: &NmView, _: &[u8], _: &mut ExtractionOracle, _: &mut dyn RngCore) -> Vec<u8> {
                vec![1, 2, 3]
            }
        }
        let sup = SupportSet::generate(8, SUPPORT_LEN, 1);
        let r = nm_game(
            &XorEmbedder::fresh(),
            &Short,
            &IdentityRelation,
            &[0; MESSAGE_LEN],
            &sup,
            &cfg(OracleModel::Na, KeyExposure::Withheld, 50),
        );
        assert_eq!((r.success_prob, r.trials), (0.0, 50));
    }

    #[test]
    fn dr_examples() {
        let sup = SupportSet::generate(4096, SUPPORT_LEN, 3);
        let c = cfg(OracleModel::Na, KeyExposure::Withheld, 1000);
        assert_eq!(dr_game(&ClearEmbedder, &ClearSearch, &sup, &c).success_prob, 1.0);
        let g = dr_game(&XorEmbedder::fresh(), &RandomGuess, &sup, &c);
        assert!((g.success_prob - 0.5).abs() < 3.0 * g.ci_halfwidth);
        assert_eq!(dr_game(&XorEmbedder::broken(), &ZeroNonce, &sup, &c).success_prob, 1.0);
        let lit = cfg(OracleModel::Na, KeyExposure::Literal, 300);
        assert_eq!(dr_game(&XorEmbedder::fresh(), &KeyExtract, &sup, &lit).success_prob, 1.0);
    }

    #[test]
    fn insecurity_maximises() {
        let c = cfg(OracleModel::Na, KeyExposure::Literal, 300);
        assert_eq!(ind_insecurity(&XorEmbedder::fresh(), &[], &c).unwrap_err(), GameError::EmptySuite);
        let single = ind_insecurity(&XorEmbedder::broken(), &[Box::new(ReEmbed)], &c).unwrap();
        assert_eq!(single.best.adversary, "re_embed");
        assert_eq!(single.results.len(), 1);
        let full = ind_insecurity(&XorEmbedder::broken(), &ind_suite(), &c).unwrap();
        assert_eq!(full.best.normalized_advantage, 1.0);
        let sup = SupportSet::generate(8, SUPPORT_LEN, 1);
        assert_eq!(
            nm_insecurity(&XorEmbedder::fresh(), &nm_suite(), &IdentityRelation, &[], &sup, &c).unwrap_err(),
            GameError::EmptyMessageSet
        );
    }

    #[test]
    fn level_parsing() {
        let l: SecurityLevel = "NM,CDA2".parse().unwrap();
        assert_eq!(l, SecurityLevel::new(Goal::Nm, Attack::Cda2));
        assert_eq!("(ind, cia)".parse::<SecurityLevel>().unwrap().to_string(), "IND,CIA");
        assert!("OW,CIA".parse::<SecurityLevel>().is_err());
    }

    #[test]
    fn lattice_examples() {
        let p = |s: &str| s.parse::<SecurityLevel>().unwrap();
        assert!(implies(p("NM,CDA2"), p("IND,CIA")));
        assert!(!implies(p("IND,CIA"), p("NM,CDA2")));
        assert!(implies(p("IND,CDA2"), p("NM,CDA2")));
        for a in SecurityLevel::all() {
            assert!(implies(a, a));
            assert_eq!(implies(p("IND,CIA"), a), a == p("IND,CIA"));
            assert!(implies(p("NM,CDA2"), a));
            assert!(implies(p("IND,CDA2"), a));
        }
    }

    #[test]
    fn oracle_attack_mapping() {
        assert_eq!(OracleModel::Na.attack(), Attack::Cia);
        assert_eq!(OracleModel::Ad1.attack(), Attack::Cda1);
        assert_eq!(OracleModel::Ad2.attack(), Attack::Cda2);
    }
}
