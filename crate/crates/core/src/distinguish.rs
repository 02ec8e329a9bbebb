//! Empirical `(T, ε)` distinguisher harness.
//!
//! A distinguisher is a decision procedure on `M`-bit strings. Its advantage
//! against a source is `|Pr[D(source) = 1] − Pr[D(uniform) = 1]|`, estimated
//! here by Monte Carlo with independently seeded streams per trial. True
//! insecurity is a supremum over all `T`-time procedures; the harness can only
//! report the maximum over a registered suite, which is a lower bound.

use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma_ur;
use thiserror::Error;

use crate::seed::derive_seed;
use crate::source::SourceSpec;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Shortest sequence the battery accepts.
pub const MIN_BATTERY_LEN: usize = 100;

/// Fewest trials for which the normal-approximation interval is reported.
pub const MIN_TRIALS: usize = 30;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DistinguishError {
    #[error("sequence of length {got} is too short; the battery needs at least {min} bits")]
    SequenceTooShort { got: usize, min: usize },
    #[error("{got} trials requested; at least {min} are needed for a valid interval")]
    TooFewTrials { got: usize, min: usize },
    #[error("output length must be at least 1")]
    EmptyOutput,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TestKind {
    Monobit,
    Runs,
    Serial,
    LongestRun,
}

impl TestKind {
    pub const ALL: [TestKind; 4] = [
        TestKind::Monobit,
        TestKind::Runs,
        TestKind::Serial,
        TestKind::LongestRun,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestKind::Monobit => "monobit",
            TestKind::Runs => "runs",
            TestKind::Serial => "serial",
            TestKind::LongestRun => "longest_run",
        }
    }
}

impl fmt::Display for TestKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Frequency test: `erfc(|S_n| / sqrt(2n))` with `S_n = Σ(2bᵢ − 1)`.
pub fn monobit_p(bits: &[bool]) -> f64 {
    let n = bits.len() as f64;
    let s: i64 = bits.iter().map(|&b| if b { 1 } else { -1 }).sum();
    erfc(s.unsigned_abs() as f64 / (2.0 * n).sqrt())
}

/// Runs test. Returns 0 when the frequency prerequisite
/// `|π − ½| < 2/√n` already fails.
pub fn runs_p(bits: &[bool]) -> f64 {
    let n = bits.len() as f64;
    let pi = bits.iter().filter(|&&b| b).count() as f64 / n;
    if (pi - 0.5).abs() >= 2.0 / n.sqrt() {
        return 0.0;
    }
    let v = 1 + bits.windows(2).filter(|w| w[0] != w[1]).count();
    let spread = 2.0 * n * pi * (1.0 - pi);
    erfc((v as f64 - spread).abs() / (2.0 * (2.0 * n).sqrt() * pi * (1.0 - pi)))
}

/// Sum of squared overlapping `m`-bit pattern counts, with wrap-around.
fn psi_sq(bits: &[bool], m: usize) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let n = bits.len();
    let mut counts = vec![0u64; 1 << m];
    for i in 0..n {
        let mut v = 0usize;
        for j in 0..m {
            v = (v << 1) | bits[(i + j) % n] as usize;
        }
        counts[v] += 1;
    }
    let ss: f64 = counts.iter().map(|&c| (c * c) as f64).sum();
    (1u64 << m) as f64 / n as f64 * ss - n as f64
}

/// `Q(a, x)`, with the `x = 0` limit that statrs rejects.
fn upper_gamma(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        gamma_ur(a, x)
    }
}

/// Serial test with 2-bit patterns: first p-value, `igamc(1, ∇ψ²₂ / 2)`.
pub fn serial_p(bits: &[bool]) -> f64 {
    let del = psi_sq(bits, 2) - psi_sq(bits, 1);
    upper_gamma(1.0, del / 2.0)
}

/// Longest run of ones in a block, with the standard block sizes and class
/// probabilities for `M ∈ {8, 128, 10⁴}`. Sequences shorter than 128 bits use
/// `M = 8` with `⌊n/8⌋` blocks.
pub fn longest_run_p(bits: &[bool]) -> f64 {
    let n = bits.len();
    let (m, lo, probs): (usize, usize, &[f64]) = if n < 6272 {
        (8, 1, &[0.2148, 0.3672, 0.2305, 0.1875])
    } else if n < 750_000 {
        (128, 4, &[0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124])
    } else {
        (10_000, 10, &[0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727])
    };
    let k = probs.len() - 1;
    let blocks = n / m;
    let mut classes = vec![0u64; probs.len()];
    for block in bits.chunks_exact(m).take(blocks) {
        let mut best = 0usize;
        let mut cur = 0usize;
        for &b in block {
            cur = if b { cur + 1 } else { 0 };
            best = best.max(cur);
        }
        classes[best.clamp(lo, lo + k) - lo] += 1;
    }
    let nb = blocks as f64;
    let chi2: f64 = classes
        .iter()
        .zip(probs)
        .map(|(&v, &p)| (v as f64 - nb * p).powi(2) / (nb * p))
        .sum();
    upper_gamma(k as f64 / 2.0, chi2 / 2.0)
}

pub fn test_p(kind: TestKind, bits: &[bool]) -> f64 {
    match kind {
        TestKind::Monobit => monobit_p(bits),
        TestKind::Runs => runs_p(bits),
        TestKind::Serial => serial_p(bits),
        TestKind::LongestRun => longest_run_p(bits),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BatteryReport {
    pub monobit: f64,
    pub runs: f64,
    pub serial: f64,
    pub longest_run: f64,
}

impl BatteryReport {
    pub fn get(&self, kind: TestKind) -> f64 {
        match kind {
            TestKind::Monobit => self.monobit,
            TestKind::Runs => self.runs,
            TestKind::Serial => self.serial,
            TestKind::LongestRun => self.longest_run,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (TestKind, f64)> + '_ {
        TestKind::ALL.into_iter().map(|k| (k, self.get(k)))
    }

    pub fn passes(&self, alpha: f64) -> bool {
        self.iter().all(|(_, p)| p >= alpha)
    }
}

pub fn test_battery(bits: &[bool]) -> Result<BatteryReport, DistinguishError> {
    if bits.len() < MIN_BATTERY_LEN {
        return Err(DistinguishError::SequenceTooShort {
            got: bits.len(),
            min: MIN_BATTERY_LEN,
        });
    }
    Ok(BatteryReport {
        monobit: monobit_p(bits),
        runs: runs_p(bits),
        serial: serial_p(bits),
        longest_run: longest_run_p(bits),
    })
}

/// A decision procedure on fixed-length bit strings.
pub trait Distinguisher: Sync {
    fn name(&self) -> String;
    fn decide(&self, bits: &[bool]) -> bool;
}

/// Outputs 1 iff the first bit is 1.
pub struct FirstBitOne;

impl Distinguisher for FirstBitOne {
    fn name(&self) -> String {
        "first_bit".into()
    }
    fn decide(&self, bits: &[bool]) -> bool {
        bits.first().copied().unwrap_or(false)
    }
}

/// Outputs 1 iff one statistical test rejects at level `alpha`.
pub struct TestRejects {
    pub test: TestKind,
    pub alpha: f64,
}

impl Distinguisher for TestRejects {
    fn name(&self) -> String {
        self.test.name().into()
    }
    fn decide(&self, bits: &[bool]) -> bool {
        test_p(self.test, bits) < self.alpha
    }
}

/// Outputs 1 iff any test of the battery rejects at level `alpha`.
pub struct BatteryRejects {
    pub alpha: f64,
}

impl Distinguisher for BatteryRejects {
    fn name(&self) -> String {
        "battery".into()
    }
    fn decide(&self, bits: &[bool]) -> bool {
        TestKind::ALL.iter().any(|&t| test_p(t, bits) < self.alpha)
    }
}

/// The registered suite: each battery test alone, then the whole battery.
pub fn default_suite(alpha: f64) -> Vec<Box<dyn Distinguisher>> {
    let mut v: Vec<Box<dyn Distinguisher>> = TestKind::ALL
        .iter()
        .map(|&test| Box::new(TestRejects { test, alpha }) as Box<dyn Distinguisher>)
        .collect();
    v.push(Box::new(BatteryRejects { alpha }));
    v
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdvantageEstimate {
    pub name: String,
    /// `Pr[D = 1]` on the source under test.
    pub p1_hat: f64,
    /// `Pr[D = 1]` on the uniform reference.
    pub p2_hat: f64,
    pub raw_advantage: f64,
    pub trials: usize,
    /// 95% half-width, two-sample normal approximation.
    pub ci_halfwidth: f64,
    pub budget_exhausted: usize,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub m_len: usize,
    pub trials: usize,
    pub master_seed: u64,
    /// Per-decision wall-clock budget; decisions that overrun are discarded.
    pub budget: Option<Duration>,
}

fn timed(d: &dyn Distinguisher, bits: &[bool], budget: Option<Duration>) -> Option<bool> {
    let start = Instant::now();
    let out = d.decide(bits);
    match budget {
        Some(b) if start.elapsed() > b => None,
        _ => Some(out),
    }
}

fn ci_two_sample(p1: f64, n1: usize, p2: f64, n2: usize) -> f64 {
    let v1 = if n1 > 0 { p1 * (1.0 - p1) / n1 as f64 } else { 0.0 };
    let v2 = if n2 > 0 { p2 * (1.0 - p2) / n2 as f64 } else { 0.0 };
    Z95 * (v1 + v2).sqrt()
}

/// Samples drawn for one trial: `(source sample, uniform sample)`.
pub fn trial_samples(source: &SourceSpec, m_len: usize, master_seed: u64, trial: u64) -> (Vec<bool>, Vec<bool>) {
    let a = source
        .instantiate(derive_seed(master_seed, "distinguish/source", trial), trial, m_len)
        .take_bits(m_len);
    let b = SourceSpec::Uniform
        .instantiate(derive_seed(master_seed, "distinguish/uniform", trial), trial, m_len)
        .take_bits(m_len);
    (a, b)
}

fn validate(opts: &RunOptions) -> Result<(), DistinguishError> {
    if opts.m_len == 0 {
        return Err(DistinguishError::EmptyOutput);
    }
    if opts.trials < MIN_TRIALS {
        return Err(DistinguishError::TooFewTrials {
            got: opts.trials,
            min: MIN_TRIALS,
        });
    }
    Ok(())
}

fn estimate(name: String, counts: &Counts, trials: usize, elapsed: Duration) -> AdvantageEstimate {
    let p1 = counts.ones_src as f64 / counts.valid_src.max(1) as f64;
    let p2 = counts.ones_uni as f64 / counts.valid_uni.max(1) as f64;
    AdvantageEstimate {
        name,
        p1_hat: p1,
        p2_hat: p2,
        raw_advantage: (p1 - p2).abs(),
        trials,
        ci_halfwidth: ci_two_sample(p1, counts.valid_src, p2, counts.valid_uni),
        budget_exhausted: counts.exhausted,
        elapsed,
    }
}

#[derive(Clone, Copy, Default)]
struct Counts {
    ones_src: usize,
    valid_src: usize,
    ones_uni: usize,
    valid_uni: usize,
    exhausted: usize,
}

impl Counts {
    fn record(&mut self, src: Option<bool>, uni: Option<bool>) {
        match src {
            Some(b) => {
                self.valid_src += 1;
                self.ones_src += b as usize;
            }
            None => self.exhausted += 1,
        }
        match uni {
            Some(b) => {
                self.valid_uni += 1;
                self.ones_uni += b as usize;
            }
            None => self.exhausted += 1,
        }
    }

    fn merge(mut self, o: Counts) -> Counts {
        self.ones_src += o.ones_src;
        self.valid_src += o.valid_src;
        self.ones_uni += o.ones_uni;
        self.valid_uni += o.valid_uni;
        self.exhausted += o.exhausted;
        self
    }
}

/// Estimates one distinguisher's advantage against `source`.
pub fn run_distinguisher(
    d: &dyn Distinguisher,
    source: &SourceSpec,
    opts: &RunOptions,
) -> Result<AdvantageEstimate, DistinguishError> {
    Ok(run_suite(&[d], source, opts)?.remove(0))
}

/// Runs several distinguishers over the same trial samples. Trials run in
/// parallel; counts are summed, so the result does not depend on scheduling.
pub fn run_suite(
    suite: &[&dyn Distinguisher],
    source: &SourceSpec,
    opts: &RunOptions,
) -> Result<Vec<AdvantageEstimate>, DistinguishError> {
    validate(opts)?;
    let start = Instant::now();
    let zero = vec![Counts::default(); suite.len()];
    let counts = (0..opts.trials as u64)
        .into_par_iter()
        .fold(
            || zero.clone(),
            |mut acc, t| {
                let (a, b) = trial_samples(source, opts.m_len, opts.master_seed, t);
                for (c, d) in acc.iter_mut().zip(suite) {
                    c.record(timed(*d, &a, opts.budget), timed(*d, &b, opts.budget));
                }
                acc
            },
        )
        .reduce(
            || zero.clone(),
            |x, y| x.into_iter().zip(y).map(|(a, b)| a.merge(b)).collect(),
        );
    let elapsed = start.elapsed();
    Ok(suite
        .iter()
        .zip(&counts)
        .map(|(d, c)| estimate(d.name(), c, opts.trials, elapsed))
        .collect())
}

/// The suite entry with the largest advantage: a lower bound on insecurity.
pub fn max_advantage(estimates: &[AdvantageEstimate]) -> Option<&AdvantageEstimate> {
    estimates
        .iter()
        .max_by(|a, b| a.raw_advantage.total_cmp(&b.raw_advantage))
}

/// Guesses bit `l + 1` from the first `l` bits.
pub trait NextBitPredictor: Sync {
    fn name(&self) -> String;
    fn predict(&self, prefix: &[bool]) -> bool;
}

/// Predicts the majority value of the prefix (ties and empty prefix → 1).
pub struct MajorityPredictor;

impl NextBitPredictor for MajorityPredictor {
    fn name(&self) -> String {
        "majority".into()
    }
    fn predict(&self, prefix: &[bool]) -> bool {
        let ones = prefix.iter().filter(|&&b| b).count();
        2 * ones >= prefix.len()
    }
}

/// Predicts the complement of the previous bit, i.e. that the low bit of the
/// state alternates parity. Empty prefix → 0.
pub struct ParityFlipPredictor;

impl NextBitPredictor for ParityFlipPredictor {
    fn name(&self) -> String {
        "lsb_parity".into()
    }
    fn predict(&self, prefix: &[bool]) -> bool {
        prefix.last().map(|b| !b).unwrap_or(false)
    }
}

/// Predicts a repeat of the previous bit. Empty prefix → 0.
pub struct RepeatPredictor;

impl NextBitPredictor for RepeatPredictor {
    fn name(&self) -> String {
        "repeat".into()
    }
    fn predict(&self, prefix: &[bool]) -> bool {
        prefix.last().copied().unwrap_or(false)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Accuracy {
    pub name: String,
    pub success: f64,
    pub trials: usize,
    pub ci_halfwidth: f64,
}

/// Fraction of trials in which the predictor, given the first `prefix_len`
/// bits of a fresh stream, guesses the next one.
pub fn next_bit_accuracy(
    predictor: &dyn NextBitPredictor,
    source: &SourceSpec,
    prefix_len: usize,
    trials: usize,
    master_seed: u64,
) -> Accuracy {
    let hits: usize = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let bits = source
                .instantiate(derive_seed(master_seed, "nextbit/source", t), t, prefix_len + 1)
                .take_bits(prefix_len + 1);
            (predictor.predict(&bits[..prefix_len]) == bits[prefix_len]) as usize
        })
        .sum();
    let p = hits as f64 / trials.max(1) as f64;
    Accuracy {
        name: predictor.name(),
        success: p,
        trials,
        ci_halfwidth: Z95 * (p * (1.0 - p) / trials.max(1) as f64).sqrt(),
    }
}
