//! Bit sources shared by the scheduler, the distinguisher harness and the
//! simulator.

use std::sync::Arc;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::bbs::{derive_seed_value, seed_state, BbsParams, BbsState};

/// An unbounded stream of bits.
pub trait BitStream {
    fn next_bit(&mut self) -> bool;

    fn take_bits(&mut self, n: usize) -> Vec<bool> {
        (0..n).map(|_| self.next_bit()).collect()
    }
}

impl BitStream for BbsState {
    fn next_bit(&mut self) -> bool {
        BbsState::next_bit(self)
    }
}

impl<S: BitStream + ?Sized> BitStream for Box<S> {
    fn next_bit(&mut self) -> bool {
        (**self).next_bit()
    }
}

/// Linear congruential generator `x ← (a·x + c) mod 2^k`, emitting the low
/// `output_bits` bits of each state, least significant first. This is the
/// `rand() % 2^n` idiom with the state exposed directly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LcgParams {
    pub multiplier: u64,
    pub increment: u64,
    pub modulus_bits: u32,
    pub output_bits: u32,
}

impl Default for LcgParams {
    /// ANSI C / glibc `TYPE_0` constants with modulus `2^31`, one bit per draw.
    fn default() -> Self {
        Self {
            multiplier: 1_103_515_245,
            increment: 12_345,
            modulus_bits: 31,
            output_bits: 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Lcg {
    params: LcgParams,
    state: u64,
    pending: u64,
    pending_len: u32,
}

impl Lcg {
    pub fn new(params: LcgParams, seed: u64) -> Self {
        assert!((1..=63).contains(&params.modulus_bits));
        assert!((1..=params.modulus_bits).contains(&params.output_bits));
        Self {
            params,
            state: seed & Self::mask(params.modulus_bits),
            pending: 0,
            pending_len: 0,
        }
    }

    fn mask(bits: u32) -> u64 {
        (1u64 << bits) - 1
    }

    pub fn next_state(&mut self) -> u64 {
        let p = self.params;
        self.state = p
            .multiplier
            .wrapping_mul(self.state)
            .wrapping_add(p.increment)
            & Self::mask(p.modulus_bits);
        self.state
    }
}

impl BitStream for Lcg {
    fn next_bit(&mut self) -> bool {
        if self.pending_len == 0 {
            self.pending = self.next_state() & Self::mask(self.params.output_bits);
            self.pending_len = self.params.output_bits;
        }
        let b = self.pending & 1 == 1;
        self.pending >>= 1;
        self.pending_len -= 1;
        b
    }
}

/// Reference uniform bits from ChaCha20.
pub struct UniformBits {
    rng: ChaCha20Rng,
    word: u64,
    left: u32,
}

impl UniformBits {
    pub fn new(seed: [u8; 32]) -> Self {
        Self {
            rng: ChaCha20Rng::from_seed(seed),
            word: 0,
            left: 0,
        }
    }
}

impl BitStream for UniformBits {
    fn next_bit(&mut self) -> bool {
        if self.left == 0 {
            self.word = self.rng.next_u64();
            self.left = 64;
        }
        let b = self.word & 1 == 1;
        self.word >>= 1;
        self.left -= 1;
        b
    }
}

pub struct ConstantBits(pub bool);

impl BitStream for ConstantBits {
    fn next_bit(&mut self) -> bool {
        self.0
    }
}

/// Cycles over a fixed bit sequence starting at `offset`.
pub struct CyclicBits {
    bits: Arc<Vec<bool>>,
    pos: usize,
}

impl CyclicBits {
    pub fn new(bits: Arc<Vec<bool>>, offset: usize) -> Self {
        assert!(!bits.is_empty(), "cyclic source needs at least one bit");
        let pos = offset % bits.len();
        Self { bits, pos }
    }
}

impl BitStream for CyclicBits {
    fn next_bit(&mut self) -> bool {
        let b = self.bits[self.pos];
        self.pos = (self.pos + 1) % self.bits.len();
        b
    }
}

/// A recipe for building independent bit streams from per-stream seeds.
#[derive(Clone, Debug)]
pub enum SourceSpec {
    /// Fixed public modulus; each stream draws a fresh secret seed `s`.
    Bbs(Arc<BbsParams>),
    Lcg(LcgParams),
    Constant(bool),
    Uniform,
    /// Stream `i` of length `m` reads window `[i·m, (i+1)·m)` cyclically.
    File(Arc<Vec<bool>>),
}

impl SourceSpec {
    pub fn name(&self) -> &'static str {
        match self {
            SourceSpec::Bbs(_) => "bbs",
            SourceSpec::Lcg(_) => "lcg",
            SourceSpec::Constant(_) => "constant",
            SourceSpec::Uniform => "uniform",
            SourceSpec::File(_) => "file",
        }
    }

    /// Builds stream number `index` from a 32-byte seed. `window` is only used
    /// by file sources to pick the read offset.
    pub fn instantiate(&self, seed: [u8; 32], index: u64, window: usize) -> Box<dyn BitStream + Send> {
        match self {
            SourceSpec::Bbs(params) => {
                let s = derive_seed_value(params, &seed);
                Box::new(seed_state(params, &s).expect("derived seed is valid"))
            }
            SourceSpec::Lcg(p) => {
                let s = u64::from_le_bytes(seed[..8].try_into().unwrap());
                Box::new(Lcg::new(*p, s))
            }
            SourceSpec::Constant(b) => Box::new(ConstantBits(*b)),
            SourceSpec::Uniform => Box::new(UniformBits::new(seed)),
            SourceSpec::File(bits) => {
                let off = (index as usize).wrapping_mul(window);
                Box::new(CyclicBits::new(bits.clone(), off))
            }
        }
    }
}

/// Parses a textual bit file: `0`/`1` characters, whitespace ignored.
pub fn parse_bit_text(text: &str) -> Result<Vec<bool>, char> {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(other),
        })
        .collect()
}
