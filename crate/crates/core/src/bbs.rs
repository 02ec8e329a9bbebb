//! Blum-Blum-Shub generator.
//!
//! `N = p·q` with distinct primes `p ≡ q ≡ 3 (mod 4)`; the state is seeded with
//! `x₀ = s² mod N` and each step squares the state and emits its least
//! significant bit.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::seed::ByteExpander;

/// Smallest modulus size accepted by [`generate_params`].
pub const MIN_MODULUS_BITS: u64 = 16;

/// Miller-Rabin rounds used for every primality decision.
pub const MILLER_RABIN_ROUNDS: usize = 40;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BbsError {
    #[error("modulus bit length {0} is below the minimum of {MIN_MODULUS_BITS} bits")]
    ModulusTooSmall(u64),
    #[error("{0} is not prime")]
    NotPrime(BigUint),
    #[error("{0} is not congruent to 3 mod 4")]
    NotBlumPrime(BigUint),
    #[error("p and q must be distinct")]
    EqualPrimes,
    #[error("seed must satisfy 1 <= s <= N-1")]
    SeedOutOfRange,
    #[error("seed shares a factor with the modulus (gcd = {0})")]
    SeedNotCoprime(BigUint),
}

/// Generator parameters. `p` and `q` are secret; only the modulus is ever
/// printed (the `Debug` impl omits the factors).
#[derive(Clone, PartialEq, Eq)]
pub struct BbsParams {
    p: BigUint,
    q: BigUint,
    modulus: BigUint,
}

impl fmt::Debug for BbsParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BbsParams")
            .field("modulus", &self.modulus)
            .field("bits", &self.modulus.bits())
            .finish_non_exhaustive()
    }
}

impl BbsParams {
    /// Builds parameters from explicit primes. Any size is accepted, which is
    /// what makes desk-checkable moduli like `7·11` possible; production code
    /// should go through [`generate_params`].
    pub fn from_primes(p: impl Into<BigUint>, q: impl Into<BigUint>) -> Result<Self, BbsError> {
        let (p, q) = (p.into(), q.into());
        for f in [&p, &q] {
            if !is_probable_prime(f, MILLER_RABIN_ROUNDS) {
                return Err(BbsError::NotPrime(f.clone()));
            }
            if f % 4u32 != BigUint::from(3u32) {
                return Err(BbsError::NotBlumPrime(f.clone()));
            }
        }
        if p == q {
            return Err(BbsError::EqualPrimes);
        }
        let modulus = &p * &q;
        Ok(Self { p, q, modulus })
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn bit_length(&self) -> u64 {
        self.modulus.bits()
    }

    /// The secret factors. Callers that print or persist parameters should
    /// use [`BbsParams::modulus`] instead.
    pub fn secret_factors(&self) -> (&BigUint, &BigUint) {
        (&self.p, &self.q)
    }
}

/// Deterministically generates a `bit_length`-bit Blum modulus from
/// `entropy_seed`.
///
/// The factors have `ceil(bits/2)` and `floor(bits/2)` bits with their top two
/// bits set, so the product has exactly `bit_length` bits.
pub fn generate_params(bit_length: u64, entropy_seed: &[u8]) -> Result<BbsParams, BbsError> {
    if bit_length < MIN_MODULUS_BITS {
        return Err(BbsError::ModulusTooSmall(bit_length));
    }
    let mut stream = ByteExpander::new(entropy_seed, b"bbs/primes");
    let p_bits = bit_length.div_ceil(2);
    let q_bits = bit_length - p_bits;
    let p = random_blum_prime(p_bits, &mut stream, None);
    let q = random_blum_prime(q_bits, &mut stream, Some(&p));
    let params = BbsParams::from_primes(p, q)?;
    debug_assert_eq!(params.bit_length(), bit_length);
    Ok(params)
}

/// Derives a valid seed `s ∈ [1, N-1]` coprime to `N` from arbitrary bytes.
pub fn derive_seed_value(params: &BbsParams, entropy: &[u8]) -> BigUint {
    let mut stream = ByteExpander::new(entropy, b"bbs/seed");
    let n = params.modulus();
    let width = n.bits().div_ceil(8) as usize + 8;
    loop {
        let s = BigUint::from_bytes_be(&stream.take(width)) % n;
        if !s.is_zero() && s.gcd(n).is_one() {
            return s;
        }
    }
}

fn random_blum_prime(bits: u64, stream: &mut ByteExpander, distinct_from: Option<&BigUint>) -> BigUint {
    debug_assert!(bits >= 3);
    let nbytes = bits.div_ceil(8) as usize;
    let mut witness_stream = stream.clone();
    loop {
        let mut cand = BigUint::from_bytes_be(&stream.take(nbytes));
        // keep exactly `bits` bits, force the top two and the low two
        cand &= (BigUint::one() << bits) - 1u32;
        cand.set_bit(bits - 1, true);
        cand.set_bit(bits - 2, true);
        cand.set_bit(0, true);
        cand.set_bit(1, true);
        if distinct_from == Some(&cand) {
            continue;
        }
        if has_small_factor(&cand) {
            continue;
        }
        if miller_rabin(&cand, MILLER_RABIN_ROUNDS, &mut witness_stream) {
            return cand;
        }
    }
}

const SMALL_PRIMES: [u32; 53] = [
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193,
    197, 199, 211, 223, 227, 229, 233, 239, 241, 251,
];

fn has_small_factor(n: &BigUint) -> bool {
    SMALL_PRIMES
        .iter()
        .any(|&sp| n > &BigUint::from(sp) && (n % sp).is_zero())
}

/// Miller-Rabin with witnesses drawn from a stream keyed by `n` itself, so the
/// answer is a deterministic function of `n`.
pub fn is_probable_prime(n: &BigUint, rounds: usize) -> bool {
    let mut stream = ByteExpander::new(&n.to_bytes_be(), b"bbs/mr");
    miller_rabin(n, rounds, &mut stream)
}

fn miller_rabin(n: &BigUint, rounds: usize, stream: &mut ByteExpander) -> bool {
    let two = BigUint::from(2u32);
    if n < &two {
        return false;
    }
    if n < &BigUint::from(4u32) {
        return true;
    }
    if n.is_even() {
        return false;
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    // bases are drawn from [2, n-2]
    let span = n - 3u32;
    let width = n.bits().div_ceil(8) as usize + 8;
    'witness: for _ in 0..rounds {
        let a = BigUint::from_bytes_be(&stream.take(width)) % &span + 2u32;
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
            if x.is_one() {
                return false;
            }
        }
        return false;
    }
    true
}

/// Running generator state. Mutable and sequential; clone to fork a stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BbsState {
    modulus: Arc<BigUint>,
    x: BigUint,
    index: u64,
}

/// Seeds the generator: `x₀ = s² mod N`.
pub fn seed_state(params: &BbsParams, s: &BigUint) -> Result<BbsState, BbsError> {
    let n = params.modulus();
    if s.is_zero() || s >= n {
        return Err(BbsError::SeedOutOfRange);
    }
    let g = s.gcd(n);
    if !g.is_one() {
        return Err(BbsError::SeedNotCoprime(g));
    }
    Ok(BbsState {
        modulus: Arc::new(n.clone()),
        x: (s * s) % n,
        index: 0,
    })
}

impl BbsState {
    pub fn x(&self) -> &BigUint {
        &self.x
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    /// Number of bits emitted so far.
    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn next_bit(&mut self) -> bool {
        self.x = (&self.x * &self.x) % &*self.modulus;
        self.index += 1;
        self.x.bit(0)
    }

    pub fn generate(&mut self, len: usize) -> Vec<bool> {
        (0..len).map(|_| self.next_bit()).collect()
    }
}
