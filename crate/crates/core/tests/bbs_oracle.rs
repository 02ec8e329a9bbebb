use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use wsnsec_core::bbs::{seed_state, BbsParams};

/// Schoolbook squaring on machine integers, kept apart from the library code.
fn reference(p: u64, q: u64, s: u64, steps: usize) -> (Vec<u64>, Vec<u8>) {
    let n = p * q;
    let mut x = (s as u128 * s as u128 % n as u128) as u64;
    let mut states = vec![x];
    let mut bits = Vec::new();
    for _ in 0..steps {
        x = (x as u128 * x as u128 % n as u128) as u64;
        states.push(x);
        bits.push((x & 1) as u8);
    }
    (states, bits)
}

fn library(p: u64, q: u64, s: u64, steps: usize) -> (Vec<u64>, Vec<u8>) {
    let params = BbsParams::from_primes(p, q).unwrap();
    let mut st = seed_state(&params, &BigUint::from(s)).unwrap();
    let as_u64 = |x: &BigUint| x.to_u64_digits().first().copied().unwrap_or(0);
    let mut states = vec![as_u64(st.x())];
    let mut bits = Vec::new();
    for _ in 0..steps {
        bits.push(st.next_bit() as u8);
        states.push(as_u64(st.x()));
    }
    (states, bits)
}

fn bit_string(bits: &[u8]) -> String {
    bits.iter().map(|b| char::from(b'0' + b)).collect()
}

#[test]
fn frozen_trajectories() {
    // produced by tools/oracles/bbs_trajectories.py
    let cases: [(u64, u64, u64, &[u64], &str); 4] = [
        (7, 11, 3, &[9, 4, 16, 25, 9, 4, 16, 25], "001100110011001100110011"),
        (
            499,
            547,
            123,
            &[15129, 152027, 186407, 106843, 259236, 91472, 25522, 106626],
            "111000001111001101110111",
        ),
        (
            40423,
            65519,
            99991,
            &[2052776470, 425223438, 415806839, 1558770295, 1251053062, 2113926092, 23434758, 202526244],
            "011000000110101110101000",
        ),
        (
            1019,
            1031,
            5,
            &[25, 625, 390625, 344265, 394546, 773986, 75684, 256628],
            "111000001000010001010101",
        ),
    ];
    for (p, q, s, states, bits) in cases {
        let (got_states, got_bits) = library(p, q, s, 24);
        assert_eq!(&got_states[..8], states, "p={p} q={q}");
        assert_eq!(bit_string(&got_bits), bits, "p={p} q={q}");
    }
}

fn is_prime_trial(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn blum_prime(rng: &mut ChaCha20Rng) -> u64 {
    loop {
        let c = rng.gen_range(1u64 << 7..1 << 16);
        if c % 4 == 3 && is_prime_trial(c) {
            return c;
        }
    }
}

#[test]
fn random_small_moduli_match_reference() {
    let mut rng = ChaCha20Rng::seed_from_u64(0x5eed);
    for _ in 0..100 {
        let p = blum_prime(&mut rng);
        let q = loop {
            let q = blum_prime(&mut rng);
            if q != p {
                break q;
            }
        };
        let n = p * q;
        let s = loop {
            let s = rng.gen_range(2..n);
            if gcd(s, n) == 1 {
                break s;
            }
        };
        assert_eq!(library(p, q, s, 200), reference(p, q, s, 200), "p={p} q={q} s={s}");
    }
}
