use wsnsec_core::distinguish::{
    longest_run_p, monobit_p, run_distinguisher, runs_p, serial_p, test_battery, BatteryRejects, RunOptions,
    TestKind, TestRejects,
};
use wsnsec_core::source::{BitStream, SourceSpec, UniformBits};

fn bits(s: &str) -> Vec<bool> {
    s.bytes().map(|c| c == b'1').collect()
}

fn xorshift_bits(n: usize) -> Vec<bool> {
    let mut state: u32 = 2463534242;
    (0..n)
        .map(|_| {
            state ^= state << 13;
            state ^= state >> 17;
            state ^= state << 5;
            state >> 31 == 1
        })
        .collect()
}

const NIST_100: &str =
    "1100100100001111110110101010001000100001011010001100001000110100110001001100011001100010100010111000";
const NIST_128: &str = "11001100000101010110110001001100111000000000001001001101010100010001001111010110100000001101011111001100111001101101100010110010";

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9
}

#[test]
fn p_values_match_reference() {
    // [monobit, runs, serial, longest_run] from tools/oracles/battery_golden.py
    let cases: [(Vec<bool>, [f64; 4]); 4] = [
        (bits(NIST_100), [0.109598583399, 0.500797917887, 0.256660776954, 0.038801618361]),
        (bits(NIST_128), [0.215924938940, 0.620728953394, 0.436867645706, 0.180597976786]),
        (xorshift_bits(1000), [0.229493148733, 0.140384967657, 0.153508398515, 0.192471538257]),
        (xorshift_bits(7000), [0.684465082324, 0.072676152950, 0.192599407270, 0.144883198896]),
    ];
    for (b, want) in cases {
        let got = [monobit_p(&b), runs_p(&b), serial_p(&b), longest_run_p(&b)];
        for (g, w) in got.iter().zip(want) {
            assert!(close(*g, w), "n={} got {g} want {w}", b.len());
        }
        let r = test_battery(&b).unwrap();
        assert!(close(r.get(TestKind::Runs), want[1]));
    }
}

#[test]
fn short_textbook_vectors() {
    assert!((monobit_p(&bits("1011010101")) - 0.527089).abs() < 1e-6);
    assert!((runs_p(&bits("1001101011")) - 0.147232).abs() < 1e-6);
}

/// Kolmogorov-Smirnov distance between the empirical CDF and U(0, 1).
fn ks_distance(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).abs().max(((i + 1) as f64 / n - x).abs()))
        .fold(0.0, f64::max)
}

#[test]
fn p_values_uniform_on_uniform_input() {
    let samples = 400;
    let mut ps = vec![Vec::new(); 4];
    for i in 0..samples {
        let mut seed = [0u8; 32];
        seed[..8].copy_from_slice(&(i as u64).to_le_bytes());
        let b = UniformBits::new(seed).take_bits(2000);
        let r = test_battery(&b).unwrap();
        for (slot, (_, p)) in ps.iter_mut().zip(r.iter()) {
            slot.push(p);
        }
    }
    // 1% critical value of the one-sample KS statistic
    let crit = 1.63 / (samples as f64).sqrt();
    for (k, p) in ps.into_iter().enumerate() {
        let d = ks_distance(p);
        assert!(d < crit, "test {k}: KS distance {d} >= {crit}");
    }
}

#[test]
fn size_is_controlled_on_uniform_source() {
    let alpha = 0.01;
    let trials = 3000;
    let opts = RunOptions {
        m_len: 1000,
        trials,
        master_seed: 11,
        budget: None,
    };
    let slack = 3.0 * (alpha * (1.0 - alpha) / trials as f64).sqrt();
    for test in [TestKind::Monobit, TestKind::Runs, TestKind::Serial, TestKind::LongestRun] {
        let e = run_distinguisher(&TestRejects { test, alpha }, &SourceSpec::Uniform, &opts).unwrap();
        assert!(e.p1_hat <= alpha + slack, "{test:?}: rejection rate {}", e.p1_hat);
        assert!(e.raw_advantage <= e.ci_halfwidth * 1.5, "{test:?}: advantage {}", e.raw_advantage);
    }
    // union of four tests: at most 4α
    let e = run_distinguisher(&BatteryRejects { alpha }, &SourceSpec::Uniform, &opts).unwrap();
    assert!(e.p1_hat <= 4.0 * alpha + 2.0 * slack);
}
