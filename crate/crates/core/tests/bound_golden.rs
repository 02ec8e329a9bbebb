use wsnsec_core::bound::{
    gnfs_cost, is_secure_against, max_secure_time, max_secure_time_log, ExtFloat, Interpretation, SecurityQuery,
    Verdict,
};

/// `(mantissa, decimal exponent)` from tools/oracles/bound_golden.py.
fn golden(mant: f64, exp10: i32) -> ExtFloat {
    ExtFloat::from_f64(mant) * ExtFloat::exp(exp10 as f64 * std::f64::consts::LN_10)
}

const TOL: f64 = 1e-9;

#[test]
fn golden_values() {
    use Interpretation::*;
    let cases = [
        (Grouped, 900, 100, golden(1.368025319982433483659477, 22), golden(4.053291976532917093982478, 11)),
        (Literal, 900, 100, golden(7.500704302958865505295934, 2298), golden(5.66150513567949779163513, 2288)),
        (Grouped, 32, 100, golden(2.721886953203511232053223, 2), golden(-1.737296310749397599853806, 10)),
        (Literal, 32, 100, golden(5.249830455832456878549591, 47), golden(2.187429356596857032728996, 39)),
        (Grouped, 512, 128, golden(4.906967139388732313772028, 16), golden(-5.723518160871297746401246, 11)),
        (Literal, 1024, 1000, golden(7.173508726863563660401046, 2650), golden(4.670253077385132591406931, 2638)),
    ];
    for (interp, n, m, l, t) in cases {
        let got_l = gnfs_cost(n, interp);
        let got_t = max_secure_time(n, m, 0.2, interp);
        assert!(got_l.relative_difference(&l) < TOL, "{interp:?} n={n}: L {got_l} vs {l}");
        assert!(got_t.relative_difference(&t) < TOL, "{interp:?} n={n}: t_max {got_t} vs {t}");
        let via_log = max_secure_time_log(n, m, 0.2, interp).to_ext();
        assert!(via_log.relative_difference(&t) < TOL, "{interp:?} n={n}: log route {via_log}");
    }
}

#[test]
fn case_study_verdicts() {
    let q = SecurityQuery {
        n_bits: 900,
        m_len: 100,
        epsilon: 0.2,
        attacker_cycles: 1e12,
    };
    assert_eq!(is_secure_against(q, Interpretation::Literal).verdict, Verdict::Secure);
    assert_eq!(is_secure_against(q, Interpretation::Grouped).verdict, Verdict::Insecure);
    for i in Interpretation::ALL {
        assert!(is_secure_against(q, i).route_disagreement() <= TOL);
    }
}

#[test]
fn monotone_in_epsilon_and_length() {
    for interp in Interpretation::ALL {
        for n in [512u64, 900, 2048] {
            let eps: Vec<f64> = (1..=100).map(|i| i as f64 / 101.0).collect();
            let ts: Vec<ExtFloat> = eps.iter().map(|&e| max_secure_time(n, 100, e, interp)).collect();
            assert!(ts.windows(2).all(|w| w[0] < w[1]), "{interp:?} n={n}: not increasing in epsilon");
            let ts: Vec<ExtFloat> = (1..=100).map(|m| max_secure_time(n, m * 10, 0.2, interp)).collect();
            assert!(ts.windows(2).all(|w| w[0] > w[1]), "{interp:?} n={n}: not decreasing in M");
        }
    }
}

#[test]
fn routes_agree_across_grid() {
    for interp in Interpretation::ALL {
        for n in (64..=4096).step_by(64) {
            for m in [1, 10, 100, 10_000] {
                for eps in [0.01, 0.2, 0.9] {
                    let a = max_secure_time(n, m, eps, interp);
                    let b = max_secure_time_log(n, m, eps, interp).to_ext();
                    assert!(a.relative_difference(&b) <= TOL, "{interp:?} n={n} m={m} eps={eps}: {a} vs {b}");
                }
            }
        }
    }
}
