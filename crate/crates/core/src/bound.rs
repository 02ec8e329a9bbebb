//! Concrete security of BBS-driven scheduling.
//!
//! The attacker budget `T` (clock cycles) that provably cannot mount a
//! `(T, ε)` distinguishing attack on `M` output bits of an `n`-bit BBS modulus
//! is bounded by
//!
//! ```text
//! T ≤ L(n) / (6·n·log₂n·ε⁻²·M²) − 2⁷·n·ε⁻²·M²·log₂(8·n·ε⁻¹·M)
//! L(n) = 2.8e-3 · exp(1.9229 · A · B)
//! ```
//!
//! where `L(n)` is the cycle cost of factoring an `n`-bit integer with the
//! number field sieve. The typesetting of `A` is ambiguous, so both readings
//! are available through [`Interpretation`]. `L` overflows `f64` for the
//! literal reading at realistic sizes, so values are carried as [`ExtFloat`]
//! (an `f64` mantissa with a separate binary exponent) and cross-checked
//! against a pure log-domain evaluation.

use std::cmp::Ordering;
use std::f64::consts::LN_2;
use std::fmt;
use std::ops::{Div, Mul, Neg, Sub};
use std::str::FromStr;

const GNFS_SCALE: f64 = 2.8e-3;
const GNFS_EXPONENT: f64 = 1.9229;

/// How the first factor of the GNFS exponent is parenthesised.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Interpretation {
    /// `A = (n·ln 2)^{1/3}`, the usual heuristic GNFS complexity.
    Grouped,
    /// `A = n·(ln 2)^{1/3}`, the formula exactly as typeset.
    Literal,
}

impl Interpretation {
    /// The reading under which the reference case (900-bit modulus, `M = 100`,
    /// `ε = 0.2`, `T = 10¹²`) comes out secure. Under `Grouped` that case
    /// evaluates to `t_max ≈ 4.05·10¹¹ < 10¹²`.
    pub const DEFAULT: Interpretation = Interpretation::Literal;

    pub const ALL: [Interpretation; 2] = [Interpretation::Grouped, Interpretation::Literal];

    pub fn as_str(self) -> &'static str {
        match self {
            Interpretation::Grouped => "grouped",
            Interpretation::Literal => "literal",
        }
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Interpretation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "grouped" => Ok(Interpretation::Grouped),
            "literal" => Ok(Interpretation::Literal),
            other => Err(format!("unknown interpretation `{other}` (expected grouped|literal)")),
        }
    }
}

/// Real number `mant · 2^exp` with `0.5 ≤ |mant| < 1` (or zero). Covers the
/// range of `L(n)` for any practical modulus size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtFloat {
    mant: f64,
    exp: i64,
}

impl ExtFloat {
    pub const ZERO: ExtFloat = ExtFloat { mant: 0.0, exp: 0 };

    pub fn from_f64(v: f64) -> Self {
        assert!(v.is_finite(), "ExtFloat::from_f64 on non-finite {v}");
        Self::normalized(v, 0)
    }

    fn normalized(mant: f64, exp: i64) -> Self {
        if mant == 0.0 {
            return Self::ZERO;
        }
        let e = mant.abs().log2().floor() as i64 + 1;
        let mut m = mant * 2f64.powi(-e as i32);
        let mut e = exp + e;
        // log2 rounding can leave the mantissa just outside [0.5, 1)
        if m.abs() >= 1.0 {
            m /= 2.0;
            e += 1;
        } else if m.abs() < 0.5 {
            m *= 2.0;
            e -= 1;
        }
        Self { mant: m, exp: e }
    }

    /// `e^x` without overflow.
    pub fn exp(x: f64) -> Self {
        let k = (x / LN_2).floor();
        let r = x - k * LN_2;
        Self::normalized(r.exp(), k as i64)
    }

    pub fn is_zero(&self) -> bool {
        self.mant == 0.0
    }

    pub fn is_sign_negative(&self) -> bool {
        self.mant < 0.0
    }

    /// `ln |self|`.
    pub fn ln_abs(&self) -> f64 {
        self.mant.abs().ln() + self.exp as f64 * LN_2
    }

    pub fn log10_abs(&self) -> f64 {
        self.ln_abs() / std::f64::consts::LN_10
    }

    /// Nearest `f64`, saturating to ±∞.
    pub fn to_f64(&self) -> f64 {
        if self.exp > 1100 {
            return f64::INFINITY.copysign(self.mant);
        }
        if self.exp < -1100 {
            return 0.0;
        }
        self.mant * 2f64.powi(self.exp as i32)
    }

    /// `|self / other - 1|`.
    pub fn relative_difference(&self, other: &ExtFloat) -> f64 {
        if other.is_zero() {
            return if self.is_zero() { 0.0 } else { f64::INFINITY };
        }
        let q = *self / *other;
        (q.to_f64() - 1.0).abs()
    }

    /// Decimal mantissa and exponent, `self = m · 10^e` with `1 ≤ |m| < 10`.
    pub fn to_decimal(&self) -> (f64, i64) {
        if self.is_zero() {
            return (0.0, 0);
        }
        let l = self.log10_abs();
        let mut e = l.floor() as i64;
        let mut m = 10f64.powf(l - e as f64);
        if m >= 10.0 {
            m /= 10.0;
            e += 1;
        }
        (m.copysign(self.mant), e)
    }
}

impl Mul for ExtFloat {
    type Output = ExtFloat;
    fn mul(self, rhs: ExtFloat) -> ExtFloat {
        ExtFloat::normalized(self.mant * rhs.mant, self.exp + rhs.exp)
    }
}

impl Div for ExtFloat {
    type Output = ExtFloat;
    fn div(self, rhs: ExtFloat) -> ExtFloat {
        assert!(!rhs.is_zero(), "ExtFloat division by zero");
        ExtFloat::normalized(self.mant / rhs.mant, self.exp - rhs.exp)
    }
}

impl Neg for ExtFloat {
    type Output = ExtFloat;
    fn neg(self) -> ExtFloat {
        ExtFloat {
            mant: -self.mant,
            exp: self.exp,
        }
    }
}

impl Sub for ExtFloat {
    type Output = ExtFloat;
    fn sub(self, rhs: ExtFloat) -> ExtFloat {
        if rhs.is_zero() {
            return self;
        }
        if self.is_zero() {
            return -rhs;
        }
        let e = self.exp.max(rhs.exp);
        let shift = |v: ExtFloat| {
            let d = e - v.exp;
            if d > 1100 {
                0.0
            } else {
                v.mant * 2f64.powi(-(d as i32))
            }
        };
        ExtFloat::normalized(shift(self) - shift(rhs), e)
    }
}

impl PartialOrd for ExtFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let d = *self - *other;
        if d.is_zero() {
            Some(Ordering::Equal)
        } else if d.is_sign_negative() {
            Some(Ordering::Less)
        } else {
            Some(Ordering::Greater)
        }
    }
}

impl fmt::Display for ExtFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (m, e) = self.to_decimal();
        let prec = f.precision().unwrap_or(12);
        // rounding may carry the mantissa up to 10
        let rounded: f64 = format!("{m:.prec$}").parse().unwrap();
        if rounded.abs() >= 10.0 {
            write!(f, "{:.prec$}e{}", rounded / 10.0, e + 1)
        } else {
            write!(f, "{rounded:.prec$}e{e}")
        }
    }
}

fn gnfs_exponent(n_bits: u64, interp: Interpretation) -> f64 {
    let n = n_bits as f64;
    let a = match interp {
        Interpretation::Grouped => (n * LN_2).cbrt(),
        Interpretation::Literal => n * LN_2.cbrt(),
    };
    let b = (n * LN_2).ln().powf(2.0 / 3.0);
    GNFS_EXPONENT * a * b
}

/// `L(n)`: clock cycles to factor an `n`-bit integer.
pub fn gnfs_cost(n_bits: u64, interp: Interpretation) -> ExtFloat {
    assert!(n_bits >= 2, "gnfs_cost needs n_bits >= 2");
    ExtFloat::from_f64(GNFS_SCALE) * ExtFloat::exp(gnfs_exponent(n_bits, interp))
}

/// `ln L(n)`, evaluated without ever forming `L(n)`.
pub fn ln_gnfs_cost(n_bits: u64, interp: Interpretation) -> f64 {
    GNFS_SCALE.ln() + gnfs_exponent(n_bits, interp)
}

/// Right-hand side of the `(T, ε)` bound, exactly as written (may be negative).
pub fn max_secure_time(n_bits: u64, m_len: u64, epsilon: f64, interp: Interpretation) -> ExtFloat {
    let n = n_bits as f64;
    let m2 = (m_len as f64).powi(2);
    let inv_eps2 = epsilon.powi(-2);
    let divisor = 6.0 * n * n.log2() * inv_eps2 * m2;
    let first = gnfs_cost(n_bits, interp) / ExtFloat::from_f64(divisor);
    let second = 128.0 * n * inv_eps2 * m2 * (8.0 * n * m_len as f64 / epsilon).log2();
    first - ExtFloat::from_f64(second)
}

/// Sign and natural log of the magnitude of a real number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogValue {
    pub negative: bool,
    /// `ln |v|`; `-∞` for zero.
    pub ln_abs: f64,
}

impl LogValue {
    pub fn to_ext(self) -> ExtFloat {
        if self.ln_abs == f64::NEG_INFINITY {
            return ExtFloat::ZERO;
        }
        let v = ExtFloat::exp(self.ln_abs);
        if self.negative {
            -v
        } else {
            v
        }
    }
}

/// Same bound as [`max_secure_time`], computed entirely on logarithms:
/// `ln(a − b) = ln a + ln(1 − e^{ln b − ln a})`.
pub fn max_secure_time_log(n_bits: u64, m_len: u64, epsilon: f64, interp: Interpretation) -> LogValue {
    let n = n_bits as f64;
    let ln_m2 = 2.0 * (m_len as f64).ln();
    let ln_inv_eps2 = -2.0 * epsilon.ln();
    let ln_first = ln_gnfs_cost(n_bits, interp)
        - (6f64.ln() + n.ln() + n.log2().ln() + ln_inv_eps2 + ln_m2);
    let ln_second = 7.0 * LN_2
        + n.ln()
        + ln_inv_eps2
        + ln_m2
        + ((8.0f64).log2() + n.log2() + (m_len as f64).log2() - epsilon.log2()).ln();
    match ln_first.partial_cmp(&ln_second).unwrap() {
        Ordering::Equal => LogValue {
            negative: false,
            ln_abs: f64::NEG_INFINITY,
        },
        Ordering::Greater => LogValue {
            negative: false,
            ln_abs: ln_first + (-(ln_second - ln_first).exp()).ln_1p(),
        },
        Ordering::Less => LogValue {
            negative: true,
            ln_abs: ln_second + (-(ln_first - ln_second).exp()).ln_1p(),
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecurityQuery {
    pub n_bits: u64,
    pub m_len: u64,
    pub epsilon: f64,
    pub attacker_cycles: f64,
}

impl SecurityQuery {
    pub fn validate(&self) -> Result<(), String> {
        if self.n_bits < 2 {
            return Err(format!("modulus bit length must be >= 2, got {}", self.n_bits));
        }
        if self.m_len < 1 {
            return Err("output length must be >= 1".into());
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(format!("epsilon must lie in (0, 1), got {}", self.epsilon));
        }
        if !(self.attacker_cycles >= 0.0 && self.attacker_cycles.is_finite()) {
            return Err(format!(
                "attacker cycle budget must be a finite value >= 0, got {}",
                self.attacker_cycles
            ));
        }
        Ok(())
    }

    /// Time-success ratio `T/ε` of the attacker described by this query.
    pub fn time_success_ratio(&self) -> f64 {
        self.attacker_cycles / self.epsilon
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Secure,
    Insecure,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Secure => "secure",
            Verdict::Insecure => "insecure",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub query: SecurityQuery,
    pub interpretation: Interpretation,
    pub gnfs_cost: ExtFloat,
    pub t_max: ExtFloat,
    /// The same bound evaluated on logarithms, for cross-checking.
    pub t_max_log: LogValue,
    pub verdict: Verdict,
    pub time_success_ratio: f64,
}

impl BoundReport {
    /// Relative disagreement between the extended-precision and log-domain
    /// evaluations of `t_max`.
    pub fn route_disagreement(&self) -> f64 {
        self.t_max.relative_difference(&self.t_max_log.to_ext())
    }

    /// Whether `T/ε` is at or below a caller-chosen threshold.
    pub fn ratio_within(&self, threshold: f64) -> bool {
        self.time_success_ratio <= threshold
    }
}

/// Secure iff `t_max > 0` and the attacker's budget does not exceed it.
/// A negative `t_max` is reported unchanged.
pub fn is_secure_against(query: SecurityQuery, interp: Interpretation) -> BoundReport {
    let t_max = max_secure_time(query.n_bits, query.m_len, query.epsilon, interp);
    let t_max_log = max_secure_time_log(query.n_bits, query.m_len, query.epsilon, interp);
    let positive = !t_max.is_zero() && !t_max.is_sign_negative();
    let within = ExtFloat::from_f64(query.attacker_cycles) <= t_max;
    BoundReport {
        query,
        interpretation: interp,
        gnfs_cost: gnfs_cost(query.n_bits, interp),
        t_max,
        t_max_log,
        verdict: if positive && within {
            Verdict::Secure
        } else {
            Verdict::Insecure
        },
        time_success_ratio: query.time_success_ratio(),
    }
}
