//! Numeric backends: exact rationals, plain doubles and signed log-domain
//! doubles behind one `Weight` trait.
//!
//! All combinatorial quantities in this crate are built from sums and
//! products of non-negative kernel weights, so the same formula code runs in
//! three modes:
//!
//! * [`BigRational`] — exact arithmetic, used by the validation paths,
//! * [`f64`] — plain doubles, used where magnitudes stay moderate
//!   (jump-chain solves),
//! * [`LogFloat`] — sign + log-magnitude doubles, used for normalization
//!   tables and terminating hypergeometric sums whose entries overflow
//!   doubles long before the quantities of interest (which are ratios) do.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Which numeric backend a value or table was computed with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NumericMode {
    /// Exact rational arithmetic on big integers.
    Rational,
    /// Double precision (plain or log-domain).
    Float,
}

/// Scalar used throughout the exact-statistics pipeline.
///
/// The operations are total except `div` by zero, which panics; callers
/// guard divisions by normalization constants explicitly.
pub trait Weight: Clone + PartialEq + std::fmt::Debug + Send + Sync + 'static {
    /// Backend tag, used for serialization and error messages.
    const MODE: NumericMode;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn div(&self, rhs: &Self) -> Self;
    fn from_rational(q: &BigRational) -> Self;
    fn from_u64(n: u64) -> Self;
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;

    /// Whether the internal representation is still usable (no NaN, no
    /// overflowed magnitude). Note that a huge `LogFloat` is finite in this
    /// sense even when its f64 image saturates to infinity.
    fn is_finite_repr(&self) -> bool;

    /// num/den as a weight.
    fn ratio_u64(num: u64, den: u64) -> Self {
        Self::from_u64(num).div(&Self::from_u64(den))
    }

    /// Rendered form for files: `"p/q"` in rational mode, a number otherwise.
    fn render_json(&self) -> serde_json::Value;

    /// Rendered form for CSV cells.
    fn render_string(&self) -> String;
}

impl Weight for BigRational {
    const MODE: NumericMode = NumericMode::Rational;

    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        assert!(!Zero::is_zero(rhs), "division by zero weight");
        self / rhs
    }
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }
    fn from_u64(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite float")
    }
    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
    fn is_finite_repr(&self) -> bool {
        true
    }
    fn render_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.render_string())
    }
    fn render_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
}

impl Weight for f64 {
    const MODE: NumericMode = NumericMode::Float;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn is_negative(&self) -> bool {
        *self < 0.0
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn div(&self, rhs: &Self) -> Self {
        assert!(*rhs != 0.0, "division by zero weight");
        self / rhs
    }
    fn from_rational(q: &BigRational) -> Self {
        rational_to_f64(q)
    }
    fn from_u64(n: u64) -> Self {
        n as f64
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_finite_repr(&self) -> bool {
        self.is_finite()
    }
    fn render_json(&self) -> serde_json::Value {
        serde_json::json!(*self)
    }
    fn render_string(&self) -> String {
        format!("{self}")
    }
}

/// Signed log-domain double: the represented value is `sign * exp(ln_abs)`.
///
/// Zero is `sign == 0`, `ln_abs == -inf`. Additions of like signs use
/// log-sum-exp; mixed signs use log-sub-exp on the ordered magnitudes.
#[derive(Clone, Copy, Debug)]
pub struct LogFloat {
    sign: i8,
    ln_abs: f64,
}

impl LogFloat {
    pub const ZERO: LogFloat = LogFloat {
        sign: 0,
        ln_abs: f64::NEG_INFINITY,
    };

    /// Non-negative value from its natural log.
    pub fn from_ln(ln_abs: f64) -> Self {
        if ln_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogFloat { sign: 1, ln_abs }
        }
    }

    pub fn ln_abs(&self) -> f64 {
        self.ln_abs
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }
}

impl PartialEq for LogFloat {
    fn eq(&self, other: &Self) -> bool {
        self.sign == other.sign && (self.sign == 0 || self.ln_abs == other.ln_abs)
    }
}

impl Weight for LogFloat {
    const MODE: NumericMode = NumericMode::Float;

    fn zero() -> Self {
        Self::ZERO
    }
    fn one() -> Self {
        LogFloat {
            sign: 1,
            ln_abs: 0.0,
        }
    }
    fn is_zero(&self) -> bool {
        self.sign == 0
    }
    fn is_negative(&self) -> bool {
        self.sign < 0
    }
    fn add(&self, rhs: &Self) -> Self {
        if self.sign == 0 {
            return *rhs;
        }
        if rhs.sign == 0 {
            return *self;
        }
        if self.sign == rhs.sign {
            return LogFloat {
                sign: self.sign,
                ln_abs: log_add_exp(self.ln_abs, rhs.ln_abs),
            };
        }
        // Opposite signs: subtract the smaller magnitude from the larger.
        if self.ln_abs == rhs.ln_abs {
            return Self::ZERO;
        }
        let (big, small) = if self.ln_abs > rhs.ln_abs {
            (self, rhs)
        } else {
            (rhs, self)
        };
        LogFloat {
            sign: big.sign,
            ln_abs: log_sub_exp(big.ln_abs, small.ln_abs),
        }
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.add(&LogFloat {
            sign: -rhs.sign,
            ln_abs: rhs.ln_abs,
        })
    }
    fn mul(&self, rhs: &Self) -> Self {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::ZERO;
        }
        LogFloat {
            sign: self.sign * rhs.sign,
            ln_abs: self.ln_abs + rhs.ln_abs,
        }
    }
    fn div(&self, rhs: &Self) -> Self {
        assert!(rhs.sign != 0, "division by zero weight");
        if self.sign == 0 {
            return Self::ZERO;
        }
        LogFloat {
            sign: self.sign * rhs.sign,
            ln_abs: self.ln_abs - rhs.ln_abs,
        }
    }
    fn from_rational(q: &BigRational) -> Self {
        if Zero::is_zero(q) {
            return Self::ZERO;
        }
        let sign = if Signed::is_negative(q) { -1 } else { 1 };
        LogFloat {
            sign,
            ln_abs: ln_big(&q.numer().abs()) - ln_big(q.denom()),
        }
    }
    fn from_u64(n: u64) -> Self {
        if n == 0 {
            Self::ZERO
        } else {
            LogFloat {
                sign: 1,
                ln_abs: (n as f64).ln(),
            }
        }
    }
    fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogFloat {
                sign: if x < 0.0 { -1 } else { 1 },
                ln_abs: x.abs().ln(),
            }
        }
    }
    fn to_f64(&self) -> f64 {
        self.sign as f64 * self.ln_abs.exp()
    }
    fn is_finite_repr(&self) -> bool {
        !self.ln_abs.is_nan() && self.ln_abs != f64::INFINITY
    }
    fn render_json(&self) -> serde_json::Value {
        serde_json::json!(self.to_f64())
    }
    fn render_string(&self) -> String {
        format!("{}", self.to_f64())
    }
}

/// log(exp(x) + exp(y)) without overflow.
pub fn log_add_exp(x: f64, y: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return y;
    }
    if y == f64::NEG_INFINITY {
        return x;
    }
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    hi + (lo - hi).exp().ln_1p()
}

/// log(exp(x) - exp(y)) for x > y.
pub fn log_sub_exp(x: f64, y: f64) -> f64 {
    debug_assert!(x > y);
    if y == f64::NEG_INFINITY {
        return x;
    }
    x + (-((y - x).exp())).ln_1p()
}

/// Natural log of a positive big integer, stable for values far outside the
/// double range.
pub fn ln_big(x: &BigInt) -> f64 {
    debug_assert!(x.sign() == Sign::Plus, "ln of non-positive integer");
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64 range").ln();
    }
    let shift = bits - 64;
    let mantissa = (x >> shift).to_f64().expect("64-bit mantissa");
    mantissa.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Conversion that survives numerators/denominators outside the f64 range by
/// going through log space.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if Zero::is_zero(q) {
        return 0.0;
    }
    if let Some(x) = ToPrimitive::to_f64(q) {
        if x.is_finite() && x != 0.0 {
            return x;
        }
    }
    let ln = ln_big(&q.numer().abs()) - ln_big(q.denom());
    let sign = if Signed::is_negative(q) { -1.0 } else { 1.0 };
    sign * ln.exp()
}

/// n! as a big integer.
pub fn factorial(n: usize) -> BigInt {
    let mut acc: BigInt = One::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    acc
}

/// Binomial coefficient C(n, k); zero when k > n.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return Zero::zero();
    }
    let k = k.min(n - k);
    let mut acc: BigInt = One::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Parses a decimal or fractional literal (`"0.5"`, `"1e-5"`, `"3/7"`) into
/// an exact rational.
pub fn parse_decimal_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().ok()?;
        let d: BigInt = den.trim().parse().ok()?;
        if Zero::is_zero(&d) {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    let digits = format!("{int_part}{frac_part}");
    if digits.is_empty() || digits == "-" || digits == "+" {
        return None;
    }
    let n: BigInt = digits.parse().ok()?;
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let pow = num_traits::pow::pow(ten, scale.unsigned_abs() as usize);
    Some(if scale >= 0 {
        BigRational::from_integer(n * pow)
    } else {
        BigRational::new(n, pow)
    })
}

/// Neumaier-compensated accumulator for long time-weighted sums.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}
