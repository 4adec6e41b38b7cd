//! Sign and natural-log magnitude representation of a real number.
//!
//! Determinants of `D_n` grow like `mu^n`; at `n = 5e8` they are around
//! `10^(3e8)`, far beyond `f64`. Every determinant route in this crate
//! therefore reports a [`LogScalar`].

use std::fmt;
use std::ops::{Div, Mul, Neg};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogScalar {
    sign: i8,
    log_abs: f64,
    /// Low-order correction so that `log_abs + log_lo` carries more than
    /// double precision; keeps the round trip through `f64` exact to a few
    /// ulps even when `|log_abs|` is in the hundreds.
    log_lo: f64,
}

/// `a + b` as a rounded sum and its exact error.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, if err.is_finite() { err } else { 0.0 })
}

impl LogScalar {
    pub const ZERO: LogScalar = LogScalar {
        sign: 0,
        log_abs: f64::NEG_INFINITY,
        log_lo: 0.0,
    };
    pub const ONE: LogScalar = LogScalar {
        sign: 1,
        log_abs: 0.0,
        log_lo: 0.0,
    };

    /// Builds a value from its parts. A zero sign forces `log_abs = -inf`.
    pub fn new(sign: i8, log_abs: f64) -> Self {
        Self::with_lo(sign, log_abs, 0.0)
    }

    fn with_lo(sign: i8, hi: f64, lo: f64) -> Self {
        if sign == 0 || hi == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            let (log_abs, err) = two_sum(hi, lo);
            LogScalar {
                sign: sign.signum(),
                log_abs,
                log_lo: if log_abs.is_finite() { err } else { 0.0 },
            }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            return Self::ZERO;
        }
        let a = x.abs();
        let hi = a.ln();
        let eh = hi.exp();
        let lo = if eh.is_finite() && eh > 0.0 {
            (a / eh).ln()
        } else {
            0.0
        };
        LogScalar {
            sign: if x > 0.0 { 1 } else { -1 },
            log_abs: hi,
            log_lo: lo,
        }
    }

    /// `exp(log)` as a positive value.
    pub fn from_log(log_abs: f64) -> Self {
        Self::new(1, log_abs)
    }

    /// Converts back to `f64`; overflows to `±inf` and underflows to `±0`.
    pub fn to_f64(self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.log_abs.exp() * self.log_lo.exp(),
        }
    }

    pub fn sign(self) -> i8 {
        self.sign
    }

    pub fn log_abs(self) -> f64 {
        self.log_abs + self.log_lo
    }

    pub fn log10_abs(self) -> f64 {
        self.log_abs() / std::f64::consts::LN_10
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    /// Decimal scientific form `(mantissa, exponent)` with `1 <= |mantissa| < 10`.
    /// Returns `None` for zero.
    pub fn mantissa_exponent10(self) -> Option<(f64, i64)> {
        if self.sign == 0 {
            return None;
        }
        let l10 = self.log10_abs();
        let mut exponent = l10.floor();
        let mut mantissa = 10f64.powf(l10 - exponent);
        if mantissa >= 10.0 {
            mantissa /= 10.0;
            exponent += 1.0;
        }
        Some((f64::from(self.sign) * mantissa, exponent as i64))
    }

    pub fn powi(self, k: u64) -> Self {
        if k == 0 {
            return Self::ONE;
        }
        match self.sign {
            0 => Self::ZERO,
            s => {
                let sign = if s < 0 && k % 2 == 1 { -1 } else { 1 };
                let kf = k as f64;
                let hi = self.log_abs * kf;
                let err = self.log_abs.mul_add(kf, -hi);
                Self::with_lo(sign, hi, err + self.log_lo * kf)
            }
        }
    }

    /// Sums terms without leaving log space: the largest magnitude is factored
    /// out and the remaining ratios are accumulated in ordinary floats.
    pub fn sum<I: IntoIterator<Item = LogScalar>>(terms: I) -> Self {
        let terms: Vec<LogScalar> = terms.into_iter().filter(|t| !t.is_zero()).collect();
        let Some(max) = terms
            .iter()
            .map(|t| t.log_abs)
            .max_by(|a, b| a.total_cmp(b))
        else {
            return Self::ZERO;
        };
        let acc: f64 = terms
            .iter()
            .map(|t| f64::from(t.sign) * ((t.log_abs - max) + t.log_lo).exp())
            .sum();
        Self::from_f64(acc).scale_log(max)
    }

    /// Multiplies by `exp(shift)`.
    pub fn scale_log(self, shift: f64) -> Self {
        match self.sign {
            0 => Self::ZERO,
            s => {
                let (hi, err) = two_sum(self.log_abs, shift);
                Self::with_lo(s, hi, err + self.log_lo)
            }
        }
    }

    /// Relative difference of the log magnitudes, `|la - lb| / max(1, |lb|)`.
    /// Infinite when signs disagree; zero when both values are zero.
    pub fn rel_log_diff(self, other: LogScalar) -> f64 {
        if self.sign != other.sign {
            return f64::INFINITY;
        }
        if self.sign == 0 {
            return 0.0;
        }
        self.log_diff(other).abs() / other.log_abs().abs().max(1.0)
    }

    fn log_diff(self, other: LogScalar) -> f64 {
        (self.log_abs - other.log_abs) + (self.log_lo - other.log_lo)
    }

    /// Relative difference of the represented values, in `[0, 2]`.
    pub fn rel_value_diff(self, other: LogScalar) -> f64 {
        match (self.sign, other.sign) {
            (0, 0) => 0.0,
            (0, _) | (_, 0) => 1.0,
            (a, b) if a != b => 2.0,
            _ => {
                let d = self.log_diff(other).abs();
                -(-d).exp_m1()
            }
        }
    }
}

impl Mul for LogScalar {
    type Output = LogScalar;
    fn mul(self, rhs: LogScalar) -> LogScalar {
        if self.sign == 0 || rhs.sign == 0 {
            return Self::ZERO;
        }
        let (hi, err) = two_sum(self.log_abs, rhs.log_abs);
        Self::with_lo(self.sign * rhs.sign, hi, err + self.log_lo + rhs.log_lo)
    }
}

impl Div for LogScalar {
    type Output = LogScalar;
    fn div(self, rhs: LogScalar) -> LogScalar {
        assert!(rhs.sign != 0, "division of LogScalar by zero");
        if self.sign == 0 {
            return Self::ZERO;
        }
        let (hi, err) = two_sum(self.log_abs, -rhs.log_abs);
        Self::with_lo(self.sign * rhs.sign, hi, err + self.log_lo - rhs.log_lo)
    }
}

impl Neg for LogScalar {
    type Output = LogScalar;
    fn neg(self) -> LogScalar {
        LogScalar {
            sign: -self.sign,
            ..self
        }
    }
}

impl From<f64> for LogScalar {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

/// Scientific notation with 17 significant digits, e.g. `-4.0000000000000000e1`
/// or `1.6519348...e2926158` beyond the `f64` range.
impl fmt::Display for LogScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign == 0 {
            return write!(f, "0");
        }
        let v = self.to_f64();
        if v.is_finite() && v.abs() >= f64::MIN_POSITIVE {
            return write!(f, "{v:.16e}");
        }
        let (m, e) = self.mantissa_exponent10().expect("nonzero");
        write!(f, "{m:.16}e{e}")
    }
}
