use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sign of a [`LogScalar`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    fn times(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }
}

/// A real number stored as a sign and the natural logarithm of its magnitude.
///
/// Infinite magnitudes are represented by `log_mag = +inf`.
#[derive(Clone, Copy)]
pub struct LogScalar {
    sign: Sign,
    log_mag: f64,
}

impl LogScalar {
    pub const ZERO: LogScalar = LogScalar {
        sign: Sign::Zero,
        log_mag: f64::NEG_INFINITY,
    };
    pub const ONE: LogScalar = LogScalar {
        sign: Sign::Positive,
        log_mag: 0.0,
    };
    pub const POS_INF: LogScalar = LogScalar {
        sign: Sign::Positive,
        log_mag: f64::INFINITY,
    };

    /// Positive number `exp(log_mag)`. `log_mag = -inf` yields zero.
    pub fn from_ln(log_mag: f64) -> LogScalar {
        if log_mag == f64::NEG_INFINITY {
            LogScalar::ZERO
        } else {
            LogScalar {
                sign: Sign::Positive,
                log_mag,
            }
        }
    }

    pub fn from_parts(sign: Sign, log_mag: f64) -> LogScalar {
        if sign == Sign::Zero || log_mag == f64::NEG_INFINITY {
            LogScalar::ZERO
        } else {
            LogScalar { sign, log_mag }
        }
    }

    pub fn from_f64(x: f64) -> LogScalar {
        if x == 0.0 {
            LogScalar::ZERO
        } else if x > 0.0 {
            LogScalar::from_parts(Sign::Positive, x.ln())
        } else {
            LogScalar::from_parts(Sign::Negative, (-x).ln())
        }
    }

    pub fn to_f64(self) -> f64 {
        match self.sign {
            Sign::Zero => 0.0,
            Sign::Positive => self.log_mag.exp(),
            Sign::Negative => -self.log_mag.exp(),
        }
    }

    pub fn sign(self) -> Sign {
        self.sign
    }

    /// Natural log of the magnitude; `-inf` for zero.
    pub fn log_mag(self) -> f64 {
        match self.sign {
            Sign::Zero => f64::NEG_INFINITY,
            _ => self.log_mag,
        }
    }

    /// Natural log of a positive value. Zero maps to `-inf`; negative values to NaN.
    pub fn ln(self) -> f64 {
        match self.sign {
            Sign::Zero => f64::NEG_INFINITY,
            Sign::Positive => self.log_mag,
            Sign::Negative => f64::NAN,
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == Sign::Zero
    }

    pub fn is_positive(self) -> bool {
        self.sign == Sign::Positive
    }

    pub fn is_infinite(self) -> bool {
        self.sign != Sign::Zero && self.log_mag == f64::INFINITY
    }

    pub fn is_finite(self) -> bool {
        self.sign == Sign::Zero || self.log_mag.is_finite()
    }

    pub fn abs(self) -> LogScalar {
        match self.sign {
            Sign::Negative => LogScalar {
                sign: Sign::Positive,
                log_mag: self.log_mag,
            },
            _ => self,
        }
    }

    pub fn recip(self) -> LogScalar {
        match self.sign {
            Sign::Zero => LogScalar::POS_INF,
            s => LogScalar::from_parts(s, -self.log_mag),
        }
    }

    /// Sum via log-sum-exp. Equal magnitudes of opposite sign cancel to exactly zero.
    pub fn log_add(self, other: LogScalar) -> LogScalar {
        if self.sign == Sign::Zero {
            return other;
        }
        if other.sign == Sign::Zero {
            return self;
        }
        let (big, small) = if self.log_mag >= other.log_mag {
            (self, other)
        } else {
            (other, self)
        };
        if big.log_mag == f64::INFINITY {
            if small.log_mag == f64::INFINITY && small.sign != big.sign {
                return LogScalar {
                    sign: Sign::Positive,
                    log_mag: f64::NAN,
                };
            }
            return big;
        }
        let gap = small.log_mag - big.log_mag;
        if big.sign == small.sign {
            LogScalar {
                sign: big.sign,
                log_mag: big.log_mag + gap.exp().ln_1p(),
            }
        } else if gap == 0.0 {
            LogScalar::ZERO
        } else {
            LogScalar::from_parts(big.sign, big.log_mag + (-gap.exp_m1()).ln())
        }
    }

    /// `self^e`. A negative base requires an integer exponent.
    pub fn log_pow(self, e: f64) -> Result<LogScalar> {
        match self.sign {
            Sign::Zero => {
                if e > 0.0 {
                    Ok(LogScalar::ZERO)
                } else if e < 0.0 {
                    Ok(LogScalar::POS_INF)
                } else {
                    Ok(LogScalar::ONE)
                }
            }
            Sign::Positive => Ok(LogScalar::from_ln(scale_log(self.log_mag, e))),
            Sign::Negative => {
                if e.fract() != 0.0 || !e.is_finite() {
                    return Err(Error::Domain(format!(
                        "negative base raised to non-integer power {e}"
                    )));
                }
                let odd = (e / 2.0).fract() != 0.0;
                let sign = if odd { Sign::Negative } else { Sign::Positive };
                Ok(LogScalar::from_parts(sign, scale_log(self.log_mag, e)))
            }
        }
    }

    /// Power of a nonnegative value; panics in debug builds on a negative base.
    pub fn powf(self, e: f64) -> LogScalar {
        debug_assert!(self.sign != Sign::Negative);
        self.abs().log_pow(e).unwrap_or(LogScalar::ZERO)
    }

    /// Decimal mantissa in `[1, 10)` and base-10 exponent of the magnitude.
    pub fn to_sci(self) -> (f64, i64) {
        if self.sign == Sign::Zero {
            return (0.0, 0);
        }
        let x = self.to_f64();
        if x.is_normal() {
            let text = format!("{x:e}");
            let (m, e) = text.split_once('e').expect("exponent form");
            return (m.parse().expect("mantissa"), e.parse().expect("exponent"));
        }
        let log10 = self.log_mag / std::f64::consts::LN_10;
        let exp = log10.floor();
        let mut mantissa = 10f64.powf(log10 - exp);
        let mut exp = exp as i64;
        if mantissa >= 10.0 {
            mantissa /= 10.0;
            exp += 1;
        }
        if self.sign == Sign::Negative {
            mantissa = -mantissa;
        }
        (mantissa, exp)
    }

    /// Decimal rendering with an explicit exponent, e.g. `3.14159265359e0`.
    pub fn to_sci_string(self, digits: usize) -> String {
        if self.sign == Sign::Zero {
            return "0".to_string();
        }
        if self.log_mag == f64::INFINITY {
            return if self.sign == Sign::Positive { "inf" } else { "-inf" }.to_string();
        }
        if self.log_mag.is_nan() {
            return "nan".to_string();
        }
        let x = self.to_f64();
        if x.is_normal() {
            return format!("{x:.digits$e}");
        }
        let (m, e) = self.to_sci();
        let mut text = format!("{:.*}", digits, m.abs());
        let mut exp = e;
        if text.starts_with("10") {
            text = format!("{:.*}", digits, m.abs() / 10.0);
            exp += 1;
        }
        let sign = if self.sign == Sign::Negative { "-" } else { "" };
        format!("{sign}{text}e{exp}")
    }
}

fn scale_log(log_mag: f64, e: f64) -> f64 {
    if e == 0.0 {
        0.0
    } else {
        log_mag * e
    }
}

impl PartialEq for LogScalar {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for LogScalar {}

impl PartialOrd for LogScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LogScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                Sign::Zero => Ordering::Equal,
                Sign::Positive => self.log_mag.total_cmp(&other.log_mag),
                Sign::Negative => other.log_mag.total_cmp(&self.log_mag),
            },
            ord => ord,
        }
    }
}

impl Add for LogScalar {
    type Output = LogScalar;
    fn add(self, rhs: LogScalar) -> LogScalar {
        self.log_add(rhs)
    }
}

impl Sub for LogScalar {
    type Output = LogScalar;
    fn sub(self, rhs: LogScalar) -> LogScalar {
        self.log_add(-rhs)
    }
}

impl Neg for LogScalar {
    type Output = LogScalar;
    fn neg(self) -> LogScalar {
        LogScalar {
            sign: self.sign.flip(),
            log_mag: self.log_mag,
        }
    }
}

impl Mul for LogScalar {
    type Output = LogScalar;
    fn mul(self, rhs: LogScalar) -> LogScalar {
        let sign = self.sign.times(rhs.sign);
        if sign == Sign::Zero {
            return LogScalar::ZERO;
        }
        LogScalar {
            sign,
            log_mag: self.log_mag + rhs.log_mag,
        }
    }
}

impl Div for LogScalar {
    type Output = LogScalar;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: LogScalar) -> LogScalar {
        self * rhs.recip()
    }
}

impl std::iter::Sum for LogScalar {
    fn sum<I: Iterator<Item = LogScalar>>(iter: I) -> LogScalar {
        iter.fold(LogScalar::ZERO, |acc, x| acc + x)
    }
}

impl fmt::Debug for LogScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Zero => write!(f, "LogScalar(0)"),
            Sign::Positive => write!(f, "LogScalar(+, {})", self.log_mag),
            Sign::Negative => write!(f, "LogScalar(-, {})", self.log_mag),
        }
    }
}

impl fmt::Display for LogScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sci_string(12))
    }
}

impl From<f64> for LogScalar {
    fn from(x: f64) -> Self {
        LogScalar::from_f64(x)
    }
}

/// Serialized form: a decimal mantissa string with a base-10 exponent, a best-effort float
/// (`null` when out of `f64` range) and the exact natural log of the magnitude.
#[derive(Serialize, Deserialize)]
struct SciRepr {
    mantissa: String,
    exp10: i64,
    approx: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ln: Option<f64>,
}

impl Serialize for LogScalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let finite = self.sign != Sign::Zero && self.log_mag.is_finite();
        let (_, exp10) = if finite { self.to_sci() } else { (0.0, 0) };
        let text = self.to_sci_string(16);
        let mantissa = match text.split_once('e') {
            Some((m, _)) => m.to_string(),
            None => text,
        };
        let approx = self.to_f64();
        SciRepr {
            mantissa,
            exp10,
            // Underflow to zero counts as out of range.
            approx: (approx.is_finite() && (approx != 0.0 || self.sign == Sign::Zero)).then_some(approx),
            ln: finite.then_some(self.log_mag),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LogScalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<LogScalar, D::Error> {
        let repr = SciRepr::deserialize(d)?;
        let negative = repr.mantissa.starts_with('-');
        let sign = if negative { Sign::Negative } else { Sign::Positive };
        if let Some(ln) = repr.ln {
            return Ok(LogScalar::from_parts(sign, ln));
        }
        match repr.mantissa.trim_start_matches('-') {
            "0" => Ok(LogScalar::ZERO),
            "inf" => Ok(LogScalar::from_parts(sign, f64::INFINITY)),
            m => {
                let m: f64 = m.parse().map_err(serde::de::Error::custom)?;
                let ln = m.ln() + repr.exp10 as f64 * std::f64::consts::LN_10;
                Ok(LogScalar::from_parts(if m == 0.0 { Sign::Zero } else { sign }, ln))
            }
        }
    }
}
