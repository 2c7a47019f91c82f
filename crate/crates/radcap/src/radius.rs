use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::LogScalar;

/// A radius in `(0, ∞]`, stored as its natural logarithm.
/// Serialized in the same decimal form as [`LogScalar`].
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "LogScalar", try_from = "LogScalar")]
pub struct Radius(f64);

impl From<Radius> for LogScalar {
    fn from(r: Radius) -> LogScalar {
        r.value()
    }
}

impl TryFrom<LogScalar> for Radius {
    type Error = Error;

    fn try_from(v: LogScalar) -> Result<Radius> {
        match v.sign() {
            crate::numerics::Sign::Negative => Err(Error::Parameter("radius must be nonnegative".into())),
            _ => Ok(Radius(v.log_mag())),
        }
    }
}

impl Radius {
    /// The degenerate radius 0, used as the lower end of the first piece.
    pub const ZERO: Radius = Radius(f64::NEG_INFINITY);
    pub const ONE: Radius = Radius(0.0);
    pub const INFINITY: Radius = Radius(f64::INFINITY);

    /// Radius from a positive real. `f64::INFINITY` is accepted.
    pub fn new(r: f64) -> Result<Radius> {
        if r > 0.0 {
            Ok(Radius(r.ln()))
        } else {
            Err(Error::Parameter(format!("radius must be positive, got {r}")))
        }
    }

    pub fn from_ln(t: f64) -> Radius {
        debug_assert!(!t.is_nan());
        Radius(t)
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0 == f64::INFINITY
    }

    pub fn value(self) -> LogScalar {
        LogScalar::from_ln(self.0)
    }

    /// Plain float value; may underflow to zero or overflow to infinity.
    pub fn to_f64(self) -> f64 {
        self.0.exp()
    }

    /// `self · factor` for a positive finite factor.
    pub fn scaled(self, factor: f64) -> Radius {
        Radius(self.0 + factor.ln())
    }

    /// `self^e` as a radius (`e > 0`).
    pub fn pow(self, e: f64) -> Radius {
        Radius(self.0 * e)
    }

    /// `points` radii equally spaced in `ln ρ` from `lo` to `hi` inclusive.
    pub fn geometric_grid(lo: Radius, hi: Radius, points: usize) -> Result<Vec<Radius>> {
        if !(lo.0.is_finite() && hi.0.is_finite() && lo.0 < hi.0) {
            return Err(Error::Parameter(format!("grid needs finite 0 < lo < hi, got [{lo}, {hi}]")));
        }
        if points < 2 {
            return Err(Error::Parameter(format!("grid needs at least 2 points, got {points}")));
        }
        let step = (hi.0 - lo.0) / (points - 1) as f64;
        Ok((0..points)
            .map(|i| if i + 1 == points { hi } else { Radius(lo.0 + step * i as f64) })
            .collect())
    }
}

impl Eq for Radius {}

impl PartialOrd for Radius {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Radius {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Debug for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Radius(e^{})", self.0)
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            f.write_str(&self.value().to_sci_string(12))
        }
    }
}
