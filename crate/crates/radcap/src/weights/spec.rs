//! Serializable description of a weight: a named builder with its parameters, or an explicit
//! list of piece records.

use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use super::{
    abcd, constant, ex1, ex_s_touch, oscillating, power, power_log_at_infinity, power_log_at_zero,
    shifted_log, Abcd, PieceForm, RadialWeight, WeightPiece,
};
use crate::error::{Error, Result};
use crate::numerics::LogScalar;
use crate::radius::Radius;

/// A nonnegative real as written in a config: a plain number, the string `"inf"`, or
/// `{ ln = t }` for values outside `f64` range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Value(f64),
    Infinity,
    Ln(f64),
}

impl Bound {
    /// Log of the value; `-inf` for zero.
    pub fn ln(self) -> Result<f64> {
        match self {
            Bound::Value(0.0) => Ok(f64::NEG_INFINITY),
            Bound::Value(x) if x > 0.0 && x.is_finite() => Ok(x.ln()),
            Bound::Value(x) => Err(Error::Parameter(format!("expected a nonnegative finite number, got {x}"))),
            Bound::Infinity => Ok(f64::INFINITY),
            Bound::Ln(t) if t.is_nan() => Err(Error::Parameter("log value is NaN".into())),
            Bound::Ln(t) => Ok(t),
        }
    }

    fn from_ln(t: f64) -> Bound {
        if t == f64::INFINITY {
            Bound::Infinity
        } else if t == f64::NEG_INFINITY {
            Bound::Value(0.0)
        } else {
            Bound::Ln(t)
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum BoundRepr {
    Number(f64),
    Text(String),
    Log { ln: f64 },
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Bound::Value(x) => BoundRepr::Number(x),
            Bound::Infinity => BoundRepr::Text("inf".into()),
            Bound::Ln(t) => BoundRepr::Log { ln: t },
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Bound, D::Error> {
        match BoundRepr::deserialize(d)? {
            BoundRepr::Number(x) => Ok(Bound::Value(x)),
            BoundRepr::Text(s) if s == "inf" => Ok(Bound::Infinity),
            BoundRepr::Text(s) => Err(de::Error::custom(format!("expected a number or \"inf\", got {s:?}"))),
            BoundRepr::Log { ln } => Ok(Bound::Ln(ln)),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Value(x) => write!(f, "{x}"),
            Bound::Infinity => f.write_str("inf"),
            Bound::Ln(t) => write!(f, "e^{t}"),
        }
    }
}

fn zero() -> f64 {
    0.0
}

/// One explicit piece `c·ρ^alpha·|ln ρ|^beta` on `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceRecord {
    pub lo: Bound,
    pub hi: Bound,
    pub c: Bound,
    pub alpha: f64,
    #[serde(default = "zero")]
    pub beta: f64,
}

/// A weight as it appears in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightSpec {
    Constant {
        n: u32,
    },
    Power {
        n: u32,
        alpha: f64,
    },
    PowerLogZero {
        n: u32,
        p: f64,
        beta: f64,
    },
    PowerLogInfinity {
        n: u32,
        p: f64,
        beta: f64,
    },
    ShiftedLog {
        n: u32,
        shift: f64,
    },
    Ex1 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        depth: Option<u32>,
    },
    ExSTouch {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        depth: Option<u32>,
    },
    Abcd {
        n: u32,
        a: f64,
        b: f64,
        c: f64,
        d: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        depth: Option<u32>,
    },
    Oscillating {
        n: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        levels: Option<u32>,
    },
    Pieces {
        n: u32,
        #[serde(default)]
        continuous: bool,
        pieces: Vec<PieceRecord>,
    },
}

impl WeightSpec {
    pub fn build(&self) -> Result<RadialWeight> {
        match *self {
            WeightSpec::Constant { n } => constant(n),
            WeightSpec::Power { n, alpha } => power(n, alpha),
            WeightSpec::PowerLogZero { n, p, beta } => power_log_at_zero(n, p, beta),
            WeightSpec::PowerLogInfinity { n, p, beta } => power_log_at_infinity(n, p, beta),
            WeightSpec::ShiftedLog { n, shift } => shifted_log(n, shift),
            WeightSpec::Ex1 { depth } => ex1(depth),
            WeightSpec::ExSTouch { depth } => ex_s_touch(depth),
            WeightSpec::Abcd { n, a, b, c, d, depth } => abcd(n, Abcd { a, b, c, d }, depth),
            WeightSpec::Oscillating { n, levels } => oscillating(n, levels),
            WeightSpec::Pieces { n, continuous, ref pieces } => {
                let pieces = pieces
                    .iter()
                    .map(|r| {
                        let c = r.c.ln()?;
                        if !c.is_finite() {
                            return Err(Error::Parameter(format!("piece coefficient {} must be positive and finite", r.c)));
                        }
                        Ok(WeightPiece::power_log(
                            Radius::from_ln(r.lo.ln()?),
                            Radius::from_ln(r.hi.ln()?),
                            LogScalar::from_ln(c),
                            r.alpha,
                            r.beta,
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?;
                RadialWeight::new(n, pieces, continuous)
            }
        }
    }

    /// Explicit records reproducing `w` exactly. Fails on non-power-log pieces.
    pub fn from_weight(w: &RadialWeight) -> Result<WeightSpec> {
        let pieces = w
            .pieces()
            .iter()
            .map(|p| match p.form {
                PieceForm::PowerLog { alpha, beta } => Ok(PieceRecord {
                    lo: Bound::from_ln(p.lo.ln()),
                    hi: Bound::from_ln(p.hi.ln()),
                    c: Bound::Ln(p.coeff.ln()),
                    alpha,
                    beta,
                }),
                PieceForm::ShiftedLog { .. } => Err(Error::Unsupported(
                    "shifted-log pieces have no explicit record form".into(),
                )),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(WeightSpec::Pieces {
            n: w.n(),
            continuous: w.continuity_enforced(),
            pieces,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_list_parses_and_builds() {
        let text = r#"{"kind": "pieces", "n": 3, "pieces": [
            {"lo": 0, "hi": 1, "c": 1, "alpha": 2},
            {"lo": 1, "hi": "inf", "c": {"ln": 0.0}, "alpha": 2, "beta": 0}
        ]}"#;
        let spec: WeightSpec = serde_json::from_str(text).unwrap();
        let w = spec.build().unwrap();
        assert_eq!(w.pieces().len(), 2);
        assert!(w.pieces()[1].hi.is_infinite());
    }

    #[test]
    fn unknown_fields_and_bad_bounds_are_rejected() {
        let extra = r#"{"kind": "constant", "n": 2, "colour": 1}"#;
        assert!(serde_json::from_str::<WeightSpec>(extra).is_err());
        let bad = r#"{"lo": "huge", "hi": 1, "c": 1, "alpha": 0}"#;
        assert!(serde_json::from_str::<PieceRecord>(bad).is_err());
    }

    #[test]
    fn ladder_round_trips_through_records() {
        let w = ex1(Some(10)).unwrap();
        let spec = WeightSpec::from_weight(&w).unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        let back: WeightSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
        assert_eq!(back.build().unwrap().pieces(), w.pieces());
    }
}
