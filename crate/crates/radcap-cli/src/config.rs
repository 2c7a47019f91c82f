//! Run configuration: an optional TOML file overlaid by command-line flags. Flags win.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use radcap::bounds::RadiiRegime;
use radcap::measure::{MeasureProfile, CANTOR_DEFAULT_DEPTH};
use radcap::numerics::QuadratureSpec;
use radcap::weights::{Bound, WeightSpec};
use radcap::Radius;

use crate::error::CliError;

/// A weight spec, or the Cantor staircase profile (which has no weight).
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSpec {
    Weight(WeightSpec),
    Cantor { depth: Option<u32> },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum CantorRepr {
    Cantor {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        depth: Option<u32>,
    },
}

impl Serialize for ProfileSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ProfileSpec::Weight(w) => w.serialize(s),
            ProfileSpec::Cantor { depth } => CantorRepr::Cantor { depth: *depth }.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for ProfileSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<ProfileSpec, D::Error> {
        use serde::de::Error;
        let value = serde_json::Value::deserialize(d)?;
        if value.get("kind").and_then(|k| k.as_str()) == Some("cantor") {
            let CantorRepr::Cantor { depth } = serde_json::from_value(value).map_err(D::Error::custom)?;
            Ok(ProfileSpec::Cantor { depth })
        } else {
            serde_json::from_value(value).map(ProfileSpec::Weight).map_err(D::Error::custom)
        }
    }
}

impl ProfileSpec {
    pub fn build(&self, quadrature: QuadratureSpec) -> Result<MeasureProfile, CliError> {
        match self {
            ProfileSpec::Weight(w) => Ok(MeasureProfile::from_weight_with(w.build()?, quadrature)?),
            ProfileSpec::Cantor { depth } => Ok(MeasureProfile::cantor(depth.unwrap_or(CANTOR_DEFAULT_DEPTH))?),
        }
    }
}

/// `points` radii geometric between `lo` and `hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: Bound,
    pub hi: Bound,
    pub points: usize,
}

impl GridSpec {
    /// Parses `lo:hi:N`.
    pub fn parse(text: &str) -> Result<GridSpec, CliError> {
        let parts: Vec<&str> = text.split(':').collect();
        let [lo, hi, n] = parts.as_slice() else {
            return Err(CliError::Config(format!("grid must be lo:hi:N, got {text:?}")));
        };
        Ok(GridSpec {
            lo: parse_bound(lo)?,
            hi: parse_bound(hi)?,
            points: n.parse().map_err(|_| CliError::Config(format!("grid point count {n:?} is not an integer")))?,
        })
    }

    pub fn radii(&self) -> Result<Vec<Radius>, CliError> {
        let lo = Radius::from_ln(self.lo.ln()?);
        let hi = Radius::from_ln(self.hi.ln()?);
        Ok(Radius::geometric_grid(lo, hi, self.points)?)
    }
}

pub fn parse_bound(text: &str) -> Result<Bound, CliError> {
    let text = text.trim();
    if text.eq_ignore_ascii_case("inf") {
        return Ok(Bound::Infinity);
    }
    if let Some(t) = text.strip_prefix("e^") {
        return t.parse().map(Bound::Ln).map_err(|_| CliError::Config(format!("bad log radius {text:?}")));
    }
    text.parse().map(Bound::Value).map_err(|_| CliError::Config(format!("expected a number, \"inf\" or e^t, got {text:?}")))
}

/// Everything a subcommand may consult. Absent fields take per-command defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<ProfileSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    /// Sample at ladder marks with index at most this.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_ladder: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Bound>,
    #[serde(default, rename = "R", skip_serializing_if = "Option::is_none")]
    pub big_r: Option<Bound>,
    /// Relative quadrature tolerance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audit: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Bound ids for `check`; default every applicable bound (every bound in audit mode).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<RadiiRegime>,
    /// Largest capacity/bound discrepancy a consistent check may show.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor: Option<f64>,
    /// Interior-membership margin for exponent hypotheses.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn quadrature(&self) -> Result<QuadratureSpec, CliError> {
        let mut spec = QuadratureSpec::default();
        if let Some(tol) = self.tol {
            spec.rel_tol = tol;
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn profile(&self) -> Result<MeasureProfile, CliError> {
        self.weight
            .as_ref()
            .ok_or_else(|| CliError::Config("no weight given (use --weight or a config file)".into()))?
            .build(self.quadrature()?)
    }

    pub fn require_p(&self) -> Result<f64, CliError> {
        self.p.ok_or_else(|| CliError::Config("this command needs --p".into()))
    }
}

/// Weight parameters from the command line, overlaid onto whatever the config file set.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightFlags {
    pub name: Option<String>,
    pub n: Option<u32>,
    pub p: Option<f64>,
    pub beta: Option<f64>,
    pub alpha: Option<f64>,
    pub shift: Option<f64>,
    pub depth: Option<u32>,
    pub levels: Option<u32>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub c: Option<f64>,
    pub d: Option<f64>,
}

fn need<T: Copy>(value: Option<T>, flag: &str, kind: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Config(format!("weight {kind} needs --{flag}")))
}

impl WeightFlags {
    /// A fresh spec for `--weight NAME`, with parameters taken from flags or defaults.
    fn named(&self, name: &str) -> Result<ProfileSpec, CliError> {
        let n = self.n.unwrap_or(2);
        let spec = match name {
            "constant" | "one" => WeightSpec::Constant { n },
            "power" => WeightSpec::Power {
                n,
                alpha: need(self.alpha, "alpha", name)?,
            },
            "powerlog0" | "power-log-zero" => WeightSpec::PowerLogZero {
                n,
                p: need(self.p, "p", name)?,
                beta: need(self.beta, "beta", name)?,
            },
            "powerlog-inf" | "power-log-infinity" => WeightSpec::PowerLogInfinity {
                n,
                p: need(self.p, "p", name)?,
                beta: need(self.beta, "beta", name)?,
            },
            "shifted-log" | "log2" => WeightSpec::ShiftedLog {
                n,
                shift: self.shift.unwrap_or(2.0),
            },
            "ex1" => WeightSpec::Ex1 { depth: self.depth },
            "ex-s-touch" => WeightSpec::ExSTouch { depth: self.depth },
            "abcd" => WeightSpec::Abcd {
                n,
                a: need(self.a, "a", name)?,
                b: need(self.b, "b", name)?,
                c: need(self.c, "c", name)?,
                d: need(self.d, "d", name)?,
                depth: self.depth,
            },
            "oscillating" => WeightSpec::Oscillating { n, levels: self.levels },
            "cantor" => return Ok(ProfileSpec::Cantor { depth: self.depth }),
            other => {
                return Err(CliError::Config(format!(
                    "unknown weight {other:?}; expected constant, power, powerlog0, powerlog-inf, shifted-log, ex1, ex-s-touch, abcd, oscillating or cantor"
                )))
            }
        };
        Ok(ProfileSpec::Weight(spec))
    }

    /// Flags that name a parameter of `spec` replace it; others are ignored.
    fn overlay(&self, spec: &mut ProfileSpec) {
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        let set_n = |slot: &mut u32| {
            if let Some(v) = self.n {
                *slot = v;
            }
        };
        match spec {
            ProfileSpec::Cantor { depth } => *depth = self.depth.or(*depth),
            ProfileSpec::Weight(w) => match w {
                WeightSpec::Constant { n } | WeightSpec::Pieces { n, .. } => set_n(n),
                WeightSpec::Power { n, alpha } => {
                    set_n(n);
                    set(alpha, self.alpha);
                }
                WeightSpec::PowerLogZero { n, p, beta } | WeightSpec::PowerLogInfinity { n, p, beta } => {
                    set_n(n);
                    set(p, self.p);
                    set(beta, self.beta);
                }
                WeightSpec::ShiftedLog { n, shift } => {
                    set_n(n);
                    set(shift, self.shift);
                }
                WeightSpec::Ex1 { depth } | WeightSpec::ExSTouch { depth } => *depth = self.depth.or(*depth),
                WeightSpec::Abcd { n, a, b, c, d, depth } => {
                    set_n(n);
                    set(a, self.a);
                    set(b, self.b);
                    set(c, self.c);
                    set(d, self.d);
                    *depth = self.depth.or(*depth);
                }
                WeightSpec::Oscillating { n, levels } => {
                    set_n(n);
                    *levels = self.levels.or(*levels);
                }
            },
        }
    }

    pub fn apply(&self, weight: &mut Option<ProfileSpec>) -> Result<(), CliError> {
        if let Some(name) = &self.name {
            *weight = Some(self.named(name)?);
        } else if let Some(spec) = weight {
            self.overlay(spec);
        }
        Ok(())
    }
}
