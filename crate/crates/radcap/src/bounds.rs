//! Catalog of annulus capacity estimates with checkable exponent hypotheses, and an engine
//! that measures capacity/bound ratios over grids of radii.
//!
//! The estimates hold up to constants that depend on doubling and Poincaré data. A check
//! therefore reports the fitted constant and calls the bound consistent when the
//! direction-appropriate extreme of capacity/bound stays within `tolerance`.

use serde::{Deserialize, Serialize};

use crate::capacity::annulus_capacity;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::exponents::{Attainment, ExponentReport, SetId};
use crate::measure::MeasureProfile;
use crate::numerics::{ls_slope, LogScalar};
use crate::radius::Radius;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BoundId {
    #[serde(rename = "UB-MIN")]
    UbMin,
    #[serde(rename = "UB-LOG-lQ")]
    UbLogLq,
    #[serde(rename = "UB-LOG-uQ")]
    UbLogUq,
    #[serde(rename = "LB-INT-lQ")]
    LbIntLq,
    #[serde(rename = "LB-INT-uQ")]
    LbIntUq,
    #[serde(rename = "LB-BEYOND-lQ")]
    LbBeyondLq,
    #[serde(rename = "LB-BEYOND-uQ")]
    LbBeyondUq,
    #[serde(rename = "LB-LOGP-lQ")]
    LbLogpLq,
    #[serde(rename = "LB-LOGP-uQ")]
    LbLogpUq,
    #[serde(rename = "LB-BORDER-lQ")]
    LbBorderLq,
    #[serde(rename = "LB-BORDER-uQ")]
    LbBorderUq,
    #[serde(rename = "UB-S")]
    UbS,
    #[serde(rename = "UB-S-LOG")]
    UbSLog,
    #[serde(rename = "LB-S")]
    LbS,
    #[serde(rename = "LB-S-LOG")]
    LbSLog,
}

impl BoundId {
    pub const ALL: [BoundId; 15] = [
        BoundId::UbMin,
        BoundId::UbLogLq,
        BoundId::UbLogUq,
        BoundId::LbIntLq,
        BoundId::LbIntUq,
        BoundId::LbBeyondLq,
        BoundId::LbBeyondUq,
        BoundId::LbLogpLq,
        BoundId::LbLogpUq,
        BoundId::LbBorderLq,
        BoundId::LbBorderUq,
        BoundId::UbS,
        BoundId::UbSLog,
        BoundId::LbS,
        BoundId::LbSLog,
    ];

    pub fn token(self) -> &'static str {
        match self {
            BoundId::UbMin => "UB-MIN",
            BoundId::UbLogLq => "UB-LOG-lQ",
            BoundId::UbLogUq => "UB-LOG-uQ",
            BoundId::LbIntLq => "LB-INT-lQ",
            BoundId::LbIntUq => "LB-INT-uQ",
            BoundId::LbBeyondLq => "LB-BEYOND-lQ",
            BoundId::LbBeyondUq => "LB-BEYOND-uQ",
            BoundId::LbLogpLq => "LB-LOGP-lQ",
            BoundId::LbLogpUq => "LB-LOGP-uQ",
            BoundId::LbBorderLq => "LB-BORDER-lQ",
            BoundId::LbBorderUq => "LB-BORDER-uQ",
            BoundId::UbS => "UB-S",
            BoundId::UbSLog => "UB-S-LOG",
            BoundId::LbS => "LB-S",
            BoundId::LbSLog => "LB-S-LOG",
        }
    }

    pub fn from_token(token: &str) -> Result<BoundId> {
        BoundId::ALL
            .into_iter()
            .find(|id| id.token().eq_ignore_ascii_case(token))
            .ok_or_else(|| Error::Parameter(format!("unknown bound id {token:?}")))
    }

    pub fn spec(self) -> &'static BoundSpec {
        catalog().iter().find(|s| s.id == self).expect("catalog covers every id")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Upper,
    Lower,
}

/// Which radii a check ranges over: `R ≤ R₀` (small), `r ≥ R₀` (large), or both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadiiRegime {
    Small,
    Large,
    All,
}

/// The exponent a hypothesis constrains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subject {
    P,
    Q,
}

/// Required position of the auxiliary exponent relative to `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QSide {
    Below,
    Above,
    Any,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Hypothesis {
    pub subject: Subject,
    /// Interior membership rather than plain membership.
    pub interior: bool,
    pub small: SetId,
    pub large: SetId,
    pub q_side: QSide,
    /// The estimate only covers `p > 1`.
    pub needs_p_above_one: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundSpec {
    pub id: BoundId,
    pub direction: Direction,
    /// Human-readable right-hand side.
    pub statement: &'static str,
    pub hypothesis: Option<Hypothesis>,
    /// Smallest allowed `R/r`.
    pub min_ratio: f64,
    /// Structural assumptions that exponent estimates cannot verify.
    pub assumptions: &'static [&'static str],
    /// Regimes the estimate is stated for.
    pub regimes: &'static [RadiiRegime],
}

const RD_PI: &[&str] = &["reverse doubling at the centre", "p-Poincaré inequality at the centre"];
const RD_P0: &[&str] = &["reverse doubling at the centre", "p0-Poincaré inequality at the centre for some p0 < p"];
const ALL_REGIMES: &[RadiiRegime] = &[RadiiRegime::Small, RadiiRegime::Large, RadiiRegime::All];
const SPLIT_REGIMES: &[RadiiRegime] = &[RadiiRegime::Small, RadiiRegime::Large];

const fn hyp(subject: Subject, interior: bool, small: SetId, large: SetId, q_side: QSide, needs_p_above_one: bool) -> Option<Hypothesis> {
    Some(Hypothesis {
        subject,
        interior,
        small,
        large,
        q_side,
        needs_p_above_one,
    })
}

use SetId::{LowerQInf as LQI, LowerQZero as LQ0, LowerSInf as LSI, LowerSZero as LS0, UpperQInf as UQI, UpperQZero as UQ0, UpperSInf as USI, UpperSZero as US0};

static CATALOG: [BoundSpec; 15] = [
    BoundSpec {
        id: BoundId::UbMin,
        direction: Direction::Upper,
        statement: "cap ≲ min{μ(B_r)/r^p, μ(B_R)/R^p}",
        hypothesis: None,
        min_ratio: 2.0,
        assumptions: &[],
        regimes: ALL_REGIMES,
    },
    BoundSpec {
        id: BoundId::UbLogLq,
        direction: Direction::Upper,
        statement: "cap ≲ μ(B_R)/R^p · log(R/r)^(1-p), p ∈ lQ",
        hypothesis: hyp(Subject::P, false, LQ0, LQI, QSide::Any, false),
        min_ratio: 2.0,
        assumptions: &[],
        regimes: ALL_REGIMES,
    },
    BoundSpec {
        id: BoundId::UbLogUq,
        direction: Direction::Upper,
        statement: "cap ≲ μ(B_r)/r^p · log(R/r)^(1-p), p ∈ uQ",
        hypothesis: hyp(Subject::P, false, UQ0, UQI, QSide::Any, false),
        min_ratio: 2.0,
        assumptions: &[],
        regimes: ALL_REGIMES,
    },
    BoundSpec {
        id: BoundId::LbIntLq,
        direction: Direction::Lower,
        statement: "cap ≳ μ(B_r)/r^p, p ∈ int lQ",
        hypothesis: hyp(Subject::P, true, LQ0, LQI, QSide::Any, false),
        min_ratio: 1.0,
        assumptions: RD_PI,
        regimes: ALL_REGIMES,
    },
    BoundSpec {
        id: BoundId::LbIntUq,
        direction: Direction::Lower,
        statement: "cap ≳ μ(B_R)/R^p, p ∈ int uQ",
        hypothesis: hyp(Subject::P, true, UQ0, UQI, QSide::Any, false),
        min_ratio: 1.0,
        assumptions: RD_PI,
        regimes: ALL_REGIMES,
    },
    BoundSpec {
        id: BoundId::LbBeyondLq,
        direction: Direction::Lower,
        statement: "cap ≳ μ(B_r)/r^q · R^(q-p), 0 < q < p, q ∈ lQ",
        hypothesis: hyp(Subject::Q, false, LQ0, LQI, QSide::Below, false),
        min_ratio: 1.0,
        assumptions: RD_PI,
        regimes: ALL_REGIMES,
    },
    BoundSpec {
        id: BoundId::LbBeyondUq,
        direction: Direction::Lower,
        statement: "cap ≳ μ(B_R)/R^q · r^(q-p), q > p, q ∈ uQ",
        hypothesis: hyp(Subject::Q, false, UQ0, UQI, QSide::Above, false),
        min_ratio: 1.0,
        assumptions: RD_PI,
        regimes: ALL_REGIMES,
    },
    BoundSpec {
        id: BoundId::LbLogpLq,
        direction: Direction::Lower,
        statement: "cap ≳ μ(B_r)/r^p · log(R/r)^(-p), p ∈ lQ",
        hypothesis: hyp(Subject::P, false, LQ0, LQI, QSide::Any, false),
        min_ratio: 2.0,
        assumptions: RD_PI,
        regimes: ALL_REGIMES,
    },
    BoundSpec {
        id: BoundId::LbLogpUq,
        direction: Direction::Lower,
        statement: "cap ≳ μ(B_R)/R^p · log(R/r)^(-p), p ∈ uQ",
        hypothesis: hyp(Subject::P, false, UQ0, UQI, QSide::Any, false),
        min_ratio: 2.0,
        assumptions: RD_PI,
        regimes: ALL_REGIMES,
    },
    BoundSpec {
        id: BoundId::LbBorderLq,
        direction: Direction::Lower,
        statement: "cap ≳ μ(B_r)/r^p · log(R/r)^(1-p), p ∈ lQ",
        hypothesis: hyp(Subject::P, false, LQ0, LQI, QSide::Any, true),
        min_ratio: 2.0,
        assumptions: RD_P0,
        regimes: ALL_REGIMES,
    },
    BoundSpec {
        id: BoundId::LbBorderUq,
        direction: Direction::Lower,
        statement: "cap ≳ μ(B_R)/R^p · log(R/r)^(1-p), p ∈ uQ",
        hypothesis: hyp(Subject::P, false, UQ0, UQI, QSide::Any, true),
        min_ratio: 2.0,
        assumptions: RD_P0,
        regimes: ALL_REGIMES,
    },
    BoundSpec {
        id: BoundId::UbS,
        direction: Direction::Upper,
        statement: "cap ≲ R^(q-p) if q < p, r^(q-p) if q > p; q ∈ lS0 (small) or q ∈ uSinf (large)",
        hypothesis: hyp(Subject::Q, false, LS0, USI, QSide::Any, false),
        min_ratio: 2.0,
        assumptions: &[],
        regimes: SPLIT_REGIMES,
    },
    BoundSpec {
        id: BoundId::UbSLog,
        direction: Direction::Upper,
        statement: "cap ≲ log(R/r)^(1-p); p ∈ lS0 (small) or p ∈ uSinf (large)",
        hypothesis: hyp(Subject::P, false, LS0, USI, QSide::Any, false),
        min_ratio: 2.0,
        assumptions: &[],
        regimes: SPLIT_REGIMES,
    },
    BoundSpec {
        id: BoundId::LbS,
        direction: Direction::Lower,
        statement: "cap ≳ R^(q-p) if q < p, r^(q-p) if q > p, log(R/r)^(-p) if q = p; q ∈ uS0 (small) or q ∈ lSinf (large)",
        hypothesis: hyp(Subject::Q, false, US0, LSI, QSide::Any, false),
        min_ratio: 1.0,
        assumptions: RD_PI,
        regimes: SPLIT_REGIMES,
    },
    BoundSpec {
        id: BoundId::LbSLog,
        direction: Direction::Lower,
        statement: "cap ≳ log(R/r)^(1-p); p ∈ uS0 (small) or p ∈ lSinf (large)",
        hypothesis: hyp(Subject::P, false, US0, LSI, QSide::Any, true),
        min_ratio: 2.0,
        assumptions: RD_P0,
        regimes: SPLIT_REGIMES,
    },
];

pub fn catalog() -> &'static [BoundSpec] {
    &CATALOG
}

/// Evaluates the right-hand side of `id` (without its implicit constant).
pub fn evaluate(id: BoundId, profile: &MeasureProfile, p: f64, q: Option<f64>, r: Radius, big_r: Radius) -> Result<LogScalar> {
    if !(r < big_r) || big_r.is_infinite() || r.ln() == f64::NEG_INFINITY {
        return Err(Error::Parameter(format!("bounds need 0 < r < R < ∞, got r = {r}, R = {big_r}")));
    }
    let need_q = || q.ok_or_else(|| Error::Parameter(format!("{} needs an auxiliary exponent q", id.token())));
    let (tr, tbig) = (r.ln(), big_r.ln());
    let log_ratio = (tbig - tr).ln();
    let small = |e: f64| -> Result<f64> { Ok(profile.ln_ball_measure(tr)? - e * tr) };
    let large = |e: f64| -> Result<f64> { Ok(profile.ln_ball_measure(tbig)? - e * tbig) };
    let ln = match id {
        BoundId::UbMin => small(p)?.min(large(p)?),
        BoundId::UbLogLq => large(p)? + (1.0 - p) * log_ratio,
        BoundId::UbLogUq => small(p)? + (1.0 - p) * log_ratio,
        BoundId::LbIntLq => small(p)?,
        BoundId::LbIntUq => large(p)?,
        BoundId::LbBeyondLq => {
            let q = need_q()?;
            small(q)? + (q - p) * tbig
        }
        BoundId::LbBeyondUq => {
            let q = need_q()?;
            large(q)? + (q - p) * tr
        }
        BoundId::LbLogpLq => small(p)? - p * log_ratio,
        BoundId::LbLogpUq => large(p)? - p * log_ratio,
        BoundId::LbBorderLq => small(p)? + (1.0 - p) * log_ratio,
        BoundId::LbBorderUq => large(p)? + (1.0 - p) * log_ratio,
        BoundId::UbS => {
            let q = need_q()?;
            if q < p {
                (q - p) * tbig
            } else if q > p {
                (q - p) * tr
            } else {
                return Err(Error::Parameter("UB-S needs q ≠ p; use UB-S-LOG at q = p".into()));
            }
        }
        BoundId::UbSLog | BoundId::LbSLog => (1.0 - p) * log_ratio,
        BoundId::LbS => {
            let q = need_q()?;
            if q < p {
                (q - p) * tbig
            } else if q > p {
                (q - p) * tr
            } else {
                -p * log_ratio
            }
        }
    };
    Ok(LogScalar::from_ln(ln))
}

/// `(μ(B_R)/R^p)^{1-(p-1)/β} (μ(B_r)/r^p)^{(p-1)/β} log(R/r)^{1-p}`: the two-sided law for
/// log weights at 0 with `β > p - 1`.
pub fn composite_log_form(profile: &MeasureProfile, p: f64, beta: f64, r: Radius, big_r: Radius) -> Result<LogScalar> {
    if !(beta > p - 1.0) {
        return Err(Error::Precondition(format!("composite form needs β > p - 1, got β = {beta}, p = {p}")));
    }
    let (tr, tbig) = (r.ln(), big_r.ln());
    if !(tr < tbig) {
        return Err(Error::Parameter(format!("need r < R, got r = {r}, R = {big_r}")));
    }
    let theta = (p - 1.0) / beta;
    let small = profile.ln_ball_measure(tr)? - p * tr;
    let large = profile.ln_ball_measure(tbig)? - p * tbig;
    Ok(LogScalar::from_ln((1.0 - theta) * large + theta * small + (1.0 - p) * (tbig - tr).ln()))
}

/// Hypothesis bookkeeping against an exponent report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisCheck {
    pub holds: bool,
    pub failed: Vec<String>,
}

fn member(report: &ExponentReport, set: SetId, x: f64, interior: bool, margin: f64) -> std::result::Result<(), String> {
    let name = set.name();
    let ok = if interior {
        report.interior_contains(set, x, margin)
    } else {
        report.contains(set, x, margin) == Some(true)
    };
    if ok {
        return Ok(());
    }
    let detail = match report.get(set) {
        None => "set not estimated".to_string(),
        Some(s) => format!("endpoint {:.4}, attained {:?}", s.endpoint, s.attained),
    };
    let rel = if interior { "∈ int" } else { "∈" };
    Err(format!("{x} {rel} {name} fails ({detail})"))
}

pub fn check_hypotheses(spec: &BoundSpec, report: &ExponentReport, p: f64, q: Option<f64>, regime: RadiiRegime, margin: f64) -> HypothesisCheck {
    let mut failed = Vec::new();
    if !spec.regimes.contains(&regime) {
        failed.push(format!("{} is not stated for the {regime:?} regime", spec.id.token()));
    }
    if let Some(h) = spec.hypothesis {
        if h.needs_p_above_one && p <= 1.0 {
            failed.push(format!("needs p > 1, got {p}"));
        }
        let x = match h.subject {
            Subject::P => Some(p),
            Subject::Q => q,
        };
        match x {
            None => failed.push("auxiliary exponent q missing".into()),
            Some(x) => {
                if !(x > 0.0) {
                    failed.push(format!("exponent must be positive, got {x}"));
                }
                match h.q_side {
                    QSide::Below if !(x < p) => failed.push(format!("needs q < p, got q = {x}")),
                    QSide::Above if !(x > p) => failed.push(format!("needs q > p, got q = {x}")),
                    _ => {}
                }
                let sets: &[SetId] = match regime {
                    RadiiRegime::Small => &[h.small],
                    RadiiRegime::Large => &[h.large],
                    RadiiRegime::All => &[h.small, h.large],
                };
                for &set in sets {
                    if let Err(e) = member(report, set, x, h.interior, margin) {
                        failed.push(e);
                    }
                }
            }
        }
    }
    HypothesisCheck {
        holds: failed.is_empty(),
        failed,
    }
}

/// Best auxiliary exponent for a q-dependent bound: the attained endpoint when possible,
/// otherwise a point `2·margin` inside the set, moved to the required side of `p`.
pub fn choose_q(spec: &BoundSpec, report: &ExponentReport, p: f64, regime: RadiiRegime, margin: f64) -> Option<f64> {
    let h = spec.hypothesis?;
    if h.subject != Subject::Q {
        return None;
    }
    let set = match regime {
        RadiiRegime::Large => h.large,
        _ => h.small,
    };
    let s = report.get(set)?;
    let lower = set.is_lower();
    let mut q = match (s.attained, lower) {
        (Attainment::Yes, _) => s.tested_at,
        (_, true) => s.endpoint - 2.0 * margin,
        (_, false) => s.endpoint + 2.0 * margin,
    };
    match h.q_side {
        QSide::Below if q >= p => q = if lower { p - 2.0 * margin } else { return None },
        QSide::Above if q <= p => q = if lower { return None } else { p + 2.0 * margin },
        _ => {}
    }
    if spec.id == BoundId::UbS && (q - p).abs() <= margin {
        return None;
    }
    if spec.id == BoundId::LbS && (q - p).abs() <= margin && report.contains(set, p, margin) == Some(true) {
        q = p;
    }
    (q > 0.0).then_some(q)
}

/// A bound whose hypotheses hold, with the auxiliary exponent it was resolved at.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Applicable {
    pub id: BoundId,
    pub q: Option<f64>,
}

pub fn applicable_bounds(report: &ExponentReport, p: f64, q_opt: Option<f64>, regime: RadiiRegime, margin: f64) -> Vec<Applicable> {
    catalog()
        .iter()
        .filter_map(|spec| {
            let needs_q = spec.hypothesis.is_some_and(|h| h.subject == Subject::Q);
            let q = if needs_q { q_opt.or_else(|| choose_q(spec, report, p, regime, margin)) } else { None };
            if needs_q && q.is_none() {
                return None;
            }
            check_hypotheses(spec, report, p, q, regime, margin).holds.then_some(Applicable { id: spec.id, q })
        })
        .collect()
}

/// Grid of annuli: `r` geometric over `[ln r_lo, ln r_hi]`, `R/r` geometric over the ratio
/// range, plus every pair of extra radii (ladder marks) with admissible ratio.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundGrid {
    pub r_lo: Radius,
    pub r_hi: Radius,
    pub r_points: usize,
    pub ratio_lo: f64,
    /// Natural log of the largest `R/r`.
    pub ln_ratio_hi: f64,
    pub ratio_points: usize,
    /// Largest allowed `R` (small regime) or smallest allowed `r` (large regime).
    pub r0: Radius,
    pub regime: RadiiRegime,
    pub extra_radii: Vec<Radius>,
}

impl BoundGrid {
    /// Default grid for a profile and regime: the ladder window (or `[1e-12, R₀/2]`) below
    /// `R₀ = small_top`, or `[e, 1e12]` above `R₀ = large_bottom`, with ratios up to `1e6`
    /// and every ladder mark added.
    pub fn for_profile(profile: &MeasureProfile, regime: RadiiRegime) -> BoundGrid {
        let sc = profile.scales();
        let ln_ratio_hi = 1e6f64.ln();
        let marks: Vec<Radius> = sc.marks.iter().map(|m| m.radius).collect();
        match regime {
            RadiiRegime::Small | RadiiRegime::All => {
                let r0 = sc.small_top;
                let lo = sc.floor.map_or(Radius::from_ln(1e-12f64.ln() + r0.ln().min(0.0)), |f| f.max(Radius::from_ln(r0.ln() - 64.0 * ln_ratio_hi)));
                BoundGrid {
                    r_lo: lo,
                    r_hi: r0.scaled(0.5),
                    r_points: 20,
                    ratio_lo: 2.0,
                    ln_ratio_hi,
                    ratio_points: 20,
                    r0: if regime == RadiiRegime::All { Radius::INFINITY } else { r0 },
                    regime,
                    extra_radii: marks.into_iter().filter(|m| *m <= r0).collect(),
                }
            }
            RadiiRegime::Large => {
                let r0 = sc.large_bottom;
                BoundGrid {
                    r_lo: r0,
                    r_hi: Radius::from_ln(r0.ln().max(1.0) + 1e12f64.ln()),
                    r_points: 20,
                    ratio_lo: 2.0,
                    ln_ratio_hi,
                    ratio_points: 20,
                    r0,
                    regime,
                    extra_radii: marks.into_iter().filter(|m| *m >= r0).collect(),
                }
            }
        }
    }

    /// Annuli `(r, R)` in the grid with `R/r ≥ max(ratio_lo, min_ratio)`, respecting `R₀`.
    pub fn pairs(&self, min_ratio: f64) -> Result<Vec<(Radius, Radius)>> {
        if self.r_points < 1 || self.ratio_points < 1 {
            return Err(Error::Parameter("grid needs at least one point per axis".into()));
        }
        let ln_min = self.ratio_lo.max(min_ratio).ln();
        if !(ln_min <= self.ln_ratio_hi) {
            return Err(Error::Parameter("empty ratio range".into()));
        }
        let rs: Vec<f64> = spaced(self.r_lo.ln(), self.r_hi.ln(), self.r_points);
        let ratios: Vec<f64> = spaced(ln_min.max(1e-300), self.ln_ratio_hi, self.ratio_points);
        let mut out = Vec::new();
        for &tr in &rs {
            for &lr in &ratios {
                out.push((tr, tr + lr));
            }
        }
        let mut extra: Vec<f64> = self.extra_radii.iter().map(|r| r.ln()).collect();
        extra.sort_by(f64::total_cmp);
        extra.dedup();
        for (i, &a) in extra.iter().enumerate() {
            for &b in &extra[i + 1..] {
                if b - a >= ln_min {
                    out.push((a, b));
                }
            }
        }
        let r0 = self.r0.ln();
        out.retain(|&(a, b)| match self.regime {
            RadiiRegime::Small => b <= r0 + 1e-12 * r0.abs(),
            RadiiRegime::Large => a >= r0 - 1e-12 * r0.abs(),
            RadiiRegime::All => true,
        });
        out.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        out.dedup();
        Ok(out.into_iter().map(|(a, b)| (Radius::from_ln(a), Radius::from_ln(b))).collect())
    }
}

fn spaced(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundRow {
    pub r: Radius,
    pub big_r: Radius,
    pub capacity: LogScalar,
    pub bound: LogScalar,
    pub ratio: LogScalar,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Verdict {
    Consistent,
    Violated { r: Radius, big_r: Radius },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheckReport {
    pub bound_id: BoundId,
    pub direction: Direction,
    pub regime: RadiiRegime,
    pub p: f64,
    pub q: Option<f64>,
    pub audit: bool,
    pub hypotheses: HypothesisCheck,
    pub unverified_assumptions: &'static [&'static str],
    pub pairs: usize,
    pub ratio_min: LogScalar,
    pub ratio_max: LogScalar,
    /// `ratio_max` for upper bounds, `1/ratio_min` for lower bounds.
    pub fitted_constant: LogScalar,
    pub tolerance: f64,
    pub verdict: Verdict,
    /// Least-squares slope of `ln(ratio)` against `ln(R/r)`.
    pub trend: Option<f64>,
    #[serde(skip)]
    pub rows: Vec<BoundRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOptions {
    pub tolerance: f64,
    pub margin: f64,
    pub audit: bool,
    pub exec: Execution,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            tolerance: 100.0,
            margin: 0.05,
            audit: false,
            exec: Execution::Parallel,
        }
    }
}

/// Capacity against the bound on every grid annulus. Outside audit mode unmet hypotheses are
/// a precondition error.
pub fn check_bound(id: BoundId, profile: &MeasureProfile, report: &ExponentReport, p: f64, q: Option<f64>, grid: &BoundGrid, opts: &CheckOptions) -> Result<BoundCheckReport> {
    let spec = id.spec();
    if !(p > 1.0) {
        return Err(Error::Unsupported(format!("checks need exact capacity, which needs p > 1 (got {p})")));
    }
    let needs_q = spec.hypothesis.is_some_and(|h| h.subject == Subject::Q);
    let q = if needs_q { q.or_else(|| choose_q(spec, report, p, grid.regime, opts.margin)) } else { None };
    let hypotheses = check_hypotheses(spec, report, p, q, grid.regime, opts.margin);
    if !hypotheses.holds && !opts.audit {
        return Err(Error::Precondition(format!("{}: {}", id.token(), hypotheses.failed.join("; "))));
    }
    if needs_q && q.is_none() {
        return Err(Error::Parameter(format!("{} needs an auxiliary exponent q", id.token())));
    }
    let pairs = grid.pairs(spec.min_ratio)?;
    if pairs.is_empty() {
        return Err(Error::Parameter("grid has no admissible annuli".into()));
    }
    let rows = opts.exec.try_map(&pairs, |&(r, big_r)| -> Result<BoundRow> {
        let capacity = annulus_capacity(profile, p, r, big_r)?.value;
        let bound = evaluate(id, profile, p, q, r, big_r)?;
        Ok(BoundRow {
            r,
            big_r,
            capacity,
            bound,
            ratio: LogScalar::from_ln(capacity.log_mag() - bound.log_mag()),
        })
    })?;
    let by_ratio = |a: &&BoundRow, b: &&BoundRow| a.ratio.log_mag().total_cmp(&b.ratio.log_mag());
    let lo = rows.iter().min_by(by_ratio).expect("non-empty");
    let hi = rows.iter().max_by(by_ratio).expect("non-empty");
    let (fitted, witness) = match spec.direction {
        Direction::Upper => (hi.ratio, hi),
        Direction::Lower => (LogScalar::from_ln(-lo.ratio.log_mag()), lo),
    };
    let verdict = if fitted.log_mag() <= opts.tolerance.ln() {
        Verdict::Consistent
    } else {
        Verdict::Violated {
            r: witness.r,
            big_r: witness.big_r,
        }
    };
    let xs: Vec<f64> = rows.iter().map(|row| row.big_r.ln() - row.r.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|row| row.ratio.log_mag()).collect();
    let trend = (rows.len() >= 2).then(|| ls_slope(&xs, &ys));
    Ok(BoundCheckReport {
        bound_id: id,
        direction: spec.direction,
        regime: grid.regime,
        p,
        q,
        audit: opts.audit,
        hypotheses,
        unverified_assumptions: spec.assumptions,
        pairs: rows.len(),
        ratio_min: lo.ratio,
        ratio_max: hi.ratio,
        fitted_constant: fitted,
        tolerance: opts.tolerance,
        verdict,
        trend,
        rows,
    })
}

/// Along a sequence of annuli: `ln(capacity/bound)` and its trend.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendReport {
    pub bound_id: BoundId,
    pub log_ratios: Vec<f64>,
    pub slope_vs_index: f64,
    /// Slope against caller-supplied abscissae, e.g. `ln α_k` along a ladder.
    pub slope_vs_abscissa: Option<f64>,
}

pub fn sharpness_scan(profile: &MeasureProfile, p: f64, id: BoundId, q: Option<f64>, sequence: &[(Radius, Radius)], abscissa: Option<&[f64]>) -> Result<TrendReport> {
    if !(p > 1.0) {
        return Err(Error::Unsupported(format!("scans need exact capacity, which needs p > 1 (got {p})")));
    }
    if sequence.len() < 2 {
        return Err(Error::Parameter("a trend needs at least two annuli".into()));
    }
    if let Some(xs) = abscissa {
        if xs.len() != sequence.len() {
            return Err(Error::Parameter("abscissa length must match the sequence".into()));
        }
    }
    let log_ratios = sequence
        .iter()
        .map(|&(r, big_r)| {
            let cap = annulus_capacity(profile, p, r, big_r)?.value;
            Ok(cap.log_mag() - evaluate(id, profile, p, q, r, big_r)?.log_mag())
        })
        .collect::<Result<Vec<f64>>>()?;
    let index: Vec<f64> = (0..sequence.len()).map(|k| k as f64).collect();
    Ok(TrendReport {
        bound_id: id,
        slope_vs_index: ls_slope(&index, &log_ratios),
        slope_vs_abscissa: abscissa.map(|xs| ls_slope(xs, &log_ratios)),
        log_ratios,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::exponents::{exponent_report, ExponentConfig};
    use crate::weights::{constant, ex1, power_log_at_zero};

    fn setup(w: crate::weights::RadialWeight) -> (MeasureProfile, ExponentReport) {
        let prof = MeasureProfile::from_weight(w).unwrap();
        let rep = exponent_report(&prof, &ExponentConfig::default()).unwrap();
        (prof, rep)
    }

    #[test]
    fn catalog_has_fifteen_distinct_entries() {
        assert_eq!(catalog().len(), 15);
        for id in BoundId::ALL {
            assert_eq!(id.spec().id, id);
            assert_eq!(BoundId::from_token(id.token()).unwrap(), id);
        }
    }

    #[test]
    fn min_bound_arithmetic() {
        let prof = MeasureProfile::from_weight(constant(3).unwrap()).unwrap();
        let v = evaluate(BoundId::UbMin, &prof, 2.0, None, Radius::ONE, Radius::new(4.0).unwrap()).unwrap();
        assert!((v.to_f64() - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn applicability_in_space() {
        let (_, rep) = setup(constant(3).unwrap());
        let ids: Vec<BoundId> = applicable_bounds(&rep, 2.0, None, RadiiRegime::Small, 0.05).into_iter().map(|a| a.id).collect();
        assert!(ids.contains(&BoundId::LbIntLq) && ids.contains(&BoundId::UbMin));
        assert!(!ids.contains(&BoundId::LbIntUq));
    }

    #[test]
    fn applicability_on_ladder() {
        let (_, rep) = setup(ex1(None).unwrap());
        let apps = applicable_bounds(&rep, 3.0, None, RadiiRegime::Small, 0.05);
        assert!(!apps.iter().any(|a| matches!(a.id, BoundId::LbIntLq | BoundId::LbIntUq)));
        let beyond = apps.iter().find(|a| a.id == BoundId::LbBeyondLq).expect("beyond-borderline applies");
        assert_eq!(beyond.q, Some(2.0));
    }

    #[test]
    fn border_applies_for_negative_log_power() {
        let (_, rep) = setup(power_log_at_zero(2, 2.0, -1.0).unwrap());
        let apps = applicable_bounds(&rep, 2.0, None, RadiiRegime::Small, 0.05);
        assert!(apps.iter().any(|a| a.id == BoundId::LbBorderLq), "{apps:?}");
    }

    #[test]
    fn space_checks_are_consistent() {
        let (prof, rep) = setup(constant(3).unwrap());
        let mut grid = BoundGrid::for_profile(&prof, RadiiRegime::Small);
        grid.r_lo = Radius::new(1e-6).unwrap();
        grid.r_hi = Radius::ONE;
        grid.r0 = Radius::INFINITY;
        for id in [BoundId::UbMin, BoundId::LbIntLq] {
            let rep = check_bound(id, &prof, &rep, 2.0, None, &grid, &CheckOptions::default()).unwrap();
            assert_eq!(rep.verdict, Verdict::Consistent, "{id:?}");
            if id == BoundId::UbMin {
                assert!(rep.ratio_max.log_mag() - rep.ratio_min.log_mag() <= 10f64.ln());
            }
        }
    }

    #[test]
    fn hypotheses_are_enforced_outside_audit() {
        let (prof, rep) = setup(ex1(None).unwrap());
        let grid = BoundGrid::for_profile(&prof, RadiiRegime::Small);
        let err = check_bound(BoundId::LbIntLq, &prof, &rep, 3.0, None, &grid, &CheckOptions::default());
        assert!(matches!(err, Err(Error::Precondition(_))));
        let audit = CheckOptions {
            audit: true,
            ..CheckOptions::default()
        };
        let out = check_bound(BoundId::LbIntLq, &prof, &rep, 3.0, None, &grid, &audit).unwrap();
        assert!(matches!(out.verdict, Verdict::Violated { .. }));
        assert!(!out.hypotheses.holds);
    }

    #[test]
    fn ladder_interior_bound_degrades_like_square_root() {
        let prof = MeasureProfile::from_weight(ex1(None).unwrap()).unwrap();
        let alpha = |k: i32| Radius::from_ln(-(2f64.powi(k)) * std::f64::consts::LN_2);
        let seq: Vec<(Radius, Radius)> = (2..=6).map(|k| (alpha(k + 1), alpha(k).pow(1.5))).collect();
        let xs: Vec<f64> = (2..=6).map(|k| alpha(k).ln()).collect();
        let scan = sharpness_scan(&prof, 3.0, BoundId::LbIntLq, None, &seq, Some(&xs)).unwrap();
        let slope = scan.slope_vs_abscissa.unwrap();
        assert!((slope - 0.5).abs() <= 0.05, "slope {slope}, ratios {:?}", scan.log_ratios);
    }
}
