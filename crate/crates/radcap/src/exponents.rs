//! Estimation of the exponent sets at 0 and at ∞ from sampled ball measures.
//!
//! Endpoints are grid extremes over a window of radii. Attainment is decided by a heuristic
//! of this crate, not by any criterion from the literature: the deviation from the power law
//! at the candidate endpoint is reduced to its running maximum, and the least-squares slope of
//! that envelope against the iterated logarithm `ln(1 + ln(1 + x))` is measured over the outer
//! half of the window. Bounded deviations give a flat envelope; `ln^β`-type and slower
//! `ln ln`-type drifts give a positive slope.

use rand::seq::index::sample as sample_indices;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::measure::{MeasureProfile, ProfileKind};
use crate::numerics::ls_slope;
use crate::radius::Radius;

/// Which side of the scale the sets describe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Zero,
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SetId {
    #[serde(rename = "lQ0")]
    LowerQZero,
    #[serde(rename = "lS0")]
    LowerSZero,
    #[serde(rename = "uS0")]
    UpperSZero,
    #[serde(rename = "uQ0")]
    UpperQZero,
    #[serde(rename = "lQinf")]
    LowerQInf,
    #[serde(rename = "lSinf")]
    LowerSInf,
    #[serde(rename = "uSinf")]
    UpperSInf,
    #[serde(rename = "uQinf")]
    UpperQInf,
}

impl SetId {
    pub const ALL: [SetId; 8] = [
        SetId::LowerQZero,
        SetId::LowerSZero,
        SetId::UpperSZero,
        SetId::UpperQZero,
        SetId::LowerQInf,
        SetId::LowerSInf,
        SetId::UpperSInf,
        SetId::UpperQInf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SetId::LowerQZero => "lQ0",
            SetId::LowerSZero => "lS0",
            SetId::UpperSZero => "uS0",
            SetId::UpperQZero => "uQ0",
            SetId::LowerQInf => "lQinf",
            SetId::LowerSInf => "lSinf",
            SetId::UpperSInf => "uSinf",
            SetId::UpperQInf => "uQinf",
        }
    }

    pub fn regime(self) -> Regime {
        match self {
            SetId::LowerQZero | SetId::LowerSZero | SetId::UpperSZero | SetId::UpperQZero => Regime::Zero,
            _ => Regime::Infinity,
        }
    }

    /// Lower sets are intervals `(0, q)` or `(0, q]`; upper sets `(q, ∞)` or `[q, ∞)`.
    pub fn is_lower(self) -> bool {
        matches!(self, SetId::LowerQZero | SetId::LowerSZero | SetId::LowerQInf | SetId::LowerSInf)
    }

    pub fn is_q_set(self) -> bool {
        matches!(self, SetId::LowerQZero | SetId::UpperQZero | SetId::LowerQInf | SetId::UpperQInf)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Attainment {
    Yes,
    No,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentConfig {
    /// Base number of geometric sample radii per window.
    pub samples: usize,
    /// Upper bound on sample count reached by refinement.
    pub max_samples: usize,
    pub max_pairs: usize,
    pub seed: u64,
    /// Envelope slope at or below which an endpoint counts as attained; `3·tol` or more
    /// counts as not attained.
    pub attain_tol: f64,
    /// An estimate within this distance of a rational with denominator ≤ 12 is snapped to it
    /// before testing attainment.
    pub snap_tol: f64,
    /// Allowed violation of the inclusion ordering between estimates.
    pub order_tol: f64,
    pub window_zero: Option<(Radius, Radius)>,
    pub window_infinity: Option<(Radius, Radius)>,
    /// Minimum `ln(R/r)` for pairs in the Q-set scans; default a quarter of the window, capped
    /// at [`MAX_DEFAULT_SEPARATION`].
    pub min_separation: Option<f64>,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for ExponentConfig {
    fn default() -> Self {
        ExponentConfig {
            samples: 256,
            max_samples: 8192,
            max_pairs: 100_000,
            seed: 0,
            attain_tol: 0.02,
            snap_tol: 2e-3,
            order_tol: 0.05,
            window_zero: None,
            window_infinity: None,
            min_separation: None,
            exec: Execution::Parallel,
        }
    }
}

/// Window used when neither the config nor the profile names one: `|ln r| ∈ [2^32, 2^40]`.
pub const DEFAULT_LOG_WINDOW: (f64, f64) = (4_294_967_296.0, 1_099_511_627_776.0);

/// Default window for the `r f'/f` bracket: `|ln r| ∈ [2^4, 2^20]`. The bracket subtracts
/// `ln f` from quantities of the same size, so deep windows lose digits to cancellation.
pub const DEFAULT_BRACKET_LOG_WINDOW: (f64, f64) = (16.0, 1_048_576.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SetEstimate {
    pub set: SetId,
    pub endpoint: f64,
    /// The value whose attainment was tested (the endpoint, possibly snapped).
    pub tested_at: f64,
    pub attained: Attainment,
    pub evidence_slope: f64,
    pub r_range: (Radius, Radius),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bracket {
    pub loq: f64,
    pub uq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentReport {
    pub sets: Vec<SetEstimate>,
    pub bracket_zero: Option<Bracket>,
    pub bracket_infinity: Option<Bracket>,
    pub attainment_rule: &'static str,
}

impl ExponentReport {
    pub fn get(&self, set: SetId) -> Option<&SetEstimate> {
        self.sets.iter().find(|s| s.set == set)
    }

    pub fn endpoint(&self, set: SetId) -> Option<f64> {
        self.get(set).map(|s| s.endpoint)
    }

    /// Membership of `q` in the set: interior membership needs a margin; the endpoint itself
    /// needs attainment `Yes`. `None` when the set was not estimated or the case is unclear.
    pub fn contains(&self, set: SetId, q: f64, margin: f64) -> Option<bool> {
        let s = self.get(set)?;
        let inside = if set.is_lower() { q < s.endpoint - margin } else { q > s.endpoint + margin };
        if inside {
            return Some(true);
        }
        let outside = if set.is_lower() { q > s.endpoint + margin } else { q < s.endpoint - margin };
        if outside || q <= 0.0 {
            return Some(false);
        }
        match s.attained {
            Attainment::Yes => Some(true),
            Attainment::No => Some(false),
            Attainment::Inconclusive => None,
        }
    }

    /// `q` lies in the interior of the set by at least `margin`.
    pub fn interior_contains(&self, set: SetId, q: f64, margin: f64) -> bool {
        self.get(set).is_some_and(|s| {
            if set.is_lower() {
                q > 0.0 && q < s.endpoint - margin
            } else {
                q > s.endpoint + margin
            }
        })
    }
}

/// Minimum `ln(R/r)` of pairs used when judging Q-set attainment.
const ATTAIN_SEPARATION: f64 = std::f64::consts::LN_2;

const ATTAINMENT_RULE: &str =
    "heuristic: LS slope of running-max deviation envelope vs ln(1+ln(1+x)) over the outer half of the window";

/// Samples `(t, ln f)` on a window, sorted by `t`, with ladder marks and breakpoints inside
/// the window added.
struct Samples {
    t: Vec<f64>,
    lnf: Vec<f64>,
}

fn check_window(regime: Regime, lo: Radius, hi: Radius, samples: usize) -> Result<()> {
    if samples < 8 {
        return Err(Error::Parameter(format!("need at least 8 samples, got {samples}")));
    }
    if !(lo < hi) || !lo.ln().is_finite() || !hi.ln().is_finite() {
        return Err(Error::Parameter(format!("window needs finite 0 < lo < hi, got [{lo}, {hi}]")));
    }
    match regime {
        Regime::Zero if hi.ln() >= 0.0 => Err(Error::Parameter(format!("sets at 0 need radii below 1, got {hi}"))),
        Regime::Infinity if lo.ln() <= 0.0 => Err(Error::Parameter(format!("sets at ∞ need radii above 1, got {lo}"))),
        _ => Ok(()),
    }
}

fn sample(profile: &MeasureProfile, lo: Radius, hi: Radius, points: usize, exec: Execution) -> Result<Samples> {
    let mut t: Vec<f64> = Radius::geometric_grid(lo, hi, points)?.iter().map(|r| r.ln()).collect();
    let inside = |x: f64| x > lo.ln() && x < hi.ln();
    t.extend(profile.scales().marks.iter().map(|m| m.radius.ln()).filter(|&x| inside(x)));
    if let Some(w) = profile.weight() {
        t.extend(w.breakpoints().filter(|&x| inside(x)));
    }
    t.sort_by(f64::total_cmp);
    t.dedup();
    let lnf = exec.try_map(&t, |&x| profile.ln_ball_measure(x))?;
    Ok(Samples { t, lnf })
}

/// Samples spaced geometrically in `|ln r|` (doubly logarithmic in `r`), plus marks and
/// breakpoints.
fn sample_loglog(profile: &MeasureProfile, lo: Radius, hi: Radius, points: usize, exec: Execution) -> Result<Samples> {
    let (a, b) = (lo.ln(), hi.ln());
    let (xa, xb) = (a.abs().max(1e-3), b.abs().max(1e-3));
    let sign = if b <= 0.0 { -1.0 } else { 1.0 };
    let (x0, x1) = (xa.min(xb), xa.max(xb));
    let step = (x1 / x0).ln() / (points - 1) as f64;
    let mut t: Vec<f64> = (0..points).map(|i| sign * x0 * (step * i as f64).exp()).collect();
    t.push(sign * x1);
    let inside = |x: f64| x > a && x < b;
    t.extend(profile.scales().marks.iter().map(|m| m.radius.ln()).filter(|&x| inside(x)));
    if let Some(w) = profile.weight() {
        t.extend(w.breakpoints().filter(|&x| inside(x)));
    }
    t.retain(|&x| x >= a && x <= b);
    t.sort_by(f64::total_cmp);
    t.dedup();
    let lnf = exec.try_map(&t, |&x| profile.ln_ball_measure(x))?;
    Ok(Samples { t, lnf })
}

/// Resolved sampling window for a regime, or `None` when the profile has nothing there.
pub fn window(profile: &MeasureProfile, regime: Regime, cfg: &ExponentConfig) -> Option<(Radius, Radius)> {
    window_or(profile, regime, cfg, DEFAULT_LOG_WINDOW)
}

/// Window for the analytic bracket: the configured or profile window, else a shallow default.
pub fn bracket_window(profile: &MeasureProfile, regime: Regime, cfg: &ExponentConfig) -> Option<(Radius, Radius)> {
    window_or(profile, regime, cfg, DEFAULT_BRACKET_LOG_WINDOW)
}

/// Range searched for attainment: from the estimation window's far end back to the edge of
/// the small-radius (resp. large-radius) regime, so slow drifts have room to show.
pub fn attainment_window(profile: &MeasureProfile, regime: Regime, cfg: &ExponentConfig) -> Option<(Radius, Radius)> {
    let (lo, hi) = window(profile, regime, cfg)?;
    let sc = profile.scales();
    Some(match regime {
        Regime::Zero => (lo, Radius::from_ln(sc.small_top.ln().min(-1.0)).max(hi)),
        Regime::Infinity => (Radius::from_ln(sc.large_bottom.ln().max(1.0)).min(lo), hi),
    })
}

fn window_or(profile: &MeasureProfile, regime: Regime, cfg: &ExponentConfig, default: (f64, f64)) -> Option<(Radius, Radius)> {
    let (configured, scaled) = match regime {
        Regime::Zero => (cfg.window_zero, profile.scales().window_zero),
        Regime::Infinity => (cfg.window_infinity, profile.scales().window_infinity),
    };
    if let Some(w) = configured.or(scaled) {
        return Some(w);
    }
    if profile.kind() != ProfileKind::WeightDerived {
        return None;
    }
    let (a, b) = default;
    Some(match regime {
        Regime::Zero => (Radius::from_ln(-b), Radius::from_ln(-a)),
        Regime::Infinity => (Radius::from_ln(a), Radius::from_ln(b)),
    })
}

/// Extremes `(min, max)` of `ln f(r) / ln r` over the window, refined by doubling the sample
/// count until both move by less than `1e-3`.
pub fn s_endpoints(profile: &MeasureProfile, lo: Radius, hi: Radius, samples: usize, cfg: &ExponentConfig) -> Result<(f64, f64)> {
    let regime = if hi.ln() < 0.0 { Regime::Zero } else { Regime::Infinity };
    check_window(regime, lo, hi, samples)?;
    let extremes = |n: usize| -> Result<(f64, f64)> {
        let s = sample(profile, lo, hi, n, cfg.exec)?;
        Ok(s.t.iter().zip(&s.lnf).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (t, v)| {
            let q = v / t;
            (a.min(q), b.max(q))
        }))
    };
    let mut n = samples;
    let mut current = extremes(n)?;
    while 2 * n <= cfg.max_samples.max(samples) {
        n *= 2;
        let next = extremes(n)?;
        let moved = (next.0 - current.0).abs().max((next.1 - current.1).abs());
        current = next;
        if moved < 1e-3 {
            break;
        }
    }
    Ok(current)
}

/// Long enough to average out bands of bounded log-width, short enough to fit inside the
/// bands of a scale ladder.
pub const MAX_DEFAULT_SEPARATION: f64 = 64.0;

fn separation(lo: Radius, hi: Radius, cfg: &ExponentConfig) -> f64 {
    cfg.min_separation
        .unwrap_or_else(|| ((hi.ln() - lo.ln()) / 4.0).clamp(2f64.ln(), MAX_DEFAULT_SEPARATION))
}

/// Index pairs `i < j` with `t_j - t_i ≥ sep`, subsampled deterministically to `max_pairs`.
fn pairs(s: &Samples, sep: f64, cfg: &ExponentConfig) -> Vec<(u32, u32)> {
    let n = s.t.len();
    let mut all = Vec::new();
    for i in 0..n {
        let first = s.t.partition_point(|&x| x < s.t[i] + sep).max(i + 1);
        for j in first..n {
            all.push((i as u32, j as u32));
        }
    }
    if all.len() <= cfg.max_pairs {
        return all;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut picked: Vec<usize> = sample_indices(&mut rng, all.len(), cfg.max_pairs).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|k| all[k]).collect()
}

fn pair_slope(s: &Samples, (i, j): (u32, u32)) -> f64 {
    let (i, j) = (i as usize, j as usize);
    (s.lnf[i] - s.lnf[j]) / (s.t[i] - s.t[j])
}

/// `(min, max)` of `ln(f(r)/f(R)) / ln(r/R)` over well-separated pairs: estimates of
/// `sup lQ` and `inf uQ`.
pub fn q_endpoints(profile: &MeasureProfile, lo: Radius, hi: Radius, samples: usize, cfg: &ExponentConfig) -> Result<(f64, f64)> {
    let regime = if hi.ln() < 0.0 { Regime::Zero } else { Regime::Infinity };
    check_window(regime, lo, hi, samples)?;
    let s = sample(profile, lo, hi, samples, cfg.exec)?;
    let list = pairs(&s, separation(lo, hi, cfg), cfg);
    if list.is_empty() {
        return Err(Error::Parameter("no sample pairs are separated enough; widen the window".into()));
    }
    let slopes = cfg.exec.map(&list, |&p| pair_slope(&s, p));
    Ok(slopes.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &q| (a.min(q), b.max(q))))
}

/// Extremes of `r f'(r)/f(r)` over the window. Each piece contributes its one-sided values at
/// the breakpoints as well as interior samples.
pub fn q_bracket_analytic(profile: &MeasureProfile, lo: Radius, hi: Radius, samples: usize) -> Result<Bracket> {
    let Some(w) = profile.weight() else {
        return Err(Error::Unsupported("the analytic bracket needs a density; this profile has none".into()));
    };
    let regime = if hi.ln() < 0.0 { Regime::Zero } else { Regime::Infinity };
    check_window(regime, lo, hi, samples)?;
    let (a, b) = (lo.ln(), hi.ln());
    let n1 = profile.n() as f64 - 1.0;
    let mut loq = f64::INFINITY;
    let mut uq = f64::NEG_INFINITY;
    let grid: Vec<f64> = Radius::geometric_grid(lo, hi, samples)?.iter().map(|r| r.ln()).collect();
    let first = w.piece_index(a);
    let last = w.piece_index(b);
    for piece in &w.pieces()[first..=last] {
        let p_lo = piece.lo.ln().max(a);
        let p_hi = piece.hi.ln().min(b);
        let mut ts = vec![p_lo, p_hi];
        ts.extend(grid.iter().copied().filter(|&t| t > p_lo && t < p_hi));
        for t in ts {
            let ratio = (profile.ln_omega() + piece.ln_value(t) + n1 * t + t - profile.ln_ball_measure(t)?).exp();
            loq = loq.min(ratio);
            uq = uq.max(ratio);
        }
    }
    Ok(Bracket { loq, uq })
}

/// Nearest rational with denominator ≤ 12 within `tol`, else `q` itself.
pub fn snap_rational(q: f64, tol: f64) -> f64 {
    let mut best = (f64::INFINITY, q);
    for d in 1..=12u32 {
        let num = (q * d as f64).round();
        let candidate = num / d as f64;
        let err = (candidate - q).abs();
        if err < best.0 - 1e-15 {
            best = (err, candidate);
        }
    }
    if best.0 <= tol {
        best.1
    } else {
        q
    }
}

/// Evidence for whether `q` belongs to `set`, sampled on `window`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AttainmentEvidence {
    pub attained: Attainment,
    pub slope: f64,
}

pub fn attainment(profile: &MeasureProfile, q: f64, set: SetId, window: (Radius, Radius), cfg: &ExponentConfig) -> Result<AttainmentEvidence> {
    if !(q > 0.0) {
        return Err(Error::Parameter(format!("exponent must be positive, got {q}")));
    }
    let (lo, hi) = window;
    check_window(set.regime(), lo, hi, cfg.samples)?;
    let s = sample_loglog(profile, lo, hi, cfg.samples, cfg.exec)?;
    attainment_on(&s, q, set, ATTAIN_SEPARATION, cfg)
}

fn attainment_on(s: &Samples, q: f64, set: SetId, sep: f64, cfg: &ExponentConfig) -> Result<AttainmentEvidence> {
    // Each point is (x, deviation); the endpoint is attained iff the deviation is bounded above.
    let mut points: Vec<(f64, f64)> = if set.is_q_set() {
        let sign = if set.is_lower() { 1.0 } else { -1.0 };
        let list = pairs(s, sep, cfg);
        cfg.exec.map(&list, |&(i, j)| {
            let (i, j) = (i as usize, j as usize);
            let x = s.t[j] - s.t[i];
            (x, sign * (s.lnf[i] - s.lnf[j] + q * x))
        })
    } else {
        // ln f - q ln r is bounded above for lS0 and uSinf, below for uS0 and lSinf.
        let sign = match set {
            SetId::LowerSZero | SetId::UpperSInf => 1.0,
            _ => -1.0,
        };
        s.t.iter().zip(&s.lnf).map(|(&t, &v)| (t.abs(), sign * (v - q * t))).collect()
    };
    if points.len() < 4 {
        return Err(Error::Parameter("too few samples to judge attainment".into()));
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let u = |x: f64| (1.0 + (1.0 + x).ln()).ln();
    let mut envelope = Vec::with_capacity(points.len());
    let mut running = f64::NEG_INFINITY;
    for &(x, d) in &points {
        running = running.max(d);
        envelope.push((u(x), running));
    }
    let u_mid = 0.5 * (envelope[0].0 + envelope[envelope.len() - 1].0);
    let (us, es): (Vec<f64>, Vec<f64>) = envelope.into_iter().filter(|p| p.0 >= u_mid).unzip();
    let slope = if us.len() >= 2 { ls_slope(&us, &es) } else { 0.0 };
    let attained = if slope <= cfg.attain_tol {
        Attainment::Yes
    } else if slope >= 3.0 * cfg.attain_tol {
        Attainment::No
    } else {
        Attainment::Inconclusive
    };
    Ok(AttainmentEvidence { attained, slope })
}

fn estimate(s: &Samples, set: SetId, endpoint: f64, window: (Radius, Radius), sep: f64, cfg: &ExponentConfig) -> Result<SetEstimate> {
    let tested_at = snap_rational(endpoint, cfg.snap_tol);
    let ev = if tested_at > 0.0 {
        attainment_on(s, tested_at, set, sep, cfg)?
    } else {
        AttainmentEvidence {
            attained: Attainment::Inconclusive,
            slope: f64::NAN,
        }
    };
    Ok(SetEstimate {
        set,
        endpoint,
        tested_at,
        attained: ev.attained,
        evidence_slope: ev.slope,
        r_range: window,
    })
}

fn regime_sets(profile: &MeasureProfile, regime: Regime, win: (Radius, Radius), attain: (Radius, Radius), cfg: &ExponentConfig) -> Result<Vec<SetEstimate>> {
    let (lo, hi) = win;
    check_window(regime, lo, hi, cfg.samples)?;
    check_window(regime, attain.0, attain.1, cfg.samples)?;
    let (s_min, s_max) = s_endpoints(profile, lo, hi, cfg.samples, cfg)?;
    let (q_min, q_max) = q_endpoints(profile, lo, hi, cfg.samples, cfg)?;
    let s = sample_loglog(profile, attain.0, attain.1, cfg.samples, cfg.exec)?;
    let sep = ATTAIN_SEPARATION;
    // At 0: lS0 = (0, liminf], uS0 = [limsup, ∞). At ∞ the inequalities flip, so
    // lSinf = (0, liminf] and uSinf = [limsup, ∞) as r → ∞ as well.
    let ids = match regime {
        Regime::Zero => [SetId::LowerQZero, SetId::LowerSZero, SetId::UpperSZero, SetId::UpperQZero],
        Regime::Infinity => [SetId::LowerQInf, SetId::LowerSInf, SetId::UpperSInf, SetId::UpperQInf],
    };
    let ends = [q_min, s_min, s_max, q_max];
    ids.iter().zip(ends).map(|(&id, e)| estimate(&s, id, e, win, sep, cfg)).collect()
}

/// All eight estimates (four when the profile has no large-radius window), brackets, and the
/// ordering check `lQ ≤ lS ≤ uS ≤ uQ`.
pub fn exponent_report(profile: &MeasureProfile, cfg: &ExponentConfig) -> Result<ExponentReport> {
    let mut sets = Vec::new();
    let mut bracket_zero = None;
    let mut bracket_infinity = None;
    for regime in [Regime::Zero, Regime::Infinity] {
        let (Some(win), Some(attain)) = (window(profile, regime, cfg), attainment_window(profile, regime, cfg)) else {
            continue;
        };
        sets.extend(regime_sets(profile, regime, win, attain, cfg)?);
        if let (true, Some(bw)) = (profile.has_density(), bracket_window(profile, regime, cfg)) {
            let b = q_bracket_analytic(profile, bw.0, bw.1, cfg.samples)?;
            match regime {
                Regime::Zero => bracket_zero = Some(b),
                Regime::Infinity => bracket_infinity = Some(b),
            }
        }
    }
    for chunk in sets.chunks(4) {
        for pair in chunk.windows(2) {
            if pair[0].endpoint > pair[1].endpoint + cfg.order_tol {
                return Err(Error::Ordering(format!(
                    "{} = {} exceeds {} = {}",
                    pair[0].set.name(),
                    pair[0].endpoint,
                    pair[1].set.name(),
                    pair[1].endpoint
                )));
            }
        }
    }
    Ok(ExponentReport {
        sets,
        bracket_zero,
        bracket_infinity,
        attainment_rule: ATTAINMENT_RULE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{constant, ex1, ex_s_touch, oscillating, power_log_at_infinity, power_log_at_zero};

    fn report(w: crate::weights::RadialWeight) -> ExponentReport {
        exponent_report(&MeasureProfile::from_weight(w).unwrap(), &ExponentConfig::default()).unwrap()
    }

    #[test]
    fn snapping() {
        assert_eq!(snap_rational(3.3334, 2e-3), 10.0 / 3.0);
        assert_eq!(snap_rational(2.0004, 2e-3), 2.0);
        let d = 2f64.ln() / 3f64.ln();
        assert_eq!(snap_rational(d, 2e-3), d);
    }

    #[test]
    fn plane_is_two_everywhere() {
        let rep = report(constant(2).unwrap());
        assert_eq!(rep.sets.len(), 8);
        for s in &rep.sets {
            assert!((s.endpoint - 2.0).abs() < 1e-9, "{s:?}");
            assert_eq!(s.attained, Attainment::Yes, "{s:?}");
        }
        let b = rep.bracket_zero.unwrap();
        assert!((b.loq - 2.0).abs() < 1e-9 && (b.uq - 2.0).abs() < 1e-9, "{b:?}");
    }

    #[test]
    fn ex1_four_endpoints() {
        let rep = report(ex1(None).unwrap());
        let e = |id| rep.endpoint(id).unwrap();
        assert!((e(SetId::LowerQZero) - 2.0).abs() < 0.05);
        assert!((e(SetId::LowerSZero) - 3.0).abs() < 0.05);
        assert!((e(SetId::UpperSZero) - 10.0 / 3.0).abs() < 0.05);
        assert!((e(SetId::UpperQZero) - 4.0).abs() < 0.05);
    }

    #[test]
    fn s_touch_attainment() {
        let rep = report(ex_s_touch(None).unwrap());
        let l = rep.get(SetId::LowerSZero).unwrap();
        let u = rep.get(SetId::UpperSZero).unwrap();
        assert!((l.endpoint - 3.0).abs() < 0.05 && (u.endpoint - 3.0).abs() < 0.05, "{l:?} {u:?}");
        assert_eq!(l.attained, Attainment::Yes, "{l:?}");
        assert_eq!(u.attained, Attainment::No, "{u:?}");
    }

    #[test]
    fn log_weight_attainment_follows_sign_of_beta() {
        let p = 2.5;
        let neg = report(power_log_at_zero(3, p, -1.0).unwrap());
        let s = neg.get(SetId::LowerSZero).unwrap();
        assert!((s.endpoint - p).abs() < 1e-6);
        assert_eq!(s.attained, Attainment::Yes, "{s:?}");
        let pos = report(power_log_at_zero(3, p, 1.0).unwrap());
        assert_eq!(pos.get(SetId::LowerSZero).unwrap().attained, Attainment::No);
        let inf = report(power_log_at_infinity(3, p, 1.0).unwrap());
        let s = inf.get(SetId::LowerQInf).unwrap();
        assert!((s.endpoint - p).abs() < 1e-6);
        assert_eq!(s.attained, Attainment::Yes, "{s:?}");
    }

    #[test]
    fn oscillating_bracket_is_wider_than_q_endpoints() {
        let rep = report(oscillating(2, None).unwrap());
        let b = rep.bracket_zero.unwrap();
        assert!((b.loq - 1.0).abs() < 1e-9 && (b.uq - 3.0).abs() < 1e-9, "{b:?}");
        assert!((rep.endpoint(SetId::LowerQZero).unwrap() - 2.0).abs() < 0.05);
        assert!((rep.endpoint(SetId::UpperQZero).unwrap() - 2.0).abs() < 0.05);
    }

    #[test]
    fn cantor_dimension_and_missing_density() {
        let p = MeasureProfile::cantor(40).unwrap();
        let cfg = ExponentConfig::default();
        let (lo, hi) = window(&p, Regime::Zero, &cfg).unwrap();
        let (a, b) = s_endpoints(&p, lo, hi, 256, &cfg).unwrap();
        let d = 2f64.ln() / 3f64.ln();
        assert!((a - d).abs() < 0.02 && (b - d).abs() < 0.02, "{a} {b}");
        assert!(matches!(q_bracket_analytic(&p, lo, hi, 64), Err(Error::Unsupported(_))));
        assert!(s_endpoints(&p, lo, hi, 4, &cfg).is_err());
    }
}
