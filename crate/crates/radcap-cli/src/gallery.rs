//! Worked examples with expected-value manifests. Each item recomputes its quantities from
//! scratch and records observed value, expectation and tolerance for every check.

use std::f64::consts::LN_2;
use std::path::Path;

use serde::Serialize;

use radcap::bounds::{check_bound, composite_log_form, evaluate, sharpness_scan, BoundGrid, BoundId, CheckOptions, RadiiRegime, Verdict};
use radcap::capacity::{annulus_capacity, parabolicity, Parabolicity};
use radcap::exponents::{exponent_report, q_bracket_analytic, s_endpoints, window, Attainment, ExponentConfig, ExponentReport, Regime, SetId};
use radcap::measure::MeasureProfile;
use radcap::weights::{abcd, ex1, ex_s_touch, oscillating, power_log_at_infinity, power_log_at_zero, Abcd, RadialWeight};
use radcap::{LogScalar, Radius};

use crate::error::CliError;
use crate::output::json_bytes;

pub const ITEMS: [&str; 9] = ["ex1", "ex-s-touch", "abcd", "log-zero-a", "log-zero-b", "log-zero-c", "log-large", "q-not-end-points", "cantor"];

/// Allowed spread (max/min) of capacity over a reference form on the log-weight grids.
pub const LOG_LAW_FACTOR: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ItemReport {
    pub item: String,
    pub weight: String,
    pub pass: bool,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn near(&mut self, name: &str, observed: f64, expected: f64, tol: f64) {
        self.0.push(Check {
            name: name.into(),
            expected: format!("{expected} ± {tol}"),
            observed: format!("{observed}"),
            pass: (observed - expected).abs() <= tol,
        });
    }

    fn is(&mut self, name: &str, expected: impl std::fmt::Debug, observed: impl std::fmt::Debug) {
        let (e, o) = (format!("{expected:?}"), format!("{observed:?}"));
        self.0.push(Check {
            name: name.into(),
            pass: e == o,
            expected: e,
            observed: o,
        });
    }

    fn at_most(&mut self, name: &str, observed: f64, limit: f64) {
        self.0.push(Check {
            name: name.into(),
            expected: format!("≤ {limit}"),
            observed: format!("{observed}"),
            pass: observed <= limit,
        });
    }

    fn fact(&mut self, name: &str, expected: &str, observed: String, pass: bool) {
        self.0.push(Check {
            name: name.into(),
            expected: expected.into(),
            observed,
            pass,
        });
    }
}

fn profile(w: RadialWeight) -> Result<MeasureProfile, CliError> {
    Ok(MeasureProfile::from_weight(w)?)
}

fn report(p: &MeasureProfile, seed: u64) -> Result<ExponentReport, CliError> {
    Ok(exponent_report(p, &ExponentConfig { seed, ..ExponentConfig::default() })?)
}

/// Exponent-set ordering is enforced by `exponent_report`; this records the bracketing
/// `loq ≤ lQ` and `uQ ≤ uq` for each regime with a bracket.
fn bracketing(c: &mut Checks, rep: &ExponentReport, tol: f64) {
    for (br, lo, hi, label) in [
        (rep.bracket_zero, SetId::LowerQZero, SetId::UpperQZero, "0"),
        (rep.bracket_infinity, SetId::LowerQInf, SetId::UpperQInf, "inf"),
    ] {
        let (Some(br), Some(l), Some(u)) = (br, rep.endpoint(lo), rep.endpoint(hi)) else { continue };
        c.fact(
            &format!("bracket contains Q endpoints at {label}"),
            &format!("loq ≤ lQ + {tol}, uQ ≤ uq + {tol}"),
            format!("loq {:.4}, lQ {l:.4}, uQ {u:.4}, uq {:.4}", br.loq, br.uq),
            br.loq <= l + tol && u <= br.uq + tol,
        );
    }
}

fn endpoints(c: &mut Checks, rep: &ExponentReport, expected: &[(SetId, f64)], tol: f64) {
    for &(set, want) in expected {
        match rep.endpoint(set) {
            Some(got) => c.near(&format!("{} endpoint", set.name()), got, want, tol),
            None => c.fact(&format!("{} endpoint", set.name()), &format!("{want}"), "not estimated".into(), false),
        }
    }
}

fn attained(c: &mut Checks, rep: &ExponentReport, set: SetId, want: Attainment) {
    match rep.get(set) {
        Some(s) => c.is(&format!("{} attained", set.name()), want, s.attained),
        None => c.fact(&format!("{} attained", set.name()), &format!("{want:?}"), "not estimated".into(), false),
    }
}

/// `(r, R)` with `r ∈ [1e-12, 1e-3]`, `R/r ∈ [2, 1e6]`, restricted to `R < 1/e` where the
/// log-weight laws are stated.
pub fn log_law_pairs() -> Vec<(Radius, Radius)> {
    let (lo, hi) = (1e-12f64.ln(), 1e-3f64.ln());
    let (rlo, rhi) = (2f64.ln(), 1e6f64.ln());
    let mut out = Vec::new();
    for i in 0..20 {
        let t = lo + (hi - lo) * i as f64 / 19.0;
        for j in 0..20 {
            let big = t + rlo + (rhi - rlo) * j as f64 / 19.0;
            if big < -1.0 {
                out.push((Radius::from_ln(t), Radius::from_ln(big)));
            }
        }
    }
    out
}

/// Max/min of capacity over `form` on `pairs`.
pub fn law_spread(p: &MeasureProfile, power: f64, pairs: &[(Radius, Radius)], form: impl Fn(Radius, Radius) -> radcap::Result<LogScalar>) -> Result<f64, CliError> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &(r, big_r) in pairs {
        let ratio = annulus_capacity(p, power, r, big_r)?.value.log_mag() - form(r, big_r)?.log_mag();
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    Ok((hi - lo).exp())
}

fn consistent(c: &mut Checks, prof: &MeasureProfile, rep: &ExponentReport, id: BoundId, p: f64, audit: bool) {
    let grid = BoundGrid::for_profile(prof, RadiiRegime::Small);
    let opts = CheckOptions {
        audit,
        ..CheckOptions::default()
    };
    let name = format!("{} consistent{}", id.token(), if audit { " (audit)" } else { "" });
    match check_bound(id, prof, rep, p, None, &grid, &opts) {
        Ok(r) => c.fact(
            &name,
            "consistent",
            format!("{:?}, fitted constant {}", r.verdict, r.fitted_constant.to_sci_string(3)),
            r.verdict == Verdict::Consistent,
        ),
        Err(e) => c.fact(&name, "consistent", e.to_string(), false),
    }
}

fn alpha(k: i32) -> Radius {
    Radius::from_ln(-(2f64.powi(k)) * LN_2)
}

fn item_ex1(c: &mut Checks, seed: u64) -> Result<String, CliError> {
    let prof = profile(ex1(None)?)?;
    let rep = report(&prof, seed)?;
    endpoints(c, &rep, &[(SetId::LowerQZero, 2.0), (SetId::LowerSZero, 3.0), (SetId::UpperSZero, 10.0 / 3.0), (SetId::UpperQZero, 4.0)], 0.05);
    for set in [SetId::LowerQZero, SetId::LowerSZero, SetId::UpperSZero, SetId::UpperQZero] {
        attained(c, &rep, set, Attainment::Yes);
    }
    bracketing(c, &rep, 0.05);
    let ks = 2..=6;
    let xs: Vec<f64> = ks.clone().map(|k| alpha(k).ln()).collect();
    let inner: Vec<(Radius, Radius)> = ks.clone().map(|k| (alpha(k + 1), alpha(k).pow(1.5))).collect();
    let scan = sharpness_scan(&prof, 3.0, BoundId::LbIntLq, None, &inner, Some(&xs))?;
    c.near("slope of cap/(μ(B_r)/r^3) along (α_{k+1}, β_k)", scan.slope_vs_abscissa.unwrap_or(f64::NAN), 0.5, 0.05);
    let outer: Vec<(Radius, Radius)> = ks.map(|k| (alpha(k).pow(1.5), alpha(k))).collect();
    let scan = sharpness_scan(&prof, 3.0, BoundId::LbIntUq, None, &outer, Some(&xs))?;
    c.near("slope of cap/(μ(B_R)/R^3) along (β_k, α_k)", scan.slope_vs_abscissa.unwrap_or(f64::NAN), 0.5, 0.05);
    let audit = CheckOptions {
        audit: true,
        ..CheckOptions::default()
    };
    let out = check_bound(BoundId::LbIntLq, &prof, &rep, 3.0, None, &BoundGrid::for_profile(&prof, RadiiRegime::Small), &audit)?;
    c.fact("LB-INT-lQ fails at p = 3 (audit)", "violated", format!("{:?}", out.verdict), matches!(out.verdict, Verdict::Violated { .. }));
    Ok(prof.label())
}

fn item_s_touch(c: &mut Checks, seed: u64) -> Result<String, CliError> {
    let prof = profile(ex_s_touch(None)?)?;
    let rep = report(&prof, seed)?;
    endpoints(c, &rep, &[(SetId::LowerSZero, 3.0), (SetId::UpperSZero, 3.0)], 0.05);
    attained(c, &rep, SetId::LowerSZero, Attainment::Yes);
    attained(c, &rep, SetId::UpperSZero, Attainment::No);
    if let Some(br) = rep.bracket_zero {
        c.near("bracket lower end", br.loq, 2.0, 0.05);
        c.near("bracket upper end", br.uq, 4.0, 0.05);
    }
    bracketing(c, &rep, 0.05);
    Ok(prof.label())
}

fn item_abcd(c: &mut Checks, seed: u64) -> Result<String, CliError> {
    let prof = profile(abcd(2, Abcd { a: 1.5, b: 2.0, c: 2.5, d: 3.0 }, None)?)?;
    let rep = report(&prof, seed)?;
    endpoints(c, &rep, &[(SetId::LowerQZero, 1.5), (SetId::LowerSZero, 2.0), (SetId::UpperSZero, 2.5), (SetId::UpperQZero, 3.0)], 0.05);
    bracketing(c, &rep, 0.05);
    Ok(prof.label())
}

fn item_log_zero_a(c: &mut Checks, seed: u64) -> Result<String, CliError> {
    let p = 2.0;
    let prof = profile(power_log_at_zero(2, p, -1.0)?)?;
    let rep = report(&prof, seed)?;
    endpoints(c, &rep, &[(SetId::LowerQZero, p), (SetId::UpperQZero, p)], 0.05);
    attained(c, &rep, SetId::LowerQZero, Attainment::Yes);
    bracketing(c, &rep, 0.05);
    consistent(c, &prof, &rep, BoundId::LbBorderLq, p, false);
    consistent(c, &prof, &rep, BoundId::UbLogLq, p, false);
    // p is not in uQ0 here, so this upper bound is only reachable in audit mode.
    consistent(c, &prof, &rep, BoundId::UbLogUq, p, true);
    let spread = law_spread(&prof, p, &log_law_pairs(), |r, big_r| evaluate(BoundId::LbBorderLq, &prof, p, None, r, big_r))?;
    c.at_most("cap / (μ(B_r)/r^p · log(R/r)^(1-p)) spread", spread, LOG_LAW_FACTOR);
    Ok(prof.label())
}

fn item_log_zero_b(c: &mut Checks, seed: u64) -> Result<String, CliError> {
    let p = 3.0;
    let prof = profile(power_log_at_zero(2, p, 0.5)?)?;
    let rep = report(&prof, seed)?;
    endpoints(c, &rep, &[(SetId::LowerQZero, p), (SetId::UpperQZero, p)], 0.05);
    attained(c, &rep, SetId::UpperQZero, Attainment::Yes);
    attained(c, &rep, SetId::LowerQZero, Attainment::No);
    bracketing(c, &rep, 0.05);
    consistent(c, &prof, &rep, BoundId::UbLogUq, p, false);
    let spread = law_spread(&prof, p, &log_law_pairs(), |r, big_r| evaluate(BoundId::UbLogUq, &prof, p, None, r, big_r))?;
    c.at_most("cap / (μ(B_r)/r^p · log(R/r)^(1-p)) spread", spread, LOG_LAW_FACTOR);
    Ok(prof.label())
}

fn item_log_zero_c(c: &mut Checks, seed: u64) -> Result<String, CliError> {
    let (p, beta) = (2.0, 3.0);
    let prof = profile(power_log_at_zero(2, p, beta)?)?;
    let rep = report(&prof, seed)?;
    endpoints(c, &rep, &[(SetId::LowerQZero, p), (SetId::UpperQZero, p)], 0.05);
    attained(c, &rep, SetId::UpperQZero, Attainment::Yes);
    bracketing(c, &rep, 0.05);
    let spread = law_spread(&prof, p, &log_law_pairs(), |r, big_r| composite_log_form(&prof, p, beta, r, big_r))?;
    c.at_most("cap / composite two-sided form spread", spread, LOG_LAW_FACTOR);
    Ok(prof.label())
}

fn item_log_large(c: &mut Checks, seed: u64) -> Result<String, CliError> {
    let p = 2.0;
    let mut labels = Vec::new();
    for (beta, hyperbolic) in [(2.0, true), (0.5, false)] {
        let prof = profile(power_log_at_infinity(3, p, beta)?)?;
        let rep = report(&prof, seed)?;
        endpoints(c, &rep, &[(SetId::LowerSInf, p), (SetId::UpperSInf, p), (SetId::LowerQInf, p), (SetId::UpperQInf, p)], 0.05);
        bracketing(c, &rep, 0.05);
        let got = parabolicity(&prof, p, &rep)?;
        let ok = if hyperbolic { matches!(got, Parabolicity::Hyperbolic { .. }) } else { matches!(got, Parabolicity::Parabolic { .. }) };
        c.fact(&format!("beta = {beta}"), if hyperbolic { "hyperbolic" } else { "parabolic" }, format!("{got:?}"), ok);
        labels.push(prof.label());
    }
    Ok(labels.join(" / "))
}

fn item_oscillating(c: &mut Checks, seed: u64) -> Result<String, CliError> {
    let prof = profile(oscillating(2, None)?)?;
    let rep = report(&prof, seed)?;
    match rep.bracket_zero {
        Some(br) => {
            c.near("analytic bracket lower end", br.loq, 1.0, 1e-9);
            c.near("analytic bracket upper end", br.uq, 3.0, 1e-9);
        }
        None => c.fact("analytic bracket", "(1, 3)", "missing".into(), false),
    }
    endpoints(c, &rep, &[(SetId::LowerQZero, 2.0), (SetId::UpperQZero, 2.0)], 0.05);
    bracketing(c, &rep, 0.05);
    Ok(prof.label())
}

fn item_cantor(c: &mut Checks, seed: u64) -> Result<String, CliError> {
    let prof = MeasureProfile::cantor(radcap::measure::CANTOR_DEFAULT_DEPTH)?;
    let cfg = ExponentConfig { seed, ..ExponentConfig::default() };
    let (lo, hi) = window(&prof, Regime::Zero, &cfg).ok_or_else(|| CliError::Config("cantor profile has no window".into()))?;
    let (l, u) = s_endpoints(&prof, lo, hi, cfg.samples, &cfg)?;
    let dim = 2f64.ln() / 3f64.ln();
    c.near("lS0 endpoint", l, dim, 0.05);
    c.near("uS0 endpoint", u, dim, 0.05);
    let bracket = q_bracket_analytic(&prof, lo, hi, cfg.samples);
    c.fact(
        "density bracket",
        "unsupported (no density)",
        format!("{bracket:?}"),
        matches!(bracket, Err(radcap::Error::Unsupported(_))),
    );
    Ok(prof.label())
}

pub fn run_item(name: &str, seed: u64) -> Result<ItemReport, CliError> {
    let mut c = Checks::default();
    let result = match name {
        "ex1" => item_ex1(&mut c, seed),
        "ex-s-touch" => item_s_touch(&mut c, seed),
        "abcd" => item_abcd(&mut c, seed),
        "log-zero-a" => item_log_zero_a(&mut c, seed),
        "log-zero-b" => item_log_zero_b(&mut c, seed),
        "log-zero-c" => item_log_zero_c(&mut c, seed),
        "log-large" => item_log_large(&mut c, seed),
        "q-not-end-points" => item_oscillating(&mut c, seed),
        "cantor" => item_cantor(&mut c, seed),
        other => return Err(CliError::Config(format!("unknown gallery item {other:?}"))),
    };
    let (weight, error) = match result {
        Ok(label) => (label, None),
        Err(e) => (String::new(), Some(e.to_string())),
    };
    let pass = error.is_none() && c.0.iter().all(|k| k.pass);
    Ok(ItemReport {
        item: name.to_string(),
        weight,
        pass,
        checks: c.0,
        error,
    })
}

/// Runs every item, writing `<item>.json` manifests and `summary.json` into `out_dir`.
pub fn run_gallery(out_dir: Option<&Path>, seed: u64) -> Result<Vec<ItemReport>, CliError> {
    let mut reports = Vec::new();
    for name in ITEMS {
        let rep = run_item(name, seed)?;
        if let Some(dir) = out_dir {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(format!("{name}.json")), json_bytes(&rep)?)?;
        }
        reports.push(rep);
    }
    if let Some(dir) = out_dir {
        let summary: Vec<serde_json::Value> = reports.iter().map(|r| serde_json::json!({ "item": r.item, "pass": r.pass })).collect();
        std::fs::write(dir.join("summary.json"), json_bytes(&summary)?)?;
    }
    Ok(reports)
}
