//! The subcommands. Each returns the bytes it would emit so that callers and tests can
//! inspect output without touching the filesystem.

use std::path::{Path, PathBuf};

use serde::Serialize;

use radcap::bounds::{applicable_bounds, check_bound, BoundCheckReport, BoundGrid, BoundId, CheckOptions, RadiiRegime};
use radcap::capacity::{annulus_capacity, whole_space_capacity, CapacityResult, EXPONENT_MARGIN};
use radcap::exponents::{exponent_report, ExponentConfig, ExponentReport};
use radcap::measure::MeasureProfile;
use radcap::Radius;

use radcap::weights::Bound;

use crate::config::{GridSpec, RunConfig};
use crate::error::CliError;
use crate::output::{csv_bytes, json_bytes, sci, sci_radius};

fn exponent_config(cfg: &RunConfig) -> ExponentConfig {
    ExponentConfig {
        seed: cfg.seed.unwrap_or(0),
        ..ExponentConfig::default()
    }
}

/// Used by `measure` when neither a grid nor a ladder is given and the profile has no marks.
const DEFAULT_MEASURE_GRID: GridSpec = GridSpec {
    lo: Bound::Value(1e-6),
    hi: Bound::Value(1e6),
    points: 121,
};

fn ladder_radii(profile: &MeasureProfile, max_index: i64) -> Result<Vec<Radius>, CliError> {
    let mut radii: Vec<Radius> = profile.scales().marks.iter().filter(|m| m.index <= max_index).map(|m| m.radius).collect();
    if radii.is_empty() {
        return Err(CliError::Config(format!("profile {} has no ladder marks", profile.label())));
    }
    radii.sort();
    radii.dedup();
    Ok(radii)
}

/// CSV of `(r, f, fprime)` on a geometric grid or at ladder marks.
pub fn measure(cfg: &RunConfig) -> Result<Vec<u8>, CliError> {
    let profile = cfg.profile()?;
    let radii = match (&cfg.grid, cfg.grid_ladder) {
        (Some(grid), None) => grid.radii()?,
        (None, Some(k)) => ladder_radii(&profile, k)?,
        (None, None) if !profile.scales().marks.is_empty() => ladder_radii(&profile, i64::MAX)?,
        (None, None) => DEFAULT_MEASURE_GRID.radii()?,
        (Some(_), Some(_)) => return Err(CliError::Config("--grid and --grid-ladder are exclusive".into())),
    };
    let samples = profile.sample_many(&radii, Default::default())?;
    let rows: Vec<Vec<String>> = samples
        .iter()
        .map(|s| vec![sci_radius(s.r), sci(s.f), s.fprime.map(sci).unwrap_or_default()])
        .collect();
    csv_bytes(&["r", "f", "fprime"], &rows)
}

#[derive(Serialize)]
struct ExponentsOutput<'a> {
    weight: String,
    config: &'a ExponentConfig,
    report: ExponentReport,
}

pub fn exponents(cfg: &RunConfig) -> Result<Vec<u8>, CliError> {
    let profile = cfg.profile()?;
    let ecfg = exponent_config(cfg);
    let report = exponent_report(&profile, &ecfg)?;
    json_bytes(&ExponentsOutput {
        weight: profile.label(),
        config: &ecfg,
        report,
    })
}

fn capacity_row(r: Radius, big_r: Radius, c: &CapacityResult) -> Vec<String> {
    vec![sci_radius(r), sci_radius(big_r), sci(c.value), c.method.as_str().to_string(), format!("{:e}", c.error_bound)]
}

/// CSV of `(r, R, capacity, method, error_bound)`; `R = inf` gives the whole-space capacity.
pub fn capacity(cfg: &RunConfig) -> Result<Vec<u8>, CliError> {
    let profile = cfg.profile()?;
    let p = cfg.require_p()?;
    let mut rows = Vec::new();
    if let Some(grid) = &cfg.grid {
        let radii = grid.radii()?;
        let pairs: Vec<(Radius, Radius)> = radii.iter().enumerate().flat_map(|(i, &r)| radii[i + 1..].iter().map(move |&big_r| (r, big_r))).collect();
        for row in radcap::capacity::capacity_grid(&profile, p, &pairs, Default::default())? {
            rows.push(capacity_row(row.r, row.big_r, &row.result));
        }
    } else {
        let r = cfg.r.ok_or_else(|| CliError::Config("capacity needs --r and --R, or --grid".into()))?;
        let big_r = cfg.big_r.ok_or_else(|| CliError::Config("capacity needs --R".into()))?;
        let r = Radius::from_ln(r.ln()?);
        let big_r = Radius::from_ln(big_r.ln()?);
        let result = if big_r.is_infinite() {
            whole_space_capacity(&profile, p, r)?
        } else {
            annulus_capacity(&profile, p, r, big_r)?
        };
        rows.push(capacity_row(r, big_r, &result));
    }
    csv_bytes(&["r", "R", "capacity", "method", "error_bound"], &rows)
}

/// Result of `check`: JSON summaries plus one CSV of grid rows per bound.
pub struct CheckOutput {
    pub reports: Vec<BoundCheckReport>,
    pub json: Vec<u8>,
}

impl CheckOutput {
    pub fn csv(report: &BoundCheckReport) -> Result<Vec<u8>, CliError> {
        let rows: Vec<Vec<String>> = report
            .rows
            .iter()
            .map(|row| vec![sci_radius(row.r), sci_radius(row.big_r), sci(row.capacity), sci(row.bound), sci(row.ratio)])
            .collect();
        csv_bytes(&["r", "R", "capacity", "bound", "ratio"], &rows)
    }

    /// Per-bound CSV paths next to the JSON file: `<stem>.<BOUND-ID>.csv`.
    pub fn csv_path(json_path: &Path, id: BoundId) -> PathBuf {
        let stem = json_path.file_stem().and_then(|s| s.to_str()).unwrap_or("check");
        json_path.with_file_name(format!("{stem}.{}.csv", id.token()))
    }
}

pub fn check(cfg: &RunConfig) -> Result<CheckOutput, CliError> {
    let profile = cfg.profile()?;
    let p = cfg.require_p()?;
    let report = exponent_report(&profile, &exponent_config(cfg))?;
    let regime = cfg.regime.unwrap_or(RadiiRegime::Small);
    let audit = cfg.audit.unwrap_or(false);
    let opts = CheckOptions {
        audit,
        tolerance: cfg.factor.unwrap_or(CheckOptions::default().tolerance),
        margin: cfg.margin.unwrap_or(EXPONENT_MARGIN),
        ..CheckOptions::default()
    };
    let ids: Vec<(BoundId, Option<f64>)> = match &cfg.bounds {
        Some(list) => list.iter().map(|t| BoundId::from_token(t).map(|id| (id, None))).collect::<Result<_, _>>()?,
        None if audit => BoundId::ALL.iter().map(|&id| (id, None)).collect(),
        None => applicable_bounds(&report, p, None, regime, opts.margin).into_iter().map(|a| (a.id, a.q)).collect(),
    };
    let grid = BoundGrid::for_profile(&profile, regime);
    let mut reports = Vec::new();
    for (id, q) in ids {
        match check_bound(id, &profile, &report, p, q, &grid, &opts) {
            Ok(r) => reports.push(r),
            // In audit mode a bound that cannot be evaluated at all (e.g. missing q) is skipped.
            Err(radcap::Error::Parameter(_)) if audit && cfg.bounds.is_none() => {}
            Err(e) => return Err(e.into()),
        }
    }
    let json = json_bytes(&reports)?;
    Ok(CheckOutput { reports, json })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ProfileSpec;
    use radcap::bounds::Verdict;
    use radcap::weights::WeightSpec;

    fn cfg(weight: WeightSpec) -> RunConfig {
        RunConfig {
            weight: Some(ProfileSpec::Weight(weight)),
            ..RunConfig::default()
        }
    }

    #[test]
    fn measure_constant_plane() {
        let mut c = cfg(WeightSpec::Constant { n: 2 });
        c.grid = Some(GridSpec::parse("1e-3:1:50").unwrap());
        let text = String::from_utf8(measure(&c).unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 51);
        let f: f64 = lines[50].split(',').nth(1).unwrap().parse().unwrap();
        assert!((f - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn measure_ladder_rows() {
        let mut c = cfg(WeightSpec::Ex1 { depth: None });
        c.grid_ladder = Some(6);
        let text = String::from_utf8(measure(&c).unwrap()).unwrap();
        // alpha_0..alpha_6 and beta_0..beta_6.
        assert_eq!(text.lines().count(), 1 + 14);
    }

    #[test]
    fn measure_cantor() {
        let c = RunConfig {
            weight: Some(ProfileSpec::Cantor { depth: Some(10) }),
            ..RunConfig::default()
        };
        let text = String::from_utf8(measure(&c).unwrap()).unwrap();
        // Rows at 3^-10 .. 3^0; the second to last is r = 1/3.
        assert_eq!(text.lines().count(), 1 + 11);
        let f: f64 = text.lines().nth(10).unwrap().split(',').nth(1).unwrap().parse().unwrap();
        assert!((f - 0.5).abs() < 1e-12);
    }

    #[test]
    fn capacity_of_plane_annulus() {
        let mut c = cfg(WeightSpec::Constant { n: 2 });
        c.p = Some(2.0);
        c.r = Some(Bound::Value(1.0));
        c.big_r = Some(Bound::Value(std::f64::consts::E));
        let text = String::from_utf8(capacity(&c).unwrap()).unwrap();
        let v: f64 = text.lines().nth(1).unwrap().split(',').nth(2).unwrap().parse().unwrap();
        assert!((v - 2.0 * std::f64::consts::PI).abs() < 1e-6);
        c.big_r = Some(Bound::Infinity);
        let text = String::from_utf8(capacity(&c).unwrap()).unwrap();
        assert_eq!(text.lines().nth(1).unwrap().split(',').nth(2).unwrap(), "0");
    }

    #[test]
    fn check_space_bounds() {
        let mut c = cfg(WeightSpec::Constant { n: 3 });
        c.p = Some(2.0);
        let out = check(&c).unwrap();
        for id in [BoundId::UbMin, BoundId::LbIntLq] {
            let r = out.reports.iter().find(|r| r.bound_id == id).expect("bound checked");
            assert_eq!(r.verdict, Verdict::Consistent);
        }
    }

    #[test]
    fn check_is_deterministic() {
        let mut c = cfg(WeightSpec::PowerLogZero { n: 2, p: 2.0, beta: -1.0 });
        c.p = Some(2.0);
        assert_eq!(check(&c).unwrap().json, check(&c).unwrap().json);
    }
}
