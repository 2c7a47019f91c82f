//! Variational p-capacity of concentric annuli for radial weights,
//! `cap(B_r, B_R) = (∫_r^R (f')^{1/(1-p)} dρ)^{1-p}`, and the classifications built on it.
//!
//! Improper integrals are decided by closed-form tails only: convergence must be exact.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::exponents::{ExponentReport, SetId};
use crate::measure::MeasureProfile;
use crate::numerics::{integrate_plain, LogScalar, Method, PowerLogTerm, QuadratureSpec, Tail};
use crate::radius::Radius;
use crate::weights::{PieceForm, RadialWeight, WeightPiece};

/// Distance from a set endpoint within which membership is decided by attainment alone.
pub const EXPONENT_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityResult {
    /// `PosInf` exactly when `integral_value` is zero.
    pub value: LogScalar,
    /// `∫ (f')^{1/(1-p)} dρ`.
    pub integral_value: LogScalar,
    pub method: Method,
    pub error_bound: f64,
}

impl CapacityResult {
    fn from_integral(integral: LogScalar, method: Method, rel_error: f64, p: f64) -> Result<CapacityResult> {
        let value = if integral.is_infinite() {
            LogScalar::ZERO
        } else {
            integral.log_pow(1.0 - p)?
        };
        Ok(CapacityResult {
            value,
            integral_value: integral,
            method,
            error_bound: rel_error * (p - 1.0),
        })
    }
}

fn check_p(p: f64) -> Result<()> {
    if p.is_nan() || p <= 1.0 {
        return Err(Error::Unsupported(format!(
            "exact capacity needs p > 1, got {p}"
        )));
    }
    if !p.is_finite() {
        return Err(Error::Parameter("p must be finite".into()));
    }
    Ok(())
}

fn weight_of(profile: &MeasureProfile) -> Result<&RadialWeight> {
    profile
        .weight()
        .ok_or_else(|| Error::Unsupported("capacity needs a weight-derived profile".into()))
}

struct Accumulator {
    total: LogScalar,
    method: Option<Method>,
    rel_error: f64,
}

impl Accumulator {
    fn new() -> Self {
        Accumulator {
            total: LogScalar::ZERO,
            method: None,
            rel_error: 0.0,
        }
    }

    fn add(&mut self, value: LogScalar, method: Method, rel_error: f64) {
        self.rel_error = self.rel_error.max(rel_error);
        self.total = self.total + value;
        self.method = Some(self.method.map_or(method, |m| m.combine(method)));
    }

    fn method(&self) -> Method {
        self.method.unwrap_or(Method::ClosedForm)
    }
}

/// Above this log-radius `ln(shift + ρ) = ln ρ` to double precision.
const SHIFTED_EXACT_FROM: f64 = 40.0;

/// `∫_{t1}^{t2}` of the capacity integrand of one piece, `t1 < t2` inside the piece.
fn piece_integral(piece: &WeightPiece, n: u32, ln_omega: f64, p: f64, t1: f64, t2: f64, tail: Tail, spec: &QuadratureSpec, acc: &mut Accumulator) -> Result<()> {
    match piece.form {
        PieceForm::PowerLog { .. } => {
            let term = piece.capacity_term(n, ln_omega, p).expect("power-log piece");
            let part = term.integrate(t1, t2, tail, spec)?;
            acc.add(part.value, part.method, part.rel_error);
        }
        PieceForm::ShiftedLog { .. } => {
            if t1.is_infinite() || t2.is_infinite() {
                return Err(Error::Unsupported("shifted-log pieces have no closed-form tail".into()));
            }
            let s = 1.0 / (1.0 - p);
            let nf = n as f64;
            let split = t2.min(SHIFTED_EXACT_FROM.max(t1));
            if t1 < split {
                let part = integrate_plain(
                    |t| LogScalar::from_ln(s * (ln_omega + piece.ln_value(t) + (nf - 1.0) * t) + t),
                    t1,
                    split,
                    spec,
                    &[],
                )?;
                acc.add(part.value, Method::Quadrature, part.rel_error);
            }
            if split < t2 {
                let term = PowerLogTerm {
                    log_coeff: s * (ln_omega + piece.coeff.ln()),
                    a: s * (nf - 1.0) + 1.0,
                    delta: s,
                };
                let part = term.integrate(split, t2, tail, spec)?;
                acc.add(part.value, part.method, part.rel_error);
            }
        }
    }
    Ok(())
}

fn range_integral(w: &RadialWeight, ln_omega: f64, p: f64, a: f64, b: f64, tail: Tail, spec: &QuadratureSpec) -> Result<Accumulator> {
    let mut acc = Accumulator::new();
    let first = if a == f64::NEG_INFINITY { 0 } else { w.piece_index(a) };
    for piece in &w.pieces()[first..] {
        let lo = piece.lo.ln().max(a);
        let hi = piece.hi.ln().min(b);
        if lo >= b {
            break;
        }
        if lo < hi {
            piece_integral(piece, w.n(), ln_omega, p, lo, hi, tail, spec, &mut acc)?;
        }
    }
    Ok(acc)
}

/// `cap(B_r, B_R)` for finite `R`.
pub fn annulus_capacity(profile: &MeasureProfile, p: f64, r: Radius, big_r: Radius) -> Result<CapacityResult> {
    check_p(p)?;
    let w = weight_of(profile)?;
    if !(r < big_r) || r.ln() == f64::NEG_INFINITY {
        return Err(Error::Parameter(format!("annulus needs 0 < r < R, got r = {r}, R = {big_r}")));
    }
    if big_r.is_infinite() {
        return Err(Error::Parameter("R = ∞ is handled by whole_space_capacity".into()));
    }
    let acc = range_integral(w, profile.ln_omega(), p, r.ln(), big_r.ln(), Tail::Truncate, profile.quadrature())?;
    CapacityResult::from_integral(acc.total, acc.method(), acc.rel_error, p)
}

/// One row of a capacity grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapacityRow {
    pub r: Radius,
    pub big_r: Radius,
    pub result: CapacityResult,
}

/// Capacities for each `(r, R)`, in input order.
pub fn capacity_grid(profile: &MeasureProfile, p: f64, pairs: &[(Radius, Radius)], exec: Execution) -> Result<Vec<CapacityRow>> {
    exec.try_map(pairs, |&(r, big_r)| {
        annulus_capacity(profile, p, r, big_r).map(|result| CapacityRow { r, big_r, result })
    })
}

/// `cap(B_r, X)`: zero when the tail integral diverges.
pub fn whole_space_capacity(profile: &MeasureProfile, p: f64, r: Radius) -> Result<CapacityResult> {
    check_p(p)?;
    let w = weight_of(profile)?;
    let last = w.pieces().last().expect("weights have pieces");
    if !last.hi.is_infinite() || !last.is_power_log() {
        return Err(Error::Unsupported(
            "whole-space capacity needs a power-log final piece reaching ∞".into(),
        ));
    }
    if r.ln() == f64::NEG_INFINITY || r.is_infinite() {
        return Err(Error::Parameter(format!("need 0 < r < ∞, got {r}")));
    }
    let acc = range_integral(w, profile.ln_omega(), p, r.ln(), f64::INFINITY, Tail::ClosedFormOnly, profile.quadrature())?;
    let result = CapacityResult::from_integral(acc.total, acc.method(), acc.rel_error, p)?;
    monotone_limit_check(profile, p, r, &result)?;
    Ok(result)
}

/// Annuli `B_{2^j r}` must decrease toward the whole-space value from above.
fn monotone_limit_check(profile: &MeasureProfile, p: f64, r: Radius, limit: &CapacityResult) -> Result<()> {
    let slack = 1e-9 + 4.0 * limit.error_bound;
    let mut previous = LogScalar::POS_INF;
    for j in 1..=6 {
        let big_r = r.scaled(2f64.powi(j));
        let cap = annulus_capacity(profile, p, r, big_r)?;
        let ok_order = cap.value.log_mag() <= previous.log_mag() + slack;
        let ok_limit = limit.value.is_zero() || cap.value.log_mag() >= limit.value.log_mag() - slack;
        if !(ok_order && ok_limit) {
            return Err(Error::Accuracy {
                estimate: limit.value,
                error_bound: slack,
            });
        }
        previous = cap.value;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum PointCapacity {
    Zero,
    Positive { value: LogScalar },
}

/// `lim_{r→0} cap(B_r, B_R)` from the convergence of `∫_0^R (f')^{1/(1-p)}`.
pub fn point_capacity_limit(profile: &MeasureProfile, p: f64, big_r: Radius) -> Result<PointCapacity> {
    check_p(p)?;
    let w = weight_of(profile)?;
    let first = &w.pieces()[0];
    if first.lo.ln() != f64::NEG_INFINITY || !first.is_power_log() {
        return Err(Error::Unsupported(
            "point capacity needs a power-log leading piece starting at 0".into(),
        ));
    }
    if big_r.is_infinite() || big_r.ln() == f64::NEG_INFINITY {
        return Err(Error::Parameter(format!("need 0 < R < ∞, got {big_r}")));
    }
    let acc = range_integral(w, profile.ln_omega(), p, f64::NEG_INFINITY, big_r.ln(), Tail::ClosedFormOnly, profile.quadrature())?;
    if acc.total.is_infinite() {
        return Ok(PointCapacity::Zero);
    }
    Ok(PointCapacity::Positive {
        value: acc.total.log_pow(1.0 - p)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Zero,
    Positive,
    Indeterminate,
}

/// Zero capacity of points when `p ∉ uS₀` or `1 < p ∈ lS₀`; positive when `p ∈ int uS₀`.
pub fn classify_point_capacity_by_exponents(report: &ExponentReport, p: f64) -> Classification {
    let Some(upper) = report.get(SetId::UpperSZero) else {
        return Classification::Indeterminate;
    };
    let in_lower = report.contains(SetId::LowerSZero, p, EXPONENT_MARGIN);
    let in_upper = report.contains(SetId::UpperSZero, p, EXPONENT_MARGIN);
    if in_upper == Some(false) || (p > 1.0 && in_lower == Some(true)) {
        return Classification::Zero;
    }
    if p > upper.endpoint + EXPONENT_MARGIN {
        return Classification::Positive;
    }
    // Borderline: p = inf uS₀ with p ∉ lS₀ admits both outcomes.
    Classification::Indeterminate
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Basis {
    Exponents,
    Integral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum Parabolicity {
    Parabolic { by: Basis },
    Hyperbolic { by: Basis },
    Indeterminate,
}

/// Exponent test first (`p ∉ lS∞` or `1 < p ∈ uS∞` gives parabolic, `p ∈ int lS∞` hyperbolic);
/// otherwise the tail integral decides when the final piece allows it.
pub fn parabolicity(profile: &MeasureProfile, p: f64, report: &ExponentReport) -> Result<Parabolicity> {
    check_p(p)?;
    let in_lower = report.contains(SetId::LowerSInf, p, EXPONENT_MARGIN);
    let in_upper = report.contains(SetId::UpperSInf, p, EXPONENT_MARGIN);
    if in_lower == Some(false) || in_upper == Some(true) {
        return Ok(Parabolicity::Parabolic { by: Basis::Exponents });
    }
    if report.interior_contains(SetId::LowerSInf, p, EXPONENT_MARGIN) {
        return Ok(Parabolicity::Hyperbolic { by: Basis::Exponents });
    }
    match whole_space_capacity(profile, p, Radius::ONE) {
        Ok(cap) if cap.value.is_zero() => Ok(Parabolicity::Parabolic { by: Basis::Integral }),
        Ok(_) => Ok(Parabolicity::Hyperbolic { by: Basis::Integral }),
        Err(Error::Unsupported(_)) => Ok(Parabolicity::Indeterminate),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::exponents::{exponent_report, ExponentConfig};
    use crate::weights::{constant, power, power_log_at_infinity, power_log_at_zero, shifted_log};

    fn profile(w: RadialWeight) -> MeasureProfile {
        MeasureProfile::from_weight(w).unwrap()
    }

    fn r(x: f64) -> Radius {
        Radius::new(x).unwrap()
    }

    #[test]
    fn plane_annulus() {
        let cap = annulus_capacity(&profile(constant(2).unwrap()), 2.0, r(1.0), Radius::from_ln(1.0)).unwrap();
        assert!((cap.value.to_f64() - 2.0 * PI).abs() < 1e-12 * 2.0 * PI);
        assert_eq!(cap.method, Method::ClosedForm);
    }

    #[test]
    fn space_annulus_matches_antiderivative() {
        // n = 3, p = 2: ∫_r^R (4πρ²)^{-1} dρ = (1/r - 1/R)/(4π).
        let cap = annulus_capacity(&profile(constant(3).unwrap()), 2.0, r(1.0), r(2.0)).unwrap();
        let oracle = 4.0 * PI / (1.0 - 0.5);
        assert!((cap.value.to_f64() / oracle - 1.0).abs() < 1e-10);
    }

    #[test]
    fn whole_space_limits() {
        let plane = whole_space_capacity(&profile(constant(2).unwrap()), 2.0, r(3.0)).unwrap();
        assert!(plane.value.is_zero());
        let space = whole_space_capacity(&profile(constant(3).unwrap()), 2.0, r(1.0)).unwrap();
        assert!((space.value.to_f64() / (4.0 * PI) - 1.0).abs() < 1e-12);
        // β > p - 1 makes σ = 1 + β/(1-p) negative and the tail convergent.
        let big = whole_space_capacity(&profile(power_log_at_infinity(3, 2.0, 2.0).unwrap()), 2.0, r(3.0)).unwrap();
        assert!(big.value.is_positive() && big.value.is_finite());
        let small = whole_space_capacity(&profile(power_log_at_infinity(3, 2.0, 0.5).unwrap()), 2.0, r(3.0)).unwrap();
        assert!(small.value.is_zero());
    }

    #[test]
    fn point_capacity_by_integral() {
        assert_eq!(point_capacity_limit(&profile(constant(2).unwrap()), 2.0, r(1.0)).unwrap(), PointCapacity::Zero);
        let pos = point_capacity_limit(&profile(power_log_at_zero(3, 2.0, 1.5).unwrap()), 2.0, r(0.1)).unwrap();
        assert!(matches!(pos, PointCapacity::Positive { .. }));
        let zero = point_capacity_limit(&profile(power_log_at_zero(3, 2.0, 0.5).unwrap()), 2.0, r(0.1)).unwrap();
        assert_eq!(zero, PointCapacity::Zero);
    }

    #[test]
    fn pure_power_is_log_ratio() {
        let (n, p) = (3, 2.5);
        let prof = profile(power(n, p - n as f64).unwrap());
        let base = {
            let c = annulus_capacity(&prof, p, r(0.01), r(0.5)).unwrap();
            c.value.log_mag() + (p - 1.0) * (0.5f64 / 0.01).ln().ln()
        };
        for (a, b) in [(1e-8, 1e-3), (0.5, 7.0), (3.0, 1e6)] {
            let c = annulus_capacity(&prof, p, r(a), r(b)).unwrap();
            let v = c.value.log_mag() + (p - 1.0) * (b / a).ln().ln();
            assert!((v - base).abs() < 1e-9, "{a} {b}: {v} vs {base}");
        }
    }

    #[test]
    fn shifted_log_annulus_is_additive() {
        let prof = profile(shifted_log(2, 2.0).unwrap());
        let a = annulus_capacity(&prof, 3.0, r(0.5), r(100.0)).unwrap().integral_value;
        let b = annulus_capacity(&prof, 3.0, r(0.5), r(4.0)).unwrap().integral_value;
        let c = annulus_capacity(&prof, 3.0, r(4.0), r(100.0)).unwrap().integral_value;
        assert!(((b + c).log_mag() - a.log_mag()).abs() < 1e-10);
        assert!(whole_space_capacity(&prof, 3.0, r(1.0)).is_err());
    }

    #[test]
    fn rejected_queries() {
        let prof = profile(constant(2).unwrap());
        assert!(matches!(annulus_capacity(&prof, 1.0, r(1.0), r(2.0)), Err(Error::Unsupported(_))));
        assert!(matches!(annulus_capacity(&prof, 2.0, r(2.0), r(2.0)), Err(Error::Parameter(_))));
        assert!(matches!(annulus_capacity(&prof, 2.0, r(3.0), r(2.0)), Err(Error::Parameter(_))));
        let cantor = MeasureProfile::cantor(10).unwrap();
        assert!(matches!(annulus_capacity(&cantor, 2.0, r(0.1), r(0.2)), Err(Error::Unsupported(_))));
    }

    #[test]
    fn classifications_from_exponents() {
        let cfg = ExponentConfig::default();
        let plane = profile(constant(2).unwrap());
        let rep = exponent_report(&plane, &cfg).unwrap();
        assert_eq!(classify_point_capacity_by_exponents(&rep, 1.5), Classification::Zero);
        assert_eq!(classify_point_capacity_by_exponents(&rep, 3.0), Classification::Positive);
        assert_eq!(parabolicity(&plane, 2.0, &rep).unwrap(), Parabolicity::Parabolic { by: Basis::Exponents });
        let space = profile(constant(3).unwrap());
        let rep = exponent_report(&space, &cfg).unwrap();
        assert_eq!(parabolicity(&space, 2.0, &rep).unwrap(), Parabolicity::Hyperbolic { by: Basis::Exponents });
        for (beta, parabolic) in [(0.5, true), (2.0, false)] {
            let prof = profile(power_log_at_infinity(3, 2.0, beta).unwrap());
            let rep = exponent_report(&prof, &cfg).unwrap();
            let verdict = parabolicity(&prof, 2.0, &rep).unwrap();
            let expected = if parabolic {
                Parabolicity::Parabolic { by: Basis::Integral }
            } else {
                Parabolicity::Hyperbolic { by: Basis::Integral }
            };
            assert_eq!(verdict, expected, "beta = {beta}");
        }
    }
}
