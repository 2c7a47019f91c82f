//! The ball-measure profile `f(r) = μ(B_r)` and its density.

mod cantor;
mod doubling;

pub use cantor::{CANTOR_DEFAULT_DEPTH, CANTOR_MAX_DEPTH};
pub use doubling::{doubling_scan, DoublingReport};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::numerics::{integrate_plain, sphere_area, LogScalar, PowerLogTerm, QuadratureSpec, Tail};
use crate::radius::Radius;
use crate::weights::{PieceForm, RadialWeight, ScaleInfo, WeightPiece};

/// Where a profile's values come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    WeightDerived,
    Tabulated,
    Cantor,
}

#[derive(Debug, Clone)]
enum Source {
    Weight {
        weight: RadialWeight,
        /// `f` at the lower end of each piece.
        cumulative: Vec<LogScalar>,
    },
    /// Nodes `(ln r, ln f)`, strictly increasing in both coordinates.
    Table(Vec<(f64, f64)>),
    Cantor { depth: u32 },
}

/// `f(r) = μ(B_r)` for a radial measure on `R^n`. Immutable once built.
#[derive(Debug, Clone)]
pub struct MeasureProfile {
    n: u32,
    ln_omega: f64,
    source: Source,
    scales: ScaleInfo,
    spec: QuadratureSpec,
}

/// One sampled row of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureSample {
    pub r: Radius,
    pub f: LogScalar,
    /// `None` for profiles without a density.
    pub fprime: Option<LogScalar>,
    /// The radius lies outside the generated part of a truncated ladder.
    pub extrapolated: bool,
}

impl MeasureProfile {
    pub fn from_weight(weight: RadialWeight) -> Result<MeasureProfile> {
        MeasureProfile::from_weight_with(weight, QuadratureSpec::default())
    }

    /// Builds the cumulative cache eagerly; fails when `μ(B_r)` is infinite.
    pub fn from_weight_with(weight: RadialWeight, spec: QuadratureSpec) -> Result<MeasureProfile> {
        spec.validate()?;
        let n = weight.n();
        let ln_omega = sphere_area(n).ln();
        let mut cumulative = Vec::with_capacity(weight.pieces().len());
        let mut total = LogScalar::ZERO;
        for (i, piece) in weight.pieces().iter().enumerate() {
            cumulative.push(total);
            if i + 1 < weight.pieces().len() {
                total = total + piece_integral(piece, n, ln_omega, piece.lo.ln(), piece.hi.ln(), &spec)?;
            } else if i == 0 {
                // A single piece: probe integrability at 0 on a bounded stretch.
                piece_integral(piece, n, ln_omega, f64::NEG_INFINITY, piece.hi.ln().min(0.0), &spec)?;
            }
        }
        Ok(MeasureProfile {
            n,
            ln_omega,
            scales: weight.scales().clone(),
            source: Source::Weight { weight, cumulative },
            spec,
        })
    }

    /// Profile given by nodes `(r, f(r))`, interpolated linearly in `(ln r, ln f)`.
    pub fn tabulated(n: u32, nodes: &[(Radius, LogScalar)]) -> Result<MeasureProfile> {
        if n == 0 {
            return Err(Error::Parameter("dimension must be positive".into()));
        }
        if nodes.len() < 2 {
            return Err(Error::Parameter("a tabulated profile needs at least two nodes".into()));
        }
        let table: Vec<(f64, f64)> = nodes.iter().map(|(r, f)| (r.ln(), f.ln())).collect();
        for (t, v) in &table {
            if !t.is_finite() || !v.is_finite() {
                return Err(Error::Parameter("tabulated nodes must be positive and finite".into()));
            }
        }
        if table.windows(2).any(|w| !(w[0].0 < w[1].0 && w[0].1 < w[1].1)) {
            return Err(Error::Parameter("tabulated profile must be strictly increasing".into()));
        }
        let lo = Radius::from_ln(table[0].0);
        let hi = Radius::from_ln(table[table.len() - 1].0);
        let scales = ScaleInfo {
            floor: Some(lo),
            ceiling: Some(hi),
            small_top: Radius::ONE.min(hi),
            window_zero: Some((lo, Radius::ONE.min(hi))),
            window_infinity: (hi > Radius::ONE).then(|| (Radius::ONE.max(lo), hi)),
            ..ScaleInfo::default()
        };
        Ok(MeasureProfile {
            n,
            ln_omega: sphere_area(n).ln(),
            source: Source::Table(table),
            scales,
            spec: QuadratureSpec::default(),
        })
    }

    /// The Cantor staircase on `R`, normalised to `f(1) = 1`, resolved to level `depth`.
    pub fn cantor(depth: u32) -> Result<MeasureProfile> {
        cantor::check_depth(depth)?;
        Ok(MeasureProfile {
            n: 1,
            ln_omega: 2f64.ln(),
            source: Source::Cantor { depth },
            scales: cantor::scales(depth),
            spec: QuadratureSpec::default(),
        })
    }

    pub fn kind(&self) -> ProfileKind {
        match self.source {
            Source::Weight { .. } => ProfileKind::WeightDerived,
            Source::Table(_) => ProfileKind::Tabulated,
            Source::Cantor { .. } => ProfileKind::Cantor,
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `ln ω_{n-1}`.
    pub fn ln_omega(&self) -> f64 {
        self.ln_omega
    }

    pub fn weight(&self) -> Option<&RadialWeight> {
        match &self.source {
            Source::Weight { weight, .. } => Some(weight),
            _ => None,
        }
    }

    pub fn scales(&self) -> &ScaleInfo {
        &self.scales
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.spec
    }

    pub fn label(&self) -> String {
        match &self.source {
            Source::Weight { weight, .. } => weight.label().to_string(),
            Source::Table(t) => format!("tabulated({} nodes)", t.len()),
            Source::Cantor { depth } => format!("cantor(depth={depth})"),
        }
    }

    pub fn ball_measure(&self, r: Radius) -> Result<LogScalar> {
        self.ln_ball_measure(r.ln()).map(LogScalar::from_ln)
    }

    /// `ln f(e^t)`.
    pub fn ln_ball_measure(&self, t: f64) -> Result<f64> {
        if t.is_nan() || t == f64::NEG_INFINITY {
            return Err(Error::Parameter(format!("radius must be positive, got ln r = {t}")));
        }
        match &self.source {
            Source::Weight { weight, cumulative } => {
                if t == f64::INFINITY {
                    return Err(Error::Parameter("ball measure at r = ∞; use the whole-space routines".into()));
                }
                let i = weight.piece_index(t);
                let piece = &weight.pieces()[i];
                let part = piece_integral(piece, self.n, self.ln_omega, piece.lo.ln(), t, &self.spec)?;
                Ok((cumulative[i] + part).ln())
            }
            Source::Table(table) => interpolate(table, t),
            Source::Cantor { depth } => Ok(cantor::ln_staircase(t, *depth)),
        }
    }

    /// `f'(ρ) = ω_{n-1} w(ρ) ρ^{n-1}`; right-continuous at breakpoints.
    pub fn density(&self, rho: Radius) -> Result<LogScalar> {
        match &self.source {
            Source::Weight { weight, .. } => {
                let t = rho.ln();
                if !t.is_finite() {
                    return Err(Error::Parameter(format!("density needs a finite positive radius, got {rho}")));
                }
                let w = weight.piece_at(t).ln_value(t);
                Ok(LogScalar::from_ln(self.ln_omega + w + (self.n as f64 - 1.0) * t))
            }
            Source::Table(_) => Err(Error::Unsupported("tabulated profiles carry no density".into())),
            Source::Cantor { .. } => Err(Error::Unsupported(
                "the Cantor staircase is not absolutely continuous; it has no density".into(),
            )),
        }
    }

    pub fn has_density(&self) -> bool {
        self.kind() == ProfileKind::WeightDerived
    }

    /// `μ(B_R \ B_r) = f(R) - f(r)`, integrated directly rather than by subtraction.
    pub fn annulus_measure(&self, r: Radius, big_r: Radius) -> Result<LogScalar> {
        if !(r < big_r) {
            return Err(Error::Parameter(format!("annulus needs r < R, got {r} and {big_r}")));
        }
        let Source::Weight { weight, .. } = &self.source else {
            let fr = self.ball_measure(r)?;
            return Ok(self.ball_measure(big_r)? - fr);
        };
        let (t1, t2) = (r.ln(), big_r.ln());
        let mut total = LogScalar::ZERO;
        for piece in &weight.pieces()[weight.piece_index(t1)..=weight.piece_index(t2)] {
            let a = piece.lo.ln().max(t1);
            let b = piece.hi.ln().min(t2);
            if a < b {
                total = total + piece_integral(piece, self.n, self.ln_omega, a, b, &self.spec)?;
            }
        }
        Ok(total)
    }

    /// Whether `r` lies below the floor or above the ceiling of the generated ladder.
    pub fn is_extrapolated(&self, r: Radius) -> bool {
        self.scales.floor.is_some_and(|f| r < f) || self.scales.ceiling.is_some_and(|c| r > c)
    }

    pub fn sample(&self, r: Radius) -> Result<MeasureSample> {
        Ok(MeasureSample {
            r,
            f: self.ball_measure(r)?,
            fprime: if self.has_density() { Some(self.density(r)?) } else { None },
            extrapolated: self.is_extrapolated(r),
        })
    }

    pub fn sample_many(&self, radii: &[Radius], exec: Execution) -> Result<Vec<MeasureSample>> {
        exec.try_map(radii, |&r| self.sample(r))
    }

    /// `r f'(r) / f(r)`.
    pub fn log_growth_ratio(&self, r: Radius) -> Result<f64> {
        let fp = self.density(r)?;
        Ok((fp.ln() + r.ln() - self.ln_ball_measure(r.ln())?).exp())
    }
}

/// `∫_{t1}^{t2} ω c ρ^{n} · form(ρ) dt` over part of one piece.
fn piece_integral(piece: &WeightPiece, n: u32, ln_omega: f64, t1: f64, t2: f64, spec: &QuadratureSpec) -> Result<LogScalar> {
    match piece.form {
        PieceForm::PowerLog { .. } => {
            let term: PowerLogTerm = piece.measure_term(n, ln_omega).expect("power-log piece");
            let value = term.integrate(t1, t2, Tail::Truncate, spec)?;
            if value.diverges() {
                return Err(Error::Divergence(format!(
                    "μ(B_r) is infinite: ρ^{} |ln ρ|^{} is not integrable near {}",
                    term.a - 1.0,
                    term.delta,
                    if t1 == f64::NEG_INFINITY { "0" } else { "∞" }
                )));
            }
            Ok(value.value)
        }
        PieceForm::ShiftedLog { shift } => shifted_log_integral(piece.coeff.ln() + ln_omega, shift, n, t1, t2, spec),
    }
}

/// `∫ e^{lc + n t} ln(shift + e^t) dt`. Below `t = -40` the log factor is bracketed between
/// `ln shift` and `ln(shift + e^{-40})`, and the midpoint is used.
fn shifted_log_integral(lc: f64, shift: f64, n: u32, t1: f64, t2: f64, spec: &QuadratureSpec) -> Result<LogScalar> {
    const CUT: f64 = -40.0;
    const HIGH: f64 = 40.0;
    let nf = n as f64;
    let ln_log = |t: f64| {
        let v = if t > 0.0 {
            t + (shift * (-t).exp()).ln_1p()
        } else {
            (shift + t.exp()).ln()
        };
        v.ln()
    };
    let mut total = LogScalar::ZERO;
    let mut start = t1;
    if t1 < CUT {
        let top = t2.min(CUT);
        let width = if t1 == f64::NEG_INFINITY {
            nf * top - nf.ln()
        } else {
            nf * top - nf.ln() + (-(nf * (t1 - top)).exp()).ln_1p()
        };
        let mid = 0.5 * (ln_log(f64::NEG_INFINITY) + ln_log(top));
        total = LogScalar::from_ln(lc + width + mid);
        start = top;
    }
    // Above HIGH, ln(shift + e^t) equals t to double precision; the closed form avoids
    // quadrature at log-radii where node rounding alone exceeds the tolerance.
    let mid_top = t2.min(HIGH.max(start));
    if start < mid_top {
        let rest = integrate_plain(|t| LogScalar::from_ln(lc + nf * t + ln_log(t)), start, mid_top, spec, &[])?;
        total = total + rest.value;
    }
    if mid_top < t2 {
        let term = PowerLogTerm {
            log_coeff: lc,
            a: nf,
            delta: 1.0,
        };
        total = total + term.integrate(mid_top, t2, Tail::Truncate, spec)?.value;
    }
    Ok(total)
}

fn interpolate(table: &[(f64, f64)], t: f64) -> Result<f64> {
    let first = table[0];
    let last = table[table.len() - 1];
    if t < first.0 || t > last.0 {
        return Err(Error::Parameter(format!(
            "radius e^{t} outside tabulated range [e^{}, e^{}]",
            first.0, last.0
        )));
    }
    let i = table.partition_point(|node| node.0 <= t).clamp(1, table.len() - 1);
    let (t0, v0) = table[i - 1];
    let (t1, v1) = table[i];
    Ok(v0 + (v1 - v0) * (t - t0) / (t1 - t0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{constant, ex1, power_log_at_infinity, power_log_at_zero, shifted_log};
    use std::f64::consts::PI;

    #[test]
    fn unit_disc_has_area_pi() {
        let p = MeasureProfile::from_weight(constant(2).unwrap()).unwrap();
        let f = p.ball_measure(Radius::ONE).unwrap().to_f64();
        assert!((f - PI).abs() < 1e-14);
        assert!((p.density(Radius::ONE).unwrap().to_f64() - 2.0 * PI).abs() < 1e-14);
    }

    #[test]
    fn ex1_measure_tracks_alpha_cubed() {
        let p = MeasureProfile::from_weight(ex1(Some(10)).unwrap()).unwrap();
        let mut ratios = Vec::new();
        for k in 1..=6 {
            let t = -(2f64.powi(k)) * 2f64.ln();
            ratios.push(p.ln_ball_measure(t).unwrap() - 3.0 * t);
        }
        let spread = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(spread < 3f64.ln(), "ln-ratios {ratios:?}");
    }

    #[test]
    fn ex1_density_on_rising_band() {
        let p = MeasureProfile::from_weight(ex1(Some(8)).unwrap()).unwrap();
        // ρ between β_2 = 2^-6 and α_2 = 2^-4; f' = 2π ρ³ / α_2.
        let rho = Radius::from_ln(-5.0 * 2f64.ln());
        let expected = 2.0 * PI * 2f64.powi(-15) / 2f64.powi(-4);
        let got = p.density(rho).unwrap().to_f64();
        assert!((got / expected - 1.0).abs() < 1e-13);
    }

    #[test]
    fn log_weight_measure_is_comparable_to_model() {
        for beta in [-1.0, 0.5, 1.0, 3.0] {
            let p = MeasureProfile::from_weight(power_log_at_zero(3, 2.5, beta).unwrap()).unwrap();
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for k in 1..60 {
                let t = -1.0 - k as f64 * 0.5;
                let model = 2.5 * t + beta * (-t).ln();
                let d = p.ln_ball_measure(t).unwrap() - model;
                lo = lo.min(d);
                hi = hi.max(d);
            }
            assert!(hi - lo < 2.0, "beta {beta}: spread {}", hi - lo);
        }
    }

    #[test]
    fn density_above_e_matches_power_log() {
        let p = MeasureProfile::from_weight(power_log_at_infinity(3, 2.0, 1.5).unwrap()).unwrap();
        let t: f64 = 4.0;
        let got = p.density(Radius::from_ln(t)).unwrap().ln();
        let expected = (4.0 * PI).ln() + (2.0 - 1.0) * t + 1.5 * t.ln();
        assert!((got - expected).abs() < 1e-13);
    }

    #[test]
    fn divergent_measure_is_reported() {
        let w = crate::weights::power(2, -2.0).unwrap();
        assert!(matches!(MeasureProfile::from_weight(w), Err(Error::Divergence(_))));
    }

    #[test]
    fn annulus_equals_difference() {
        let p = MeasureProfile::from_weight(ex1(Some(8)).unwrap()).unwrap();
        let (r, big_r) = (Radius::from_ln(-20.0), Radius::from_ln(-1.0));
        let direct = p.annulus_measure(r, big_r).unwrap();
        let diff = p.ball_measure(big_r).unwrap() - p.ball_measure(r).unwrap();
        assert!((direct.ln() - diff.ln()).abs() < 1e-12);
    }

    #[test]
    fn shifted_log_measure_matches_quadrature() {
        let p = MeasureProfile::from_weight(shifted_log(2, 2.0).unwrap()).unwrap();
        let f = p.ball_measure(Radius::ONE).unwrap().to_f64();
        // Oracle: 2π ∫_0^1 ln(2+ρ) ρ dρ = 2π [ (ρ²-4)/2 ln(2+ρ) - ρ²/4 + ρ ]_0^1.
        let anti = |x: f64| (x * x - 4.0) / 2.0 * (2.0 + x).ln() - x * x / 4.0 + x;
        let oracle = 2.0 * PI * (anti(1.0) - anti(0.0));
        assert!((f / oracle - 1.0).abs() < 1e-9, "{f} vs {oracle}");
    }

    #[test]
    fn tabulated_interpolates_in_logs() {
        let nodes = [
            (Radius::new(0.01).unwrap(), LogScalar::from_f64(1e-4)),
            (Radius::new(1.0).unwrap(), LogScalar::from_f64(1.0)),
        ];
        let p = MeasureProfile::tabulated(2, &nodes).unwrap();
        let f = p.ball_measure(Radius::new(0.1).unwrap()).unwrap().to_f64();
        assert!((f - 0.01).abs() < 1e-15);
        assert!(p.density(Radius::ONE).is_err());
        assert!(p.ball_measure(Radius::new(2.0).unwrap()).is_err());
    }
}
