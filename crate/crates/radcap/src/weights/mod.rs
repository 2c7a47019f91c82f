//! Piecewise power-log radial weights and the admissibility criteria built on `ρw'/w`.

mod builders;
mod spec;

pub use builders::{
    abcd, constant, default_depth, ex1, ex_s_touch, oscillating, power, power_log_at_infinity,
    power_log_at_zero, shifted_log, Abcd, OSCILLATING_LEVELS,
};
pub use spec::{Bound, PieceRecord, WeightSpec};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{LogScalar, PowerLogTerm};
use crate::radius::Radius;

/// Shape of a single piece, up to its coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PieceForm {
    /// `ρ^alpha · |ln ρ|^beta`.
    PowerLog { alpha: f64, beta: f64 },
    /// `ln(shift + ρ)`; requires `shift > 1`.
    ShiftedLog { shift: f64 },
}

/// `coeff · form(ρ)` on `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightPiece {
    pub lo: Radius,
    pub hi: Radius,
    pub coeff: LogScalar,
    pub form: PieceForm,
}

impl WeightPiece {
    pub fn power_log(lo: Radius, hi: Radius, coeff: LogScalar, alpha: f64, beta: f64) -> WeightPiece {
        WeightPiece {
            lo,
            hi,
            coeff,
            form: PieceForm::PowerLog { alpha, beta },
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.lo < self.hi) {
            return Err(Error::Parameter(format!(
                "piece interval [{}, {}) is empty",
                self.lo, self.hi
            )));
        }
        if !self.coeff.is_positive() || !self.coeff.is_finite() {
            return Err(Error::Parameter("piece coefficient must be positive and finite".into()));
        }
        match self.form {
            PieceForm::PowerLog { alpha, beta } => {
                if !alpha.is_finite() || !beta.is_finite() {
                    return Err(Error::Parameter("piece exponents must be finite".into()));
                }
                if beta != 0.0 && self.lo.ln() <= 0.0 && self.hi.ln() >= 0.0 {
                    return Err(Error::Parameter(format!(
                        "log power {beta} on a piece containing ρ = 1"
                    )));
                }
            }
            PieceForm::ShiftedLog { shift } => {
                if !(shift > 1.0) || !shift.is_finite() {
                    return Err(Error::Parameter(format!(
                        "shifted log needs shift > 1, got {shift}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, t: f64) -> bool {
        self.lo.ln() <= t && t < self.hi.ln()
    }

    /// `ln w` at `t = ln ρ`.
    pub fn ln_value(&self, t: f64) -> f64 {
        let base = self.coeff.ln();
        match self.form {
            PieceForm::PowerLog { alpha, beta } => {
                let log_part = if beta == 0.0 { 0.0 } else { beta * t.abs().ln() };
                base + alpha * t + log_part
            }
            PieceForm::ShiftedLog { shift } => base + ln_shifted(shift, t).ln(),
        }
    }

    /// `ρ w'(ρ) / w(ρ)` at `t = ln ρ`.
    pub fn ratio(&self, t: f64) -> f64 {
        match self.form {
            PieceForm::PowerLog { alpha, beta } => {
                if beta == 0.0 {
                    alpha
                } else {
                    alpha + beta / t
                }
            }
            PieceForm::ShiftedLog { shift } => {
                let frac = if t > 0.0 {
                    1.0 / (1.0 + shift * (-t).exp())
                } else {
                    t.exp() / (shift + t.exp())
                };
                frac / ln_shifted(shift, t)
            }
        }
    }

    /// Infimum and supremum of the ratio over the open piece, each with the `t` where it is
    /// approached (possibly infinite).
    pub fn ratio_extremes(&self) -> ((f64, f64), (f64, f64)) {
        let lo = self.lo.ln();
        let hi = self.hi.ln();
        match self.form {
            PieceForm::PowerLog { alpha, beta } => {
                let at = |t: f64| if t.is_infinite() || beta == 0.0 { alpha } else { alpha + beta / t };
                let (a, b) = (at(lo), at(hi));
                if a <= b {
                    ((a, lo), (b, hi))
                } else {
                    ((b, hi), (a, lo))
                }
            }
            PieceForm::ShiftedLog { .. } => {
                // Not monotone: scan a clipped log-radius range densely, then take the limits.
                let a = lo.max(-60.0);
                let b = hi.min(60.0);
                let mut inf = (f64::INFINITY, a);
                let mut sup = (f64::NEG_INFINITY, a);
                let steps = 4000;
                for i in 0..=steps {
                    let t = a + (b - a) * i as f64 / steps as f64;
                    let v = self.ratio(t);
                    if v < inf.0 {
                        inf = (v, t);
                    }
                    if v > sup.0 {
                        sup = (v, t);
                    }
                }
                if lo == f64::NEG_INFINITY {
                    inf = if 0.0 < inf.0 { (0.0, lo) } else { inf };
                }
                if hi == f64::INFINITY {
                    inf = if 0.0 < inf.0 { (0.0, hi) } else { inf };
                }
                (inf, sup)
            }
        }
    }

    /// The measure integrand `ω c ρ^{α+n-1} |ln ρ|^β dρ` written in `t`.
    pub fn measure_term(&self, n: u32, ln_omega: f64) -> Option<PowerLogTerm> {
        match self.form {
            PieceForm::PowerLog { alpha, beta } => Some(PowerLogTerm {
                log_coeff: ln_omega + self.coeff.ln(),
                a: alpha + n as f64,
                delta: beta,
            }),
            PieceForm::ShiftedLog { .. } => None,
        }
    }

    /// The capacity integrand `(f')^{1/(1-p)} dρ` written in `t`.
    pub fn capacity_term(&self, n: u32, ln_omega: f64, p: f64) -> Option<PowerLogTerm> {
        let s = 1.0 / (1.0 - p);
        match self.form {
            PieceForm::PowerLog { alpha, beta } => Some(PowerLogTerm {
                log_coeff: s * (ln_omega + self.coeff.ln()),
                a: s * (alpha + n as f64 - 1.0) + 1.0,
                delta: s * beta,
            }),
            PieceForm::ShiftedLog { .. } => None,
        }
    }

    pub fn is_power_log(&self) -> bool {
        matches!(self.form, PieceForm::PowerLog { .. })
    }
}

/// `ln(shift + e^t)` without overflow.
fn ln_shifted(shift: f64, t: f64) -> f64 {
    if t > 0.0 {
        t + (shift * (-t).exp()).ln_1p()
    } else {
        (shift + t.exp()).ln()
    }
}

/// A named radius of a generated scale ladder (e.g. `alpha_3`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderMark {
    pub name: String,
    pub index: i64,
    pub radius: Radius,
}

/// Scale bookkeeping attached by the builders.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleInfo {
    /// Below this radius the bottom piece is an extrapolation of a truncated ladder.
    pub floor: Option<Radius>,
    /// Above this radius the top piece is an extrapolation of a truncated ladder.
    pub ceiling: Option<Radius>,
    /// Top of the small-radii regime.
    pub small_top: Radius,
    /// Bottom of the large-radii regime.
    pub large_bottom: Radius,
    /// Preferred sampling windows for the exponent sets at 0 and at ∞.
    pub window_zero: Option<(Radius, Radius)>,
    pub window_infinity: Option<(Radius, Radius)>,
    pub marks: Vec<LadderMark>,
}

impl Default for ScaleInfo {
    fn default() -> Self {
        ScaleInfo {
            floor: None,
            ceiling: None,
            small_top: Radius::ONE,
            large_bottom: Radius::from_ln(1.0),
            window_zero: None,
            window_infinity: None,
            marks: Vec::new(),
        }
    }
}

/// Which side of a breakpoint a derivative query refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Reject breakpoints.
    Interior,
    Left,
    Right,
}

/// A radial weight `w(|x|)` on `R^n`, piecewise power-log on abutting intervals of `(0, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialWeight {
    n: u32,
    pieces: Vec<WeightPiece>,
    continuity_enforced: bool,
    scales: ScaleInfo,
    label: String,
}

const CONTINUITY_TOL: f64 = 1e-12;

impl RadialWeight {
    pub fn new(n: u32, pieces: Vec<WeightPiece>, continuity_enforced: bool) -> Result<RadialWeight> {
        if n < 2 {
            return Err(Error::Parameter(format!("dimension must be at least 2, got {n}")));
        }
        let first = pieces.first().ok_or_else(|| Error::Parameter("weight has no pieces".into()))?;
        if first.lo.ln() != f64::NEG_INFINITY {
            return Err(Error::Parameter("first piece must start at ρ = 0".into()));
        }
        if !pieces.last().expect("non-empty").hi.is_infinite() {
            return Err(Error::Parameter("last piece must extend to ρ = ∞".into()));
        }
        for piece in &pieces {
            piece.validate()?;
        }
        for pair in pieces.windows(2) {
            if pair[0].hi != pair[1].lo {
                return Err(Error::Parameter(format!(
                    "pieces do not abut: {} vs {}",
                    pair[0].hi, pair[1].lo
                )));
            }
        }
        let weight = RadialWeight {
            n,
            pieces,
            continuity_enforced,
            scales: ScaleInfo::default(),
            label: "custom".into(),
        };
        if continuity_enforced {
            if let Some((t, jump)) = weight.largest_jump() {
                if jump > CONTINUITY_TOL {
                    return Err(Error::Parameter(format!(
                        "weight jumps by relative {jump:e} at t = {t}"
                    )));
                }
            }
        }
        Ok(weight)
    }

    pub fn with_scales(mut self, scales: ScaleInfo) -> RadialWeight {
        self.scales = scales;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> RadialWeight {
        self.label = label.into();
        self
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn pieces(&self) -> &[WeightPiece] {
        &self.pieces
    }

    pub fn continuity_enforced(&self) -> bool {
        self.continuity_enforced
    }

    pub fn scales(&self) -> &ScaleInfo {
        &self.scales
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Interior breakpoints as log-radii, ascending.
    pub fn breakpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.pieces[1..].iter().map(|p| p.lo.ln())
    }

    /// Index of the piece active at `t` (right-continuous).
    pub fn piece_index(&self, t: f64) -> usize {
        self.pieces.partition_point(|p| p.hi.ln() <= t).min(self.pieces.len() - 1)
    }

    pub fn piece_at(&self, t: f64) -> &WeightPiece {
        &self.pieces[self.piece_index(t)]
    }

    /// Multiply every coefficient by `factor > 0`.
    pub fn scaled(&self, factor: LogScalar) -> RadialWeight {
        let mut out = self.clone();
        for piece in &mut out.pieces {
            piece.coeff = piece.coeff * factor;
        }
        out
    }

    /// Largest relative jump `|ln w(t+) - ln w(t-)|` over interior breakpoints.
    pub fn largest_jump(&self) -> Option<(f64, f64)> {
        self.pieces
            .windows(2)
            .map(|pair| {
                let t = pair[1].lo.ln();
                let left = pair[0].ln_value(t);
                let right = pair[1].ln_value(t);
                let scale = left.abs().max(right.abs()).max(1.0);
                (t, (left - right).abs() / scale)
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }

    pub fn is_continuous(&self) -> bool {
        self.largest_jump().is_none_or(|(_, jump)| jump <= CONTINUITY_TOL)
    }
}

/// Value of `w` at `ρ`; right-continuous at breakpoints.
pub fn eval_weight(w: &RadialWeight, rho: Radius) -> LogScalar {
    let t = rho.ln();
    LogScalar::from_ln(w.piece_at(t).ln_value(t))
}

/// `ρ w'(ρ)/w(ρ)`. At a breakpoint, `Side::Interior` is an error and the other sides select
/// the adjacent piece.
pub fn log_derivative_ratio(w: &RadialWeight, rho: Radius, side: Side) -> Result<f64> {
    let t = rho.ln();
    let idx = w.piece_index(t);
    let on_break = idx > 0 && w.pieces[idx].lo.ln() == t;
    let piece = match (on_break, side) {
        (false, _) | (true, Side::Right) => &w.pieces[idx],
        (true, Side::Left) => &w.pieces[idx - 1],
        (true, Side::Interior) => return Err(Error::Breakpoint(t)),
    };
    Ok(piece.ratio(t))
}

/// Outcome of the sufficient 1-admissibility test `-γ1 ≤ ρw'/w ≤ γ2`, `γ1 < n - 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityVerdict {
    pub passes: bool,
    pub gamma1: f64,
    pub gamma2: f64,
    /// Where the violated extreme is approached, when failing.
    pub witness: Option<Radius>,
    pub caveats: Vec<String>,
}

pub fn check_admissible(w: &RadialWeight) -> AdmissibilityVerdict {
    let (inf, sup) = ratio_range(w);
    let n = w.n as f64;
    let gamma1 = -inf.0;
    let gamma2 = sup.0;
    let passes = gamma1 < n - 1.0 && gamma2 < f64::INFINITY;
    let witness = if gamma1 >= n - 1.0 {
        Some(Radius::from_ln(inf.1))
    } else if gamma2 == f64::INFINITY {
        Some(Radius::from_ln(sup.1))
    } else {
        None
    };
    let mut caveats = Vec::new();
    if let Some((t, jump)) = w.largest_jump() {
        if jump > CONTINUITY_TOL {
            caveats.push(format!(
                "weight is discontinuous (relative jump {jump:.3e} at ln ρ = {t}); the criterion assumes local absolute continuity"
            ));
        }
    }
    if !passes && gamma1 >= n - 1.0 && gamma1 < n {
        caveats.push(
            "inconclusive band: ratio infimum in (-n, 1-n]; failure is by this criterion only, not a claim about admissibility"
                .into(),
        );
    }
    AdmissibilityVerdict {
        passes,
        gamma1,
        gamma2,
        witness,
        caveats,
    }
}

/// Bounds `m ≤ ρk'/k ≤ M` of the radial stretch `k(ρ) = ρ w(ρ)^{1/(n-1)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StretchBounds {
    pub m: f64,
    pub big_m: f64,
    pub quasiconformal: bool,
}

pub fn check_quasiconformal_stretch(w: &RadialWeight) -> StretchBounds {
    let (inf, sup) = ratio_range(w);
    let n1 = w.n as f64 - 1.0;
    let m = 1.0 + inf.0 / n1;
    let big_m = 1.0 + sup.0 / n1;
    StretchBounds {
        m,
        big_m,
        quasiconformal: m > 0.0 && big_m < f64::INFINITY,
    }
}

fn ratio_range(w: &RadialWeight) -> ((f64, f64), (f64, f64)) {
    let mut inf = (f64::INFINITY, 0.0);
    let mut sup = (f64::NEG_INFINITY, 0.0);
    for piece in &w.pieces {
        let (lo, hi) = piece.ratio_extremes();
        if lo.0 < inf.0 {
            inf = lo;
        }
        if hi.0 > sup.0 {
            sup = hi;
        }
    }
    (inf, sup)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_weight_is_one() {
        let w = constant(3).unwrap();
        assert_eq!(eval_weight(&w, Radius::new(3.7).unwrap()).to_f64(), 1.0);
    }

    #[test]
    fn power_log_value_at_zero_side() {
        let w = power_log_at_zero(3, 3.0, 2.0).unwrap();
        let v = eval_weight(&w, Radius::from_ln(-2.0));
        assert!((v.to_f64() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn ex1_value_at_beta_one() {
        let w = ex1(Some(6)).unwrap();
        let beta1 = Radius::from_ln(-3.0 * 2f64.ln());
        let v = eval_weight(&w, beta1);
        assert!((v.ln() - (-4.0 * 2f64.ln())).abs() < 1e-14);
    }

    #[test]
    fn ratios_from_table() {
        let sq = power(2, 2.0).unwrap();
        assert_eq!(log_derivative_ratio(&sq, Radius::new(0.3).unwrap(), Side::Interior).unwrap(), 2.0);
        let (p, n, beta) = (3.0, 2, 1.5);
        let w = power_log_at_zero(n, p, beta).unwrap();
        let r = log_derivative_ratio(&w, Radius::from_ln(-1.0), Side::Left).unwrap();
        assert!((r - ((p - n as f64) - beta)).abs() < 1e-14);
        assert!(log_derivative_ratio(&w, Radius::from_ln(-1.0), Side::Interior).is_err());
        let e = ex1(Some(6)).unwrap();
        // Between alpha_3 and beta_2 the weight is constant.
        let t = -7.0 * 2f64.ln();
        assert_eq!(log_derivative_ratio(&e, Radius::from_ln(t), Side::Interior).unwrap(), 0.0);
    }

    #[test]
    fn admissibility_examples() {
        let v = check_admissible(&shifted_log(2, 2.0).unwrap());
        assert!(v.passes);
        assert!(v.gamma1 <= 0.0 && v.gamma2 < 1.0 && v.gamma2 > 0.0);
        for n in 2..6 {
            let v = check_admissible(&power(n, 1.0 - n as f64 - 0.1).unwrap());
            assert!(!v.passes);
            assert!((v.gamma1 - (n as f64 - 0.9)).abs() < 1e-12);
            assert!(v.witness.is_some());
            assert_eq!(v.caveats.len(), 1);
        }
        let v = check_admissible(&ex_s_touch(None).unwrap());
        assert!(v.passes);
        assert_eq!((v.gamma1, v.gamma2), (0.0, 2.0));
    }

    #[test]
    fn stretch_examples() {
        let s = check_quasiconformal_stretch(&constant(3).unwrap());
        assert_eq!((s.m, s.big_m), (1.0, 1.0));
        let s = check_quasiconformal_stretch(&ex1(None).unwrap());
        assert_eq!((s.m, s.big_m), (1.0, 3.0));
        let s = check_quasiconformal_stretch(&power(3, -3.0).unwrap());
        assert!(!s.quasiconformal);
        assert!((s.m - (1.0 - 3.0 / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_pieces() {
        let one = LogScalar::ONE;
        let whole = WeightPiece::power_log(Radius::ZERO, Radius::INFINITY, one, 0.0, 1.0);
        assert!(RadialWeight::new(2, vec![whole], false).is_err());
        let a = WeightPiece::power_log(Radius::ZERO, Radius::ONE, one, 0.0, 0.0);
        let b = WeightPiece::power_log(Radius::from_ln(0.5), Radius::INFINITY, one, 0.0, 0.0);
        assert!(RadialWeight::new(2, vec![a, b], false).is_err());
        let c = WeightPiece::power_log(Radius::ONE, Radius::INFINITY, LogScalar::from_f64(2.0), 0.0, 0.0);
        assert!(RadialWeight::new(2, vec![a, c], true).is_err());
        assert!(RadialWeight::new(2, vec![a, c], false).is_ok());
        assert!(RadialWeight::new(1, vec![whole], false).is_err());
    }
}
