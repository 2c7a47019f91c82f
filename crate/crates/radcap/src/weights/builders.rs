use std::f64::consts::LN_2;

use super::{LadderMark, PieceForm, RadialWeight, ScaleInfo, WeightPiece};
use crate::error::{Error, Result};
use crate::numerics::{sphere_area, LogScalar};
use crate::radius::Radius;

/// Hard cap on generated ladder depth.
pub const MAX_DEPTH: u32 = 64;
/// Levels generated on each side of `ρ = 1` by [`oscillating`].
pub const OSCILLATING_LEVELS: u32 = 128;
/// Largest `|ln ρ|` a default ladder may reach; keeps about 20 fractional bits in log-radii.
const LOG_RADIUS_LIMIT: f64 = 4_294_967_296.0;

/// Deepest `K ≤ 64` whose bottom scale `2^{-λ^{K+1}}` keeps `|ln ρ| ≤ 2^32`.
pub fn default_depth(lambda: f64) -> u32 {
    let mut k = 0;
    while k < MAX_DEPTH && lambda.powi(k as i32 + 2) * LN_2 <= LOG_RADIUS_LIMIT {
        k += 1;
    }
    k
}

fn check_depth(depth: u32, min: u32) -> Result<()> {
    if depth < min || depth > MAX_DEPTH {
        return Err(Error::Parameter(format!(
            "ladder depth must lie in [{min}, {MAX_DEPTH}], got {depth}"
        )));
    }
    Ok(())
}

fn t(x: f64) -> Radius {
    Radius::from_ln(x)
}

fn piece(lo: f64, hi: f64, ln_coeff: f64, alpha: f64) -> WeightPiece {
    WeightPiece::power_log(t(lo), t(hi), LogScalar::from_ln(ln_coeff), alpha, 0.0)
}

fn mark(name: &str, index: i64, ln_radius: f64) -> LadderMark {
    LadderMark {
        name: format!("{name}_{index}"),
        index,
        radius: t(ln_radius),
    }
}

pub fn constant(n: u32) -> Result<RadialWeight> {
    power(n, 0.0).map(|w| w.with_label("constant"))
}

/// `w = ρ^alpha` on all of `(0, ∞)`.
pub fn power(n: u32, alpha: f64) -> Result<RadialWeight> {
    let piece = WeightPiece::power_log(Radius::ZERO, Radius::INFINITY, LogScalar::ONE, alpha, 0.0);
    Ok(RadialWeight::new(n, vec![piece], true)?.with_label(format!("power({alpha})")))
}

/// `ρ^{p-n} ln^β(1/ρ)` for `ρ ≤ 1/e`, `ρ^{p-n}` above.
pub fn power_log_at_zero(n: u32, p: f64, beta: f64) -> Result<RadialWeight> {
    let alpha = p - n as f64;
    let pieces = vec![
        WeightPiece::power_log(Radius::ZERO, t(-1.0), LogScalar::ONE, alpha, beta),
        WeightPiece::power_log(t(-1.0), Radius::INFINITY, LogScalar::ONE, alpha, 0.0),
    ];
    let scales = ScaleInfo {
        small_top: t(-1.0),
        ..ScaleInfo::default()
    };
    Ok(RadialWeight::new(n, pieces, true)?
        .with_scales(scales)
        .with_label(format!("powerlog0(p={p}, beta={beta})")))
}

/// `ρ^{p-n}` for `ρ < e`, `ρ^{p-n} ln^β ρ` above.
pub fn power_log_at_infinity(n: u32, p: f64, beta: f64) -> Result<RadialWeight> {
    let alpha = p - n as f64;
    let pieces = vec![
        WeightPiece::power_log(Radius::ZERO, t(1.0), LogScalar::ONE, alpha, 0.0),
        WeightPiece::power_log(t(1.0), Radius::INFINITY, LogScalar::ONE, alpha, beta),
    ];
    Ok(RadialWeight::new(n, pieces, true)?.with_label(format!("powerloginf(p={p}, beta={beta})")))
}

/// `c·ln(shift + ρ)`-type weight with unit coefficient.
pub fn shifted_log(n: u32, shift: f64) -> Result<RadialWeight> {
    let piece = WeightPiece {
        lo: Radius::ZERO,
        hi: Radius::INFINITY,
        coeff: LogScalar::ONE,
        form: PieceForm::ShiftedLog { shift },
    };
    Ok(RadialWeight::new(n, vec![piece], true)?.with_label(format!("log({shift}+rho)")))
}

/// The four-endpoint ladder in the plane: `α_k = 2^{-2^k}`, `β_k = α_k^{3/2}`.
pub fn ex1(depth: Option<u32>) -> Result<RadialWeight> {
    let depth = depth.unwrap_or_else(|| default_depth(2.0));
    check_depth(depth, 1)?;
    let alpha = |k: u32| -(2f64.powi(k as i32)) * LN_2;
    let beta = |k: u32| 1.5 * alpha(k);
    let mut pieces = Vec::new();
    let mut marks = Vec::new();
    for k in (0..=depth).rev() {
        let lo = if k == depth { f64::NEG_INFINITY } else { alpha(k + 1) };
        pieces.push(piece(lo, beta(k), alpha(k + 1), 0.0));
        pieces.push(piece(beta(k), alpha(k), -alpha(k), 2.0));
    }
    pieces.push(piece(alpha(0), f64::INFINITY, 0.0, 1.0));
    for k in 0..=depth + 1 {
        marks.push(mark("alpha", k as i64, alpha(k)));
        if k <= depth {
            marks.push(mark("beta", k as i64, beta(k)));
        }
    }
    let scales = ScaleInfo {
        floor: Some(t(alpha(depth + 1))),
        small_top: t(alpha(0)),
        window_zero: Some((t(alpha(depth + 1)), t(alpha(depth - 1)))),
        marks,
        ..ScaleInfo::default()
    };
    Ok(RadialWeight::new(2, pieces, true)?
        .with_scales(scales)
        .with_label(format!("ex1(depth={depth})")))
}

/// Ladder touching the S-endpoint 3 from one side: `γ_k = α_{k+1} ln k`, `δ_k = α_{k+1} ln² k`.
pub fn ex_s_touch(depth: Option<u32>) -> Result<RadialWeight> {
    let depth = depth.unwrap_or_else(|| default_depth(2.0));
    check_depth(depth, 3)?;
    let alpha = |k: u32| -(2f64.powi(k as i32)) * LN_2;
    let gamma = |k: u32| alpha(k + 1) + (k as f64).ln().ln();
    let delta = |k: u32| alpha(k + 1) + 2.0 * (k as f64).ln().ln();
    let mut pieces = Vec::new();
    let mut marks = Vec::new();
    for k in (3..=depth).rev() {
        let lo = if k == depth { f64::NEG_INFINITY } else { alpha(k + 1) };
        pieces.push(piece(lo, gamma(k), alpha(k + 1), 0.0));
        pieces.push(piece(gamma(k), delta(k), -delta(k), 2.0));
        let hi = if k == 3 { f64::INFINITY } else { alpha(k) };
        pieces.push(piece(delta(k), hi, 0.0, 1.0));
        marks.push(mark("alpha", k as i64 + 1, alpha(k + 1)));
        marks.push(mark("gamma", k as i64, gamma(k)));
        marks.push(mark("delta", k as i64, delta(k)));
    }
    marks.sort_by_key(|m| std::cmp::Reverse(m.radius));
    let scales = ScaleInfo {
        floor: Some(t(alpha(depth + 1))),
        small_top: t(alpha(3)),
        window_zero: Some((t(alpha(depth + 1)), t(alpha(depth - 1)))),
        marks,
        ..ScaleInfo::default()
    };
    Ok(RadialWeight::new(2, pieces, true)?
        .with_scales(scales)
        .with_label(format!("ex-s-touch(depth={depth})")))
}

/// Parameters of the four-exponent ladder; requires `1 < a < b < c < d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abcd {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Abcd {
    pub fn validate(&self) -> Result<()> {
        let Abcd { a, b, c, d } = *self;
        if !(1.0 < a && a < b && b < c && c < d) || !d.is_finite() {
            return Err(Error::Parameter(format!(
                "need 1 < a < b < c < d, got ({a}, {b}, {c}, {d})"
            )));
        }
        Ok(())
    }

    pub fn lambda(&self) -> f64 {
        (self.c - self.a) * (self.d - self.b) / ((self.b - self.a) * (self.d - self.c))
    }
}

/// Ladder with `lQ₀, lS₀, uS₀, uQ₀` endpoints `a, b, c, d`, emitted with its constant tail
/// `α_0` above `α_0`.
pub fn abcd(n: u32, params: Abcd, depth: Option<u32>) -> Result<RadialWeight> {
    params.validate()?;
    let Abcd { a, b, c: _, d } = params;
    let lambda = params.lambda();
    let depth = depth.unwrap_or_else(|| default_depth(lambda));
    check_depth(depth, 1)?;
    let nf = n as f64;
    let alpha = |k: u32| -lambda.powi(k as i32) * LN_2;
    let beta = |k: u32| (d - b) / (d - params.c) * alpha(k);
    let mut pieces = Vec::new();
    let mut marks = Vec::new();
    for k in (0..=depth).rev() {
        let lo = if k == depth { f64::NEG_INFINITY } else { alpha(k + 1) };
        pieces.push(piece(lo, beta(k), (b - a) * alpha(k + 1), a - nf));
        pieces.push(piece(beta(k), alpha(k), (b - d) * alpha(k), d - nf));
    }
    pieces.push(piece(alpha(0), f64::INFINITY, alpha(0), 0.0));
    for k in 0..=depth + 1 {
        marks.push(mark("alpha", k as i64, alpha(k)));
        if k <= depth {
            marks.push(mark("beta", k as i64, beta(k)));
        }
    }
    let scales = ScaleInfo {
        floor: Some(t(alpha(depth + 1))),
        small_top: t(alpha(0)),
        window_zero: Some((t(alpha(depth + 1)), t(alpha(depth - 1)))),
        marks,
        ..ScaleInfo::default()
    };
    let label = format!("abcd({a}, {b}, {}, {d}; depth={depth})", params.c);
    let weight = RadialWeight::new(n, pieces.clone(), false)?;
    let continuous = weight.is_continuous();
    Ok(RadialWeight::new(n, pieces, continuous)?.with_scales(scales).with_label(label))
}

/// Density of `f(r) = a_k r^{n-1}` on `[4^{-k}, 2·4^{-k}]`, `f(r) = r^{n+1}/a_k` on
/// `[2·4^{-k}, 4^{1-k}]`, `a_k = 2·4^{-k}`, generated for `|k| ≤ levels`.
pub fn oscillating(n: u32, levels: Option<u32>) -> Result<RadialWeight> {
    if n < 2 {
        return Err(Error::Parameter(format!("dimension must be at least 2, got {n}")));
    }
    let levels = levels.unwrap_or(OSCILLATING_LEVELS);
    if levels == 0 || levels > 4096 {
        return Err(Error::Parameter(format!("levels must lie in [1, 4096], got {levels}")));
    }
    let nf = n as f64;
    let ln4 = 4f64.ln();
    let ln_omega = sphere_area(n).ln();
    let top = levels as i64;
    let mut pieces = Vec::new();
    for k in (-top..=top).rev() {
        let base = -(k as f64) * ln4;
        let ln_a = LN_2 + base;
        let lo = if k == top { f64::NEG_INFINITY } else { base };
        let hi = if k == -top { f64::INFINITY } else { -((k - 1) as f64) * ln4 };
        pieces.push(piece(lo, base + LN_2, (nf - 1.0).ln() + ln_a - ln_omega, -1.0));
        pieces.push(piece(base + LN_2, hi, (nf + 1.0).ln() - ln_a - ln_omega, 1.0));
    }
    let floor = -(top as f64) * ln4;
    let ceiling = (top as f64 + 1.0) * ln4;
    let scales = ScaleInfo {
        floor: Some(t(floor)),
        ceiling: Some(t(ceiling)),
        window_zero: Some((t(floor), t(floor / 4.0))),
        window_infinity: Some((t(ceiling / 4.0), t(ceiling))),
        ..ScaleInfo::default()
    };
    Ok(RadialWeight::new(n, pieces, false)?
        .with_scales(scales)
        .with_label(format!("oscillating(levels={levels})")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::eval_weight;

    #[test]
    fn default_depths() {
        assert_eq!(default_depth(2.0), 31);
        assert_eq!(default_depth(4.0), 15);
        assert!(default_depth(1.0001) == MAX_DEPTH);
    }

    #[test]
    fn ex1_breakpoints() {
        let w = ex1(Some(4)).unwrap();
        let marks = &w.scales().marks;
        let get = |name: &str| marks.iter().find(|m| m.name == name).unwrap().radius.to_f64();
        assert_eq!(get("alpha_0"), 0.5);
        assert_eq!(get("alpha_1"), 0.25);
        assert!((get("alpha_2") - 1.0 / 16.0).abs() < 1e-17);
        assert!((get("beta_0") - 2f64.powf(-1.5)).abs() < 1e-16);
        assert!(w.continuity_enforced());
        // Piece count: two per level plus the top.
        assert_eq!(w.pieces().len(), 2 * 5 + 1);
    }

    #[test]
    fn abcd_beta_matches_both_formulas() {
        let p = Abcd { a: 2.0, b: 3.0, c: 10.0 / 3.0, d: 4.0 };
        assert!((p.lambda() - 2.0).abs() < 1e-14);
        let w = abcd(2, p, Some(5)).unwrap();
        let marks = &w.scales().marks;
        let ln = |name: &str| marks.iter().find(|m| m.name == name).unwrap().radius.ln();
        for k in 0..=5 {
            let b = ln(&format!("beta_{k}"));
            assert!((b - 1.5 * ln(&format!("alpha_{k}"))).abs() < 1e-12 * b.abs());
            let via_next = (p.b - p.a) / (p.c - p.a) * ln(&format!("alpha_{}", k + 1));
            assert!((b - via_next).abs() < 1e-12 * b.abs());
        }
        // b - n = 1 here, so the constant tail joins continuously.
        assert!(w.continuity_enforced());
        let q = Abcd { a: 1.5, b: 2.0, c: 2.5, d: 3.0 };
        let w = abcd(2, q, None).unwrap();
        assert!(!w.continuity_enforced());
        assert!(abcd(2, Abcd { a: 1.0, b: 2.0, c: 3.0, d: 4.0 }, None).is_err());
        assert!(abcd(2, Abcd { a: 2.0, b: 2.0, c: 3.0, d: 4.0 }, None).is_err());
    }

    #[test]
    fn s_touch_is_continuous_and_starts_at_three() {
        let w = ex_s_touch(Some(8)).unwrap();
        assert!(w.continuity_enforced());
        assert_eq!(w.pieces().len(), 3 * 6);
        assert!(ex_s_touch(Some(2)).is_err());
    }

    #[test]
    fn oscillating_weight_is_comparable_to_one() {
        let w = oscillating(2, Some(8)).unwrap();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..2000 {
            let t = -10.0 + 20.0 * i as f64 / 2000.0;
            let v = eval_weight(&w, Radius::from_ln(t)).to_f64();
            lo = lo.min(v);
            hi = hi.max(v);
        }
        let omega = sphere_area(2);
        // w ranges over [1/ω, 6/ω] for n = 2.
        assert!(lo >= 0.99 / omega && hi <= 6.01 / omega);
    }
}
