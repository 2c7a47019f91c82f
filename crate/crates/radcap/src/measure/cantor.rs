//! The Cantor staircase, evaluated lazily from ternary digits.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::radius::Radius;
use crate::weights::{LadderMark, ScaleInfo};

pub const CANTOR_MAX_DEPTH: u32 = 40;
pub const CANTOR_DEFAULT_DEPTH: u32 = 40;

pub(super) fn check_depth(depth: u32) -> Result<()> {
    if !(1..=CANTOR_MAX_DEPTH).contains(&depth) {
        return Err(Error::Parameter(format!(
            "Cantor depth must lie in [1, {CANTOR_MAX_DEPTH}], got {depth}"
        )));
    }
    Ok(())
}

/// Sample radii stay in the upper quarter of the resolved levels, where `ln f / ln r` is
/// within about `ln 2 / (m ln 3)` of the dimension.
pub(super) fn scales(depth: u32) -> ScaleInfo {
    let ln3 = 3f64.ln();
    let floor = Radius::from_ln(-(depth as f64) * ln3);
    let top = Radius::from_ln(-((depth as f64 * 0.75).ceil().min(depth as f64 - 1.0).max(1.0)) * ln3);
    ScaleInfo {
        floor: Some(floor),
        small_top: Radius::ONE,
        window_zero: Some((floor, top)),
        marks: (0..=depth as i64)
            .rev()
            .map(|k| LadderMark {
                name: format!("third_{k}"),
                index: k,
                radius: Radius::from_ln(-(k as f64) * ln3),
            })
            .collect(),
        ..ScaleInfo::default()
    }
}

/// Level-`depth` staircase on `[0, 1]`: exact on removed intervals, linear on the surviving
/// intervals of the last level.
fn staircase(mut x: f64, depth: u32) -> f64 {
    let mut base = 0.0;
    let mut scale = 1.0;
    for _ in 0..depth {
        if x < 1.0 / 3.0 {
            x *= 3.0;
        } else if x <= 2.0 / 3.0 {
            return base + 0.5 * scale;
        } else {
            base += 0.5 * scale;
            x = 3.0 * x - 2.0;
        }
        scale *= 0.5;
    }
    base + scale * x.clamp(0.0, 1.0)
}

/// `ln F(e^t)`; leading ternary zeros are peeled off in log form so tiny radii stay exact.
pub(super) fn ln_staircase(t: f64, depth: u32) -> f64 {
    if t >= 0.0 {
        return 0.0;
    }
    let ln3 = 3f64.ln();
    let m = ((-t / ln3).floor() as u32).min(depth);
    if m == depth {
        return -(depth as f64) * LN_2 + t + depth as f64 * ln3;
    }
    let x = (t + m as f64 * ln3).exp();
    -(m as f64) * LN_2 + staircase(x, depth - m).ln()
}
