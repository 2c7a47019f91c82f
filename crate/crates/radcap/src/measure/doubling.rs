use serde::Serialize;

use super::MeasureProfile;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::radius::Radius;

const REVERSE_FACTORS: [f64; 4] = [2.0, 4.0, 8.0, 16.0];
/// `inf f(τr)/f(r)` must exceed this for reverse doubling to be reported.
const REVERSE_MARGIN: f64 = 1.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DoublingReport {
    /// `max f(2r)/f(r)` over the samples.
    pub doubling_const: f64,
    /// First `(τ, γ)` with `f(τr) ≥ γ f(r)` on every sample and `γ > 1.05`.
    pub reverse_doubling: Option<(f64, f64)>,
    pub sample_range: (Radius, Radius),
}

/// Doubling diagnostics on a geometric grid over `[r_min, r_max]`.
pub fn doubling_scan(profile: &MeasureProfile, r_min: Radius, r_max: Radius, samples: usize, exec: Execution) -> Result<DoublingReport> {
    let grid = Radius::geometric_grid(r_min, r_max, samples)?;
    let ln_ratio = |tau: f64| -> Result<Vec<f64>> {
        let lt = tau.ln();
        exec.try_map(&grid, |r| Ok::<f64, Error>(profile.ln_ball_measure(r.ln() + lt)? - profile.ln_ball_measure(r.ln())?))
    };
    let doubling = ln_ratio(2.0)?;
    let doubling_const = doubling.iter().copied().fold(f64::NEG_INFINITY, f64::max).exp();
    let mut reverse_doubling = None;
    for tau in REVERSE_FACTORS {
        let worst = if tau == 2.0 { doubling.clone() } else { ln_ratio(tau)? };
        let gamma = worst.iter().copied().fold(f64::INFINITY, f64::min).exp();
        if gamma > REVERSE_MARGIN {
            reverse_doubling = Some((tau, gamma));
            break;
        }
    }
    Ok(DoublingReport {
        doubling_const,
        reverse_doubling,
        sample_range: (r_min, r_max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::{constant, ex1};

    #[test]
    fn plane_doubles_by_four() {
        let p = MeasureProfile::from_weight(constant(2).unwrap()).unwrap();
        let rep = doubling_scan(&p, Radius::new(1e-3).unwrap(), Radius::new(1e3).unwrap(), 64, Execution::Sequential).unwrap();
        assert!((rep.doubling_const - 4.0).abs() < 1e-12);
        assert_eq!(rep.reverse_doubling.map(|r| r.0), Some(2.0));
    }

    #[test]
    fn ex1_and_cantor_are_doubling() {
        let p = MeasureProfile::from_weight(ex1(Some(8)).unwrap()).unwrap();
        let rep = doubling_scan(&p, Radius::from_ln(-200.0), Radius::from_ln(2.0), 2000, Execution::Parallel).unwrap();
        assert!(rep.doubling_const <= 16.0 + 1e-9 && rep.doubling_const >= 4.0, "{rep:?}");
        let c = MeasureProfile::cantor(20).unwrap();
        let rep = doubling_scan(&c, Radius::new(1e-8).unwrap(), Radius::new(0.4).unwrap(), 4000, Execution::Parallel).unwrap();
        assert!(rep.doubling_const <= 4.0 + 1e-12, "{rep:?}");
    }
}
