use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::LogScalar;
use crate::error::{Error, Result};

/// Change of variable applied before integrating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Substitution {
    Identity,
    /// Integrate in `t = ln ρ`.
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub substitution: Substitution,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-10,
            max_subdivisions: 1 << 20,
            substitution: Substitution::Log,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::Parameter(format!("rel_tol must be positive, got {}", self.rel_tol)));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::Parameter("max_subdivisions must be at least 1".into()));
        }
        Ok(())
    }
}

/// Outcome of a converged quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: LogScalar,
    /// Estimated relative error of `value`.
    pub rel_error: f64,
    pub panels: usize,
}

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1]; odd indices are the Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: LogScalar,
    error: LogScalar,
    splittable: bool,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.splittable
            .cmp(&other.splittable)
            .then(self.error.cmp(&other.error))
            .then(other.a.total_cmp(&self.a))
    }
}

fn gauss_kronrod<F: Fn(f64) -> LogScalar>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut logs = [f64::NEG_INFINITY; 15];
    for i in 0..7 {
        logs[2 * i] = f(center - half * XGK[i]).ln();
        logs[2 * i + 1] = f(center + half * XGK[i]).ln();
    }
    logs[14] = f(center).ln();
    let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let splittable = center - half * XGK[0] > a && center + half * XGK[0] < b && half > 0.0;
    if peak == f64::NEG_INFINITY || peak.is_nan() {
        let value = if peak.is_nan() {
            LogScalar::from_ln(f64::NAN)
        } else {
            LogScalar::ZERO
        };
        return Panel {
            a,
            b,
            value,
            error: LogScalar::ZERO,
            splittable,
        };
    }
    let mut kronrod = WGK[7] * (logs[14] - peak).exp();
    let mut gauss = WG[3] * (logs[14] - peak).exp();
    for i in 0..7 {
        let pair = (logs[2 * i] - peak).exp() + (logs[2 * i + 1] - peak).exp();
        kronrod += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    let scale = peak + half.ln();
    Panel {
        a,
        b,
        value: LogScalar::from_ln(scale + kronrod.ln()),
        error: LogScalar::from_ln(scale + (kronrod - gauss).abs().ln()),
        splittable,
    }
}

/// Adaptive Gauss-Kronrod integration of a nonnegative integrand over a finite interval,
/// split at every interior breakpoint. The integrand is evaluated in the variable it is
/// written in; no substitution is applied here.
pub fn integrate_plain<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec, breakpoints: &[f64]) -> Result<Integral>
where
    F: Fn(f64) -> LogScalar,
{
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Unsupported(
            "quadrature needs finite limits; infinite ranges require a closed-form tail".into(),
        ));
    }
    if a == b {
        return Ok(Integral {
            value: LogScalar::ZERO,
            rel_error: 0.0,
            panels: 0,
        });
    }
    if a > b {
        return Err(Error::Parameter(format!("lower limit {a} exceeds upper limit {b}")));
    }
    let mut cuts: Vec<f64> = breakpoints.iter().copied().filter(|&x| x > a && x < b).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(a);
    edges.extend(cuts);
    edges.push(b);

    let mut heap = BinaryHeap::new();
    for w in edges.windows(2) {
        heap.push(gauss_kronrod(&f, w[0], w[1]));
    }
    let mut count = heap.len();
    loop {
        let (total, error) = totals(heap.iter());
        if total.log_mag().is_nan() {
            return Err(Error::Domain("integrand produced NaN".into()));
        }
        let rel = relative(error, total);
        let worst = *heap.peek().expect("non-empty heap");
        if rel <= spec.rel_tol || !worst.splittable {
            return Ok(Integral {
                value: total,
                rel_error: rel,
                panels: count,
            });
        }
        if count >= spec.max_subdivisions {
            return Err(Error::Accuracy {
                estimate: total,
                error_bound: rel,
            });
        }
        // Split the worst panels in batches to amortise the total recomputation.
        let batch = (heap.len() / 8).clamp(1, 64);
        for _ in 0..batch {
            let Some(top) = heap.pop() else { break };
            if !top.splittable {
                heap.push(top);
                break;
            }
            let mid = 0.5 * (top.a + top.b);
            heap.push(gauss_kronrod(&f, top.a, mid));
            heap.push(gauss_kronrod(&f, mid, top.b));
            count += 1;
        }
    }
}

fn totals<'a, I: Iterator<Item = &'a Panel>>(panels: I) -> (LogScalar, LogScalar) {
    let mut values: Vec<(f64, f64, LogScalar, LogScalar)> =
        panels.map(|p| (p.a, p.b, p.value, p.error)).collect();
    values.sort_by(|x, y| x.0.total_cmp(&y.0));
    let total = values.iter().map(|v| v.2).sum();
    let error = values.iter().map(|v| v.3).sum();
    (total, error)
}

fn relative(error: LogScalar, total: LogScalar) -> f64 {
    if error.is_zero() {
        0.0
    } else if total.is_zero() {
        f64::INFINITY
    } else {
        (error.log_mag() - total.log_mag()).exp()
    }
}

/// Integral of a nonnegative integrand `ρ ↦ f(ρ)` over `[lo, hi]`, by default in `t = ln ρ`.
pub fn integrate<F>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec, breakpoints: &[f64]) -> Result<Integral>
where
    F: Fn(f64) -> LogScalar,
{
    if hi == f64::INFINITY {
        return Err(Error::Unsupported(
            "infinite upper limit requires a closed-form tail".into(),
        ));
    }
    match spec.substitution {
        Substitution::Identity => integrate_plain(f, lo, hi, spec, breakpoints),
        Substitution::Log => {
            if !(lo > 0.0) {
                return Err(Error::Parameter(format!(
                    "log substitution needs a positive lower limit, got {lo}"
                )));
            }
            let cuts: Vec<f64> = breakpoints.iter().filter(|&&x| x > 0.0).map(|x| x.ln()).collect();
            integrate_plain(
                |t| f(t.exp()) * LogScalar::from_ln(t),
                lo.ln(),
                hi.ln(),
                spec,
                &cuts,
            )
        }
    }
}
