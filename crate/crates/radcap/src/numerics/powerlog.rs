//! Integrals of `exp(c + a·t)·|t|^δ dt`, the shape every power-log piece takes after the
//! substitution `t = ln ρ`.

use serde::{Deserialize, Serialize};

use super::{integrate_plain, LogScalar, QuadratureSpec, Sign};
use crate::error::{Error, Result};

/// How an integral was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    Mixed,
}

impl Method {
    pub fn combine(self, other: Method) -> Method {
        if self == other {
            self
        } else {
            Method::Mixed
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed-form",
            Method::Quadrature => "quadrature",
            Method::Mixed => "mixed",
        }
    }
}

/// Policy for a limit at `t = ±∞` when no antiderivative is available.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    /// Only closed forms may evaluate an infinite range.
    ClosedFormOnly,
    /// Truncate the exponentially decaying tail and add a rigorous bound to the error.
    Truncate,
}

/// The integrand `exp(log_coeff + a·t)·|t|^delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLogTerm {
    pub log_coeff: f64,
    pub a: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TermIntegral {
    /// `POS_INF` when the integral diverges.
    pub value: LogScalar,
    pub method: Method,
    pub rel_error: f64,
}

impl TermIntegral {
    fn closed(log_value: f64) -> TermIntegral {
        TermIntegral {
            value: LogScalar::from_ln(log_value),
            method: Method::ClosedForm,
            rel_error: 8.0 * f64::EPSILON,
        }
    }

    fn divergent() -> TermIntegral {
        TermIntegral {
            value: LogScalar::POS_INF,
            method: Method::ClosedForm,
            rel_error: 0.0,
        }
    }

    pub fn diverges(&self) -> bool {
        self.value.is_infinite()
    }
}

const MAX_INTEGER_POWER: f64 = 40.0;

/// `ln(1 - e^x)` for `x ≤ 0`.
fn ln_one_minus_exp(x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        0.0
    } else {
        (-x.exp_m1()).ln()
    }
}

impl PowerLogTerm {
    pub fn eval_ln(&self, t: f64) -> f64 {
        let log_part = if self.delta == 0.0 {
            0.0
        } else {
            self.delta * t.abs().ln()
        };
        self.log_coeff + self.a * t + log_part
    }

    /// `∫_{t1}^{t2}` of the term. Infinite limits are allowed; divergence yields `POS_INF`.
    pub fn integrate(&self, t1: f64, t2: f64, tail: Tail, spec: &QuadratureSpec) -> Result<TermIntegral> {
        if t1.is_nan() || t2.is_nan() || t1 > t2 {
            return Err(Error::Parameter(format!("bad interval [{t1}, {t2}]")));
        }
        if t1 == t2 {
            return Ok(TermIntegral {
                value: LogScalar::ZERO,
                method: Method::ClosedForm,
                rel_error: 0.0,
            });
        }
        if self.delta != 0.0 && t1 < 0.0 && t2 > 0.0 {
            return Err(Error::Domain(
                "log-power integrand across t = 0 (ρ = 1)".into(),
            ));
        }
        let shifted = |value: TermIntegral| TermIntegral {
            value: value.value * LogScalar::from_ln(self.log_coeff),
            ..value
        };
        if self.delta == 0.0 {
            return Ok(shifted(self.exponential(t1, t2)));
        }
        if self.a == 0.0 {
            return Ok(shifted(self.pure_log(t1, t2)));
        }
        if self.delta > 0.0 && self.delta.fract() == 0.0 && self.delta <= MAX_INTEGER_POWER {
            if let Some(found) = self.by_parts(t1, t2) {
                return Ok(shifted(found));
            }
        }
        self.numeric(t1, t2, tail, spec)
    }

    fn exponential(&self, t1: f64, t2: f64) -> TermIntegral {
        let a = self.a;
        if a == 0.0 {
            let len = t2 - t1;
            return if len.is_finite() {
                TermIntegral::closed(len.ln())
            } else {
                TermIntegral::divergent()
            };
        }
        if a > 0.0 {
            if t2 == f64::INFINITY {
                return TermIntegral::divergent();
            }
            TermIntegral::closed(a * t2 + ln_one_minus_exp(-a * (t2 - t1)) - a.ln())
        } else {
            if t1 == f64::NEG_INFINITY {
                return TermIntegral::divergent();
            }
            TermIntegral::closed(a * t1 + ln_one_minus_exp(a * (t2 - t1)) - (-a).ln())
        }
    }

    fn pure_log(&self, t1: f64, t2: f64) -> TermIntegral {
        let (u_lo, u_hi) = if t2 <= 0.0 { (-t2, -t1) } else { (t1, t2) };
        let e = self.delta + 1.0;
        if u_lo == 0.0 && e <= 0.0 {
            return TermIntegral::divergent();
        }
        if e == 0.0 {
            if u_hi == f64::INFINITY {
                return TermIntegral::divergent();
            }
            return TermIntegral::closed(((u_hi - u_lo) / u_lo).ln_1p().ln());
        }
        if e > 0.0 {
            if u_hi == f64::INFINITY {
                return TermIntegral::divergent();
            }
            let ratio_ln = if u_lo == 0.0 {
                f64::NEG_INFINITY
            } else {
                ((u_lo - u_hi) / u_hi).ln_1p()
            };
            TermIntegral::closed(e * u_hi.ln() + ln_one_minus_exp(e * ratio_ln) - e.ln())
        } else {
            let ratio_ln = if u_hi == f64::INFINITY {
                f64::INFINITY
            } else {
                ((u_hi - u_lo) / u_lo).ln_1p()
            };
            TermIntegral::closed(e * u_lo.ln() + ln_one_minus_exp(e * ratio_ln) - (-e).ln())
        }
    }

    /// Antiderivative `e^{at} Σ_j (-1)^j m!/(m-j)! t^{m-j} / a^{j+1}` of `e^{at} t^m`.
    fn by_parts(&self, t1: f64, t2: f64) -> Option<TermIntegral> {
        let m = self.delta as u32;
        let a = self.a;
        let side = if t2 <= 0.0 { -1.0 } else { 1.0 };
        let antiderivative = |t: f64| -> Option<(LogScalar, f64)> {
            if t.is_infinite() {
                // The exponential wins at the decaying end only.
                return if (t > 0.0) == (a < 0.0) { Some((LogScalar::ZERO, f64::NEG_INFINITY)) } else { None };
            }
            let mut acc = LogScalar::ZERO;
            let mut biggest = f64::NEG_INFINITY;
            let mut falling = 0.0f64; // ln(m!/(m-j)!)
            for j in 0..=m {
                if j > 0 {
                    falling += ((m - j + 1) as f64).ln();
                }
                let power = m - j;
                if power > 0 && t == 0.0 {
                    continue;
                }
                let log_mag = a * t + falling + power as f64 * t.abs().ln() - (j + 1) as f64 * a.abs().ln();
                let mut negative = j % 2 == 1;
                if t < 0.0 && power % 2 == 1 {
                    negative = !negative;
                }
                if a < 0.0 && (j + 1) % 2 == 1 {
                    negative = !negative;
                }
                let sign = if negative { Sign::Negative } else { Sign::Positive };
                biggest = biggest.max(log_mag);
                acc = acc + LogScalar::from_parts(sign, log_mag);
            }
            Some((acc, biggest))
        };
        let (upper, big_u) = antiderivative(t2)?;
        let (lower, big_l) = antiderivative(t1)?;
        let mut result = upper - lower;
        if side < 0.0 && m % 2 == 1 {
            result = -result;
        }
        let biggest = big_u.max(big_l);
        // Cancellation guard: fall back to quadrature when more than ~9 digits are lost.
        if !result.is_positive() || result.log_mag() < biggest - 20.0 {
            return None;
        }
        let lost = (biggest - result.log_mag()).exp();
        Some(TermIntegral {
            value: result,
            method: Method::ClosedForm,
            rel_error: 8.0 * f64::EPSILON * (m as f64 + 1.0) * lost.max(1.0),
        })
    }

    fn numeric(&self, t1: f64, t2: f64, tail: Tail, spec: &QuadratureSpec) -> Result<TermIntegral> {
        let a = self.a;
        let delta = self.delta;
        if t1.is_finite() && t2.is_finite() {
            // Anchor at t2 so node offsets keep full precision at huge |t|.
            let integral = integrate_plain(
                |u| LogScalar::from_ln(a * u + delta * (t2 + u).abs().ln()),
                t1 - t2,
                0.0,
                spec,
                &[],
            )?;
            return Ok(TermIntegral {
                value: integral.value * LogScalar::from_ln(self.log_coeff + a * t2),
                method: Method::Quadrature,
                rel_error: integral.rel_error,
            });
        }
        if t1.is_infinite() && t2.is_infinite() {
            return Err(Error::Unsupported("doubly infinite log-power integral".into()));
        }
        let (anchor, decay) = if t1 == f64::NEG_INFINITY { (t2, a) } else { (t1, -a) };
        if decay <= 0.0 {
            return Ok(TermIntegral::divergent());
        }
        if tail == Tail::ClosedFormOnly {
            return Err(Error::Unsupported(format!(
                "no closed-form tail for exp({a}·t)·|t|^{delta}; improper integral not evaluated numerically"
            )));
        }
        let offset = anchor.abs();
        let j = decaying_tail(decay, offset, delta, spec)?;
        Ok(TermIntegral {
            value: j.value * LogScalar::from_ln(self.log_coeff + a * anchor),
            method: Method::Quadrature,
            rel_error: j.rel_error,
        })
    }
}

/// `∫_0^∞ e^{-b u} (t0 + u)^δ du` for `b > 0`, `t0 > 0`: quadrature on `[0, U]` plus a bound
/// on the remainder.
fn decaying_tail(b: f64, t0: f64, delta: f64, spec: &QuadratureSpec) -> Result<TermIntegral> {
    let ln_remainder = |u: f64| -> f64 {
        let base = t0 + u;
        let rate = b - delta.max(0.0) / base;
        if rate <= 0.0 {
            f64::INFINITY
        } else {
            delta * base.ln() - b * u - rate.ln()
        }
    };
    let mut cut = 40.0 / b;
    let mut head = integrate_plain(
        |u| LogScalar::from_ln(-b * u + delta * (t0 + u).ln()),
        0.0,
        cut,
        spec,
        &[],
    )?;
    for _ in 0..64 {
        let ratio = (ln_remainder(cut) - head.value.log_mag()).exp();
        if ratio <= 1e-3 * spec.rel_tol {
            let remainder = LogScalar::from_ln(ln_remainder(cut));
            return Ok(TermIntegral {
                value: head.value + remainder * LogScalar::from_f64(0.5),
                method: Method::Quadrature,
                rel_error: head.rel_error + ratio,
            });
        }
        let extra = integrate_plain(
            |u| LogScalar::from_ln(-b * u + delta * (t0 + u).ln()),
            cut,
            2.0 * cut,
            spec,
            &[],
        )?;
        head = super::Integral {
            value: head.value + extra.value,
            rel_error: head.rel_error.max(extra.rel_error),
            panels: head.panels + extra.panels,
        };
        cut *= 2.0;
    }
    Err(Error::Accuracy {
        estimate: head.value,
        error_bound: f64::INFINITY,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn quad(term: PowerLogTerm, t1: f64, t2: f64) -> f64 {
        integrate_plain(|t| LogScalar::from_ln(term.eval_ln(t)), t1, t2, &spec(), &[])
            .unwrap()
            .value
            .log_mag()
    }

    fn check(term: PowerLogTerm, t1: f64, t2: f64) {
        let closed = term.integrate(t1, t2, Tail::ClosedFormOnly, &spec()).unwrap();
        let numeric = quad(term, t1, t2);
        assert!(
            (closed.value.log_mag() - numeric).abs() < 1e-9,
            "{term:?} on [{t1}, {t2}]: {} vs {numeric}",
            closed.value.log_mag()
        );
    }

    #[test]
    fn exponential_cases() {
        check(PowerLogTerm { log_coeff: 0.3, a: 2.0, delta: 0.0 }, -3.0, 1.5);
        check(PowerLogTerm { log_coeff: 0.0, a: -1.5, delta: 0.0 }, -2.0, 4.0);
        check(PowerLogTerm { log_coeff: 0.0, a: 0.0, delta: 0.0 }, -2.0, 4.0);
    }

    #[test]
    fn pure_log_cases() {
        for delta in [-2.5, -1.0, -0.5, 0.7, 3.0] {
            check(PowerLogTerm { log_coeff: 0.0, a: 0.0, delta }, -9.0, -1.5);
            check(PowerLogTerm { log_coeff: 0.0, a: 0.0, delta }, 0.5, 7.0);
        }
    }

    #[test]
    fn integer_powers_by_parts() {
        for m in [1.0, 2.0, 5.0] {
            check(PowerLogTerm { log_coeff: 0.0, a: 1.5, delta: m }, -12.0, -1.0);
            check(PowerLogTerm { log_coeff: 0.0, a: -0.5, delta: m }, 1.0, 9.0);
            check(PowerLogTerm { log_coeff: 0.0, a: 2.0, delta: m }, 1.0, 3.0);
        }
    }

    #[test]
    fn lower_tail_closed_forms() {
        let t = PowerLogTerm { log_coeff: 0.0, a: 2.0, delta: 0.0 };
        let v = t.integrate(f64::NEG_INFINITY, -1.0, Tail::ClosedFormOnly, &spec()).unwrap();
        assert!((v.value.log_mag() - (-2.0 - 2f64.ln())).abs() < 1e-14);
        let t = PowerLogTerm { log_coeff: 0.0, a: 0.0, delta: -3.0 };
        let v = t.integrate(f64::NEG_INFINITY, -2.0, Tail::ClosedFormOnly, &spec()).unwrap();
        assert!((v.value.to_f64() - 0.125).abs() < 1e-15);
        let t = PowerLogTerm { log_coeff: 0.0, a: 0.0, delta: -0.5 };
        assert!(t.integrate(f64::NEG_INFINITY, -2.0, Tail::ClosedFormOnly, &spec()).unwrap().diverges());
        // ∫_{-∞}^{-1} e^{t} t^2 dt = 5/e
        let t = PowerLogTerm { log_coeff: 0.0, a: 1.0, delta: 2.0 };
        let v = t.integrate(f64::NEG_INFINITY, -1.0, Tail::ClosedFormOnly, &spec()).unwrap();
        assert!((v.value.to_f64() - 5.0 / std::f64::consts::E).abs() < 1e-14);
    }

    #[test]
    fn truncated_tail_matches_exponential_integral() {
        // ∫_{-∞}^{-1} e^{t}/|t| dt = E1(1) = 0.21938393439552...
        let t = PowerLogTerm { log_coeff: 0.0, a: 1.0, delta: -1.0 };
        assert!(t.integrate(f64::NEG_INFINITY, -1.0, Tail::ClosedFormOnly, &spec()).is_err());
        let v = t.integrate(f64::NEG_INFINITY, -1.0, Tail::Truncate, &spec()).unwrap();
        assert!((v.value.to_f64() - 0.219_383_934_395_520_3).abs() < 1e-11);
        assert_eq!(v.method, Method::Quadrature);
    }

    #[test]
    fn huge_scales_keep_precision() {
        // ∫_{T-1}^{T} e^{2t} dt with T = -1e9, relative to e^{2T}.
        let t = PowerLogTerm { log_coeff: 0.0, a: 2.0, delta: 0.5 };
        let anchor = -1e9;
        let v = t.integrate(anchor - 1.0, anchor, Tail::ClosedFormOnly, &spec()).unwrap();
        let expected = 2.0 * anchor + 0.5 * 1e9f64.ln() + ((1.0 - (-2f64).exp()) / 2.0).ln();
        assert!((v.value.log_mag() - expected).abs() < 1e-8);
    }
}
