//! Capacities checked against antiderivatives written out independently of the library.

use std::f64::consts::PI;

use radcap::capacity::{annulus_capacity, whole_space_capacity};
use radcap::measure::MeasureProfile;
use radcap::weights::{constant, power};
use radcap::Radius;

fn sphere(n: u32) -> f64 {
    match n {
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        4 => 2.0 * PI * PI,
        _ => unreachable!(),
    }
}

/// Unweighted `p`-capacity of `B_R \ B_r` in `R^n`.
fn classical(n: u32, p: f64, r: f64, big_r: f64) -> f64 {
    let nf = n as f64;
    let om = sphere(n);
    if (p - nf).abs() < 1e-15 {
        return om * (big_r / r).ln().powf(1.0 - nf);
    }
    let e = (p - nf) / (p - 1.0);
    om * (((big_r.powf(e) - r.powf(e)) / e).abs()).powf(1.0 - p)
}

#[test]
fn unweighted_space_matches_classical_formula() {
    for n in [2u32, 3, 4] {
        let prof = MeasureProfile::from_weight(constant(n).unwrap()).unwrap();
        for p in [1.5, 2.0, n as f64, n as f64 + 1.0] {
            for &(r, big_r) in &[(1e-3, 2e-3), (0.5, 7.0), (1.0, 1e4), (3e-8, 0.2)] {
                let got = annulus_capacity(&prof, p, Radius::new(r).unwrap(), Radius::new(big_r).unwrap()).unwrap().value.to_f64();
                let want = classical(n, p, r, big_r);
                assert!((got / want - 1.0).abs() < 1e-10, "n={n} p={p} r={r} R={big_r}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn power_weight_matches_antiderivative() {
    // w = ρ^α in the plane: f' = 2π ρ^{1+α}, cap^{1/(1-p)} = ∫ (2π ρ^{1+α})^{1/(1-p)} dρ.
    let (alpha, p) = (0.7, 2.5);
    let prof = MeasureProfile::from_weight(power(2, alpha).unwrap()).unwrap();
    let s = 1.0 / (1.0 - p);
    let e = (1.0 + alpha) * s + 1.0;
    let (r, big_r): (f64, f64) = (0.01, 3.0);
    let integral = (2.0 * PI).powf(s) * (big_r.powf(e) - r.powf(e)) / e;
    let want = integral.powf(1.0 - p);
    let got = annulus_capacity(&prof, p, Radius::new(r).unwrap(), Radius::new(big_r).unwrap()).unwrap().value.to_f64();
    assert!((got / want - 1.0).abs() < 1e-10, "{got} vs {want}");
}

#[test]
fn unit_ball_in_three_space() {
    let prof = MeasureProfile::from_weight(constant(3).unwrap()).unwrap();
    let cap = whole_space_capacity(&prof, 2.0, Radius::ONE).unwrap().value.to_f64();
    assert!((cap - 4.0 * PI).abs() < 1e-9);
}
