//! Log-domain scalars and quadrature.

mod logscalar;
mod powerlog;
mod quadrature;

pub use logscalar::{LogScalar, Sign};
pub use powerlog::{Method, PowerLogTerm, Tail, TermIntegral};
pub use quadrature::{integrate, integrate_plain, Integral, QuadratureSpec, Substitution};

/// Surface area of the unit `(n-1)`-sphere, `2π^{n/2}/Γ(n/2)`.
pub fn sphere_area(n: u32) -> f64 {
    assert!(n >= 1, "sphere_area needs n >= 1");
    // ω_{n+1} = 2π ω_{n-1} / n, seeded by ω_0 = 2 (n = 1) and ω_1 = 2π (n = 2).
    let mut area = if n % 2 == 1 { 2.0 } else { 2.0 * std::f64::consts::PI };
    let mut k = if n % 2 == 1 { 1 } else { 2 };
    while k < n {
        area *= 2.0 * std::f64::consts::PI / k as f64;
        k += 2;
    }
    area
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-15);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn slope_of_a_line() {
        let xs = [1.0, 2.0, 3.0, 5.0];
        let ys: Vec<f64> = xs.iter().map(|x| 0.5 * x - 2.0).collect();
        assert!((ls_slope(&xs, &ys) - 0.5).abs() < 1e-15);
    }
}
