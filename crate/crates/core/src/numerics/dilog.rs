use super::zeta::zeta2;
use crate::error::{domain, Result};

/// Dilogarithm `Li₂(z) = Σ z^k / k²` on `[0, 1]`.
///
/// The series is summed directly for `z <= 1/2`; above that the reflection
/// `Li₂(z) + Li₂(1-z) = ζ(2) - ln(z) ln(1-z)` brings the argument back below
/// one half.
pub fn dilog(z: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&z) {
        return domain(format!("dilog needs z in [0, 1], got {z}"));
    }
    if z == 1.0 {
        return Ok(zeta2());
    }
    if z <= 0.5 {
        Ok(series(z))
    } else {
        let w = 1.0 - z;
        Ok(zeta2() - z.ln() * w.ln() - series(w))
    }
}

fn series(z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    let mut terms = Vec::with_capacity(64);
    let mut power = z;
    let mut k = 1.0f64;
    loop {
        let term = power / (k * k);
        terms.push(term);
        if term < 1e-18 * z {
            break;
        }
        power *= z;
        k += 1.0;
    }
    terms.iter().rev().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    // independent oracle: plain series with many terms, no reflection
    fn brute(z: f64) -> f64 {
        (1..=20_000)
            .rev()
            .map(|k| z.powi(k) / (k as f64).powi(2))
            .sum()
    }

    #[test]
    fn fixed_points() {
        assert_eq!(dilog(0.0).unwrap(), 0.0);
        assert!((dilog(1.0).unwrap() - PI * PI / 6.0).abs() < 1e-15);
        let half = PI * PI / 12.0 - LN_2 * LN_2 / 2.0;
        assert!((dilog(0.5).unwrap() - half).abs() < 1e-15);
        assert!((dilog(0.5).unwrap() - 0.5822405265).abs() < 1e-10);
        assert!((brute(0.5) - half).abs() < 1e-15);
    }

    #[test]
    fn matches_brute_series() {
        for z in [0.01, 0.1, 0.3, 0.49, 0.51, 0.7, 0.9, 0.99] {
            assert!((dilog(z).unwrap() - brute(z)).abs() < 1e-14, "z = {z}");
        }
    }

    #[test]
    fn reflection_identity_on_grid() {
        for k in 1..=99 {
            let z = k as f64 / 100.0;
            let lhs = dilog(z).unwrap() + dilog(1.0 - z).unwrap();
            let rhs = PI * PI / 6.0 - z.ln() * (1.0 - z).ln();
            assert!((lhs - rhs).abs() <= 1e-13, "z = {z}");
        }
    }

    #[test]
    fn near_one_is_continuous() {
        let a = dilog(1.0 - 1e-12).unwrap();
        assert!((a - PI * PI / 6.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(dilog(-0.1).is_err());
        assert!(dilog(1.0001).is_err());
        assert!(dilog(f64::NAN).is_err());
    }
}
