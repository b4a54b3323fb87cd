//! The Lévy measure `ν(dx) = e^{-x}/(1-e^{-x}) dx`, its moments, and the
//! stationary overshoot law `χ` with `P(χ > y) = ζ(2)^{-1} ∫_y^∞ ν((x,∞)) dx`.

use rand_distr::{Beta, Distribution};
use rayon::prelude::*;

use crate::chain::McEstimate;
use crate::composition::TruncatedJumps;
use crate::error::{domain, Result};
use crate::numerics::{dilog, integrate, QuadratureSpec, RngStream, ZetaConstants};

/// `e^{-x}/(1-e^{-x}) = 1/(e^x - 1)`; no domain check.
#[inline]
pub(crate) fn nu_density_unchecked(x: f64) -> f64 {
    1.0 / x.exp_m1()
}

/// `ν((x,∞)) = -ln(1 - e^{-x})`; no domain check.
#[inline]
pub(crate) fn nu_tail_unchecked(x: f64) -> f64 {
    if x < std::f64::consts::LN_2 {
        -(-(-x).exp_m1()).ln()
    } else {
        -(-(-x).exp()).ln_1p()
    }
}

pub fn nu_density(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("ν density needs x > 0, got {x}"));
    }
    Ok(nu_density_unchecked(x))
}

pub fn nu_tail(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("ν tail needs x > 0, got {x}"));
    }
    Ok(nu_tail_unchecked(x))
}

/// `∫_x^∞ ν(dt)` by quadrature of the density.
pub fn nu_tail_quadrature(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return domain(format!("ν tail needs x > 0, got {x}"));
    }
    integrate(
        nu_density_unchecked,
        x,
        f64::INFINITY,
        &QuadratureSpec::default(),
    )
}

/// The Lévy measure of the subordinator (zero drift, no killing).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HarmonicLevyMeasure;

impl HarmonicLevyMeasure {
    pub fn density(&self, x: f64) -> Result<f64> {
        nu_density(x)
    }

    pub fn tail(&self, x: f64) -> Result<f64> {
        nu_tail(x)
    }

    /// Mass above the truncation level, i.e. the jump rate `m_ε`.
    pub fn truncated_mass(&self, epsilon: f64) -> Result<f64> {
        nu_tail(epsilon)
    }

    /// `∫_ε^∞ x ν(dx)`.
    pub fn truncated_first_moment(&self, epsilon: f64) -> Result<f64> {
        if !(epsilon > 0.0) {
            return domain("truncation level must be positive");
        }
        integrate(
            |x| x * nu_density_unchecked(x),
            epsilon,
            f64::INFINITY,
            &QuadratureSpec::default(),
        )
    }
}

/// `∫_0^∞ x^r ν(dx)` by quadrature, next to its closed form `r! ζ(r+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub quadrature: f64,
    pub closed_form: f64,
}

impl Comparison {
    pub fn abs_error(&self) -> f64 {
        (self.quadrature - self.closed_form).abs()
    }

    pub fn rel_error(&self) -> f64 {
        self.abs_error() / self.closed_form.abs()
    }
}

pub fn hurwitz_moment(r: u32) -> Result<Comparison> {
    let zeta = ZetaConstants::get();
    let closed_form = match r {
        1 => zeta.zeta2,
        2 => 2.0 * zeta.zeta3,
        3 => 6.0 * zeta.zeta4,
        _ => return domain(format!("hurwitz_moment supports r in 1..=3, got {r}")),
    };
    let quadrature = integrate(
        // x^r / (e^x - 1) -> 1 at the origin when r = 1
        |x: f64| {
            if x <= 0.0 {
                if r == 1 {
                    1.0
                } else {
                    0.0
                }
            } else {
                x.powi(r as i32) * nu_density_unchecked(x)
            }
        },
        0.0,
        f64::INFINITY,
        &QuadratureSpec::default(),
    )?;
    Ok(Comparison {
        quadrature,
        closed_form,
    })
}

// ν((x,∞)) clamped away from the log singularity at the origin
fn nu_tail_clamped(x: f64) -> f64 {
    nu_tail_unchecked(x.max(f64::MIN_POSITIVE))
}

/// The stationary overshoot law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiDistribution {
    pub zeta2: f64,
}

impl Default for ChiDistribution {
    fn default() -> Self {
        Self {
            zeta2: ZetaConstants::get().zeta2,
        }
    }
}

const QUANTILE_TOL: f64 = 1e-10;

impl ChiDistribution {
    /// `P(χ > y) = Li₂(e^{-y}) / ζ(2)`.
    pub fn tail(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) {
            return domain(format!("χ tail needs y >= 0, got {y}"));
        }
        Ok(dilog((-y).exp())? / self.zeta2)
    }

    pub fn cdf(&self, y: f64) -> Result<f64> {
        Ok(1.0 - self.tail(y)?)
    }

    /// `ν((y,∞)) / ζ(2)`.
    pub fn density(&self, y: f64) -> Result<f64> {
        Ok(nu_tail(y)? / self.zeta2)
    }

    /// `ζ(2)^{-1} ∫_y^∞ ν((x,∞)) dx` by direct quadrature.
    pub fn tail_quadrature(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) {
            return domain(format!("χ tail needs y >= 0, got {y}"));
        }
        Ok(integrate(
            nu_tail_clamped,
            y,
            f64::INFINITY,
            &QuadratureSpec::default(),
        )? / self.zeta2)
    }

    /// `E[χ] = ζ(3)/ζ(2)`.
    pub fn mean(&self) -> f64 {
        ZetaConstants::get().zeta3 / self.zeta2
    }

    /// `E[e^{-iχ}]` by quadrature of `ζ(2)^{-1} ∫_0^∞ e^{-iy} ν((y,∞)) dy`,
    /// next to the closed form `h_i / (ζ(2) i)`.
    pub fn laplace(&self, i: u64) -> Result<Comparison> {
        if i == 0 {
            return domain("χ Laplace transform needs i >= 1");
        }
        let s = i as f64;
        let quadrature = integrate(
            |y: f64| (-s * y).exp() * nu_tail_clamped(y),
            0.0,
            f64::INFINITY,
            &QuadratureSpec::default(),
        )? / self.zeta2;
        let closed_form = crate::numerics::harmonic(i)? / (self.zeta2 * s);
        Ok(Comparison {
            quadrature,
            closed_form,
        })
    }

    /// The `y` with `P(χ > y) = u`, by bisection to `1e-10` in `y`.
    pub fn quantile_tail(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u <= 1.0) {
            return domain(format!("tail level must lie in (0, 1], got {u}"));
        }
        if u == 1.0 {
            return Ok(0.0);
        }
        let tail = |y: f64| dilog((-y).exp()).expect("e^{-y} in [0, 1]") / self.zeta2;
        let mut lo = 0.0;
        let mut hi = 1.0;
        while tail(hi) > u {
            lo = hi;
            hi *= 2.0;
        }
        while hi - lo > QUANTILE_TOL {
            let mid = 0.5 * (lo + hi);
            if tail(mid) > u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Inverse-transform sample.
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        self.quantile_tail(rng.uniform_pos()).expect("u in (0, 1]")
    }
}

pub fn chi_tail(y: f64) -> Result<f64> {
    ChiDistribution::default().tail(y)
}

pub fn chi_laplace(i: u64) -> Result<Comparison> {
    ChiDistribution::default().laplace(i)
}

pub fn chi_sample(rng: &mut RngStream) -> f64 {
    ChiDistribution::default().sample(rng)
}

/// `reps` draws of `χ`; draw `r` uses stream `(seed, r)`.
pub fn chi_samples(reps: usize, seed: u64) -> Vec<f64> {
    let chi = ChiDistribution::default();
    (0..reps as u64)
        .into_par_iter()
        .map(|r| chi.sample(&mut RngStream::new(seed, r)))
        .collect()
}

/// First-passage overshoots `S(S^←(t)) - t` of the truncated subordinator.
#[derive(Debug, Clone, PartialEq)]
pub struct OvershootEstimate {
    pub level: f64,
    pub samples: Vec<f64>,
    pub epsilon: f64,
}

impl OvershootEstimate {
    pub fn empirical_tail(&self, y: f64) -> f64 {
        self.samples.iter().filter(|&&s| s > y).count() as f64 / self.samples.len() as f64
    }
}

pub fn overshoot_mc(t: f64, epsilon: f64, reps: usize, seed: u64) -> Result<OvershootEstimate> {
    if !(t > 0.0) {
        return domain(format!("overshoot level must be positive, got {t}"));
    }
    if reps == 0 {
        return domain("reps must be >= 1");
    }
    let jumps = TruncatedJumps::new(epsilon)?;
    let samples = (0..reps as u64)
        .into_par_iter()
        .map(|r| jumps.overshoot(t, &mut RngStream::new(seed, r)))
        .collect();
    Ok(OvershootEstimate {
        level: t,
        samples,
        epsilon,
    })
}

/// Frequency of `S(S^←(E_{n-i,n})) < E_{n-i+1,n}`, an estimate of
/// `P(X_k(n) = i for some k)`.
///
/// Per replicate, `E_{n-i,n} = -ln B` with `B ~ Beta(i+1, n-i)` (the
/// complement of a uniform order statistic), and the spacing
/// `E_{n-i+1,n} - E_{n-i,n}` is an independent exponential of rate `i`.
pub fn hitting_via_overshoot(
    n: u64,
    i: u64,
    epsilon: f64,
    reps: usize,
    seed: u64,
) -> Result<McEstimate> {
    if i == 0 || i >= n {
        return domain(format!(
            "hitting_via_overshoot needs 1 <= i < n, got n={n}, i={i}"
        ));
    }
    if reps == 0 {
        return domain("reps must be >= 1");
    }
    let jumps = TruncatedJumps::new(epsilon)?;
    let beta = Beta::new((i + 1) as f64, (n - i) as f64)
        .map_err(|e| crate::Error::Domain(e.to_string()))?;
    let rate = i as f64;
    let hits = (0..reps as u64)
        .into_par_iter()
        .filter(|&r| {
            let mut rng = RngStream::new(seed, r);
            let level = -beta.sample(&mut rng).ln();
            let spacing = rng.exponential() / rate;
            jumps.overshoot(level, &mut rng) < spacing
        })
        .count();
    Ok(McEstimate::from_hits(hits, reps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    #[test]
    fn density_values() {
        assert!((nu_density(LN_2).unwrap() - 1.0).abs() < 1e-15);
        let x = 1e-8;
        let d = nu_density(x).unwrap();
        assert!(((d - (1.0 / x - 0.5)) / d).abs() < 1e-4);
        let d = nu_density(20.0).unwrap();
        assert!(((d - (-20.0f64).exp()) / d).abs() < 1e-8);
        assert!(nu_density(0.0).is_err());
        assert!(nu_density(-1.0).is_err());
    }

    #[test]
    fn tail_values() {
        assert!((nu_tail(LN_2).unwrap() - LN_2).abs() < 1e-15);
        assert!(nu_tail(1e-9).unwrap() > 20.0);
        assert!((nu_tail(1.0).unwrap() - nu_tail_quadrature(1.0).unwrap()).abs() <= 1e-10);
        assert!(nu_tail(0.0).is_err());
    }

    #[test]
    fn tail_derivative_is_minus_density() {
        for x in [0.01, 0.3, 1.0, 4.0, 10.0] {
            let h = 1e-5 * x;
            let fd = (nu_tail(x + h).unwrap() - nu_tail(x - h).unwrap()) / (2.0 * h);
            let d = nu_density(x).unwrap();
            assert!(((fd + d) / d).abs() < 1e-7, "x = {x}");
        }
    }

    #[test]
    fn hurwitz_small_r() {
        let m = hurwitz_moment(1).unwrap();
        assert!((m.quadrature - 1.6449340668).abs() < 1e-9);
        assert!(m.rel_error() <= 1e-8);
        assert!((hurwitz_moment(2).unwrap().closed_form - 2.4041138063).abs() < 1e-9);
        assert!((hurwitz_moment(3).unwrap().closed_form - 6.4939394023).abs() < 1e-9);
        assert!(hurwitz_moment(0).is_err());
        assert!(hurwitz_moment(4).is_err());
    }

    #[test]
    fn chi_tail_values() {
        assert!((chi_tail(0.0).unwrap() - 1.0).abs() <= 1e-14);
        assert!((chi_tail(LN_2).unwrap() - 0.353959795835838).abs() < 1e-14);
        let chi = ChiDistribution::default();
        assert!((chi.tail(1.0).unwrap() - chi.tail_quadrature(1.0).unwrap()).abs() <= 1e-10);
        assert!(chi_tail(-0.1).is_err());
        assert!(chi_tail(60.0).unwrap() < 1e-25);
    }

    #[test]
    fn laplace_matches_closed_form() {
        let l1 = chi_laplace(1).unwrap();
        assert!((l1.closed_form - 6.0 / (PI * PI)).abs() < 1e-15);
        assert!(l1.abs_error() <= 1e-8);
        let l20 = chi_laplace(20).unwrap();
        assert!((l20.closed_form - 0.109358172149633).abs() < 1e-14);
        assert!(l20.abs_error() <= 1e-8);
        assert!(chi_laplace(0).is_err());
    }

    #[test]
    fn quantile_inverts_tail() {
        let chi = ChiDistribution::default();
        assert_eq!(chi.quantile_tail(1.0).unwrap(), 0.0);
        for u in [0.9, 0.5, 0.1, 1e-3, 1e-8] {
            let y = chi.quantile_tail(u).unwrap();
            // tail has slope at most 1/ζ(2) · ν((y,∞)); bisection width 1e-10
            assert!((chi.tail(y).unwrap() - u).abs() < 1e-9 * (1.0 + chi.density(y).unwrap()));
        }
        assert!(chi.quantile_tail(0.0).is_err());
    }

    #[test]
    fn overshoot_nonnegative_and_reproducible() {
        let a = overshoot_mc(2.0, 1e-4, 2000, 4).unwrap();
        assert!(a.samples.iter().all(|&s| s >= 0.0));
        assert_eq!(a, overshoot_mc(2.0, 1e-4, 2000, 4).unwrap());
        assert!(overshoot_mc(0.0, 1e-4, 10, 4).is_err());
        assert!(overshoot_mc(1.0, 1e-4, 0, 4).is_err());
    }

    #[test]
    fn via_overshoot_smallest_case() {
        let e = hitting_via_overshoot(2, 1, 1e-6, 100_000, 2).unwrap();
        assert!(e.z_score(2.0 / 3.0) <= 4.0, "{e:?}");
        assert!(hitting_via_overshoot(2, 2, 1e-6, 10, 2).is_err());
    }
}
