#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{domain, Error, Result};

/// Tolerances and work limit for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol > 0.0) || !(rel_tol > 0.0) {
            return domain("quadrature tolerances must be positive");
        }
        if max_subdivisions == 0 {
            return domain("max_subdivisions must be positive");
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        })
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

/// Upper limit of integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Upper {
    Finite(f64),
    Infinity,
}

impl From<f64> for Upper {
    fn from(b: f64) -> Self {
        if b == f64::INFINITY {
            Upper::Infinity
        } else {
            Upper::Finite(b)
        }
    }
}

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    res_abs *= half.abs();
    res_asc *= half.abs();

    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Segment {
        a,
        b,
        value,
        error: err,
    }
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let first = kronrod15(f, a, b);
    let mut heap = BinaryHeap::new();
    let mut frozen_value = 0.0;
    let mut frozen_error = 0.0;
    let mut total = first.value;
    let mut error = first.error;
    heap.push(first);
    let mut subdivisions = 1;

    loop {
        if !total.is_finite() || !error.is_finite() {
            return domain("integrand produced a non-finite value");
        }
        if error <= spec.abs_tol.max(spec.rel_tol * total.abs()) {
            return Ok((total, error));
        }
        let Some(worst) = heap.pop() else {
            break;
        };
        if subdivisions >= spec.max_subdivisions {
            heap.push(worst);
            break;
        }
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // cannot bisect any further in double precision
            frozen_value += worst.value;
            frozen_error += worst.error;
            continue;
        }
        let left = kronrod15(f, worst.a, mid);
        let right = kronrod15(f, mid, worst.b);
        subdivisions += 1;
        total += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);

        // re-sum occasionally so cancellation in the running totals stays bounded
        if subdivisions % 64 == 0 {
            total = frozen_value + heap.iter().map(|s| s.value).sum::<f64>();
            error = frozen_error + heap.iter().map(|s| s.error).sum::<f64>();
        }
    }

    let estimate = frozen_value + heap.iter().map(|s| s.value).sum::<f64>();
    let abs_error = frozen_error + heap.iter().map(|s| s.error).sum::<f64>();
    if abs_error <= spec.abs_tol.max(spec.rel_tol * estimate.abs()) {
        return Ok((estimate, abs_error));
    }
    Err(Error::Convergence {
        estimate,
        abs_error,
        subdivisions,
    })
}

/// Adaptive Gauss-Kronrod (7/15) quadrature of `f` over `(a, b)`, returning
/// the estimate and its error bound.
///
/// A semi-infinite range `(a, ∞)` is mapped onto `(0, 1)` through
/// `x = a - ln u`, so `f(x) dx = f(a - ln u) du / u`. Endpoints are never
/// evaluated.
pub fn integrate_with_error<F>(
    f: F,
    a: f64,
    b: impl Into<Upper>,
    spec: &QuadratureSpec,
) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    if !a.is_finite() {
        return domain("lower limit must be finite");
    }
    match b.into() {
        Upper::Finite(b) => {
            if !b.is_finite() {
                return domain("upper limit must be finite or +infinity");
            }
            if a == b {
                return Ok((0.0, 0.0));
            }
            if b < a {
                let (v, e) = adaptive(&f, b, a, spec)?;
                return Ok((-v, e));
            }
            adaptive(&f, a, b, spec)
        }
        Upper::Infinity => {
            let g = |u: f64| f(a - u.ln()) / u;
            adaptive(&g, 0.0, 1.0, spec)
        }
    }
}

/// [`integrate_with_error`] without the error bound.
pub fn integrate<F>(f: F, a: f64, b: impl Into<Upper>, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate_with_error(f, a, b, spec).map(|(v, _)| v)
}
