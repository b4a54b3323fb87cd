use std::sync::OnceLock;

use crate::error::{domain, Result};

// B_2, B_4, ..., B_14
const BERNOULLI_EVEN: [f64; 7] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
];

const DIRECT_TERMS: u32 = 16;
const TOLERANCE: f64 = 1e-17;

/// Riemann zeta at an integer `s >= 2`.
///
/// Direct partial sum up to `N - 1`, then the Euler-Maclaurin tail
/// `N^{1-s}/(s-1) + N^{-s}/2 + sum_m B_2m/(2m)! s(s+1)...(s+2m-2) N^{1-s-2m}`,
/// truncated once a correction drops below `1e-17` of the total.
pub fn zeta_int(s: u32) -> Result<f64> {
    if s < 2 {
        return domain(format!("zeta_int needs s >= 2, got {s}"));
    }
    let sf = s as f64;
    let n = DIRECT_TERMS as f64;

    // small terms first
    let mut head = 0.0;
    for k in (1..DIRECT_TERMS).rev() {
        head += (k as f64).powi(-(s as i32));
    }

    let mut tail = n.powf(1.0 - sf) / (sf - 1.0) + 0.5 * n.powf(-sf);
    // rising factorial s (s+1) ... (s+2m-2) / (2m)!, times N^{1-s-2m}
    let mut coeff = sf / 2.0;
    let mut power = n.powf(-sf - 1.0);
    for (m, b) in BERNOULLI_EVEN.iter().enumerate() {
        if m > 0 {
            let two_m = 2.0 * (m as f64 + 1.0);
            coeff *= (sf + two_m - 3.0) * (sf + two_m - 2.0) / ((two_m - 1.0) * two_m);
            power /= n * n;
        }
        let term = b * coeff * power;
        tail += term;
        if term.abs() < TOLERANCE * (head + tail) {
            break;
        }
    }
    Ok(head + tail)
}

/// `ζ(2), ζ(3), ζ(4)` as used by the moment and overshoot checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaConstants {
    pub zeta2: f64,
    pub zeta3: f64,
    pub zeta4: f64,
}

impl ZetaConstants {
    pub fn get() -> &'static ZetaConstants {
        static CONSTANTS: OnceLock<ZetaConstants> = OnceLock::new();
        CONSTANTS.get_or_init(|| ZetaConstants {
            zeta2: zeta_int(2).expect("s = 2"),
            zeta3: zeta_int(3).expect("s = 3"),
            zeta4: zeta_int(4).expect("s = 4"),
        })
    }
}

/// Shorthand for `ζ(2) = π²/6`.
#[inline]
pub(crate) fn zeta2() -> f64 {
    ZetaConstants::get().zeta2
}
