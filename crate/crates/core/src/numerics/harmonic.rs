use crate::error::{domain, Result};

/// Running sum with Kahan compensation.
#[derive(Debug, Default, Clone, Copy)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let y = x - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

/// `h_n = 1 + 1/2 + ... + 1/n`, summed forward with compensation.
pub fn harmonic(n: u64) -> Result<f64> {
    if n == 0 {
        return domain("harmonic number needs n >= 1");
    }
    let mut acc = Compensated::default();
    for k in 1..=n {
        acc.add(1.0 / k as f64);
    }
    Ok(acc.sum)
}

/// Cached harmonic numbers `h_0 = 0, h_1, ..., h_max_n`.
///
/// Index `n` holds `h_n`; keeping `h_0 = 0` lets the descent kernels express
/// their cumulative distributions as `h_i / h_j` without special cases.
#[derive(Debug, Clone)]
pub struct HarmonicTable {
    values: Vec<f64>,
}

impl HarmonicTable {
    pub fn new(max_n: usize) -> Result<Self> {
        if max_n == 0 {
            return domain("harmonic table needs max_n >= 1");
        }
        let mut values = Vec::with_capacity(max_n + 1);
        values.push(0.0);
        let mut acc = Compensated::default();
        for k in 1..=max_n {
            acc.add(1.0 / k as f64);
            values.push(acc.sum);
        }
        Ok(Self { values })
    }

    pub fn max_n(&self) -> usize {
        self.values.len() - 1
    }

    /// `h_n`; panics if `n > max_n`.
    #[inline]
    pub fn get(&self, n: usize) -> f64 {
        self.values[n]
    }

    /// `[h_0, h_1, ..., h_max_n]`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Smallest `i` in `1..=upper` with `h_i >= target`.
    ///
    /// This is the inverse CDF of any law with `P(I <= i) = h_i / h_upper`.
    #[inline]
    pub(crate) fn search(&self, target: f64, upper: usize) -> usize {
        let idx = self.values[1..=upper].partition_point(|&h| h < target) + 1;
        idx.min(upper)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(harmonic(1).unwrap(), 1.0);
        assert_eq!(harmonic(2).unwrap(), 1.5);
        assert!((harmonic(4).unwrap() - 25.0 / 12.0).abs() < 1e-15);
        assert!(harmonic(0).is_err());
    }

    #[test]
    fn table_matches_function() {
        let t = HarmonicTable::new(1000).unwrap();
        assert_eq!(t.get(0), 0.0);
        assert_eq!(t.get(1), 1.0);
        for n in [1usize, 2, 7, 100, 1000] {
            assert_eq!(t.get(n), harmonic(n as u64).unwrap());
        }
        assert!(HarmonicTable::new(0).is_err());
    }

    #[test]
    fn increments_and_monotonicity() {
        let t = HarmonicTable::new(100_000).unwrap();
        for n in 2..=t.max_n() {
            let (a, b) = (t.get(n - 1), t.get(n));
            assert!(b > a);
            let ulp = b * f64::EPSILON;
            assert!(((b - a) - 1.0 / n as f64).abs() <= 2.0 * ulp, "n = {n}");
        }
    }

    #[test]
    fn search_inverts_cumulative() {
        let t = HarmonicTable::new(10).unwrap();
        assert_eq!(t.search(0.0, 5), 1);
        assert_eq!(t.search(1.0, 5), 1);
        assert_eq!(t.search(1.0 + 1e-12, 5), 2);
        assert_eq!(t.search(t.get(5), 5), 5);
        assert_eq!(t.search(t.get(5) + 1.0, 5), 5);
    }
}
