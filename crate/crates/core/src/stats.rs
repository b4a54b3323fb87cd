//! Distances between empirical and reference distributions.

/// One-sample Kolmogorov-Smirnov distance `sup_y |F_n(y) - F(y)|`.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0, |acc, (i, &x)| {
        let f = cdf(x);
        let above = (i + 1) as f64 / n - f;
        let below = f - i as f64 / n;
        acc.max(above).max(below)
    })
}

/// Asymptotic p-value of a one-sample KS distance `d` with `n` samples,
/// `Q(λ) = 2 Σ_{k>=1} (-1)^{k-1} e^{-2 k² λ²}` at `λ = √n d`.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let lambda = (n as f64).sqrt() * d;
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Total-variation distance between two histograms, each normalized by its
/// own total.
pub fn total_variation(a: &[usize], b: &[usize]) -> f64 {
    let ta: usize = a.iter().sum();
    let tb: usize = b.iter().sum();
    let len = a.len().max(b.len());
    let get = |v: &[usize], k: usize| v.get(k).copied().unwrap_or(0) as f64;
    0.5 * (0..len)
        .map(|k| (get(a, k) / ta as f64 - get(b, k) / tb as f64).abs())
        .sum::<f64>()
}

/// Total variation between a histogram and a probability vector on the same
/// support.
pub fn total_variation_to(counts: &[usize], probs: &[f64]) -> f64 {
    let total: usize = counts.iter().sum();
    let len = counts.len().max(probs.len());
    0.5 * (0..len)
        .map(|k| {
            let c = counts.get(k).copied().unwrap_or(0) as f64 / total as f64;
            (c - probs.get(k).copied().unwrap_or(0.0)).abs()
        })
        .sum::<f64>()
}

/// Pearson statistic for homogeneity of two histograms, with cells whose
/// pooled expected count falls below `min_expected` merged into one tail
/// cell. Returns `(statistic, degrees_of_freedom)`.
pub fn chi_square_homogeneity(a: &[usize], b: &[usize], min_expected: f64) -> (f64, usize) {
    let ta: usize = a.iter().sum();
    let tb: usize = b.iter().sum();
    let total = (ta + tb) as f64;
    let len = a.len().max(b.len());
    let get = |v: &[usize], k: usize| v.get(k).copied().unwrap_or(0);

    let mut cells: Vec<(usize, usize)> = Vec::new();
    let mut pending = (0usize, 0usize);
    for k in 0..len {
        pending.0 += get(a, k);
        pending.1 += get(b, k);
        let pooled = (pending.0 + pending.1) as f64;
        let smallest = pooled * ta.min(tb) as f64 / total;
        if smallest >= min_expected {
            cells.push(pending);
            pending = (0, 0);
        }
    }
    if pending.0 + pending.1 > 0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += pending.0;
                last.1 += pending.1;
            }
            None => cells.push(pending),
        }
    }

    let stat = cells
        .iter()
        .map(|&(x, y)| {
            let pooled = (x + y) as f64;
            let ea = pooled * ta as f64 / total;
            let eb = pooled * tb as f64 / total;
            (x as f64 - ea).powi(2) / ea + (y as f64 - eb).powi(2) / eb
        })
        .sum();
    (stat, cells.len().saturating_sub(1))
}
