//! The regenerative balls-in-boxes scheme.
//!
//! The closed range of the subordinator with Lévy measure
//! `ν(dx) = e^{-x}/(1-e^{-x}) dx` cuts the half-line into gaps (boxes); an
//! independent sample of `n` unit exponentials supplies the balls. Reading
//! the occupied gaps left to right gives a composition of `n`, and the
//! number of balls to the right of the first `k` occupied gaps is a
//! decreasing Markov chain with decrement law `1/(i h_j)` from state `j`.
//! Shifting states by one turns it into the harmonic descent chain.

use rayon::prelude::*;

use crate::chain::{hit_probability_exact, HittingQuery, McEstimate};
use crate::error::{domain, Result};
use crate::numerics::{integrate, HarmonicTable, QuadratureSpec, RngStream};
use crate::renewal::nu_tail_unchecked;

/// Ordered block sizes of `n`, left to right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Composition {
    pub n: u64,
    pub blocks: Vec<u64>,
}

impl Composition {
    pub fn new(blocks: Vec<u64>) -> Result<Self> {
        if blocks.is_empty() || blocks.contains(&0) {
            return domain("composition blocks must be non-empty and positive");
        }
        Ok(Self {
            n: blocks.iter().sum(),
            blocks,
        })
    }
}

/// Remainders `X_0(n) = n > X_1(n) > ... > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupancyTrajectory {
    pub counts: Vec<u64>,
}

impl OccupancyTrajectory {
    pub fn visits(&self, count: u64) -> bool {
        self.counts.binary_search_by(|c| count.cmp(c)).is_ok()
    }
}

/// Compound-Poisson path keeping only jumps larger than `epsilon`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSubordinatorPath {
    pub epsilon: f64,
    pub jump_times: Vec<f64>,
    pub jump_sizes: Vec<f64>,
    pub horizon: f64,
}

impl TruncatedSubordinatorPath {
    /// Post-jump path values `S(τ_1), S(τ_2), ...`.
    pub fn values(&self) -> Vec<f64> {
        self.jump_sizes
            .iter()
            .scan(0.0, |s, &j| {
                *s += j;
                Some(*s)
            })
            .collect()
    }

    pub fn terminal_value(&self) -> f64 {
        self.jump_sizes.iter().sum()
    }
}

/// Order statistics of `n` unit exponentials.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentialSample {
    pub points: Vec<f64>,
}

impl ExponentialSample {
    pub fn draw(n: usize, rng: &mut RngStream) -> Self {
        let mut points: Vec<f64> = (0..n).map(|_| rng.exponential()).collect();
        points.sort_by(f64::total_cmp);
        Self { points }
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }
}

fn ln_binomial(j: u64, i: u64) -> f64 {
    let k = i.min(j - i);
    (0..k).map(|r| ((j - r) as f64 / (r + 1) as f64).ln()).sum()
}

/// Unnormalized weights `C(j,i) ∫ (1-e^{-x})^i e^{-x(j-i)} ν(dx)` for
/// `i = 1..=j`, by quadrature over `u = e^{-x}`, where the integrand
/// becomes `C(j,i) (1-u)^{i-1} u^{j-i}`.
pub fn gp_weights(j: u64, spec: &QuadratureSpec) -> Result<Vec<f64>> {
    if j == 0 {
        return domain("gp_weights needs j >= 1");
    }
    (1..=j)
        .map(|i| {
            let log_c = ln_binomial(j, i);
            let (a, b) = ((i - 1) as f64, (j - i) as f64);
            integrate(
                |u: f64| {
                    let v = 1.0 - u;
                    let mut log = log_c;
                    if a > 0.0 {
                        log += a * v.ln();
                    }
                    if b > 0.0 {
                        log += b * u.ln();
                    }
                    log.exp()
                },
                0.0,
                1.0,
                spec,
            )
        })
        .collect()
}

/// Normalized decrement law from state `j`, `row[i-1] = P(j -> j - i)`.
pub fn gp_decrement_row(j: u64) -> Result<Vec<f64>> {
    let w = gp_weights(j, &QuadratureSpec::default())?;
    let total: f64 = w.iter().sum();
    Ok(w.into_iter().map(|x| x / total).collect())
}

/// `P(j -> j - i)` for the occupancy chain, computed from the Lévy measure.
/// Equals `1 / (i h_j)`.
pub fn gp_decrement_prob(j: u64, i: u64) -> Result<f64> {
    if j == 0 || i == 0 || i > j {
        return domain(format!(
            "gp_decrement_prob needs 1 <= i <= j, got j={j}, i={i}"
        ));
    }
    Ok(gp_decrement_row(j)?[(i - 1) as usize])
}

/// Kernel sampler for the occupancy chain on `{0, ..., max_n}`.
#[derive(Debug, Clone)]
pub struct CompositionSampler {
    table: HarmonicTable,
}

impl CompositionSampler {
    pub fn new(max_n: u64) -> Result<Self> {
        Ok(Self {
            table: HarmonicTable::new(max_n.max(1) as usize)?,
        })
    }

    #[inline]
    fn decrement(&self, j: u64, rng: &mut RngStream) -> u64 {
        let u = rng.uniform() * self.table.get(j as usize);
        self.table.search(u, j as usize) as u64
    }

    pub fn sample(&self, n: u64, rng: &mut RngStream) -> Result<Composition> {
        if n == 0 || n as usize > self.table.max_n() {
            return domain(format!(
                "composition size {n} outside 1..={}",
                self.table.max_n()
            ));
        }
        let mut blocks = Vec::new();
        let mut m = n;
        while m > 0 {
            let b = self.decrement(m, rng);
            blocks.push(b);
            m -= b;
        }
        Ok(Composition { n, blocks })
    }

    fn visits(&self, n: u64, count: u64, rng: &mut RngStream) -> bool {
        let mut m = n;
        while m > count {
            m -= self.decrement(m, rng);
        }
        m == count
    }
}

/// Runs the occupancy chain from `n` with decrements `P(i) = 1/(i h_j)`.
pub fn sample_composition(n: u64, rng: &mut RngStream) -> Result<Composition> {
    CompositionSampler::new(n)?.sample(n, rng)
}

pub fn occupancy_chain(composition: &Composition) -> OccupancyTrajectory {
    let mut counts = Vec::with_capacity(composition.blocks.len() + 1);
    let mut m = composition.n;
    counts.push(m);
    for &b in &composition.blocks {
        m -= b;
        counts.push(m);
    }
    OccupancyTrajectory { counts }
}

/// Jump sampler for the ε-truncated subordinator.
///
/// Jumps above `ε` arrive at rate `m_ε = T(ε)` with `T(x) = ν((x,∞)) =
/// -ln(1-e^{-x})`. `T` is a decreasing involution, so `T(U m_ε)` with `U`
/// uniform on `(0,1)` has tail `T(y)/m_ε` on `(ε, ∞)`.
#[derive(Debug, Clone, Copy)]
pub struct TruncatedJumps {
    epsilon: f64,
    rate: f64,
}

impl TruncatedJumps {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return domain(format!(
                "truncation level must lie in (0, 1), got {epsilon}"
            ));
        }
        Ok(Self {
            epsilon,
            rate: nu_tail_unchecked(epsilon),
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `m_ε = ν((ε, ∞))`.
    pub fn rate(&self) -> f64 {
        self.rate
    }

    #[inline]
    pub fn jump_size(&self, rng: &mut RngStream) -> f64 {
        let u = loop {
            let u = rng.uniform();
            if u > 0.0 {
                break u;
            }
        };
        nu_tail_unchecked(u * self.rate)
    }

    #[inline]
    pub fn waiting_time(&self, rng: &mut RngStream) -> f64 {
        rng.exponential() / self.rate
    }

    /// First passage of the running jump sum over `level`; returns the
    /// overshoot `S(S^←(level)) - level`.
    pub fn overshoot(&self, level: f64, rng: &mut RngStream) -> f64 {
        let mut s = 0.0;
        while s <= level {
            s += self.jump_size(rng);
        }
        s - level
    }
}

/// Simulates the truncated path until its value exceeds `horizon`.
pub fn simulate_subordinator(
    epsilon: f64,
    horizon: f64,
    rng: &mut RngStream,
) -> Result<TruncatedSubordinatorPath> {
    if !(horizon > 0.0) {
        return domain(format!("horizon must be positive, got {horizon}"));
    }
    let jumps = TruncatedJumps::new(epsilon)?;
    Ok(path_past(&jumps, horizon, rng))
}

fn path_past(
    jumps: &TruncatedJumps,
    horizon: f64,
    rng: &mut RngStream,
) -> TruncatedSubordinatorPath {
    let mut jump_times = Vec::new();
    let mut jump_sizes = Vec::new();
    let mut t = 0.0;
    let mut s = 0.0;
    while s <= horizon {
        t += jumps.waiting_time(rng);
        let j = jumps.jump_size(rng);
        s += j;
        jump_times.push(t);
        jump_sizes.push(j);
    }
    TruncatedSubordinatorPath {
        epsilon: jumps.epsilon(),
        jump_times,
        jump_sizes,
        horizon,
    }
}

/// Drops `n` exponential balls into the gaps of a truncated subordinator
/// range and returns the occupied-gap counts left to right.
pub fn balls_in_boxes(n: u64, epsilon: f64, rng: &mut RngStream) -> Result<Composition> {
    if n == 0 {
        return domain("balls_in_boxes needs n >= 1");
    }
    let jumps = TruncatedJumps::new(epsilon)?;
    Ok(balls_in_boxes_with(&jumps, n, rng))
}

fn balls_in_boxes_with(jumps: &TruncatedJumps, n: u64, rng: &mut RngStream) -> Composition {
    let sample = ExponentialSample::draw(n as usize, rng);
    let horizon = sample.points[sample.n() - 1];
    let path = path_past(jumps, horizon, rng);

    // gap k is (S(τ_{k-1}), S(τ_k)], with S(τ_0) = 0
    let mut blocks = Vec::new();
    let mut next = 0;
    for right in path.values() {
        let start = next;
        while next < sample.n() && sample.points[next] <= right {
            next += 1;
        }
        if next > start {
            blocks.push((next - start) as u64);
        }
        if next == sample.n() {
            break;
        }
    }
    Composition { n, blocks }
}

/// How compositions are generated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CompositionMethod {
    /// Occupancy-chain kernel `1/(i h_j)`.
    Kernel,
    /// Direct gap occupancy of a truncated subordinator range.
    BallsInBoxes { epsilon: f64 },
}

/// Histogram of the first block size over `reps` compositions of `n`;
/// entry `k` counts first blocks of size `k` (entry `0` is unused).
/// Replicate `r` uses stream `(seed, r)`.
pub fn first_block_counts(
    n: u64,
    reps: usize,
    seed: u64,
    method: CompositionMethod,
) -> Result<Vec<usize>> {
    if n == 0 || reps == 0 {
        return domain("first_block_counts needs n >= 1 and reps >= 1");
    }
    let first: Vec<u64> = match method {
        CompositionMethod::Kernel => {
            let sampler = CompositionSampler::new(n)?;
            (0..reps as u64)
                .into_par_iter()
                .map(|r| sampler.decrement(n, &mut RngStream::new(seed, r)))
                .collect()
        }
        CompositionMethod::BallsInBoxes { epsilon } => {
            let jumps = TruncatedJumps::new(epsilon)?;
            (0..reps as u64)
                .into_par_iter()
                .map(|r| balls_in_boxes_with(&jumps, n, &mut RngStream::new(seed, r)).blocks[0])
                .collect()
        }
    };
    let mut counts = vec![0usize; n as usize + 1];
    for b in first {
        counts[b as usize] += 1;
    }
    Ok(counts)
}

/// Both sides of the state-shift identity
/// `P(chain from n+1 visits i+1) = P(occupancy chain from n visits i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceCheck {
    /// Exact chain probability by dynamic programming.
    pub lhs: f64,
    /// Monte Carlo frequency over sampled compositions.
    pub rhs: McEstimate,
}

pub fn chain_equivalence_check(n: u64, i: u64, reps: usize, seed: u64) -> Result<EquivalenceCheck> {
    if i == 0 || i >= n {
        return domain(format!(
            "chain_equivalence_check needs 1 <= i < n, got n={n}, i={i}"
        ));
    }
    if reps == 0 {
        return domain("reps must be >= 1");
    }
    let lhs = hit_probability_exact(HittingQuery::new(n + 1, i + 1)?);
    let sampler = CompositionSampler::new(n)?;
    let hits = (0..reps as u64)
        .into_par_iter()
        .filter(|&r| sampler.visits(n, i, &mut RngStream::new(seed, r)))
        .count();
    Ok(EquivalenceCheck {
        lhs,
        rhs: McEstimate::from_hits(hits, reps),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::harmonic;

    #[test]
    fn gp_small_rows() {
        assert!((gp_decrement_prob(1, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((gp_decrement_prob(2, 1).unwrap() - 2.0 / 3.0).abs() < 1e-10);
        assert!((gp_decrement_prob(2, 2).unwrap() - 1.0 / 3.0).abs() < 1e-10);
        assert!((gp_decrement_prob(3, 1).unwrap() - 6.0 / 11.0).abs() < 1e-8);
        assert!(gp_decrement_prob(3, 0).is_err());
        assert!(gp_decrement_prob(3, 4).is_err());
    }

    #[test]
    fn gp_unnormalized_weights_are_reciprocals() {
        // before normalization each weight is 1/i, so the total is h_j
        let w = gp_weights(30, &QuadratureSpec::default()).unwrap();
        for (k, x) in w.iter().enumerate() {
            assert!((x - 1.0 / (k + 1) as f64).abs() < 1e-10);
        }
        let total: f64 = w.iter().sum();
        assert!((total - harmonic(30).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn composition_basics() {
        let mut rng = RngStream::new(0, 0);
        assert_eq!(sample_composition(1, &mut rng).unwrap().blocks, vec![1]);
        assert!(sample_composition(0, &mut rng).is_err());
        for n in [2u64, 5, 37] {
            let c = sample_composition(n, &mut rng).unwrap();
            assert_eq!(c.blocks.iter().sum::<u64>(), n);
            assert!(c.blocks.iter().all(|&b| b >= 1));
        }
        assert!(Composition::new(vec![]).is_err());
        assert!(Composition::new(vec![1, 0]).is_err());
    }

    #[test]
    fn occupancy_counts() {
        let c = Composition::new(vec![1]).unwrap();
        assert_eq!(occupancy_chain(&c).counts, vec![1, 0]);
        let c = Composition::new(vec![2, 1]).unwrap();
        let occ = occupancy_chain(&c);
        assert_eq!(occ.counts, vec![3, 1, 0]);
        assert!(occ.visits(1) && !occ.visits(2));
    }

    #[test]
    fn n_two_split_frequencies() {
        let counts = first_block_counts(2, 100_000, 5, CompositionMethod::Kernel).unwrap();
        let p: f64 = 2.0 / 3.0;
        let sd = (p * (1.0 - p) / 1e5).sqrt();
        assert!((counts[1] as f64 / 1e5 - p).abs() <= 4.0 * sd);
    }

    #[test]
    fn jump_rate_and_involution() {
        let j = TruncatedJumps::new(std::f64::consts::LN_2).unwrap();
        assert!((j.rate() - std::f64::consts::LN_2).abs() < 1e-15);
        for x in [0.1, 1.0, 5.0] {
            assert!((nu_tail_unchecked(nu_tail_unchecked(x)) - x).abs() < 1e-12);
        }
        assert!(TruncatedJumps::new(0.0).is_err());
        assert!(TruncatedJumps::new(1.5).is_err());
    }

    #[test]
    fn subordinator_path_invariants() {
        let mut rng = RngStream::new(3, 0);
        let p = simulate_subordinator(1e-3, 5.0, &mut rng).unwrap();
        assert!(p.jump_sizes.iter().all(|&s| s > p.epsilon));
        assert!(p.jump_times.windows(2).all(|w| w[0] < w[1]));
        assert!(p.terminal_value() > 5.0);
        let v = p.values();
        assert!(v[v.len() - 2] <= 5.0);
        assert!(simulate_subordinator(-1.0, 5.0, &mut rng).is_err());
        assert!(simulate_subordinator(1e-3, 0.0, &mut rng).is_err());
    }

    #[test]
    fn balls_in_boxes_conserves() {
        let mut rng = RngStream::new(8, 0);
        assert_eq!(balls_in_boxes(1, 1e-6, &mut rng).unwrap().blocks, vec![1]);
        for _ in 0..200 {
            let c = balls_in_boxes(20, 1e-6, &mut rng).unwrap();
            assert_eq!(c.blocks.iter().sum::<u64>(), 20);
            assert!(c.blocks.iter().all(|&b| b >= 1));
        }
        assert!(balls_in_boxes(0, 1e-6, &mut rng).is_err());
    }

    #[test]
    fn equivalence_smallest_case() {
        let chk = chain_equivalence_check(2, 1, 100_000, 1).unwrap();
        assert!((chk.lhs - 2.0 / 3.0).abs() < 1e-15);
        assert!(chk.rhs.z_score(chk.lhs) <= 4.0);
        assert!(chain_equivalence_check(1, 1, 10, 1).is_err());
        assert!(chain_equivalence_check(3, 0, 10, 1).is_err());
    }
}
