//! The harmonic descent chain on the positive integers: from `j >= 2` it
//! drops to `j - i` with probability `1 / (i h_{j-1})`, and `1` is absorbing.

use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::numerics::{harmonic, HarmonicTable, RngStream, ZetaConstants};

/// A state of the chain; always `>= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChainState(u64);

impl ChainState {
    pub fn new(value: u64) -> Result<Self> {
        if value == 0 {
            return domain("chain states are positive integers");
        }
        Ok(Self(value))
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn is_absorbed(self) -> bool {
        self.0 == 1
    }
}

/// One row of the transition kernel: `probs[i - 1] = p(j, j - i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecrementKernel {
    state: u64,
    probs: Vec<f64>,
}

impl DecrementKernel {
    pub fn new(j: u64, table: &HarmonicTable) -> Result<Self> {
        if j < 2 {
            return domain(format!("decrement kernel needs j >= 2, got {j}"));
        }
        if (j - 1) as usize > table.max_n() {
            return domain("harmonic table too short for this state");
        }
        let h = table.get((j - 1) as usize);
        let probs = (1..j).map(|i| 1.0 / (i as f64 * h)).collect();
        Ok(Self { state: j, probs })
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// `p(j, j - i)`, zero outside `1..j`.
    pub fn prob(&self, decrement: u64) -> f64 {
        if decrement == 0 || decrement >= self.state {
            0.0
        } else {
            self.probs[(decrement - 1) as usize]
        }
    }
}

/// `[p(j, j-1), p(j, j-2), ..., p(j, 1)]`.
pub fn decrement_pmf(j: u64) -> Result<Vec<f64>> {
    if j < 2 {
        return domain(format!("decrement_pmf needs j >= 2, got {j}"));
    }
    let table = HarmonicTable::new((j - 1) as usize)?;
    Ok(DecrementKernel::new(j, &table)?.probs)
}

/// A path of the chain from its start down to the absorbing state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub states: Vec<u64>,
    pub seed: u64,
    pub stream_index: u64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn visits(&self, state: u64) -> bool {
        // states are sorted descending
        self.states.binary_search_by(|s| state.cmp(s)).is_ok()
    }
}

/// Query for `P(X_k = target for some k >= 0 | X_0 = start)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HittingQuery {
    start: u64,
    target: u64,
}

impl HittingQuery {
    /// `start = target` is accepted and has probability one (`k = 0`).
    pub fn new(start: u64, target: u64) -> Result<Self> {
        if target < 2 {
            return domain(format!("hitting target must be >= 2, got {target}"));
        }
        if start < target {
            return domain(format!("start {start} lies below target {target}"));
        }
        Ok(Self { start, target })
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn target(&self) -> u64 {
        self.target
    }
}

/// Sampler for the chain on states `1..=max_state`.
///
/// The cumulative kernel from `j` is `P(I <= i) = h_i / h_{j-1}`, so a single
/// harmonic table serves as the inverse-CDF lookup for every row.
#[derive(Debug, Clone)]
pub struct HarmonicDescent {
    table: HarmonicTable,
}

impl HarmonicDescent {
    pub fn new(max_state: u64) -> Result<Self> {
        let table = HarmonicTable::new(max_state.max(2) as usize)?;
        Ok(Self { table })
    }

    pub fn max_state(&self) -> u64 {
        self.table.max_n() as u64 + 1
    }

    pub fn table(&self) -> &HarmonicTable {
        &self.table
    }

    #[inline]
    fn step_raw(&self, j: u64, rng: &mut RngStream) -> u64 {
        if j <= 1 {
            return 1;
        }
        let upper = (j - 1) as usize;
        let u = rng.uniform() * self.table.get(upper);
        j - self.table.search(u, upper) as u64
    }

    pub fn step(&self, state: ChainState, rng: &mut RngStream) -> Result<ChainState> {
        if state.0 > self.max_state() {
            return domain(format!(
                "state {} exceeds sampler capacity {}",
                state.0,
                self.max_state()
            ));
        }
        Ok(ChainState(self.step_raw(state.0, rng)))
    }

    pub fn simulate(&self, start: ChainState, rng: &mut RngStream) -> Result<Trajectory> {
        if start.0 > self.max_state() {
            return domain(format!(
                "state {} exceeds sampler capacity {}",
                start.0,
                self.max_state()
            ));
        }
        let mut states = vec![start.0];
        let mut j = start.0;
        while j > 1 {
            j = self.step_raw(j, rng);
            states.push(j);
        }
        Ok(Trajectory {
            states,
            seed: rng.seed(),
            stream_index: rng.stream_index(),
        })
    }

    /// Runs from `start` until the chain is at or below `target`; true if it
    /// lands exactly on `target`.
    fn hits(&self, start: u64, target: u64, rng: &mut RngStream) -> bool {
        let mut j = start;
        while j > target {
            j = self.step_raw(j, rng);
        }
        j == target
    }
}

/// One step from `state`.
pub fn step(state: ChainState, rng: &mut RngStream) -> ChainState {
    if state.is_absorbed() {
        return state;
    }
    let chain = HarmonicDescent::new(state.0).expect("state >= 2");
    ChainState(chain.step_raw(state.0, rng))
}

/// Runs the chain from `start` to absorption.
pub fn simulate(start: ChainState, rng: &mut RngStream) -> Trajectory {
    HarmonicDescent::new(start.0)
        .and_then(|c| c.simulate(start, rng))
        .expect("sampler sized to start")
}

/// Exact hitting probabilities `f(m) = P(hit target | X_0 = m)` for
/// `m = target..=max_start`, indexed by `m - target`.
///
/// `f(target) = 1` and, for `m > target`,
/// `f(m) = (1/h_{m-1}) Σ_{l=target}^{m-1} f(l)/(m-l)`; states below the
/// target contribute nothing. Quadratic time, linear memory.
pub fn hitting_profile(target: u64, max_start: u64) -> Result<Vec<f64>> {
    HittingQuery::new(max_start, target)?;
    let span = (max_start - target) as usize;
    let table = HarmonicTable::new(max_start.max(2) as usize)?;
    let recip: Vec<f64> = (0..=span)
        .map(|d| if d == 0 { 0.0 } else { 1.0 / d as f64 })
        .collect();

    let mut f = Vec::with_capacity(span + 1);
    f.push(1.0);
    for k in 1..=span {
        // Σ_{d=1}^{k} f[k-d] / d
        let head = &f[..k];
        let weights = &recip[1..=k];
        let mut acc = [0.0f64; 4];
        let mut fi = head.iter().rev();
        let mut wi = weights.iter();
        let chunks = k / 4;
        for _ in 0..chunks {
            for slot in acc.iter_mut() {
                *slot += fi.next().unwrap() * wi.next().unwrap();
            }
        }
        let mut sum = (acc[0] + acc[1]) + (acc[2] + acc[3]);
        for (a, w) in fi.zip(wi) {
            sum += a * w;
        }
        let m = target as usize + k;
        f.push(sum / table.get(m - 1));
    }
    Ok(f)
}

pub fn hit_probability_exact(query: HittingQuery) -> f64 {
    let profile = hitting_profile(query.target, query.start).expect("validated query");
    profile[profile.len() - 1]
}

/// Monte Carlo estimate with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub reps: usize,
}

impl McEstimate {
    pub fn from_hits(hits: usize, reps: usize) -> Self {
        let p = hits as f64 / reps as f64;
        Self {
            estimate: p,
            stderr: (p * (1.0 - p) / reps as f64).sqrt(),
            reps,
        }
    }

    /// `|estimate - reference|` in units of the standard error; zero error
    /// with an exact match counts as `0`.
    pub fn z_score(&self, reference: f64) -> f64 {
        let diff = (self.estimate - reference).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.stderr
        }
    }
}

/// Fraction of `reps` independent runs from `start` that visit `target`.
/// Replicate `r` draws from stream `(seed, r)`.
pub fn hit_probability_mc(query: HittingQuery, reps: usize, seed: u64) -> Result<McEstimate> {
    if reps == 0 {
        return domain("reps must be >= 1");
    }
    let chain = HarmonicDescent::new(query.start)?;
    let hits = (0..reps as u64)
        .into_par_iter()
        .filter(|&r| chain.hits(query.start, query.target, &mut RngStream::new(seed, r)))
        .count();
    Ok(McEstimate::from_hits(hits, reps))
}

/// `h_i / (ζ(2) i)`, the large-start limit of `P(hit i + 1 | X_0 = n + 1)`.
pub fn limit_formula(i: u64) -> Result<f64> {
    if i == 0 {
        return domain("limit_formula needs i >= 1");
    }
    Ok(harmonic(i)? / (ZetaConstants::get().zeta2 * i as f64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n: u64,
    pub q: f64,
    pub limit: f64,
    pub gap: f64,
}

/// `q_n(i) = P(hit i + 1 | X_0 = n + 1)` for each `n`, next to the limit.
/// `n = i` gives the trivial row `q = 1`.
pub fn convergence_table(i: u64, starts: &[u64]) -> Result<Vec<ConvergenceRow>> {
    let limit = limit_formula(i)?;
    if let Some(&bad) = starts.iter().find(|&&n| n < i) {
        return domain(format!("n = {bad} is below i = {i}"));
    }
    let Some(&max_n) = starts.iter().max() else {
        return Ok(Vec::new());
    };
    let target = i + 1;
    let profile = hitting_profile(target, max_n + 1)?;
    Ok(starts
        .iter()
        .map(|&n| {
            let q = profile[(n + 1 - target) as usize];
            ConvergenceRow {
                n,
                q,
                limit,
                gap: q - limit,
            }
        })
        .collect())
}
