//! Deterministic invariant suites, reported check by check with the
//! measured error next to its tolerance.

use std::fmt;

use crate::chain::{decrement_pmf, hit_probability_exact, limit_formula, HittingQuery};
use crate::composition::gp_decrement_row;
use crate::error::Result;
use crate::numerics::{dilog, harmonic, HarmonicTable, ZetaConstants};
use crate::renewal::{
    hurwitz_moment, nu_tail, nu_tail_quadrature, nu_tail_unchecked, ChiDistribution,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Kernel,
    Renewal,
    Composition,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Kernel => "kernel",
            Suite::Renewal => "renewal",
            Suite::Composition => "composition",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.measured <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {}: error {:.3e} (tolerance {:.1e})",
                if c.passed() { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                c.tolerance
            )?;
        }
        let failed = self.failures().count();
        write!(
            f,
            "{} suite: {}/{} checks passed",
            self.suite.name(),
            self.checks.len() - failed,
            self.checks.len()
        )
    }
}

struct Builder {
    scale: f64,
    checks: Vec<Check>,
}

impl Builder {
    fn check(&mut self, name: impl Into<String>, measured: f64, tolerance: f64) {
        self.checks.push(Check {
            name: name.into(),
            // NaN must fail
            measured: if measured.is_nan() {
                f64::INFINITY
            } else {
                measured
            },
            tolerance: tolerance * self.scale,
        });
    }
}

/// Runs `suite` with every tolerance multiplied by `tolerance_scale`.
pub fn run(suite: Suite, tolerance_scale: f64) -> Result<Report> {
    let mut b = Builder {
        scale: tolerance_scale,
        checks: Vec::new(),
    };
    match suite {
        Suite::Kernel => kernel(&mut b)?,
        Suite::Renewal => renewal(&mut b)?,
        Suite::Composition => composition(&mut b)?,
    }
    Ok(Report {
        suite,
        checks: b.checks,
    })
}

fn kernel(b: &mut Builder) -> Result<()> {
    let table = HarmonicTable::new(10_000)?;
    let mut worst = 0.0f64;
    for j in 2..=10_000usize {
        let h = table.get(j - 1);
        let s: f64 = (1..j).rev().map(|i| 1.0 / (i as f64 * h)).sum();
        worst = worst.max((s - 1.0).abs());
    }
    b.check("kernel normalization, 2 <= j <= 10^4", worst, 1e-12);

    let p4 = decrement_pmf(4)?;
    let expected = [6.0 / 11.0, 3.0 / 11.0, 2.0 / 11.0];
    let err = p4
        .iter()
        .zip(expected)
        .map(|(p, e)| (p - e).abs())
        .fold(0.0, f64::max);
    b.check("decrement_pmf(4) = [6/11, 3/11, 2/11]", err, 1e-15);

    b.check(
        "harmonic(4) = 25/12",
        (harmonic(4)? - 25.0 / 12.0).abs(),
        1e-15,
    );

    let q3 = hit_probability_exact(HittingQuery::new(3, 2)?);
    b.check("P(3 -> 2) = 2/3", (q3 - 2.0 / 3.0).abs(), 1e-15);
    let q4 = hit_probability_exact(HittingQuery::new(4, 2)?);
    b.check("P(4 -> 2) = 7/11", (q4 - 7.0 / 11.0).abs(), 1e-15);

    let pi2 = std::f64::consts::PI.powi(2);
    b.check(
        "limit_formula(1) = 6/pi^2",
        (limit_formula(1)? - 6.0 / pi2).abs(),
        1e-15,
    );
    Ok(())
}

fn renewal(b: &mut Builder) -> Result<()> {
    for r in 1..=3 {
        let m = hurwitz_moment(r)?;
        b.check(format!("hurwitz r={r} relative"), m.rel_error(), 1e-8);
    }

    let chi = ChiDistribution::default();
    let mut laplace = 0.0f64;
    let mut identity = 0.0f64;
    for i in 1..=20 {
        let l = chi.laplace(i)?;
        laplace = laplace.max(l.abs_error());
        identity = identity.max((l.closed_form - limit_formula(i)?).abs());
    }
    b.check(
        "chi laplace quadrature vs closed form, i <= 20",
        laplace,
        1e-8,
    );
    b.check(
        "chi laplace closed form vs limit_formula, i <= 20",
        identity,
        1e-12,
    );

    let mut tail = 0.0f64;
    for x in log_grid(1e-3, 20.0, 25) {
        tail = tail.max((nu_tail(x)? - nu_tail_quadrature(x)?).abs());
    }
    b.check("nu tail vs quadrature on [1e-3, 20]", tail, 1e-10);

    let mut chi_err = 0.0f64;
    for k in 0..=20 {
        let y = 0.5 * k as f64;
        chi_err = chi_err.max((chi.tail(y)? - chi.tail_quadrature(y)?).abs());
    }
    b.check("chi tail vs quadrature on [0, 10]", chi_err, 1e-10);
    b.check("chi tail(0) = 1", (chi.tail(0.0)? - 1.0).abs(), 1e-14);

    let zeta2 = ZetaConstants::get().zeta2;
    let mut refl = 0.0f64;
    for k in 1..=99 {
        let z = k as f64 / 100.0;
        let lhs = dilog(z)? + dilog(1.0 - z)?;
        refl = refl.max((lhs - (zeta2 - z.ln() * (1.0 - z).ln())).abs());
    }
    b.check("dilog reflection on 0.01..0.99", refl, 1e-13);
    Ok(())
}

fn composition(b: &mut Builder) -> Result<()> {
    let table = HarmonicTable::new(50)?;
    let mut closed = 0.0f64;
    let mut norm = 0.0f64;
    for j in 1..=50u64 {
        let row = gp_decrement_row(j)?;
        let h = table.get(j as usize);
        for (k, p) in row.iter().enumerate() {
            closed = closed.max((p - 1.0 / ((k + 1) as f64 * h)).abs());
        }
        norm = norm.max((row.iter().sum::<f64>() - 1.0).abs());
    }
    b.check("gp kernel vs 1/(i h_j), j <= 50", closed, 1e-8);
    b.check("gp kernel normalization, j <= 50", norm, 1e-10);

    let mut inv = 0.0f64;
    for x in log_grid(1e-6, 20.0, 60) {
        inv = inv.max((nu_tail_unchecked(nu_tail_unchecked(x)) - x).abs());
    }
    b.check("jump-size involution T(T(x)) = x on [1e-6, 20]", inv, 1e-12);
    Ok(())
}

/// `points` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|k| (a + (b - a) * k as f64 / (points - 1) as f64).exp())
        .collect()
}
