use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use harmonic_descent::chain::{
    convergence_table, hit_probability_exact, hit_probability_mc, ChainState, HarmonicDescent,
    HittingQuery,
};
use harmonic_descent::composition::{first_block_counts, CompositionMethod};
use harmonic_descent::numerics::{HarmonicTable, RngStream};
use harmonic_descent::renewal::{overshoot_mc, ChiDistribution};
use harmonic_descent::stats::{ks_distance, total_variation};
use harmonic_descent::verify::{self, Suite};

mod format;

use format::sig;

const DIGITS: usize = 12;

#[derive(Parser)]
#[command(
    name = "harmonic-descent",
    version,
    about = "Harmonic descent chain and overshoot numerics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Random seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args, Clone)]
struct Sampling {
    /// Monte Carlo replicates
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    reps: u64,
    /// Jump truncation level of the subordinator
    #[arg(long, default_value_t = 1e-6, value_parser = positive_float)]
    eps: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Exact q_n(i) next to the limit h_i/(ζ(2) i), as CSV
    LimitTable {
        #[arg(long = "i-max", value_parser = clap::value_parser!(u64).range(1..))]
        i_max: u64,
        /// Comma-separated n values
        #[arg(long = "n", default_value = "")]
        n: String,
        #[command(flatten)]
        common: Common,
    },
    /// Hitting probability from --start to --target, exact and Monte Carlo
    Hit {
        #[arg(long)]
        start: u64,
        #[arg(long)]
        target: u64,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        reps: u64,
        #[command(flatten)]
        common: Common,
    },
    /// One trajectory of the chain
    Simulate {
        #[arg(long)]
        start: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Kernel and dynamic-programming invariants
    VerifyKernel(VerifyArgs),
    /// Lévy measure and overshoot-law invariants
    VerifyRenewal(VerifyArgs),
    /// Gnedin-Pitman kernel invariants
    VerifyComposition(VerifyArgs),
    /// First-block law of balls-in-boxes vs the kernel sampler, as CSV
    BallsInBoxes {
        #[arg(long = "n")]
        n: String,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        common: Common,
    },
    /// Empirical first-passage overshoot tail vs the limit law, as CSV
    Overshoot {
        /// First-passage level t
        #[arg(long, default_value_t = 30.0, value_parser = positive_float)]
        level: f64,
        #[command(flatten)]
        sampling: Sampling,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Clone)]
struct VerifyArgs {
    /// Multiply every tolerance by this factor
    #[arg(long, default_value_t = 1.0, hide = true)]
    tolerance_scale: f64,
    #[command(flatten)]
    common: Common,
}

fn positive_float(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("expected a positive number, got {s}"))
    }
}

enum Failure {
    Usage(String),
    Verification(String),
    Io(io::Error),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl From<harmonic_descent::Error> for Failure {
    fn from(e: harmonic_descent::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn parse_list(s: &str) -> Result<Vec<u64>, Failure> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| match t.parse::<u64>() {
            Ok(v) if v >= 1 => Ok(v),
            _ => Err(Failure::Usage(format!("invalid entry {t:?} in --n"))),
        })
        .collect()
}

fn emit(common: &Common, body: &str) -> Result<(), Failure> {
    match &common.out {
        Some(path) => fs::write(path, body)?,
        None => io::stdout().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn limit_table(i_max: u64, ns: &[u64]) -> Result<String, Failure> {
    let mut out = String::from("i,n,q_n_exact,limit,gap\n");
    for i in 1..=i_max {
        let eligible: Vec<u64> = ns.iter().copied().filter(|&n| n >= i).collect();
        for row in convergence_table(i, &eligible)? {
            out.push_str(&format!(
                "{i},{},{},{},{}\n",
                row.n,
                sig(row.q, DIGITS),
                sig(row.limit, DIGITS),
                sig(row.gap, DIGITS)
            ));
        }
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::LimitTable { i_max, n, common } => {
            let ns = parse_list(&n)?;
            emit(&common, &limit_table(i_max, &ns)?)
        }
        Command::Hit {
            start,
            target,
            reps,
            common,
        } => {
            let q = HittingQuery::new(start, target)?;
            let exact = hit_probability_exact(q);
            let mc = hit_probability_mc(q, reps as usize, common.seed)?;
            let body = format!(
                "start,target,exact,mc_estimate,mc_stderr,reps,seed\n{start},{target},{},{},{},{reps},{}\n",
                sig(exact, DIGITS),
                sig(mc.estimate, DIGITS),
                sig(mc.stderr, DIGITS),
                common.seed
            );
            emit(&common, &body)
        }
        Command::Simulate { start, common } => {
            let state = ChainState::new(start)?;
            let chain = HarmonicDescent::new(start)?;
            let traj = chain.simulate(state, &mut RngStream::new(common.seed, 0))?;
            let line: Vec<String> = traj.states.iter().map(u64::to_string).collect();
            emit(&common, &format!("{}\n", line.join(" ")))
        }
        Command::VerifyKernel(args) => verify_suite(Suite::Kernel, &args),
        Command::VerifyRenewal(args) => verify_suite(Suite::Renewal, &args),
        Command::VerifyComposition(args) => verify_suite(Suite::Composition, &args),
        Command::BallsInBoxes {
            n,
            sampling,
            common,
        } => {
            let n = match parse_list(&n)?.as_slice() {
                [n] => *n,
                _ => {
                    return Err(Failure::Usage(
                        "balls-in-boxes takes a single --n value".into(),
                    ))
                }
            };
            let reps = sampling.reps as usize;
            let boxes = first_block_counts(
                n,
                reps,
                common.seed,
                CompositionMethod::BallsInBoxes {
                    epsilon: sampling.eps,
                },
            )?;
            let kernel = first_block_counts(n, reps, common.seed, CompositionMethod::Kernel)?;
            let h = HarmonicTable::new(n as usize)?.get(n as usize);
            let mut out = String::from("block_size,balls_in_boxes,kernel,exact\n");
            for b in 1..=n as usize {
                out.push_str(&format!(
                    "{b},{},{},{}\n",
                    sig(boxes[b] as f64 / reps as f64, DIGITS),
                    sig(kernel[b] as f64 / reps as f64, DIGITS),
                    sig(1.0 / (b as f64 * h), DIGITS)
                ));
            }
            eprintln!(
                "total_variation={}",
                sig(total_variation(&boxes, &kernel), DIGITS)
            );
            emit(&common, &out)
        }
        Command::Overshoot {
            level,
            sampling,
            common,
        } => {
            let est = overshoot_mc(level, sampling.eps, sampling.reps as usize, common.seed)?;
            let chi = ChiDistribution::default();
            let mut out = String::from("y,empirical_tail,chi_tail\n");
            for k in 0..=20 {
                let y = 0.25 * k as f64;
                out.push_str(&format!(
                    "{},{},{}\n",
                    sig(y, DIGITS),
                    sig(est.empirical_tail(y), DIGITS),
                    sig(chi.tail(y)?, DIGITS)
                ));
            }
            let ks = ks_distance(&est.samples, |y| chi.cdf(y).expect("y >= 0"));
            eprintln!("ks_distance={}", sig(ks, DIGITS));
            emit(&common, &out)
        }
    }
}

fn verify_suite(suite: Suite, args: &VerifyArgs) -> Result<(), Failure> {
    let report = verify::run(suite, args.tolerance_scale)?;
    emit(&args.common, &format!("{report}\n"))?;
    if report.passed() {
        Ok(())
    } else {
        let names: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        Err(Failure::Verification(names.join("; ")))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(names)) => {
            eprintln!("verification failed: {names}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
