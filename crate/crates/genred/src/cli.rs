//! Command-line front end.
//!
//! Subcommands: `density`, `classify`, `reduce`, `verify-reduction`,
//! `verify-uniformity`. Exit codes are a stable contract: 0 on success or
//! a passing verification, 1 on domain failures (budget exhaustion,
//! failed verification, I/O), 2 on flag or expression parse errors.
//! Rationals cross the CLI boundary as `p/q` text, never as floats, and
//! all outputs are byte-identical across runs with identical flags.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use num::{BigInt, BigRational, One, Signed, Zero};

use crate::density;
use crate::reductions::{generic_reduce, Evaluate, Reduction, ReductionError};
use crate::sets::{eval_expr, parse_set_expr, ComputableSet};
use crate::verify::{assert_vanishing, check_m_reduction, uniformity_trajectory};

const DEFAULT_LADDER: &str = "1000,10000,100000,1000000";

#[derive(Parser, Debug)]
#[command(
    name = "genred",
    version,
    about = "Builds and verifies density-uniform many-one reductions between computable sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact prefix-density profile of a set expression, as CSV.
    Density {
        /// Set expression, e.g. `evens` or `union(odds,squares)`.
        expr: String,
        /// Comma-separated checkpoints, strictly increasing.
        #[arg(long, value_delimiter = ',', default_value = DEFAULT_LADDER)]
        ladder: Vec<u64>,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Heuristic density classification over a geometric ladder.
    Classify {
        expr: String,
        /// Largest checkpoint of the ladder (at least 100).
        #[arg(long, default_value_t = 100_000)]
        horizon: u64,
        /// Decision band `p/q`, strictly between 0 and 1/2.
        #[arg(long, default_value = "1/20", value_parser = parse_band)]
        band: BigRational,
        /// Write the evidence CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Construct the reduction from one set to another; prints a JSON
    /// descriptor and optionally tabulates values.
    Reduce {
        #[command(flatten)]
        reduction: ReductionFlags,
        /// Also emit a CSV table `x,fx,in_a,fx_in_b` for all x below this.
        #[arg(long = "eval-upto")]
        eval_upto: Option<u64>,
        /// Number of schedule entries in the JSON descriptor.
        #[arg(long, default_value_t = 8)]
        describe: usize,
        /// Write the value table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustively check the m-reduction property below a horizon.
    VerifyReduction {
        #[command(flatten)]
        reduction: ReductionFlags,
        #[arg(long, default_value_t = 100_000)]
        horizon: u64,
    },
    /// Track preimage densities of a negligible set and check the
    /// vanishing surrogate.
    VerifyUniformity {
        #[command(flatten)]
        reduction: ReductionFlags,
        /// Set expression for the negligible set to pull back.
        #[arg(long)]
        negligible: String,
        /// Comma-separated checkpoints (at least two, increasing).
        #[arg(long, value_delimiter = ',', default_value = DEFAULT_LADDER)]
        ladder: Vec<u64>,
        /// Required shrink factor `p/q > 1` between first and last point.
        #[arg(long, default_value = "2/1", value_parser = parse_shrink)]
        shrink: BigRational,
        /// Absolute density floor `p/q` that also counts as vanished.
        #[arg(long, default_value = "1/10", value_parser = parse_floor)]
        floor: BigRational,
        /// Write the trajectory CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Flags identifying a constructed reduction.
#[derive(Args, Debug)]
struct ReductionFlags {
    /// Source set expression.
    #[arg(long)]
    from: String,
    /// Target set expression.
    #[arg(long)]
    to: String,
    /// Density bound `p/q` in (0,1) asserted for the target.
    #[arg(long = "eps-b", value_parser = parse_eps)]
    eps_b: BigRational,
    /// Density bound `p/q` in (0,1) asserted for the target's complement.
    #[arg(long = "eps-cob", value_parser = parse_eps)]
    eps_cob: BigRational,
    /// Largest candidate interval length the search may scan.
    #[arg(long, default_value_t = 10_000_000)]
    budget: u64,
}

fn parse_rational(text: &str) -> Result<BigRational, String> {
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text.trim(), "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| format!("`{text}` is not a rational p/q"))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| format!("`{text}` is not a rational p/q"))?;
    if den.is_zero() {
        return Err(format!("`{text}` has a zero denominator"));
    }
    Ok(BigRational::new(num, den))
}

fn parse_eps(text: &str) -> Result<BigRational, String> {
    let r = parse_rational(text)?;
    if r.is_positive() && r < BigRational::one() {
        Ok(r)
    } else {
        Err(format!("eps `{text}` must lie strictly between 0 and 1"))
    }
}

fn parse_band(text: &str) -> Result<BigRational, String> {
    let r = parse_rational(text)?;
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    if r.is_positive() && r < half {
        Ok(r)
    } else {
        Err(format!("band `{text}` must lie strictly between 0 and 1/2"))
    }
}

fn parse_shrink(text: &str) -> Result<BigRational, String> {
    let r = parse_rational(text)?;
    if r > BigRational::one() {
        Ok(r)
    } else {
        Err(format!("shrink factor `{text}` must exceed 1"))
    }
}

fn parse_floor(text: &str) -> Result<BigRational, String> {
    let r = parse_rational(text)?;
    if r.is_positive() && r < BigRational::one() {
        Ok(r)
    } else {
        Err(format!("floor `{text}` must lie strictly between 0 and 1"))
    }
}

/// A failure that has already decided its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn domain(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::domain(format!("i/o error: {e}"))
    }
}

impl From<ReductionError> for Failure {
    fn from(e: ReductionError) -> Self {
        Failure::domain(e.to_string())
    }
}

/// Parses `argv` and dispatches. Returns the process exit code; all
/// diagnostics go to `err`, all requested output to `out` or `--out`
/// files.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    0
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    2
                }
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message);
            failure.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Density { expr, ladder, out: path } => {
            let set = parse_set(&expr)?;
            check_ladder(&ladder, 1)?;
            let profile = density::density_profile(&set, &ladder)
                .map_err(|e| Failure::usage(e.to_string()))?;
            with_output(path.as_deref(), out, |w| profile.write_csv(w))?;
            Ok(0)
        }
        Command::Classify {
            expr,
            horizon,
            band,
            out: path,
        } => {
            let set = parse_set(&expr)?;
            if horizon < 100 {
                return Err(Failure::usage("--horizon must be at least 100"));
            }
            let verdict = density::classify(&set, horizon, &band);
            writeln!(out, "set: {}", set.name())?;
            writeln!(
                out,
                "class: {} (heuristic verdict from the ladder below; band {band})",
                verdict.class
            )?;
            writeln!(out, "empirical_liminf: {}", verdict.evidence.empirical_liminf)?;
            writeln!(out, "empirical_limsup: {}", verdict.evidence.empirical_limsup)?;
            with_output(path.as_deref(), out, |w| verdict.evidence.write_csv(w))?;
            Ok(0)
        }
        Command::Reduce {
            reduction,
            eval_upto,
            describe,
            out: path,
        } => {
            let (source, target, f) = build_reduction(&reduction)?;
            let descriptor = f.describe(describe)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&descriptor)?)?;
            if let Some(upto) = eval_upto {
                with_output(path.as_deref(), out, |w| {
                    write_value_table(w, &source, &target, &f, upto)
                })?;
            }
            Ok(0)
        }
        Command::VerifyReduction { reduction, horizon } => {
            if horizon < 1 {
                return Err(Failure::usage("--horizon must be at least 1"));
            }
            let (source, target, f) = build_reduction(&reduction)?;
            let report = check_m_reduction(&source, &target, &f, horizon)
                .map_err(|e| Failure::domain(e.to_string()))?;
            writeln!(out, "reduction: {}", f.provenance())?;
            writeln!(out, "{report}")?;
            Ok(if report.passed { 0 } else { 1 })
        }
        Command::VerifyUniformity {
            reduction,
            negligible,
            ladder,
            shrink,
            floor,
            out: path,
        } => {
            check_ladder(&ladder, 2)?;
            let x_set = parse_set(&negligible)?;
            let (_, _, f) = build_reduction(&reduction)?;
            let trajectory = uniformity_trajectory(&f, &x_set, &ladder)
                .map_err(|e| Failure::domain(e.to_string()))?;
            let comments = [
                ("eps_b".to_string(), reduction.eps_b.to_string()),
                ("eps_cob".to_string(), reduction.eps_cob.to_string()),
            ];
            with_output(path.as_deref(), out, |w| {
                trajectory.write_csv(w, &comments)
            })?;
            let vanished = assert_vanishing(&trajectory, &shrink, &floor);
            let first = &trajectory.points[0].rho;
            let last = &trajectory.points[trajectory.points.len() - 1].rho;
            writeln!(
                out,
                "uniformity surrogate ({} under {}): {} (first rho {first}, last rho {last}, \
                 shrink {shrink}, floor {floor})",
                x_set.name(),
                f.provenance(),
                if vanished { "PASS" } else { "FAIL" },
            )?;
            Ok(if vanished { 0 } else { 1 })
        }
    }
}

fn parse_set(expr: &str) -> Result<ComputableSet, Failure> {
    let parsed = parse_set_expr(expr)
        .map_err(|e| Failure::usage(format!("in set expression `{expr}`: {e}")))?;
    eval_expr(&parsed).map_err(|e| Failure::usage(format!("in set expression `{expr}`: {e}")))
}

fn check_ladder(ladder: &[u64], min_len: usize) -> Result<(), Failure> {
    if ladder.len() < min_len {
        return Err(Failure::usage(format!(
            "--ladder needs at least {min_len} checkpoint(s)"
        )));
    }
    if ladder[0] == 0 || ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Failure::usage(
            "--ladder must be strictly increasing and start at 1 or above",
        ));
    }
    Ok(())
}

fn build_reduction(
    flags: &ReductionFlags,
) -> Result<(ComputableSet, ComputableSet, Reduction), Failure> {
    if flags.budget < 1 {
        return Err(Failure::usage("--budget must be at least 1"));
    }
    let source = parse_set(&flags.from)?;
    let target = parse_set(&flags.to)?;
    let f = generic_reduce(&source, &target, &flags.eps_b, &flags.eps_cob, flags.budget);
    Ok((source, target, f))
}

fn write_value_table(
    w: &mut dyn Write,
    source: &ComputableSet,
    target: &ComputableSet,
    f: &Reduction,
    upto: u64,
) -> io::Result<()> {
    writeln!(w, "x,fx,in_a,fx_in_b")?;
    for x in 0..upto {
        let y = f
            .evaluate(x)
            .map_err(|e| io::Error::other(e.to_string()))?;
        writeln!(w, "{x},{y},{},{}", source.contains(x), target.contains(y))?;
    }
    Ok(())
}

fn with_output(
    path: Option<&Path>,
    fallback: &mut dyn Write,
    render: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), Failure> {
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| {
                Failure::domain(format!("cannot create {}: {e}", p.display()))
            })?;
            let mut w = BufWriter::new(file);
            render(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => {
            render(fallback)?;
            Ok(())
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::domain(format!("descriptor serialization failed: {e}"))
    }
}
