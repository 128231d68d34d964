//! Exact finite-prefix checks of the m-reduction property, and empirical
//! uniformity checks via preimage-density trajectories.
//!
//! The m-reduction property `x ∈ A ⟺ f(x) ∈ B` is decidable below any
//! horizon and is checked exhaustively. Uniformity is not: it quantifies
//! over all negligible sets and over the limit behaviour of densities.
//! The harness therefore tracks the exact preimage density of a catalog
//! of negligible sets along a checkpoint ladder and asserts a documented
//! finite surrogate — the density either fell below an absolute floor or
//! shrank by a required factor across the window — while reporting the
//! full trajectory so convergence can be inspected by eye.

use std::fmt;
use std::io::{self, Write};

use num::{BigInt, BigRational, One};
use thiserror::Error;

use crate::density::{decimal_17, DensityPoint};
use crate::reductions::{Evaluate, ReductionError};
use crate::sets::{builtin, ComputableSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("evaluating the reduction at x = {x}: {source}")]
    Evaluation { x: u64, source: ReductionError },
    #[error("checkpoints must be nonempty and strictly increasing from at least 1")]
    BadCheckpoints,
}

/// A single counterexample to `x ∈ A ⟺ f(x) ∈ B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub x: u64,
    /// Membership of `x` in the source set.
    pub expected: bool,
    /// Membership of `f(x)` in the target set.
    pub observed: bool,
}

/// Result of an exhaustive m-reduction check below a horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionReport {
    pub checked_up_to: u64,
    pub violations: Vec<Violation>,
    pub passed: bool,
}

impl fmt::Display for ReductionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passed {
            write!(
                f,
                "m-reduction check for x < {}: PASS (0 violations)",
                self.checked_up_to
            )
        } else {
            let first = &self.violations[0];
            write!(
                f,
                "m-reduction check for x < {}: FAIL ({} violations; first at x = {}: \
                 x in source = {}, f(x) in target = {})",
                self.checked_up_to,
                self.violations.len(),
                first.x,
                first.expected,
                first.observed
            )
        }
    }
}

/// Exhaustively tests `x ∈ A ⟺ f(x) ∈ B` for every `x < horizon`.
pub fn check_m_reduction(
    source: &ComputableSet,
    target: &ComputableSet,
    f: &dyn Evaluate,
    horizon: u64,
) -> Result<ReductionReport, VerifyError> {
    let mut violations = Vec::new();
    for x in 0..horizon {
        let y = f
            .evaluate(x)
            .map_err(|source| VerifyError::Evaluation { x, source })?;
        let expected = source.contains(x);
        let observed = target.contains(y);
        if expected != observed {
            violations.push(Violation {
                x,
                expected,
                observed,
            });
        }
    }
    Ok(ReductionReport {
        checked_up_to: horizon,
        passed: violations.is_empty(),
        violations,
    })
}

/// Exact densities of the preimage set `{x : f(x) ∈ X}` along a
/// checkpoint ladder, computed in one incremental pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniformityTrajectory {
    pub reduction_provenance: String,
    pub negligible_set_name: String,
    pub points: Vec<DensityPoint>,
}

impl UniformityTrajectory {
    /// CSV rendering, `#`-prefixed provenance comments first.
    pub fn write_csv(
        &self,
        w: &mut dyn Write,
        extra_comments: &[(String, String)],
    ) -> io::Result<()> {
        writeln!(w, "# reduction: {}", self.reduction_provenance)?;
        writeln!(w, "# negligible: {}", self.negligible_set_name)?;
        for (key, value) in extra_comments {
            writeln!(w, "# {key}: {value}")?;
        }
        writeln!(w, "n,count,rho_num,rho_den,rho_float")?;
        for p in &self.points {
            writeln!(
                w,
                "{},{},{},{},{}",
                p.n,
                p.count,
                p.rho.numer(),
                p.rho.denom(),
                decimal_17(&p.rho)
            )?;
        }
        Ok(())
    }
}

/// Tracks the density of `f^{-1}(X)` at each checkpoint.
pub fn uniformity_trajectory(
    f: &dyn Evaluate,
    x_set: &ComputableSet,
    checkpoints: &[u64],
) -> Result<UniformityTrajectory, VerifyError> {
    if checkpoints.is_empty()
        || checkpoints[0] == 0
        || checkpoints.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(VerifyError::BadCheckpoints);
    }
    let mut points = Vec::with_capacity(checkpoints.len());
    let mut count = 0u64;
    let mut next = 0u64;
    for &cp in checkpoints {
        for x in next..cp {
            let y = f
                .evaluate(x)
                .map_err(|source| VerifyError::Evaluation { x, source })?;
            if x_set.contains(y) {
                count += 1;
            }
        }
        next = cp;
        points.push(DensityPoint {
            n: cp,
            count,
            rho: BigRational::new(BigInt::from(count), BigInt::from(cp)),
        });
    }
    Ok(UniformityTrajectory {
        reduction_provenance: f.provenance(),
        negligible_set_name: x_set.name().to_string(),
        points,
    })
}

/// A negligible catalog entry: the set plus the vanishing floor its
/// trajectories are held to.
///
/// Primes decay only like `1 / ln n`, far slower than the other entries,
/// so they carry a relaxed floor.
#[derive(Debug, Clone)]
pub struct NegligibleEntry {
    pub set: ComputableSet,
    pub vanish_floor: BigRational,
}

/// The stock negligible sets used to probe uniformity.
pub fn negligible_catalog() -> Vec<NegligibleEntry> {
    let floor = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    vec![
        NegligibleEntry {
            set: builtin("squares", &[]).expect("catalog builtin"),
            vanish_floor: floor(1, 10),
        },
        NegligibleEntry {
            set: builtin("powers_of_two", &[]).expect("catalog builtin"),
            vanish_floor: floor(1, 10),
        },
        NegligibleEntry {
            set: builtin("primes", &[]).expect("catalog builtin"),
            vanish_floor: floor(1, 5),
        },
    ]
}

/// Finite surrogate for "the preimage density vanishes": true iff the
/// last density is at most `floor`, or the density shrank by at least
/// `shrink_factor` from the first checkpoint to the last.
///
/// Panics unless the trajectory has at least two points and
/// `shrink_factor > 1`.
pub fn assert_vanishing(
    t: &UniformityTrajectory,
    shrink_factor: &BigRational,
    floor: &BigRational,
) -> bool {
    assert!(t.points.len() >= 2, "trajectory needs at least two points");
    assert!(
        *shrink_factor > BigRational::one(),
        "shrink factor must exceed 1"
    );
    let first = &t.points[0].rho;
    let last = &t.points[t.points.len() - 1].rho;
    last <= floor || &(last * shrink_factor) <= first
}
