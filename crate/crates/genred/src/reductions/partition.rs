//! Interval partitions with a per-interval density floor, and the
//! fast-growing block schedules that are cyclically mapped onto them.
//!
//! Given a target set `B` and an exact rational ε, ℕ is tiled by
//! consecutive intervals of lengths `n_1, n_2, …` chosen by a
//! deterministic rule: `n_i` is the smallest length that satisfies both
//!
//! * the growth requirement `n_i ≥ i · (n_1 + … + n_{i-1})` (so the
//!   combined earlier intervals are asymptotically negligible against
//!   `n_i`), and
//! * the strict density requirement `#(B ∩ interval_i) / n_i > ε`,
//!
//! scanning lengths upward from the growth bound. A [`BlockSchedule`]
//! then pairs interval `i` with a block of length `N_i`, where `N_i` is
//! the smallest multiple of `m_i` (the interval's member count) at least
//!
//! * `i · (N_1 + … + N_{i-1})` (block growth), and
//! * `(i+1) · n_{i+1} − (N_1 + … + N_{i-1})` (deferred domination:
//!   `N_1 + … + N_i ≥ (i+1) · n_{i+1}`, so interval lengths are
//!   negligible against the blocks already emitted).
//!
//! Choosing `N_i` therefore needs `n_{i+1}`: the partition always runs
//! one interval ahead of the schedule. All inequalities are exact
//! (integer or big-rational); there is no floating point anywhere in the
//! construction.
//!
//! The length search provably terminates only when the density of `B` in
//! initial segments exceeds ε infinitely often *with margin to spare*,
//! which the library cannot decide; a caller-supplied budget bounds the
//! largest candidate length scanned, and exhausting it is a reported
//! error, never a silent truncation.

use std::fmt;

use num::{BigInt, BigRational, One, Signed, ToPrimitive};

use crate::sets::ComputableSet;

/// Failure modes of schedule construction and reduction evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReductionError {
    /// No candidate interval length within the budget reached the
    /// density floor. Either the asserted ε is not an
    /// infinitely-often density bound for the target (with margin), or
    /// the budget is too small.
    BudgetExhausted {
        target: String,
        eps: String,
        /// 1-based index of the interval whose search failed.
        interval_index: usize,
        start: u64,
        lower_bound: u64,
        budget: u64,
        /// Best density seen among scanned candidates, as (count, length).
        best: Option<(u64, u64)>,
    },
    /// A schedule or rank value left the u64 range.
    ArithmeticOverflow { context: &'static str },
}

impl fmt::Display for ReductionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReductionError::BudgetExhausted {
                target,
                eps,
                interval_index,
                start,
                lower_bound,
                budget,
                best,
            } => {
                write!(
                    f,
                    "budget exhausted at interval {interval_index} of `{target}`: \
                     no length in {lower_bound}..={budget} starting at {start} has \
                     density above {eps}"
                )?;
                match best {
                    Some((count, len)) => write!(f, " (best seen: {count}/{len})"),
                    None => write!(f, " (no candidate length within budget)"),
                }
            }
            ReductionError::ArithmeticOverflow { context } => {
                write!(f, "arithmetic overflow while {context}")
            }
        }
    }
}

impl std::error::Error for ReductionError {}

/// One interval of the partition: `[start, start + length)` together with
/// the target's members inside it, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub start: u64,
    pub length: u64,
    pub members: Vec<u64>,
}

impl Interval {
    pub fn member_count(&self) -> u64 {
        self.members.len() as u64
    }
}

/// Exact comparison `count / len > eps` without constructing rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
enum DensityFloor {
    /// ε = p/q with both parts in u64 range; compared in u128.
    Small { p: u64, q: u64 },
    Big { p: BigInt, q: BigInt },
}

impl DensityFloor {
    fn new(eps: &BigRational) -> Self {
        match (eps.numer().to_u64(), eps.denom().to_u64()) {
            (Some(p), Some(q)) => DensityFloor::Small { p, q },
            _ => DensityFloor::Big {
                p: eps.numer().clone(),
                q: eps.denom().clone(),
            },
        }
    }

    fn exceeded_by(&self, count: u64, len: u64) -> bool {
        match self {
            DensityFloor::Small { p, q } => {
                (count as u128) * (*q as u128) > (len as u128) * (*p as u128)
            }
            DensityFloor::Big { p, q } => BigInt::from(count) * q > BigInt::from(len) * p,
        }
    }
}

/// Consecutive intervals tiling an initial segment of ℕ, each holding
/// target members with density strictly above ε.
///
/// The partition is extendable: it owns the target set and the search
/// budget, and grows on demand.
#[derive(Debug, Clone)]
pub struct EpsIntervalPartition {
    set: ComputableSet,
    eps: BigRational,
    floor: DensityFloor,
    budget: u64,
    intervals: Vec<Interval>,
}

impl EpsIntervalPartition {
    /// Empty partition over `set` with density floor `eps`.
    ///
    /// Panics unless `0 < eps < 1` and `budget ≥ 1`.
    pub fn new(set: ComputableSet, eps: BigRational, budget: u64) -> Self {
        assert!(
            eps.is_positive() && eps < BigRational::one(),
            "eps must lie strictly between 0 and 1"
        );
        assert!(budget >= 1, "budget must be at least 1");
        let floor = DensityFloor::new(&eps);
        EpsIntervalPartition {
            set,
            eps,
            floor,
            budget,
            intervals: Vec::new(),
        }
    }

    pub fn target_name(&self) -> &str {
        self.set.name()
    }

    pub fn eps(&self) -> &BigRational {
        &self.eps
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    /// Sum of interval lengths so far, i.e. the start of the next one.
    pub fn covered(&self) -> u64 {
        self.intervals
            .last()
            .map(|iv| iv.start + iv.length)
            .unwrap_or(0)
    }

    /// Extends until at least `count` intervals exist.
    pub fn ensure(&mut self, count: usize) -> Result<(), ReductionError> {
        while self.intervals.len() < count {
            self.extend_one()?;
        }
        Ok(())
    }

    /// Appends the next interval under the deterministic minimal-length
    /// rule.
    pub fn extend_one(&mut self) -> Result<(), ReductionError> {
        let index = self.intervals.len() + 1;
        let start = self.covered();
        let lower_bound = if index == 1 {
            1u64
        } else {
            let sum: u128 = self.intervals.iter().map(|iv| iv.length as u128).sum();
            u64::try_from(index as u128 * sum).map_err(|_| {
                ReductionError::ArithmeticOverflow {
                    context: "computing the interval growth bound",
                }
            })?
        };

        let mut members = Vec::new();
        let mut scanned = 0u64;
        let mut best: Option<(u64, u64)> = None;
        let mut len = lower_bound;
        while len <= self.budget {
            while scanned < len {
                let point = start.checked_add(scanned).ok_or(
                    ReductionError::ArithmeticOverflow {
                        context: "scanning interval points",
                    },
                )?;
                if self.set.contains(point) {
                    members.push(point);
                }
                scanned += 1;
            }
            let count = members.len() as u64;
            if self.floor.exceeded_by(count, len) {
                start
                    .checked_add(len)
                    .ok_or(ReductionError::ArithmeticOverflow {
                        context: "advancing the interval frontier",
                    })?;
                self.intervals.push(Interval {
                    start,
                    length: len,
                    members,
                });
                return Ok(());
            }
            let improves = match best {
                None => count > 0,
                Some((bc, bl)) => (count as u128) * (bl as u128) > (bc as u128) * (len as u128),
            };
            if improves {
                best = Some((count, len));
            }
            len += 1;
        }
        Err(ReductionError::BudgetExhausted {
            target: self.set.name().to_string(),
            eps: self.eps.to_string(),
            interval_index: index,
            start,
            lower_bound,
            budget: self.budget,
            best,
        })
    }

    /// Re-derives every invariant from scratch; test and audit helper.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut expected_start = 0u64;
        let mut prefix_sum = 0u128;
        for (idx, iv) in self.intervals.iter().enumerate() {
            let i = idx + 1;
            if iv.start != expected_start {
                return Err(format!(
                    "interval {i} starts at {} instead of {expected_start}",
                    iv.start
                ));
            }
            if iv.length == 0 {
                return Err(format!("interval {i} has zero length"));
            }
            if i >= 2 && (iv.length as u128) < i as u128 * prefix_sum {
                return Err(format!(
                    "interval {i} violates growth: {} < {i} * {prefix_sum}",
                    iv.length
                ));
            }
            let recomputed: Vec<u64> = (iv.start..iv.start + iv.length)
                .filter(|&x| self.set.contains(x))
                .collect();
            if recomputed != iv.members {
                return Err(format!("interval {i} member list is not exactly B ∩ interval"));
            }
            if iv.members.is_empty() {
                return Err(format!("interval {i} has no members"));
            }
            if !self.floor.exceeded_by(iv.member_count(), iv.length) {
                return Err(format!(
                    "interval {i} density {}/{} does not exceed {}",
                    iv.member_count(),
                    iv.length,
                    self.eps
                ));
            }
            prefix_sum += iv.length as u128;
            expected_start = iv.start + iv.length;
        }
        Ok(())
    }
}

/// Returns the first `how_many` intervals of the partition of ℕ for
/// `target` at density floor `eps`.
pub fn find_eps_intervals(
    target: &ComputableSet,
    eps: &BigRational,
    how_many: usize,
    budget: u64,
) -> Result<EpsIntervalPartition, ReductionError> {
    let mut partition = EpsIntervalPartition::new(target.clone(), eps.clone(), budget);
    partition.ensure(how_many)?;
    Ok(partition)
}

/// One block of the second partition: `[start, start + length)` in the
/// argument space, mapped cyclically onto the members of its paired
/// interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub start: u64,
    pub length: u64,
}

/// The second partition: blocks `N_1, N_2, …` paired one-to-one with the
/// intervals of an [`EpsIntervalPartition`], lazily extendable.
#[derive(Debug, Clone)]
pub struct BlockSchedule {
    partition: EpsIntervalPartition,
    blocks: Vec<Block>,
}

impl BlockSchedule {
    pub fn new(target: ComputableSet, eps: BigRational, budget: u64) -> Self {
        BlockSchedule {
            partition: EpsIntervalPartition::new(target, eps, budget),
            blocks: Vec::new(),
        }
    }

    pub fn partition(&self) -> &EpsIntervalPartition {
        &self.partition
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// First argument not yet covered by a block.
    pub fn frontier(&self) -> u64 {
        self.blocks
            .last()
            .map(|b| b.start + b.length)
            .unwrap_or(0)
    }

    /// Appends block `i`, extending the partition to interval `i + 1`
    /// first (the deferred-domination bound references `n_{i+1}`).
    pub fn extend_one(&mut self) -> Result<(), ReductionError> {
        let i = self.blocks.len() + 1;
        self.partition.ensure(i + 1)?;
        let m = self.partition.intervals()[i - 1].member_count();
        let n_next = self.partition.intervals()[i].length;
        let start = self.frontier();

        let growth = i as u128 * start as u128;
        let domination =
            ((i as u128 + 1) * n_next as u128).saturating_sub(start as u128);
        let target = (m as u128).max(growth).max(domination);
        let length = target.div_ceil(m as u128) * m as u128;
        let length =
            u64::try_from(length).map_err(|_| ReductionError::ArithmeticOverflow {
                context: "computing a block length",
            })?;
        start
            .checked_add(length)
            .ok_or(ReductionError::ArithmeticOverflow {
                context: "advancing the block frontier",
            })?;
        self.blocks.push(Block { start, length });
        Ok(())
    }

    /// Extends until some block contains `x`; returns its 0-based index.
    pub fn ensure_covers(&mut self, x: u64) -> Result<usize, ReductionError> {
        while self.frontier() <= x {
            self.extend_one()?;
        }
        Ok(self.blocks.partition_point(|b| b.start <= x) - 1)
    }

    /// The cyclic block map: the block containing `x` is walked through
    /// the members of its paired interval, in ascending order, repeating
    /// every `m_i` arguments.
    pub fn value_at(&mut self, x: u64) -> Result<u64, ReductionError> {
        let idx = self.ensure_covers(x)?;
        let block = self.blocks[idx];
        let members = &self.partition.intervals()[idx].members;
        let offset = x - block.start;
        Ok(members[(offset % members.len() as u64) as usize])
    }

    /// Re-derives every schedule invariant from scratch.
    pub fn check_invariants(&self) -> Result<(), String> {
        self.partition.check_invariants()?;
        if !self.blocks.is_empty() && self.partition.intervals().len() < self.blocks.len() + 1 {
            return Err("partition must run one interval ahead of the blocks".to_string());
        }
        let mut expected_start = 0u64;
        let mut prefix_sum = 0u128;
        for (idx, b) in self.blocks.iter().enumerate() {
            let i = idx + 1;
            let iv = &self.partition.intervals()[idx];
            if b.start != expected_start {
                return Err(format!(
                    "block {i} starts at {} instead of {expected_start}",
                    b.start
                ));
            }
            if b.length == 0 || b.length % iv.member_count() != 0 {
                return Err(format!(
                    "block {i} length {} is not a positive multiple of m_{i} = {}",
                    b.length,
                    iv.member_count()
                ));
            }
            if i >= 2 && (b.length as u128) < i as u128 * prefix_sum {
                return Err(format!(
                    "block {i} violates growth: {} < {i} * {prefix_sum}",
                    b.length
                ));
            }
            prefix_sum += b.length as u128;
            let n_next = self.partition.intervals()[idx + 1].length as u128;
            if prefix_sum < (i as u128 + 1) * n_next {
                return Err(format!(
                    "deferred domination fails at block {i}: {prefix_sum} < {} * {n_next}",
                    i + 1
                ));
            }
            expected_start = b.start + b.length;
        }
        Ok(())
    }
}
