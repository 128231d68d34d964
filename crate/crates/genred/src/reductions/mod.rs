//! Total evaluable reduction functions between computable sets.
//!
//! A [`Reduction`] is a total function ℕ → ℕ built from five shapes:
//!
//! * `Identity` — the trivial reduction of a set to itself;
//! * `Rank` — maps the k-th element of `A` to `2k` and the k-th element
//!   of the complement to `2k + 1`, so the image parity decides
//!   membership in `A`;
//! * `RangeInto` — the cyclic block map over an ε-interval partition of
//!   the target; its range is contained in the target by construction;
//! * `ParityCombine` — dispatches even arguments to one child and odd
//!   arguments to the other (applied to the argument itself, not to its
//!   index within the parity class);
//! * `Compose` — ordinary function composition.
//!
//! [`generic_reduce`] wires them together: `A` is rank-reduced to the
//! evens, and the evens are mapped into `B` (odds into the complement of
//! `B`) by a parity combination of two range maps. Evaluation is lazy and
//! memoized behind a mutex, so a reduction value behaves as a pure
//! function: identical arguments give identical results regardless of
//! evaluation order, interleaving, or sharing across threads.

mod partition;

pub use partition::{
    find_eps_intervals, Block, BlockSchedule, EpsIntervalPartition, Interval, ReductionError,
};

use std::fmt;
use std::sync::Mutex;

use num::BigRational;
use serde_json::{json, Value};

use crate::sets::ComputableSet;

/// Anything evaluable as a total function ℕ → ℕ.
///
/// The verification harness is generic over this trait so it can check
/// hand-built functions (including deliberately broken ones) exactly as
/// it checks library reductions.
pub trait Evaluate: Send + Sync {
    fn evaluate(&self, x: u64) -> Result<u64, ReductionError>;

    /// Human-readable construction tag, used in reports and CSV headers.
    fn provenance(&self) -> String {
        "anonymous".to_string()
    }
}

enum Kind {
    Identity,
    Rank {
        set: ComputableSet,
        /// prefix[i] = #{y < i : y ∈ set}; grows on demand.
        prefix: Mutex<Vec<u64>>,
    },
    RangeInto {
        schedule: Mutex<BlockSchedule>,
    },
    ParityCombine {
        on_even: Box<Reduction>,
        on_odd: Box<Reduction>,
    },
    Compose {
        outer: Box<Reduction>,
        inner: Box<Reduction>,
    },
}

/// A constructed reduction function; see the module docs for the shapes.
pub struct Reduction {
    provenance: String,
    kind: Kind,
}

impl fmt::Debug for Reduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Reduction({})", self.provenance)
    }
}

impl fmt::Display for Reduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.provenance)
    }
}

/// The identity function.
pub fn identity() -> Reduction {
    Reduction {
        provenance: "identity".to_string(),
        kind: Kind::Identity,
    }
}

/// The order-preserving rank map sending `source` to the evens and its
/// complement to the odds.
///
/// `f(x) = 2 · rank_A(x)` when `x ∈ A`, else `2 · rank_{coA}(x) + 1`,
/// where `rank_S(x) = #{y < x : y ∈ S}`. Hence `f(x)` is even iff
/// `x ∈ A`, for any `A` whatsoever — empty and full included (then some
/// naturals simply never appear in the range).
pub fn rank_reduce_to_evens(source: &ComputableSet) -> Reduction {
    Reduction {
        provenance: format!("rank_to_evens({})", source.name()),
        kind: Kind::Rank {
            set: source.clone(),
            prefix: Mutex::new(vec![0]),
        },
    }
}

/// The cyclic block map whose range is contained in `target`.
///
/// Construction is lazy: intervals and blocks are found on first demand,
/// so a false ε assertion surfaces as [`ReductionError::BudgetExhausted`]
/// from [`Evaluate::evaluate`] rather than here.
pub fn range_into(target: &ComputableSet, eps: &BigRational, budget: u64) -> Reduction {
    Reduction {
        provenance: format!("range_into({}; eps={})", target.name(), eps),
        kind: Kind::RangeInto {
            schedule: Mutex::new(BlockSchedule::new(target.clone(), eps.clone(), budget)),
        },
    }
}

/// Parity dispatch: even arguments go to `on_even`, odd to `on_odd`,
/// both applied to the argument itself.
pub fn combine_parity(on_even: Reduction, on_odd: Reduction) -> Reduction {
    let provenance = format!(
        "parity_combine({}, {})",
        on_even.provenance, on_odd.provenance
    );
    Reduction {
        provenance,
        kind: Kind::ParityCombine {
            on_even: Box::new(on_even),
            on_odd: Box::new(on_odd),
        },
    }
}

/// Reduces the evens to `target`: even arguments land in `target`, odd
/// arguments in its complement.
///
/// `eps_b` and `eps_cob` are the caller-asserted infinitely-often density
/// bounds for `target` and its complement (both must be non-negligible
/// for the bounds to exist).
pub fn reduce_evens_to(
    target: &ComputableSet,
    eps_b: &BigRational,
    eps_cob: &BigRational,
    budget: u64,
) -> Reduction {
    let provenance = format!("evens_to({}; eps={},{})", target.name(), eps_b, eps_cob);
    let into_b = range_into(target, eps_b, budget);
    let into_cob = range_into(&target.complement(), eps_cob, budget);
    Reduction {
        provenance,
        kind: Kind::ParityCombine {
            on_even: Box::new(into_b),
            on_odd: Box::new(into_cob),
        },
    }
}

/// Function composition: `x ↦ outer(inner(x))`.
pub fn compose(outer: Reduction, inner: Reduction) -> Reduction {
    let provenance = format!("compose({}, {})", outer.provenance, inner.provenance);
    Reduction {
        provenance,
        kind: Kind::Compose {
            outer: Box::new(outer),
            inner: Box::new(inner),
        },
    }
}

/// The full pipeline: reduces any computable `source` to a `target` whose
/// density stays away from 0 and 1, by composing the rank map with the
/// parity combination of two range maps.
///
/// For every `x`, `x ∈ source ⟺ f(x) ∈ target` — checked exhaustively by
/// [`crate::verify::check_m_reduction`] on finite prefixes.
pub fn generic_reduce(
    source: &ComputableSet,
    target: &ComputableSet,
    eps_b: &BigRational,
    eps_cob: &BigRational,
    budget: u64,
) -> Reduction {
    compose(
        reduce_evens_to(target, eps_b, eps_cob, budget),
        rank_reduce_to_evens(source),
    )
}

impl Reduction {
    /// Short tag for the outermost construction shape.
    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            Kind::Identity => "identity",
            Kind::Rank { .. } => "rank_to_evens",
            Kind::RangeInto { .. } => "range_into",
            Kind::ParityCombine { .. } => "parity_combine",
            Kind::Compose { .. } => "compose",
        }
    }

    /// Snapshots of every block schedule inside this reduction, in
    /// evaluation-tree order. Empty for schedule-free reductions.
    pub fn schedule_snapshots(&self) -> Vec<BlockSchedule> {
        match &self.kind {
            Kind::Identity | Kind::Rank { .. } => Vec::new(),
            Kind::RangeInto { schedule } => {
                vec![schedule.lock().expect("schedule lock").clone()]
            }
            Kind::ParityCombine { on_even, on_odd } => {
                let mut v = on_even.schedule_snapshots();
                v.extend(on_odd.schedule_snapshots());
                v
            }
            Kind::Compose { outer, inner } => {
                let mut v = outer.schedule_snapshots();
                v.extend(inner.schedule_snapshots());
                v
            }
        }
    }

    /// JSON descriptor of the construction. For range maps this includes
    /// the first `entries` schedule rows as
    /// `{i, start, n_i, m_i, N_i}`, extending the schedule as needed
    /// (which can exhaust the budget).
    pub fn describe(&self, entries: usize) -> Result<Value, ReductionError> {
        let v = match &self.kind {
            Kind::Identity => json!({
                "kind": "identity",
                "provenance": self.provenance,
            }),
            Kind::Rank { set, .. } => json!({
                "kind": "rank_to_evens",
                "provenance": self.provenance,
                "source": set.name(),
            }),
            Kind::RangeInto { schedule } => {
                let mut sched = schedule.lock().expect("schedule lock");
                while sched.blocks().len() < entries {
                    sched.extend_one()?;
                }
                let rows: Vec<Value> = sched.blocks()[..entries]
                    .iter()
                    .zip(sched.partition().intervals())
                    .enumerate()
                    .map(|(idx, (block, interval))| {
                        json!({
                            "i": idx + 1,
                            "start": interval.start,
                            "n_i": interval.length,
                            "m_i": interval.member_count(),
                            "N_i": block.length,
                        })
                    })
                    .collect();
                json!({
                    "kind": "range_into",
                    "provenance": self.provenance,
                    "target": sched.partition().target_name(),
                    "eps": sched.partition().eps().to_string(),
                    "schedule": rows,
                })
            }
            Kind::ParityCombine { on_even, on_odd } => json!({
                "kind": "parity_combine",
                "provenance": self.provenance,
                "children": [on_even.describe(entries)?, on_odd.describe(entries)?],
            }),
            Kind::Compose { outer, inner } => json!({
                "kind": "compose",
                "provenance": self.provenance,
                "children": [outer.describe(entries)?, inner.describe(entries)?],
            }),
        };
        Ok(v)
    }
}

impl Evaluate for Reduction {
    fn evaluate(&self, x: u64) -> Result<u64, ReductionError> {
        match &self.kind {
            Kind::Identity => Ok(x),
            Kind::Rank { set, prefix } => {
                let mut prefix = prefix.lock().expect("rank cache lock");
                // Need prefix[x], i.e. the member count below x.
                let want = x as usize + 1;
                while prefix.len() < want {
                    let i = prefix.len();
                    let step = set.contains((i - 1) as u64) as u64;
                    let next = prefix[i - 1] + step;
                    prefix.push(next);
                }
                let rank_in = prefix[x as usize];
                let overflow = ReductionError::ArithmeticOverflow {
                    context: "doubling a rank",
                };
                if set.contains(x) {
                    rank_in.checked_mul(2).ok_or(overflow)
                } else {
                    (x - rank_in)
                        .checked_mul(2)
                        .and_then(|v| v.checked_add(1))
                        .ok_or(overflow)
                }
            }
            Kind::RangeInto { schedule } => {
                schedule.lock().expect("schedule lock").value_at(x)
            }
            Kind::ParityCombine { on_even, on_odd } => {
                if x % 2 == 0 {
                    on_even.evaluate(x)
                } else {
                    on_odd.evaluate(x)
                }
            }
            Kind::Compose { outer, inner } => outer.evaluate(inner.evaluate(x)?),
        }
    }

    fn provenance(&self) -> String {
        self.provenance.clone()
    }
}
