//! Computable subsets of ℕ as total decision predicates.
//!
//! A [`ComputableSet`] is a named, total, deterministic membership
//! predicate. The builtin catalog covers every density regime the rest of
//! the crate cares about: negligible sets (`squares`, `powers_of_two`,
//! `primes`), sets of intermediate density (`evens`, `odds`,
//! `multiples(k)`), a set with no limit density at all (`log_blocks`,
//! oscillating between 1/3 and 2/3), the degenerate `empty`/`full`, and
//! explicit finite sets. Pointwise union, intersection and complement
//! combinators close the catalog under boolean algebra.

mod expr;

pub use expr::{eval_expr, parse_set_expr, ParseError, SetExpr};

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Errors from builtin catalog lookups.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SetError {
    #[error("unknown builtin set `{0}`")]
    UnknownBuiltin(String),
    #[error("builtin `{name}` expects {expected} parameter(s), got {got}")]
    WrongParamCount {
        name: String,
        expected: &'static str,
        got: usize,
    },
    #[error("invalid parameter for `{name}`: {reason}")]
    InvalidParam { name: String, reason: String },
}

type Membership = Arc<dyn Fn(u64) -> bool + Send + Sync>;

/// A named total membership predicate on ℕ.
///
/// Membership evaluation is pure: repeated evaluation at the same
/// argument always returns the same boolean, and values are safe to share
/// across threads. Sets declared finite (the `empty` builtin, `finite`
/// literals, and combinations that stay finite) carry their element list
/// in `finite_hint`.
#[derive(Clone)]
pub struct ComputableSet {
    name: String,
    membership: Membership,
    finite_hint: Option<Arc<Vec<u64>>>,
}

impl ComputableSet {
    /// Wraps an arbitrary total predicate.
    pub fn new<F>(name: impl Into<String>, membership: F) -> Self
    where
        F: Fn(u64) -> bool + Send + Sync + 'static,
    {
        ComputableSet {
            name: name.into(),
            membership: Arc::new(membership),
            finite_hint: None,
        }
    }

    /// A declared-finite set; membership holds exactly on `elements`.
    pub fn finite(name: impl Into<String>, mut elements: Vec<u64>) -> Self {
        elements.sort_unstable();
        elements.dedup();
        let elems = Arc::new(elements);
        let lookup = Arc::clone(&elems);
        ComputableSet {
            name: name.into(),
            membership: Arc::new(move |x| lookup.binary_search(&x).is_ok()),
            finite_hint: Some(elems),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Membership test; total and deterministic.
    pub fn contains(&self, x: u64) -> bool {
        (self.membership)(x)
    }

    /// Element list for declared-finite sets.
    pub fn finite_hint(&self) -> Option<&[u64]> {
        self.finite_hint.as_deref().map(|v| v.as_slice())
    }

    /// Pointwise complement.
    pub fn complement(&self) -> ComputableSet {
        let inner = Arc::clone(&self.membership);
        ComputableSet {
            name: format!("complement({})", self.name),
            membership: Arc::new(move |x| !inner(x)),
            finite_hint: None,
        }
    }

    /// Pointwise union.
    pub fn union(&self, other: &ComputableSet) -> ComputableSet {
        let a = Arc::clone(&self.membership);
        let b = Arc::clone(&other.membership);
        let hint = match (&self.finite_hint, &other.finite_hint) {
            (Some(xs), Some(ys)) => {
                let mut merged: Vec<u64> = xs.iter().chain(ys.iter()).copied().collect();
                merged.sort_unstable();
                merged.dedup();
                Some(Arc::new(merged))
            }
            _ => None,
        };
        ComputableSet {
            name: format!("union({},{})", self.name, other.name),
            membership: Arc::new(move |x| a(x) || b(x)),
            finite_hint: hint,
        }
    }

    /// Pointwise intersection.
    pub fn intersect(&self, other: &ComputableSet) -> ComputableSet {
        let a = Arc::clone(&self.membership);
        let b = Arc::clone(&other.membership);
        let hint = match (&self.finite_hint, &other.finite_hint) {
            (Some(xs), _) => Some(Arc::new(
                xs.iter().copied().filter(|&x| other.contains(x)).collect(),
            )),
            (None, Some(ys)) => Some(Arc::new(
                ys.iter().copied().filter(|&y| self.contains(y)).collect(),
            )),
            (None, None) => None,
        };
        ComputableSet {
            name: format!("intersect({},{})", self.name, other.name),
            membership: Arc::new(move |x| a(x) && b(x)),
            finite_hint: hint,
        }
    }
}

impl fmt::Debug for ComputableSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComputableSet")
            .field("name", &self.name)
            .field("finite_hint", &self.finite_hint)
            .finish()
    }
}

impl fmt::Display for ComputableSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Builtin names recognized by [`builtin`] and the expression parser.
pub const BUILTIN_NAMES: &[&str] = &[
    "empty",
    "full",
    "evens",
    "odds",
    "multiples",
    "squares",
    "powers_of_two",
    "primes",
    "finite",
    "log_blocks",
];

fn is_square(x: u64) -> bool {
    let r = x.isqrt();
    r * r == x
}

fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    if x % 2 == 0 {
        return x == 2;
    }
    if x % 3 == 0 {
        return x == 3;
    }
    let mut d = 5u64;
    while d * d <= x {
        if x % d == 0 || x % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// `log_blocks` membership: x belongs iff `floor(log2(x + 1))` is even.
///
/// The set is the union of the dyadic blocks `[2^k - 1, 2^{k+1} - 1)` for
/// even `k`, so its prefix density oscillates forever between 1/3 and 2/3
/// and it has no limit density.
fn in_log_blocks(x: u64) -> bool {
    ((x as u128 + 1).ilog2()) % 2 == 0
}

/// Looks up a catalog set by name and integer parameters.
///
/// Parameterless entries reject any parameters; `multiples(k)` requires a
/// single `k ≥ 1`; `finite(a, b, …)` takes its element list.
pub fn builtin(name: &str, params: &[u64]) -> Result<ComputableSet, SetError> {
    let no_params = |set: ComputableSet| -> Result<ComputableSet, SetError> {
        if params.is_empty() {
            Ok(set)
        } else {
            Err(SetError::WrongParamCount {
                name: name.to_string(),
                expected: "0",
                got: params.len(),
            })
        }
    };
    match name {
        "empty" => no_params(ComputableSet::finite("empty", Vec::new())),
        "full" => no_params(ComputableSet::new("full", |_| true)),
        "evens" => no_params(ComputableSet::new("evens", |x| x % 2 == 0)),
        "odds" => no_params(ComputableSet::new("odds", |x| x % 2 == 1)),
        "squares" => no_params(ComputableSet::new("squares", is_square)),
        "powers_of_two" => no_params(ComputableSet::new("powers_of_two", |x| {
            x.is_power_of_two()
        })),
        "primes" => no_params(ComputableSet::new("primes", is_prime)),
        "log_blocks" => no_params(ComputableSet::new("log_blocks", in_log_blocks)),
        "multiples" => {
            if params.len() != 1 {
                return Err(SetError::WrongParamCount {
                    name: name.to_string(),
                    expected: "1",
                    got: params.len(),
                });
            }
            let k = params[0];
            if k == 0 {
                return Err(SetError::InvalidParam {
                    name: name.to_string(),
                    reason: "modulus must be at least 1".to_string(),
                });
            }
            Ok(ComputableSet::new(format!("multiples({k})"), move |x| {
                x % k == 0
            }))
        }
        "finite" => {
            if params.is_empty() {
                return Err(SetError::WrongParamCount {
                    name: name.to_string(),
                    expected: "1 or more",
                    got: 0,
                });
            }
            let mut printed: Vec<String> = params.iter().map(|p| p.to_string()).collect();
            printed.dedup();
            Ok(ComputableSet::finite(
                format!("finite({})", printed.join(",")),
                params.to_vec(),
            ))
        }
        _ => Err(SetError::UnknownBuiltin(name.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn catalog() -> Vec<ComputableSet> {
        vec![
            builtin("empty", &[]).unwrap(),
            builtin("full", &[]).unwrap(),
            builtin("evens", &[]).unwrap(),
            builtin("odds", &[]).unwrap(),
            builtin("multiples", &[3]).unwrap(),
            builtin("squares", &[]).unwrap(),
            builtin("powers_of_two", &[]).unwrap(),
            builtin("primes", &[]).unwrap(),
            builtin("finite", &[5, 17, 40]).unwrap(),
            builtin("log_blocks", &[]).unwrap(),
        ]
    }

    #[test]
    fn evens_parity() {
        let evens = builtin("evens", &[]).unwrap();
        for x in [0u64, 2, 4] {
            assert!(evens.contains(x));
        }
        for x in [1u64, 3] {
            assert!(!evens.contains(x));
        }
    }

    #[test]
    fn multiples_of_three() {
        let m3 = builtin("multiples", &[3]).unwrap();
        assert!(m3.contains(0));
        assert!(m3.contains(3));
        assert!(m3.contains(6));
        assert!(!m3.contains(4));
    }

    #[test]
    fn multiples_zero_rejected() {
        assert!(matches!(
            builtin("multiples", &[0]),
            Err(SetError::InvalidParam { .. })
        ));
    }

    #[test]
    fn unknown_builtin_rejected() {
        assert!(matches!(
            builtin("evns", &[]),
            Err(SetError::UnknownBuiltin(_))
        ));
        assert!(matches!(
            builtin("evens", &[2]),
            Err(SetError::WrongParamCount { .. })
        ));
    }

    #[test]
    fn log_blocks_small_values() {
        // Oracle: floor(log2(x+1)) parity computed by hand.
        let lb = builtin("log_blocks", &[]).unwrap();
        assert!(lb.contains(0));
        for x in 3..=6 {
            assert!(lb.contains(x), "x={x}");
        }
        for x in [1u64, 2, 7] {
            assert!(!lb.contains(x), "x={x}");
        }
    }

    #[test]
    fn log_blocks_block_structure() {
        // Block k spans [2^k - 1, 2^{k+1} - 1); membership iff k even.
        let lb = builtin("log_blocks", &[]).unwrap();
        for k in 0u32..=20 {
            let lo = (1u64 << k) - 1;
            let hi = (1u64 << (k + 1)) - 1;
            for x in lo..hi {
                assert_eq!(lb.contains(x), k % 2 == 0, "k={k} x={x}");
            }
        }
    }

    #[test]
    fn primes_small_values() {
        let p = builtin("primes", &[]).unwrap();
        let known = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29];
        for x in 0..30 {
            assert_eq!(p.contains(x), known.contains(&x), "x={x}");
        }
        assert!(!p.contains(9));
    }

    #[test]
    fn squares_small_values() {
        let s = builtin("squares", &[]).unwrap();
        let known = [0u64, 1, 4, 9, 16, 25];
        for x in 0..30 {
            assert_eq!(s.contains(x), known.contains(&x), "x={x}");
        }
    }

    #[test]
    fn powers_of_two_small_values() {
        let s = builtin("powers_of_two", &[]).unwrap();
        let known = [1u64, 2, 4, 8, 16];
        for x in 0..20 {
            assert_eq!(s.contains(x), known.contains(&x), "x={x}");
        }
    }

    #[test]
    fn empty_and_full() {
        let empty = builtin("empty", &[]).unwrap();
        let full = builtin("full", &[]).unwrap();
        assert!(!empty.contains(7));
        assert!(full.contains(7));
        assert_eq!(empty.finite_hint(), Some(&[][..]));
    }

    #[test]
    fn finite_hint_matches_membership() {
        let f = builtin("finite", &[40, 5, 17, 5]).unwrap();
        assert_eq!(f.finite_hint(), Some(&[5u64, 17, 40][..]));
        for x in 0..50 {
            assert_eq!(f.contains(x), [5, 17, 40].contains(&x));
        }
    }

    #[test]
    fn complement_is_pointwise_negation() {
        for s in catalog() {
            let c = s.complement();
            for x in 0..10_000u64 {
                assert_eq!(c.contains(x), !s.contains(x), "set={} x={x}", s.name());
            }
        }
    }

    #[test]
    fn de_morgan_pointwise() {
        let sets = catalog();
        for s in &sets {
            for t in &sets {
                let lhs = s.union(t).complement();
                let rhs = s.complement().intersect(&t.complement());
                for x in 0..10_000u64 {
                    assert_eq!(
                        lhs.contains(x),
                        rhs.contains(x),
                        "s={} t={} x={x}",
                        s.name(),
                        t.name()
                    );
                }
            }
        }
    }

    #[test]
    fn intersect_propagates_finite_hint() {
        let f = builtin("finite", &[2, 3, 4, 9]).unwrap();
        let evens = builtin("evens", &[]).unwrap();
        let both = f.intersect(&evens);
        assert_eq!(both.finite_hint(), Some(&[2u64, 4][..]));
        let flipped = evens.intersect(&f);
        assert_eq!(flipped.finite_hint(), Some(&[2u64, 4][..]));
    }

    #[test]
    fn union_of_finites_is_finite() {
        let a = builtin("finite", &[1, 3]).unwrap();
        let b = builtin("finite", &[3, 8]).unwrap();
        assert_eq!(a.union(&b).finite_hint(), Some(&[1u64, 3, 8][..]));
        assert!(a.union(&builtin("evens", &[]).unwrap()).finite_hint().is_none());
    }
}
