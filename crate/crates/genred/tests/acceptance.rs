//! Acceptance suite: one test per criterion, each printing a PASS line
//! (run with `cargo test --test acceptance -- --nocapture` to see them).
//!
//! Everything here is property- or oracle-based at desk scale; expected
//! values are frozen from independent hand simulation and re-derived by
//! naive reference implementations where that is feasible.

use num::{BigInt, BigRational};

use genred::density;
use genred::reductions::{
    self, compose, find_eps_intervals, generic_reduce, identity, range_into,
    rank_reduce_to_evens, BlockSchedule, Evaluate, Reduction, ReductionError,
};
use genred::sets::{builtin, ComputableSet};
use genred::verify::{
    assert_vanishing, check_m_reduction, negligible_catalog, uniformity_trajectory,
};

fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

const BUDGET: u64 = 10_000_000;

fn matrix_sources() -> Vec<ComputableSet> {
    ["empty", "full", "evens", "squares", "primes", "log_blocks"]
        .iter()
        .map(|name| builtin(name, &[]).unwrap())
        .collect()
}

/// Targets with their density floors. `evens` keeps a 1/3 floor; the
/// other targets run at 1/4. The density of multiples(3) is exactly 1/3,
/// so a strict per-interval floor of 1/3 is unattainable past the first
/// interval (no window starting at 1 mod 3 beats it) — 1/4 leaves the
/// required margin.
fn matrix_targets() -> Vec<(ComputableSet, BigRational)> {
    let odds = builtin("odds", &[]).unwrap();
    let squares = builtin("squares", &[]).unwrap();
    vec![
        (builtin("evens", &[]).unwrap(), rational(1, 3)),
        (builtin("multiples", &[3]).unwrap(), rational(1, 4)),
        (builtin("log_blocks", &[]).unwrap(), rational(1, 4)),
        (odds.union(&squares), rational(1, 4)),
    ]
}

fn pass(n: u32, what: &str) {
    println!("criterion {n}: PASS — {what}");
}

#[test]
fn criterion_1_exact_m_reduction_matrix() {
    const HORIZON: u64 = 100_000;
    for a in &matrix_sources() {
        for (b, eps) in &matrix_targets() {
            let f = generic_reduce(a, b, eps, eps, BUDGET);
            let report = check_m_reduction(a, b, &f, HORIZON).unwrap_or_else(|e| {
                panic!("evaluation failed for {} -> {}: {e}", a.name(), b.name())
            });
            assert!(
                report.passed,
                "{} -> {}: {} violations, first {:?}",
                a.name(),
                b.name(),
                report.violations.len(),
                report.violations.first()
            );
        }
    }
    pass(1, "24 source/target pairs, zero violations below 10^5");
}

#[test]
fn criterion_2_rank_reduction_properties() {
    const HORIZON: u64 = 100_000;

    let f = rank_reduce_to_evens(&builtin("evens", &[]).unwrap());
    for x in 0..=HORIZON {
        assert_eq!(f.evaluate(x).unwrap(), x, "rank over evens at {x}");
    }
    let f = rank_reduce_to_evens(&builtin("empty", &[]).unwrap());
    for x in 0..=HORIZON {
        assert_eq!(f.evaluate(x).unwrap(), 2 * x + 1, "rank over empty at {x}");
    }

    let catalog = vec![
        builtin("empty", &[]).unwrap(),
        builtin("full", &[]).unwrap(),
        builtin("evens", &[]).unwrap(),
        builtin("odds", &[]).unwrap(),
        builtin("multiples", &[3]).unwrap(),
        builtin("squares", &[]).unwrap(),
        builtin("powers_of_two", &[]).unwrap(),
        builtin("primes", &[]).unwrap(),
        builtin("log_blocks", &[]).unwrap(),
        builtin("finite", &[5, 17, 40]).unwrap(),
    ];
    for a in &catalog {
        let f = rank_reduce_to_evens(a);
        let mut last_in: Option<u64> = None;
        let mut last_out: Option<u64> = None;
        let mut seen = vec![false; 2 * HORIZON as usize + 2];
        for x in 0..=HORIZON {
            let y = f.evaluate(x).unwrap();
            // Parity correctness.
            assert_eq!(y % 2 == 0, a.contains(x), "set={} x={x}", a.name());
            // Order preservation within the class of x.
            let slot = if a.contains(x) { &mut last_in } else { &mut last_out };
            if let Some(prev) = *slot {
                assert!(prev < y, "set={} not increasing at x={x}", a.name());
            }
            *slot = Some(y);
            // Injectivity.
            assert!(!seen[y as usize], "set={} duplicate image {y}", a.name());
            seen[y as usize] = true;
        }
    }
    pass(2, "rank map: identity/2x+1 special cases, parity, order, injectivity on 0..=10^5");
}

#[test]
fn criterion_3_partition_and_schedule_invariants() {
    const HORIZON: u64 = 100_000;
    let mut checked = 0usize;
    for a in &matrix_sources() {
        for (b, eps) in &matrix_targets() {
            let f = generic_reduce(a, b, eps, eps, BUDGET);
            for x in 0..HORIZON {
                f.evaluate(x).unwrap();
            }
            for schedule in f.schedule_snapshots() {
                schedule
                    .check_invariants()
                    .unwrap_or_else(|e| panic!("{} -> {}: {e}", a.name(), b.name()));
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 48);
    pass(3, "all 48 schedules produced by the matrix satisfy the exact invariants");
}

/// Independent re-derivation of the deterministic schedule rule, written
/// as plainly as possible: fresh counting loops, rational comparison by
/// cross-multiplication, no incremental state shared with the library.
mod schedule_oracle {
    use genred::sets::ComputableSet;

    pub struct Row {
        pub start: u64,
        pub n: u64,
        pub m: u64,
        pub block: u64,
    }

    fn density_exceeds(count: u64, len: u64, eps_num: u64, eps_den: u64) -> bool {
        (count as u128) * (eps_den as u128) > (len as u128) * (eps_num as u128)
    }

    fn count_members(set: &ComputableSet, start: u64, len: u64) -> u64 {
        (start..start + len).filter(|&x| set.contains(x)).count() as u64
    }

    pub fn first_rows(
        set: &ComputableSet,
        eps_num: u64,
        eps_den: u64,
        how_many: usize,
        limit: u64,
    ) -> Vec<Row> {
        let mut intervals: Vec<(u64, u64, u64)> = Vec::new(); // (start, n, m)
        let mut start = 0u64;
        while intervals.len() < how_many + 1 {
            let i = intervals.len() as u64 + 1;
            let lower = if i == 1 {
                1
            } else {
                i * intervals.iter().map(|&(_, n, _)| n).sum::<u64>()
            };
            let mut chosen = None;
            for len in lower..=limit {
                let m = count_members(set, start, len);
                if density_exceeds(m, len, eps_num, eps_den) {
                    chosen = Some((len, m));
                    break;
                }
            }
            let (len, m) = chosen.expect("oracle ran past its scan limit");
            intervals.push((start, len, m));
            start += len;
        }
        let mut rows = Vec::new();
        let mut block_sum = 0u64;
        for idx in 0..how_many {
            let i = (idx + 1) as u64;
            let (start, n, m) = intervals[idx];
            let n_next = intervals[idx + 1].1;
            let mut target = m.max(i * block_sum);
            let deferred = (i + 1) * n_next;
            if deferred > block_sum {
                target = target.max(deferred - block_sum);
            }
            let block = target.div_ceil(m) * m;
            rows.push(Row { start, n, m, block });
            block_sum += block;
        }
        rows
    }
}

#[test]
fn criterion_4_worked_schedule_oracle() {
    let evens = builtin("evens", &[]).unwrap();
    let eps = rational(1, 3);

    // Frozen from hand simulation of the rule.
    let expected = [(0u64, 1u64, 1u64, 4u64), (1, 2, 1, 23), (3, 9, 4, 168)];

    let p = find_eps_intervals(&evens, &eps, 3, BUDGET).unwrap();
    for (iv, &(start, n, m, _)) in p.intervals().iter().zip(&expected) {
        assert_eq!((iv.start, iv.length, iv.member_count()), (start, n, m));
    }

    let mut s = BlockSchedule::new(evens.clone(), eps, BUDGET);
    for _ in 0..3 {
        s.extend_one().unwrap();
    }
    let blocks: Vec<u64> = s.blocks().iter().map(|b| b.length).collect();
    assert_eq!(blocks, vec![4, 23, 168]);

    // The independent oracle re-derives the same rows.
    let oracle = schedule_oracle::first_rows(&evens, 1, 3, 3, 10_000);
    for (row, &(start, n, m, block)) in oracle.iter().zip(&expected) {
        assert_eq!((row.start, row.n, row.m, row.block), (start, n, m, block));
    }
    pass(4, "evens at eps 1/3: intervals (0,1,1),(1,2,1),(3,9,4); blocks 4, 23, 168");
}

#[test]
fn criterion_5_uniformity_surrogate() {
    let ladder = [1_000u64, 10_000, 100_000, 1_000_000];
    let shrink = rational(2, 1);
    let f = generic_reduce(
        &builtin("primes", &[]).unwrap(),
        &builtin("log_blocks", &[]).unwrap(),
        &rational(1, 4),
        &rational(1, 4),
        BUDGET,
    );
    for entry in negligible_catalog() {
        let t = uniformity_trajectory(&f, &entry.set, &ladder).unwrap();
        let rhos: Vec<String> = t.points.iter().map(|p| density::decimal_17(&p.rho)).collect();
        assert!(
            assert_vanishing(&t, &shrink, &entry.vanish_floor),
            "preimage of {} did not vanish: rhos {rhos:?}",
            entry.set.name()
        );
        println!(
            "  preimage densities of {} under {}: {}",
            entry.set.name(),
            t.reduction_provenance,
            rhos.join(", ")
        );
    }
    pass(5, "preimages of squares, powers_of_two, primes vanish on the 10^3..10^6 ladder");
}

#[test]
fn criterion_6_identity_baseline() {
    let t = uniformity_trajectory(
        &identity(),
        &builtin("squares", &[]).unwrap(),
        &[100, 10_000],
    )
    .unwrap();
    assert_eq!(t.points[0].rho, rational(1, 10));
    assert_eq!(t.points[1].rho, rational(1, 100));
    pass(6, "identity pullback of squares has rhos exactly 1/10 and 1/100");
}

/// Split-mix style generator so the randomized criteria are reproducible
/// without extra dependencies.
struct Rng(u64);

impl Rng {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }
}

/// A reduction with its value overridden at a single point.
struct Mutant<'a> {
    inner: &'a Reduction,
    at: u64,
    value: u64,
}

impl Evaluate for Mutant<'_> {
    fn evaluate(&self, x: u64) -> Result<u64, ReductionError> {
        if x == self.at {
            Ok(self.value)
        } else {
            self.inner.evaluate(x)
        }
    }
}

/// Plain double-loop reference: every x below the horizon, each judged by
/// fresh membership calls.
fn oracle_violations(
    a: &ComputableSet,
    b: &ComputableSet,
    f: &dyn Evaluate,
    horizon: u64,
) -> Vec<u64> {
    let mut bad = Vec::new();
    for x in 0..horizon {
        let y = f.evaluate(x).unwrap();
        if a.contains(x) != b.contains(y) {
            bad.push(x);
        }
    }
    bad
}

#[test]
fn criterion_7_brute_force_oracle_equivalence() {
    let sources = [
        builtin("empty", &[]).unwrap(),
        builtin("full", &[]).unwrap(),
        builtin("evens", &[]).unwrap(),
        builtin("odds", &[]).unwrap(),
        builtin("squares", &[]).unwrap(),
        builtin("primes", &[]).unwrap(),
        builtin("log_blocks", &[]).unwrap(),
        builtin("multiples", &[7]).unwrap(),
        builtin("powers_of_two", &[]).unwrap(),
        builtin("finite", &[0, 10, 20, 30]).unwrap(),
    ];
    let targets = matrix_targets();

    let mut rng = Rng(0x5eed_2024);
    for trial in 0..20u64 {
        let a = &sources[rng.below(sources.len() as u64) as usize];
        let (b, eps) = &targets[rng.below(targets.len() as u64) as usize];
        let horizon = 500 + rng.below(501);
        let f = generic_reduce(a, b, eps, eps, BUDGET);

        if trial % 2 == 0 {
            let report = check_m_reduction(a, b, &f, horizon).unwrap();
            let oracle = oracle_violations(a, b, &f, horizon);
            assert!(report.passed, "intact reduction flagged: {report}");
            assert!(oracle.is_empty());
        } else {
            // Break the reduction at one point, flipping target
            // membership of the image so the defect is observable.
            let at = rng.below(horizon);
            let y = f.evaluate(at).unwrap();
            let flipped = (0..).find(|&v| b.contains(v) != b.contains(y)).unwrap();
            let mutant = Mutant {
                inner: &f,
                at,
                value: flipped,
            };
            let report = check_m_reduction(a, b, &mutant, horizon).unwrap();
            let oracle = oracle_violations(a, b, &mutant, horizon);
            assert!(!report.passed, "mutation at {at} went undetected");
            let reported: Vec<u64> = report.violations.iter().map(|v| v.x).collect();
            assert_eq!(reported, oracle, "checker and oracle disagree");
            assert_eq!(reported, vec![at]);
        }
    }
    pass(7, "checker agrees with the double-loop oracle on 20 trials; every mutation detected");
}

#[test]
fn criterion_8_composition_law_and_determinism() {
    let outer_ref = range_into(&builtin("evens", &[]).unwrap(), &rational(1, 3), BUDGET);
    let inner_ref = rank_reduce_to_evens(&builtin("primes", &[]).unwrap());
    let composed = compose(
        range_into(&builtin("evens", &[]).unwrap(), &rational(1, 3), BUDGET),
        rank_reduce_to_evens(&builtin("primes", &[]).unwrap()),
    );
    let mut rng = Rng(0xc0de_2024);
    for _ in 0..10_000 {
        let x = rng.below(1_000_000);
        let via_parts = outer_ref.evaluate(inner_ref.evaluate(x).unwrap()).unwrap();
        assert_eq!(composed.evaluate(x).unwrap(), via_parts, "x={x}");
    }

    let build = || {
        generic_reduce(
            &builtin("primes", &[]).unwrap(),
            &builtin("log_blocks", &[]).unwrap(),
            &rational(1, 4),
            &rational(1, 4),
            BUDGET,
        )
    };
    let first = build();
    let second = build();
    for x in 0..=10_000u64 {
        assert_eq!(first.evaluate(x).unwrap(), second.evaluate(x).unwrap(), "x={x}");
    }
    pass(8, "composition law on 10^4 random points; independent constructions agree on 0..=10^4");
}

#[test]
fn criterion_9_negative_path_budget_exhaustion() {
    let f = range_into(&builtin("squares", &[]).unwrap(), &rational(1, 2), 1_000_000);
    match f.evaluate(0) {
        Err(ReductionError::BudgetExhausted { interval_index, .. }) => {
            assert_eq!(interval_index, 2)
        }
        other => panic!("expected budget exhaustion at interval 2, got {other:?}"),
    }

    // The CLI maps the same failure to exit code 1 with a diagnostic
    // naming the interval.
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = genred::cli::run(
        [
            "genred",
            "reduce",
            "--from",
            "evens",
            "--to",
            "squares",
            "--eps-b",
            "1/2",
            "--eps-cob",
            "1/2",
            "--budget",
            "1000000",
        ],
        &mut out,
        &mut err,
    );
    assert_eq!(code, 1);
    let diag = String::from_utf8(err).unwrap();
    assert!(diag.contains("interval 2"), "diagnostic was: {diag}");
    pass(9, "range into squares at eps 1/2 exhausts the budget at interval 2; CLI exits 1");
}

// Keep an explicit record that reductions module re-exports cover the
// construction surface used above.
#[allow(dead_code)]
fn surface_check() {
    let _ = reductions::reduce_evens_to(
        &builtin("evens", &[]).unwrap(),
        &rational(1, 3),
        &rational(1, 3),
        BUDGET,
    );
    let _ = reductions::combine_parity(identity(), identity());
}
