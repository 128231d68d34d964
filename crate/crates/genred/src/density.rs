//! Exact prefix densities and a heuristic density classifier.
//!
//! The prefix density of a set `S` at `n ≥ 1` is the exact rational
//! `ρ_n(S) = #{k < n : k ∈ S} / n`. Profiles evaluate ρ_n along a
//! checkpoint ladder in a single incremental pass and summarize the tail
//! with empirical liminf/limsup surrogates. Classification into the
//! density-0 / density-1 / intermediate regimes is explicitly heuristic:
//! asymptotic density is a limit and cannot be decided from any finite
//! amount of evidence, so the classifier only reports what the ladder
//! shows.

use std::fmt;
use std::io::{self, Write};

use num::{BigInt, BigRational, One, Signed, Zero};
use thiserror::Error;

use crate::sets::ComputableSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DensityError {
    #[error("prefix density is undefined at n = 0")]
    ZeroPrefix,
    #[error("checkpoint list must be nonempty")]
    EmptyCheckpoints,
    #[error("checkpoints must be strictly increasing and at least 1")]
    BadCheckpoints,
}

/// One exact density sample: `rho = count / n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityPoint {
    pub n: u64,
    pub count: u64,
    pub rho: BigRational,
}

impl DensityPoint {
    fn new(n: u64, count: u64) -> Self {
        debug_assert!(n >= 1 && count <= n);
        DensityPoint {
            n,
            count,
            rho: BigRational::new(BigInt::from(count), BigInt::from(n)),
        }
    }
}

/// Density samples over an increasing checkpoint ladder.
///
/// `empirical_liminf` / `empirical_limsup` are the min and max of ρ over
/// the tail half of the points (by point count, rounded up) — finite
/// surrogates for the asymptotic quantities, chosen to damp transient
/// prefixes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityProfile {
    pub set_name: String,
    pub points: Vec<DensityPoint>,
    pub empirical_liminf: BigRational,
    pub empirical_limsup: BigRational,
}

impl DensityProfile {
    fn from_points(set_name: String, points: Vec<DensityPoint>) -> Self {
        let tail_len = points.len().div_ceil(2);
        let tail = &points[points.len() - tail_len..];
        let mut lo = tail[0].rho.clone();
        let mut hi = tail[0].rho.clone();
        for p in &tail[1..] {
            if p.rho < lo {
                lo = p.rho.clone();
            }
            if p.rho > hi {
                hi = p.rho.clone();
            }
        }
        DensityProfile {
            set_name,
            points,
            empirical_liminf: lo,
            empirical_limsup: hi,
        }
    }

    /// Writes the profile as CSV: `n,count,rho_num,rho_den,rho_float`.
    pub fn write_csv(&self, w: &mut dyn Write) -> io::Result<()> {
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

/// Heuristic density class of a set, judged from finite evidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetClass {
    Empty,
    Full,
    DensityZero,
    DensityOne,
    Intermediate,
    Inconclusive,
}

impl fmt::Display for SetClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SetClass::Empty => "Empty",
            SetClass::Full => "Full",
            SetClass::DensityZero => "DensityZero",
            SetClass::DensityOne => "DensityOne",
            SetClass::Intermediate => "Intermediate",
            SetClass::Inconclusive => "Inconclusive",
        };
        f.write_str(s)
    }
}

/// A classification verdict together with the evidence it was read from.
#[derive(Debug, Clone)]
pub struct Classification {
    pub class: SetClass,
    pub evidence: DensityProfile,
}

/// Exact prefix density at `n`, by full enumeration of `{0, …, n-1}`.
pub fn density_at(s: &ComputableSet, n: u64) -> Result<DensityPoint, DensityError> {
    if n == 0 {
        return Err(DensityError::ZeroPrefix);
    }
    let count = (0..n).filter(|&x| s.contains(x)).count() as u64;
    Ok(DensityPoint::new(n, count))
}

/// Density samples at each checkpoint, counted incrementally in one pass.
pub fn density_profile(
    s: &ComputableSet,
    checkpoints: &[u64],
) -> Result<DensityProfile, DensityError> {
    if checkpoints.is_empty() {
        return Err(DensityError::EmptyCheckpoints);
    }
    if checkpoints[0] == 0 || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(DensityError::BadCheckpoints);
    }
    let mut points = Vec::with_capacity(checkpoints.len());
    let mut count = 0u64;
    let mut next = 0u64;
    for &cp in checkpoints {
        count += (next..cp).filter(|&x| s.contains(x)).count() as u64;
        next = cp;
        points.push(DensityPoint::new(cp, count));
    }
    Ok(DensityProfile::from_points(s.name().to_string(), points))
}

/// The fixed classifier ladder: 100, 200, 400, … up to `horizon`.
pub fn geometric_ladder(horizon: u64) -> Vec<u64> {
    assert!(horizon >= 100, "classifier horizon must be at least 100");
    let mut ladder = Vec::new();
    let mut n = 100u64;
    while n <= horizon {
        ladder.push(n);
        match n.checked_mul(2) {
            Some(next) => n = next,
            None => break,
        }
    }
    ladder
}

/// Heuristically places a set in the classification diagram.
///
/// `Empty`/`Full` require count 0 (resp. count = n) at every checkpoint;
/// `DensityZero` means the empirical limsup stayed within `band` of 0,
/// `DensityOne` the mirror condition, `Intermediate` that both surrogates
/// stayed at least `band` away from 0 and 1. Anything else is
/// `Inconclusive`. The verdict is a statement about the ladder only, not
/// about the (undecidable) limit.
///
/// Panics if `horizon < 100` or `band` is outside `(0, 1/2)`.
pub fn classify(s: &ComputableSet, horizon: u64, band: &BigRational) -> Classification {
    assert!(
        band.is_positive() && *band < BigRational::new(BigInt::from(1), BigInt::from(2)),
        "band must lie strictly between 0 and 1/2"
    );
    let ladder = geometric_ladder(horizon);
    let evidence = density_profile(s, &ladder).expect("ladder is nonempty and increasing");
    let class = if evidence.points.iter().all(|p| p.count == 0) {
        SetClass::Empty
    } else if evidence.points.iter().all(|p| p.count == p.n) {
        SetClass::Full
    } else {
        let one = BigRational::one();
        if evidence.empirical_limsup <= *band {
            SetClass::DensityZero
        } else if evidence.empirical_liminf >= &one - band {
            SetClass::DensityOne
        } else if evidence.empirical_liminf >= *band && evidence.empirical_limsup <= &one - band {
            SetClass::Intermediate
        } else {
            SetClass::Inconclusive
        }
    };
    Classification { class, evidence }
}

/// Renders a rational in `[0, 1]` as a plain decimal with 17 significant
/// digits (informational CSV column; the exact value is the num/den pair).
pub fn decimal_17(r: &BigRational) -> String {
    const SIG: u32 = 17;
    assert!(!r.is_negative() && *r <= BigRational::one());
    if r.is_zero() {
        return "0".to_string();
    }
    if r.is_one() {
        return format!("1.{}", "0".repeat(SIG as usize - 1));
    }
    let num = r.numer();
    let den = r.denom();
    // Leading zeros after the decimal point before the first significant
    // digit: smallest z with num * 10^(z+1) >= den.
    let ten = BigInt::from(10);
    let mut z = 0u32;
    let mut scaled = num * &ten;
    while scaled < *den {
        scaled *= &ten;
        z += 1;
    }
    // Round half up to SIG significant digits.
    let shift = ten.pow(z + SIG);
    let mut digits = (num * &shift * 2 + den) / (den * 2);
    let cap = BigInt::from(10).pow(SIG);
    if digits == cap {
        // Rounding carried into one more digit, e.g. 0.0999… → 0.10…
        digits /= &ten;
        if z == 0 {
            return format!("1.{}", "0".repeat(SIG as usize - 1));
        }
        z -= 1;
    }
    format!("0.{}{}", "0".repeat(z as usize), digits)
}
