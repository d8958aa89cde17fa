//! Shadow trajectories: `b = a + 2^beta·K` (odd `K`) follows exactly the same
//! Up/Down pattern as `a` through `beta` halvings and splits at the next step.
//!
//! While the patterns agree, after `d` halvings and `u` Up steps the two values
//! differ by `2^(beta−d)·3^u·K`. Once `d = beta` the difference is odd, so the
//! parities (and the next steps) differ.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::exactmath::pow2;
use crate::trajectory::{collatz_step, StepKind};
use crate::{Error, Limits, Result};

/// Largest `beta` accepted by [`uniqueness_scan`] unless a larger limit is
/// passed explicitly.
pub const DEFAULT_SCAN_LIMIT: u32 = 12;

fn kind_of(x: &BigUint) -> StepKind {
    if x.is_odd() {
        StepKind::Up
    } else {
        StepKind::Down
    }
}

/// The step kinds from `a` up to and including the `d`-th halving.
pub fn pattern_of(a: &BigUint, d: u64, limits: &Limits) -> Result<Vec<StepKind>> {
    if a.is_zero() {
        return Err(Error::InvalidParams("start must be >= 1".into()));
    }
    let mut out = Vec::new();
    let mut x = a.clone();
    let mut halvings = 0;
    while halvings < d {
        if out.len() as u64 >= limits.step_cap {
            return Err(Error::StepCapExceeded {
                cap: limits.step_cap,
            });
        }
        let kind = kind_of(&x);
        if kind == StepKind::Down {
            halvings += 1;
        }
        out.push(kind);
        x = collatz_step(&x);
        limits.check_bits(x.bits())?;
    }
    Ok(out)
}

/// `Up = 1`, `Down = 0`, as a string.
pub fn pattern_bits(pattern: &[StepKind]) -> alloc::string::String {
    pattern
        .iter()
        .map(|k| if *k == StepKind::Up { '1' } else { '0' })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelReport {
    pub a_start: BigUint,
    pub b_start: BigUint,
    pub beta: u64,
    pub k: BigUint,
    pub halvings_matched: u64,
    pub ups_at_divergence: u64,
    /// Steps taken in lockstep before the split.
    pub steps_matched: u64,
    pub a_at_divergence: BigUint,
    pub b_at_divergence: BigUint,
    pub pattern: Vec<StepKind>,
}

/// Walks `a` and `b = a + 2^beta·K` in lockstep, checking the offset law at
/// every step and that the split happens right after the `beta`-th halving.
pub fn check_parallel(
    a: &BigUint,
    beta: u64,
    k: &BigUint,
    limits: &Limits,
) -> Result<ParallelReport> {
    if a.is_even() {
        return Err(Error::NotOddInput(a.clone()));
    }
    if k.is_even() {
        return Err(Error::InvalidParams(alloc::format!(
            "K must be odd, got {k}"
        )));
    }
    if beta == 0 {
        return Err(Error::InvalidParams("beta must be >= 1".into()));
    }
    let b = a + pow2(beta, limits)? * k;

    let mut x = a.clone();
    let mut y = b.clone();
    let mut expected = BigInt::from(y.clone()) - BigInt::from(x.clone());
    let mut halvings = 0u64;
    let mut ups = 0u64;
    let mut pattern = Vec::new();

    while halvings < beta {
        let step = pattern.len();
        if BigInt::from(y.clone()) - BigInt::from(x.clone()) != expected {
            return Err(Error::ShadowIdentity { step });
        }
        if step as u64 >= limits.step_cap {
            return Err(Error::StepCapExceeded {
                cap: limits.step_cap,
            });
        }
        let kind = kind_of(&x);
        if kind != kind_of(&y) {
            return Err(Error::PrematureDivergence {
                step,
                expected_halvings: beta,
            });
        }
        match kind {
            StepKind::Up => {
                ups += 1;
                expected *= 3;
            }
            StepKind::Down => {
                halvings += 1;
                expected >>= 1u32;
            }
        }
        pattern.push(kind);
        x = collatz_step(&x);
        y = collatz_step(&y);
        limits.check_bits(y.bits())?;
    }

    let diff = BigInt::from(y.clone()) - BigInt::from(x.clone());
    if diff != expected || !diff.is_positive() {
        return Err(Error::ShadowIdentity {
            step: pattern.len(),
        });
    }
    if kind_of(&x) == kind_of(&y) {
        return Err(Error::MissingDivergence { halvings: beta });
    }
    Ok(ParallelReport {
        a_start: a.clone(),
        b_start: b,
        beta,
        k: k.clone(),
        halvings_matched: halvings,
        ups_at_divergence: ups,
        steps_matched: pattern.len() as u64,
        a_at_divergence: x,
        b_at_divergence: y,
        pattern,
    })
}

/// Patterns up to the `beta`-th halving for the odd numbers in `[lo, hi)`,
/// keyed by pattern. Values sharing a key collide.
pub fn patterns_in(
    beta: u32,
    lo: u64,
    hi: u64,
    limits: &Limits,
) -> Result<BTreeMap<Vec<StepKind>, Vec<u64>>> {
    let mut map: BTreeMap<Vec<StepKind>, Vec<u64>> = BTreeMap::new();
    let start = lo | 1;
    for a in (start..hi).step_by(2) {
        let p = pattern_of(&BigUint::from(a), u64::from(beta), limits)?;
        map.entry(p).or_default().push(a);
    }
    Ok(map)
}

/// The first pair of odd numbers below `2^beta` with the same pattern.
pub fn find_collision(beta: u32, max_beta: u32, limits: &Limits) -> Result<Option<(u64, u64)>> {
    if beta == 0 || beta > max_beta || beta > 62 {
        return Err(Error::InvalidParams(alloc::format!(
            "beta must be in [1, {}], got {beta}",
            max_beta.min(62)
        )));
    }
    let map = patterns_in(beta, 1, 1u64 << beta, limits)?;
    Ok(map
        .values()
        .filter(|v| v.len() > 1)
        .map(|v| (v[0], v[1]))
        .min())
}

/// True when every odd number below `2^beta` has its own pattern up to the
/// `beta`-th halving.
pub fn uniqueness_scan(beta: u32, limits: &Limits) -> Result<bool> {
    Ok(find_collision(beta, DEFAULT_SCAN_LIMIT, limits)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use StepKind::{Down as D, Up as U};

    fn lim() -> Limits {
        Limits::default()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn patterns() {
        assert_eq!(pattern_of(&big(1), 2, &lim()).unwrap(), vec![U, D, D]);
        assert_eq!(
            pattern_of(&big(27), 3, &lim()).unwrap(),
            vec![U, D, U, D, D]
        );
        let p = pattern_of(&big(57), 14, &lim()).unwrap();
        assert_eq!(p.len(), 22);
        assert_eq!(pattern_bits(&p[..3]), "100");
    }

    #[test]
    fn shadow_57() {
        let r = check_parallel(&big(57), 14, &big(1), &lim()).unwrap();
        assert_eq!(r.b_start, big(16441));
        assert_eq!(r.a_at_divergence, big(26));
        assert_eq!(r.b_at_divergence, big(6587));
        assert_eq!(r.ups_at_divergence, 8);
        assert_eq!(r.steps_matched, 22);
        assert_eq!(&r.b_at_divergence - &r.a_at_divergence, big(6561));
    }

    #[test]
    fn shadow_small_and_full_cycle() {
        let r = check_parallel(&big(1), 1, &big(1), &lim()).unwrap();
        assert_eq!(r.b_start, big(3));
        assert_eq!((r.a_at_divergence, r.b_at_divergence), (big(2), big(5)));

        let r = check_parallel(&big(739), 9, &big(3), &lim()).unwrap();
        assert_eq!(r.a_at_divergence, big(13));
        assert_eq!(r.steps_matched, 11);
    }

    #[test]
    fn even_k_rejected() {
        assert!(check_parallel(&big(57), 4, &big(2), &lim()).is_err());
    }

    #[test]
    fn uniqueness() {
        assert!(uniqueness_scan(1, &lim()).unwrap());
        assert!(uniqueness_scan(8, &lim()).unwrap());
        assert!(uniqueness_scan(12, &lim()).unwrap());
        assert!(uniqueness_scan(13, &lim()).is_err());
        assert_eq!(patterns_in(8, 0, 256, &lim()).unwrap().len(), 128);
    }
}
