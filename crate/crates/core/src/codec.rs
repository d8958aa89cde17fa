//! The `(n, k_n, j, K_O)` parametrization of odd numbers.
//!
//! With `P = 2·3^(n-1)`, an odd number of grade `n` is
//!
//! ```text
//! a = 2^alpha·K_O − 2^n·(2^(P·j) − 1)/3^n − 1,   alpha = P·(j−1) + k_n
//! ```
//!
//! and its cycle ends at `a_F = 3^n·K_O − 2^beta` with `beta = P − k_n + n`.
//! The grade is the number of Up steps in the cycle and equals the 2-adic
//! valuation of `a + 1`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::exactmath::{div3_minus, div3_plus, exact_div, pow2, pow3};
use crate::trajectory::{run_cycle, CycleTrace};
use crate::{Error, Limits, Result};

/// `P = 2·3^(n-1)`, the multiplicative order of 2 modulo `3^n`.
pub fn period(n: u32) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidParams("grade n must be >= 1".into()));
    }
    (pow3(n - 1) * 2u32)
        .to_u64()
        .ok_or_else(|| Error::InvalidParams(alloc::format!("2·3^(n-1) overflows for n = {n}")))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OddParams {
    pub n: u32,
    pub k_n: u64,
    pub j: u64,
    pub k_o: BigUint,
}

impl OddParams {
    pub fn new(n: u32, k_n: u64, j: u64, k_o: impl Into<BigUint>) -> Self {
        Self {
            n,
            k_n,
            j,
            k_o: k_o.into(),
        }
    }

    /// Total halvings of the cycle.
    pub fn alpha(&self) -> Result<u64> {
        shape_alpha(self.n, self.k_n, self.j)
    }

    pub fn beta(&self) -> Result<u64> {
        Ok(period(self.n)? - self.k_n + u64::from(self.n))
    }

    /// Checks the shape restrictions, oddness of `K_O` and positivity of the
    /// final value.
    pub fn validate(&self, limits: &Limits) -> Result<()> {
        validate_shape(self.n, self.k_n, self.j)?;
        if self.k_o.is_even() {
            return Err(Error::InvalidParams(alloc::format!(
                "K_O must be odd, got {}",
                self.k_o
            )));
        }
        let lhs = pow3(self.n) * &self.k_o;
        if lhs <= pow2(self.beta()?, limits)? {
            return Err(Error::InvalidParams(alloc::format!(
                "3^n·K_O - 2^beta is not positive for {self:?}"
            )));
        }
        Ok(())
    }
}

fn shape_alpha(n: u32, k_n: u64, j: u64) -> Result<u64> {
    let p = period(n)?;
    j.checked_sub(1)
        .and_then(|jm| jm.checked_mul(p))
        .and_then(|x| x.checked_add(k_n))
        .ok_or_else(|| Error::InvalidParams(alloc::format!("alpha overflows or j = 0 (j = {j})")))
}

/// `n >= 1`, `1 <= k_n <= 2·3^(n-1)`, `j >= 1` and `alpha > n`.
pub fn validate_shape(n: u32, k_n: u64, j: u64) -> Result<()> {
    let p = period(n)?;
    if k_n == 0 || k_n > p {
        return Err(Error::InvalidParams(alloc::format!(
            "k_n = {k_n} outside [1, {p}] for n = {n}"
        )));
    }
    if j == 0 {
        return Err(Error::InvalidParams("j must be >= 1".into()));
    }
    if shape_alpha(n, k_n, j)? <= u64::from(n) {
        return Err(Error::InvalidParams(alloc::format!(
            "alpha must exceed n: n = {n}, k_n = {k_n}, j = {j}"
        )));
    }
    Ok(())
}

/// Splits a cycle's halving count into `(j, k_n)`.
pub fn split_alpha(n: u32, alpha: u64) -> Result<(u64, u64)> {
    let p = period(n)?;
    if alpha == 0 {
        return Err(Error::InvalidParams("alpha must be >= 1".into()));
    }
    let jm = (alpha - 1) / p;
    Ok((jm + 1, alpha - p * jm))
}

/// 2-adic valuation of `a + 1`.
pub fn grade(a: &BigUint) -> Result<u32> {
    if a.is_even() {
        return Err(Error::NotOddInput(a.clone()));
    }
    let tz = (a + 1u32).trailing_zeros().expect("a + 1 is nonzero");
    Ok(tz as u32)
}

/// `3^g·2·K − 2` where `a = 2^g·K − 1`.
pub fn upper_bound_of(a: &BigUint) -> Result<BigUint> {
    let g = grade(a)?;
    let k = (a + 1u32) >> g;
    Ok(pow3(g) * 2u32 * k - 2u32)
}

pub fn encode(p: &OddParams, limits: &Limits) -> Result<BigUint> {
    p.validate(limits)?;
    let alpha = p.alpha()?;
    let offset = div3_minus(p.n - 1, &BigUint::from(p.j * 2), limits)?;
    let head = pow2(alpha, limits)? * &p.k_o;
    let tail = pow2(u64::from(p.n), limits)? * offset + 1u32;
    if head <= tail {
        return Err(Error::InvalidParams(alloc::format!(
            "parameters {p:?} encode a non-positive value"
        )));
    }
    Ok(head - tail)
}

/// [`decode`] together with the simulated cycle it was read from.
pub fn decode_with_trace(a: &BigUint, limits: &Limits) -> Result<(OddParams, CycleTrace)> {
    let trace = run_cycle(a, limits)?;
    let (j, k_n) = split_alpha(trace.n, trace.alpha)?;
    let n = trace.n;
    let beta = period(n)? - k_n + u64::from(n);
    let k_o = exact_div(
        &trace.final_odd + pow2(beta, limits)?,
        pow3(n),
        "a_F + 2^beta by 3^n",
    )?
    .quotient;
    let params = OddParams { n, k_n, j, k_o };
    if encode(&params, limits).ok().as_ref() != Some(a) {
        return Err(Error::InconsistentDecode { value: a.clone() });
    }
    Ok((params, trace))
}

/// Reads the parameters of `a` off its simulated cycle and confirms them by
/// re-encoding.
pub fn decode(a: &BigUint, limits: &Limits) -> Result<OddParams> {
    decode_with_trace(a, limits).map(|(p, _)| p)
}

/// `a_F = 3^n·K_O − 2^beta`.
pub fn final_of(p: &OddParams, limits: &Limits) -> Result<BigUint> {
    p.validate(limits)?;
    Ok(pow3(p.n) * &p.k_o - pow2(p.beta()?, limits)?)
}

/// `a_O = 2^n·(a_F·2^(alpha−n) + 1)/3^n − 1`: the unique odd number whose cycle
/// has the given shape and ends at `a_F`.
///
/// Only `alpha = 2·3^(n-1)·(j−1) + k_n` matters here, so `k_n` may exceed
/// `2·3^(n-1)` (e.g. `(1, 4, 1)` and `(1, 2, 2)` describe the same shape).
pub fn initial_from_final(
    n: u32,
    k_n: u64,
    j: u64,
    a_f: &BigUint,
    limits: &Limits,
) -> Result<BigUint> {
    if k_n == 0 || j == 0 {
        return Err(Error::InvalidParams("k_n and j must be >= 1".into()));
    }
    if shape_alpha(n, k_n, j)? <= u64::from(n) {
        return Err(Error::InvalidParams(alloc::format!(
            "alpha must exceed n: n = {n}, k_n = {k_n}, j = {j}"
        )));
    }
    if a_f.is_even() {
        return Err(Error::NotOddInput(a_f.clone()));
    }
    let alpha = shape_alpha(n, k_n, j)?;
    let numerator = a_f * pow2(alpha - u64::from(n), limits)? + 1u32;
    let q = exact_div(numerator, pow3(n), "a_F·2^(alpha-n)+1 by 3^n")?.quotient;
    Ok(pow2(u64::from(n), limits)? * q - 1u32)
}

/// `2^n·(2^(3^(n-1)·q) + 1)/3^n − 1`, whose trajectory reaches 1 in a single
/// cycle.
pub fn single_cycle_seed(n: u32, q: &BigUint, limits: &Limits) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::InvalidParams("grade n must be >= 1".into()));
    }
    let quotient = div3_plus(n - 1, q, limits)?;
    Ok(pow2(u64::from(n), limits)? * quotient - 1u32)
}

/// `v = 3^n·K_O − 2^beta` with `beta = 2·3^(n-1) − k_n + n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nd3Decomp {
    pub n: u32,
    pub k_n: u64,
    pub k_o: BigUint,
}

impl Nd3Decomp {
    pub fn beta(&self) -> u64 {
        period(self.n).expect("validated on construction") - self.k_n + u64::from(self.n)
    }
}

/// Finds the exponent `beta` in `[n, 2·3^(n-1) + n − 1]` with
/// `3^n | v + 2^beta`. Exactly one exists for every `v` prime to 3.
pub fn nd3_decode(v: &BigUint, n: u32, limits: &Limits) -> Result<Nd3Decomp> {
    if v.is_even() {
        return Err(Error::NotOddInput(v.clone()));
    }
    if (v % 3u32).is_zero() {
        return Err(Error::DivisibleBy3);
    }
    let p = period(n)?;
    let lo = u64::from(n);
    let hi = p + lo - 1;
    limits.check_bits(hi + 1)?;

    let modulus = pow3(n);
    let v_mod = v % &modulus;
    let mut power = BigUint::from(2u32).modpow(&BigUint::from(lo), &modulus);
    let mut hits = 0usize;
    let mut found = None;
    for beta in lo..=hi {
        if ((&v_mod + &power) % &modulus).is_zero() {
            hits += 1;
            found.get_or_insert(beta);
        }
        power = (power * 2u32) % &modulus;
    }
    let beta = match (hits, found) {
        (1, Some(beta)) => beta,
        _ => return Err(Error::NoSolution { hits }),
    };
    let k_o = exact_div(v + pow2(beta, limits)?, modulus, "v + 2^beta by 3^n")?.quotient;
    debug_assert!(k_o.is_odd());
    Ok(Nd3Decomp {
        n,
        k_n: p + lo - beta,
        k_o,
    })
}

/// `3^n·a_O < a_F·2^alpha`.
pub fn bound_check(p: &OddParams, limits: &Limits) -> Result<bool> {
    let a = encode(p, limits)?;
    let a_f = final_of(p, limits)?;
    Ok(BigInt::from(pow3(p.n) * a) < BigInt::from(a_f * pow2(p.alpha()?, limits)?))
}
