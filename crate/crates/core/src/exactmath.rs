//! Exact kernels for quotients of the form `(2^(3^m·K) ± 1) / 3^(m+1)` and
//! `(2^(3^(n-1)·q) ± 1) / (2^(3^(n-1)) + 1)`.
//!
//! Every division here is *expected* to be exact; a remainder is reported as
//! [`Error::NonDivisible`] so that sweeps can log it as a counterexample.
//!
//! Index convention: the `div3_*` helpers are stated as
//! `3^(m+1) | 2^(3^m·K) ± 1` and take `m` directly. Code that works with
//! `3^n | 2^(3^(n-1)·K) + 1` (grades, `F`, the cyclotomic quotients) passes
//! `m = n - 1`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::{Error, Limits, Result};

/// `numerator = divisor · quotient`, checked when constructed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactQuotient {
    pub numerator: BigUint,
    pub divisor: BigUint,
    pub quotient: BigUint,
}

pub fn pow3(e: u32) -> BigUint {
    BigUint::from(3u32).pow(e)
}

/// `2^e`, refusing to build anything wider than the bit cap.
pub fn pow2(e: u64, limits: &Limits) -> Result<BigUint> {
    limits.check_bits(e.saturating_add(1))?;
    Ok(BigUint::one() << e)
}

/// `3^m · k` as a machine exponent, checked against the bit cap.
pub fn exponent(m: u32, k: &BigUint, limits: &Limits) -> Result<u64> {
    let e = pow3(m) * k;
    let e = e.to_u64().ok_or(Error::BitCapExceeded {
        required_bits: u64::MAX,
        cap: limits.bit_cap,
    })?;
    limits.check_bits(e.saturating_add(1))?;
    Ok(e)
}

pub fn exact_div(
    numerator: BigUint,
    divisor: BigUint,
    context: &'static str,
) -> Result<ExactQuotient> {
    if divisor.is_zero() {
        return Err(Error::InvalidParams("division by zero".into()));
    }
    let (quotient, remainder) = numerator.div_rem(&divisor);
    if !remainder.is_zero() {
        return Err(Error::NonDivisible {
            context,
            divisor: divisor.into(),
            remainder: remainder.into(),
        });
    }
    Ok(ExactQuotient {
        numerator,
        divisor,
        quotient,
    })
}

/// Signed exact division; the remainder check uses truncated division so any
/// nonzero remainder is reported regardless of sign.
pub fn exact_div_signed(
    numerator: &BigInt,
    divisor: &BigInt,
    context: &'static str,
) -> Result<BigInt> {
    if divisor.is_zero() {
        return Err(Error::InvalidParams("division by zero".into()));
    }
    let (quotient, remainder) = numerator.div_rem(divisor);
    if !remainder.is_zero() {
        return Err(Error::NonDivisible {
            context,
            divisor: divisor.clone(),
            remainder,
        });
    }
    Ok(quotient)
}

fn require_odd(k: &BigUint, what: &str) -> Result<()> {
    if k.is_odd() {
        Ok(())
    } else {
        Err(Error::InvalidParams(alloc::format!(
            "{what} must be odd, got {k}"
        )))
    }
}

fn require_even_positive(k: &BigUint, what: &str) -> Result<()> {
    if k.is_even() && !k.is_zero() {
        Ok(())
    } else {
        Err(Error::InvalidParams(alloc::format!(
            "{what} must be even and >= 2, got {k}"
        )))
    }
}

/// `(2^(3^m·K_O) + 1) / 3^(m+1)` for odd `K_O`.
pub fn div3_plus(m: u32, k_odd: &BigUint, limits: &Limits) -> Result<BigUint> {
    require_odd(k_odd, "K_O")?;
    let e = exponent(m, k_odd, limits)?;
    let numerator = pow2(e, limits)? + 1u32;
    Ok(exact_div(numerator, pow3(m + 1), "2^(3^m*K_O)+1 by 3^(m+1)")?.quotient)
}

/// `(2^(3^m·K_E) - 1) / 3^(m+1)` for even `K_E >= 2`.
pub fn div3_minus(m: u32, k_even: &BigUint, limits: &Limits) -> Result<BigUint> {
    require_even_positive(k_even, "K_E")?;
    let e = exponent(m, k_even, limits)?;
    let numerator = pow2(e, limits)? - 1u32;
    Ok(exact_div(numerator, pow3(m + 1), "2^(3^m*K_E)-1 by 3^(m+1)")?.quotient)
}

/// `F = (2^(3^(n-1)) + 1) / 3^n`, also checking that `F - 1` is a multiple of 9.
pub fn f_value(n: u32, limits: &Limits) -> Result<BigUint> {
    if n == 0 {
        return Err(Error::InvalidParams("F needs n >= 1".into()));
    }
    let f = div3_plus(n - 1, &BigUint::one(), limits)?;
    let rem = (&f - 1u32) % 9u32;
    if !rem.is_zero() {
        return Err(Error::NonDivisible {
            context: "F-1 by 9",
            divisor: 9.into(),
            remainder: rem.into(),
        });
    }
    Ok(f)
}

fn grade_block(n: u32) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidParams("grade n must be >= 1".into()));
    }
    pow3(n - 1)
        .to_u64()
        .ok_or_else(|| Error::InvalidParams("3^(n-1) does not fit a machine word".into()))
}

fn block_exponent(block: u64, q: &BigUint, limits: &Limits) -> Result<u64> {
    let e = (q * block).to_u64().ok_or(Error::BitCapExceeded {
        required_bits: u64::MAX,
        cap: limits.bit_cap,
    })?;
    limits.check_bits(e.saturating_add(1))?;
    Ok(e)
}

/// `(2^(3^(n-1)·q) + 1) / (2^(3^(n-1)) + 1)` for odd `q`, by long division.
///
/// The result is also checked to be congruent to `q` modulo `3^n`.
pub fn cyclotomic_quotient(n: u32, q: &BigUint, limits: &Limits) -> Result<BigUint> {
    require_odd(q, "q")?;
    let block = grade_block(n)?;
    let e = block_exponent(block, q, limits)?;
    let numerator = pow2(e, limits)? + 1u32;
    let divisor = pow2(block, limits)? + 1u32;
    let quotient = exact_div(numerator, divisor, "2^(3^(n-1)q)+1 by 2^(3^(n-1))+1")?.quotient;

    let modulus = pow3(n);
    if &quotient % &modulus != q % &modulus {
        let diff = BigInt::from(quotient.clone()) - BigInt::from(q.clone());
        return Err(Error::NonDivisible {
            context: "cyclotomic quotient minus q by 3^n",
            divisor: modulus.into(),
            remainder: diff.mod_floor(&BigInt::from(pow3(n))),
        });
    }
    Ok(quotient)
}

/// Sum of `sign(i) · 2^(block·i)` for `i` in `0..terms`, where the sign
/// alternates starting with `+` when `positive_first`.
fn alternating_power_sum(block: u64, terms: u64, positive_first: bool) -> BigInt {
    let mut plus = BigUint::zero();
    let mut minus = BigUint::zero();
    for i in 0..terms {
        let target = if (i % 2 == 0) == positive_first {
            &mut plus
        } else {
            &mut minus
        };
        target.set_bit(block * i, true);
    }
    BigInt::from(plus) - BigInt::from(minus)
}

/// The cyclotomic quotient evaluated as `Σ_{i<q} (-1)^i · 2^(3^(n-1)·i)`.
///
/// Independent of [`cyclotomic_quotient`]: no division is performed.
pub fn cyclotomic_alternating_sum(n: u32, q: &BigUint, limits: &Limits) -> Result<BigUint> {
    require_odd(q, "q")?;
    let block = grade_block(n)?;
    block_exponent(block, q, limits)?;
    let terms = q.to_u64().expect("checked by block_exponent");
    let sum = alternating_power_sum(block, terms, true);
    Ok(sum
        .to_biguint()
        .expect("alternating sum with odd term count is positive"))
}

/// `(2^(3^(n-1)·q_E) - 1) / (2^(3^(n-1)) + 1)` for even `q_E >= 2`.
pub fn even_quotient(n: u32, q_even: &BigUint, limits: &Limits) -> Result<BigUint> {
    require_even_positive(q_even, "q_E")?;
    let block = grade_block(n)?;
    let e = block_exponent(block, q_even, limits)?;
    let numerator = pow2(e, limits)? - 1u32;
    let divisor = pow2(block, limits)? + 1u32;
    Ok(exact_div(numerator, divisor, "2^(3^(n-1)q_E)-1 by 2^(3^(n-1))+1")?.quotient)
}

/// The even quotient evaluated as `Σ_{i<q_E} (-1)^(i+1) · 2^(3^(n-1)·i)`.
pub fn even_alternating_sum(n: u32, q_even: &BigUint, limits: &Limits) -> Result<BigUint> {
    require_even_positive(q_even, "q_E")?;
    let block = grade_block(n)?;
    block_exponent(block, q_even, limits)?;
    let terms = q_even.to_u64().expect("checked by block_exponent");
    let sum = alternating_power_sum(block, terms, false);
    Ok(sum
        .to_biguint()
        .expect("alternating sum with even term count is positive"))
}

/// Checks
/// `(2^(2·3^j·q) - 2^(3^j·q) + 1) / 3 = 2·3^(j+1)·[(2^(3^j·q)+1)/3^(j+1)]·[(2^(3^j·q-1)-1)/3] + 1`
/// with every division exact.
pub fn verify_identity_a7_1(j: u32, q_odd: &BigUint, limits: &Limits) -> Result<bool> {
    require_odd(q_odd, "q_O")?;
    let e = exponent(j, q_odd, limits)?;
    let e2 = e.checked_mul(2).ok_or(Error::BitCapExceeded {
        required_bits: u64::MAX,
        cap: limits.bit_cap,
    })?;

    let lhs_num = pow2(e2, limits)? - pow2(e, limits)? + 1u32;
    let lhs = exact_div(lhs_num, 3u32.into(), "2^(2E)-2^E+1 by 3")?.quotient;

    let plus = div3_plus(j, q_odd, limits)?;
    let minus_num = pow2(e - 1, limits)? - 1u32;
    let minus = exact_div(minus_num, 3u32.into(), "2^(E-1)-1 by 3")?.quotient;
    let rhs = pow3(j + 1) * 2u32 * plus * minus + 1u32;
    Ok(lhs == rhs)
}

/// Checks the product expansion
/// `2^(3^n·K) + 1 = 3^(n+1) · (2^K+1)/3 · Π_{j<n} (2^(2·3^j·K) - 2^(3^j·K) + 1)/3`.
pub fn verify_factorization_a4_5(n: u32, k_odd: &BigUint, limits: &Limits) -> Result<bool> {
    require_odd(k_odd, "K_O")?;
    let target = pow2(exponent(n, k_odd, limits)?, limits)? + 1u32;

    let k = k_odd.to_u64().ok_or(Error::BitCapExceeded {
        required_bits: u64::MAX,
        cap: limits.bit_cap,
    })?;
    let mut product = pow3(n + 1);
    product *= exact_div(pow2(k, limits)? + 1u32, 3u32.into(), "2^K+1 by 3")?.quotient;
    for j in 0..n {
        let e = exponent(j, k_odd, limits)?;
        let factor = pow2(2 * e, limits)? - pow2(e, limits)? + 1u32;
        product *= exact_div(factor, 3u32.into(), "2^(2E)-2^E+1 by 3")?.quotient;
    }
    Ok(product == target)
}

/// `Some(e)` when `x = 3^e`.
pub fn pure_power_of_3(x: &BigUint) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let three = BigUint::from(3u32);
    let mut rest = x.clone();
    let mut e = 0;
    loop {
        if rest.is_one() {
            return Some(e);
        }
        let (q, r) = rest.div_rem(&three);
        if !r.is_zero() {
            return None;
        }
        rest = q;
        e += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lim() -> Limits {
        Limits::default()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn div3_plus_examples() {
        assert_eq!(
            div3_plus(2, &big(5), &lim()).unwrap(),
            big(1_303_124_892_179)
        );
        assert_eq!(div3_plus(0, &big(1), &lim()).unwrap(), big(1));
    }

    #[test]
    fn div3_plus_rejects_even_k() {
        assert!(matches!(
            div3_plus(1, &big(4), &lim()),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn div3_minus_examples() {
        assert_eq!(div3_minus(0, &big(2), &lim()).unwrap(), big(1));
        assert_eq!(div3_minus(1, &big(2), &lim()).unwrap(), big(7));
        assert_eq!(
            div3_minus(2, &big(4), &lim()).unwrap(),
            big(((1u64 << 36) - 1) / 27)
        );
        assert!(div3_minus(1, &big(0), &lim()).is_err());
        assert!(div3_minus(1, &big(3), &lim()).is_err());
    }

    #[test]
    fn f_value_examples() {
        assert_eq!(f_value(1, &lim()).unwrap(), big(1));
        assert_eq!(f_value(3, &lim()).unwrap(), big(19));
        assert_eq!(f_value(4, &lim()).unwrap(), big(1_657_009));
        assert!(f_value(0, &lim()).is_err());
    }

    #[test]
    fn cyclotomic_examples() {
        assert_eq!(cyclotomic_quotient(1, &big(7), &lim()).unwrap(), big(43));
        assert_eq!(cyclotomic_quotient(1, &big(1), &lim()).unwrap(), big(1));
        let q = cyclotomic_quotient(2, &big(3), &lim()).unwrap();
        assert_eq!(q, big(57));
        assert_eq!(q % 9u32, big(3));
    }

    #[test]
    fn even_quotient_examples() {
        assert_eq!(even_quotient(1, &big(2), &lim()).unwrap(), big(1));
        assert_eq!(even_quotient(1, &big(4), &lim()).unwrap(), big(5));
        assert_eq!(even_quotient(2, &big(4), &lim()).unwrap(), big(455));
    }

    #[test]
    fn alternating_sums_match_examples() {
        assert_eq!(
            cyclotomic_alternating_sum(2, &big(3), &lim()).unwrap(),
            big(57)
        );
        assert_eq!(even_alternating_sum(2, &big(4), &lim()).unwrap(), big(455));
    }

    #[test]
    fn identity_a7_1_examples() {
        for (j, q) in [(0, 3), (0, 1), (1, 3), (2, 5)] {
            assert!(
                verify_identity_a7_1(j, &big(q), &lim()).unwrap(),
                "j={j} q={q}"
            );
        }
    }

    #[test]
    fn factorization_examples() {
        for (n, k) in [(1, 1), (2, 5), (3, 3)] {
            assert!(
                verify_factorization_a4_5(n, &big(k), &lim()).unwrap(),
                "n={n} K={k}"
            );
        }
    }

    #[test]
    fn pure_power_examples() {
        assert_eq!(pure_power_of_3(&big(1)), Some(0));
        assert_eq!(pure_power_of_3(&big(19)), None);
        assert_eq!(pure_power_of_3(&big(243)), Some(5));
        assert_eq!(pure_power_of_3(&big(0)), None);
    }

    #[test]
    fn bit_cap_is_enforced() {
        let tight = Limits::default().with_bit_cap(64);
        assert!(matches!(
            div3_plus(3, &big(7), &tight),
            Err(Error::BitCapExceeded {
                required_bits: 190,
                cap: 64
            })
        ));
        assert!(pow2(63, &tight).is_ok());
        assert!(pow2(64, &tight).is_err());
    }

    #[test]
    fn exact_div_reports_remainder() {
        let err = exact_div(big(10), big(3), "ten by three").unwrap_err();
        assert_eq!(
            err,
            Error::NonDivisible {
                context: "ten by three",
                divisor: 3.into(),
                remainder: 1.into()
            }
        );
        assert_eq!(
            exact_div_signed(&BigInt::from(-12), &BigInt::from(4), "x").unwrap(),
            (-3).into()
        );
        assert!(exact_div_signed(&BigInt::from(-13), &BigInt::from(4), "x").is_err());
    }
}
