//! Closed forms for sequences that realize a prescribed list of cycle shapes.
//!
//! For shapes `(n_s, j_s, k_s)` with `alpha_s = 2·3^(n_s−1)·(j_s−1) + k_s`,
//! write `N = Σn`, `A = Σalpha` and
//!
//! ```text
//! S = Σ_s 3^(Σ_{t>s} n_t) · 2^(Σ_{t<s} alpha_t) · (3^(n_s) − 2^(n_s))
//! M = (2^(3^(N−1)·j_delta) + 1) / 3^N
//! ```
//!
//! Then `a = 2^A·Q − M·S` runs through exactly those cycles (as long as every
//! intermediate value stays positive) and ends at
//! `3^N·Q − 2^(3^(N−1)·j_delta − A)·S`.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};

use crate::codec::period;
use crate::error::ShapeSignature;
use crate::exactmath::{div3_plus, pow2, pow3};
use crate::trajectory::{run_cycle, run_cycles, CycleTrace};
use crate::{Error, Limits, Result};

/// One requested cycle. Only `alpha` enters the formulas, so `k_n` is allowed
/// past `2·3^(n−1)`: `(1, 1, 4)` and `(1, 2, 2)` are the same shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CycleShape {
    pub n: u32,
    pub j: u64,
    pub k_n: u64,
}

impl CycleShape {
    pub const fn new(n: u32, j: u64, k_n: u64) -> Self {
        Self { n, j, k_n }
    }

    /// The canonical shape with the given counts (`k_n` in `[1, 2·3^(n−1)]`).
    pub fn from_signature((n, alpha): ShapeSignature) -> Result<Self> {
        let (j, k_n) = crate::codec::split_alpha(n, alpha)?;
        let shape = Self { n, j, k_n };
        shape.validate()?;
        Ok(shape)
    }

    pub fn alpha(&self) -> Result<u64> {
        let p = period(self.n)?;
        self.j
            .checked_sub(1)
            .and_then(|jm| jm.checked_mul(p))
            .and_then(|x| x.checked_add(self.k_n))
            .ok_or_else(|| Error::InvalidParams(alloc::format!("invalid shape {self:?}")))
    }

    pub fn signature(&self) -> Result<ShapeSignature> {
        Ok((self.n, self.alpha()?))
    }

    pub fn validate(&self) -> Result<()> {
        if self.j == 0 || self.k_n == 0 {
            return Err(Error::InvalidParams(alloc::format!(
                "shape {self:?}: j and k_n must be >= 1"
            )));
        }
        if self.alpha()? <= u64::from(self.n) {
            return Err(Error::InvalidParams(alloc::format!(
                "shape {self:?}: alpha must exceed n"
            )));
        }
        Ok(())
    }
}

/// `(Σn, Σalpha)` after validating every shape.
pub fn totals(shapes: &[CycleShape]) -> Result<(u32, u64)> {
    if shapes.is_empty() {
        return Err(Error::InvalidParams(
            "at least one cycle shape is required".into(),
        ));
    }
    let mut n = 0u32;
    let mut alpha = 0u64;
    for s in shapes {
        s.validate()?;
        n = n
            .checked_add(s.n)
            .ok_or_else(|| Error::InvalidParams("Σn overflows".into()))?;
        alpha = alpha
            .checked_add(s.alpha()?)
            .ok_or_else(|| Error::InvalidParams("Σalpha overflows".into()))?;
    }
    Ok((n, alpha))
}

/// `S`, evaluated term by term.
pub fn weight_sum(shapes: &[CycleShape], limits: &Limits) -> Result<BigUint> {
    totals(shapes)?;
    let mut sum = BigUint::from(0u32);
    let mut alpha_before = 0u64;
    for (s, shape) in shapes.iter().enumerate() {
        let n_after: u32 = shapes[s + 1..].iter().map(|t| t.n).sum();
        let term = pow3(n_after)
            * pow2(alpha_before, limits)?
            * (pow3(shape.n) - pow2(u64::from(shape.n), limits)?);
        sum += term;
        alpha_before += shape.alpha()?;
    }
    Ok(sum)
}

/// `3^(Σn−1)·j_delta`, checked to exceed `Σalpha`.
pub fn delta_exponent(shapes: &[CycleShape], j_delta: u64) -> Result<u64> {
    let (n, alpha) = totals(shapes)?;
    if j_delta.is_even() {
        return Err(Error::InvalidParams(alloc::format!(
            "j_delta must be odd, got {j_delta}"
        )));
    }
    let e = (pow3(n - 1) * j_delta)
        .to_u64()
        .ok_or_else(|| Error::InvalidParams("3^(Σn−1)·j_delta overflows".into()))?;
    if e <= alpha {
        return Err(Error::InvalidParams(alloc::format!(
            "3^(Σn−1)·j_delta = {e} must exceed Σalpha = {alpha}"
        )));
    }
    Ok(e)
}

/// Smallest odd `j_delta` with `3^(Σn−1)·j_delta > Σalpha`.
pub fn min_j_delta(shapes: &[CycleShape]) -> Result<u64> {
    let (n, alpha) = totals(shapes)?;
    let base = pow3(n - 1)
        .to_u64()
        .ok_or_else(|| Error::InvalidParams("3^(Σn−1) overflows".into()))?;
    let mut j = alpha / base + 1;
    if j.is_even() {
        j += 1;
    }
    Ok(j)
}

/// `M = (2^(3^(Σn−1)·j_delta) + 1) / 3^Σn`.
pub fn m_factor(shapes: &[CycleShape], j_delta: u64, limits: &Limits) -> Result<BigUint> {
    let (n, _) = totals(shapes)?;
    delta_exponent(shapes, j_delta)?;
    div3_plus(n - 1, &BigUint::from(j_delta), limits)
}

/// Smallest odd `Q` with `2^Σalpha·Q > M·S`.
pub fn min_q(shapes: &[CycleShape], j_delta: u64, limits: &Limits) -> Result<BigUint> {
    let (_, alpha) = totals(shapes)?;
    let ms = m_factor(shapes, j_delta, limits)? * weight_sum(shapes, limits)?;
    let mut q = (ms >> alpha) + 1u32;
    if q.is_even() {
        q += 1u32;
    }
    Ok(q)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComposePlan {
    pub shapes: Vec<CycleShape>,
    pub j_delta: u64,
    pub q: BigUint,
}

impl ComposePlan {
    pub fn new(shapes: Vec<CycleShape>, j_delta: u64, q: impl Into<BigUint>) -> Self {
        Self {
            shapes,
            j_delta,
            q: q.into(),
        }
    }

    /// Fills in the minimal admissible `j_delta` and the minimal `Q` where not
    /// given.
    pub fn with_defaults(
        shapes: Vec<CycleShape>,
        j_delta: Option<u64>,
        q: Option<BigUint>,
        limits: &Limits,
    ) -> Result<Self> {
        let j_delta = match j_delta {
            Some(j) => j,
            None => min_j_delta(&shapes)?,
        };
        let q = match q {
            Some(q) => q,
            None => min_q(&shapes, j_delta, limits)?,
        };
        Ok(Self { shapes, j_delta, q })
    }

    fn check(&self) -> Result<(u32, u64, u64)> {
        let (n, alpha) = totals(&self.shapes)?;
        let e = delta_exponent(&self.shapes, self.j_delta)?;
        if self.q.is_even() {
            return Err(Error::InvalidParams(alloc::format!(
                "Q must be odd, got {}",
                self.q
            )));
        }
        Ok((n, alpha, e))
    }

    pub fn signatures(&self) -> Result<Vec<ShapeSignature>> {
        self.shapes.iter().map(CycleShape::signature).collect()
    }
}

fn positive(value: BigInt, context: &'static str) -> Result<BigUint> {
    if value.is_positive() {
        Ok(value.to_biguint().expect("positive"))
    } else {
        Err(Error::NonPositive {
            context,
            value,
            suggested_k_o: None,
        })
    }
}

/// `2^Σalpha·Q − M·S`.
pub fn compose_initial(plan: &ComposePlan, limits: &Limits) -> Result<BigUint> {
    let (_, alpha, _) = plan.check()?;
    let head = BigInt::from(pow2(alpha, limits)? * &plan.q);
    let ms = m_factor(&plan.shapes, plan.j_delta, limits)? * weight_sum(&plan.shapes, limits)?;
    positive(head - BigInt::from(ms), "composed initial")
}

/// `3^Σn·Q − 2^(3^(Σn−1)·j_delta − Σalpha)·S`.
pub fn compose_final(plan: &ComposePlan, limits: &Limits) -> Result<BigUint> {
    let (n, alpha, e) = plan.check()?;
    let head = BigInt::from(pow3(n) * &plan.q);
    let tail = pow2(e - alpha, limits)? * weight_sum(&plan.shapes, limits)?;
    positive(head - BigInt::from(tail), "composed final")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleCheck {
    pub expected: ShapeSignature,
    pub actual: ShapeSignature,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanReport {
    pub initial: BigUint,
    pub expected_final: BigUint,
    pub per_cycle: Vec<CycleCheck>,
    pub cycles: Vec<CycleTrace>,
}

/// Simulates from `initial` and checks that the cycles have the requested
/// shapes and end at `expected_final`.
pub fn check_realization(
    initial: &BigUint,
    expected: &[ShapeSignature],
    expected_final: &BigUint,
    limits: &Limits,
) -> Result<PlanReport> {
    let cycles = match run_cycles(initial, expected.len(), limits) {
        Ok(c) => c,
        // A plan may route through 1; the map keeps cycling 1 -> 4 -> 2 -> 1.
        Err(Error::ReachedOneEarly { mut completed, .. }) => {
            let one = run_cycle(&BigUint::from(1u32), limits)?;
            completed.resize(expected.len(), one);
            completed
        }
        Err(e) => return Err(e),
    };
    if let Some(err) = first_mismatch(expected, &cycles) {
        return Err(err);
    }
    let reached = &cycles.last().expect("at least one cycle").final_odd;
    if reached != expected_final {
        return Err(Error::FinalMismatch {
            expected: expected_final.clone(),
            actual: reached.clone(),
        });
    }
    Ok(PlanReport {
        initial: initial.clone(),
        expected_final: expected_final.clone(),
        per_cycle: expected
            .iter()
            .zip(&cycles)
            .map(|(&e, c)| CycleCheck {
                expected: e,
                actual: c.shape(),
            })
            .collect(),
        cycles,
    })
}

fn first_mismatch(expected: &[ShapeSignature], cycles: &[CycleTrace]) -> Option<Error> {
    expected
        .iter()
        .zip(cycles)
        .enumerate()
        .find(|(_, (e, c))| **e != c.shape())
        .map(|(i, (e, c))| Error::ShapeMismatch {
            cycle: i + 1,
            expected: *e,
            actual: Some(c.shape()),
        })
}

pub fn verify_plan(plan: &ComposePlan, limits: &Limits) -> Result<PlanReport> {
    let initial = compose_initial(plan, limits)?;
    let expected_final = compose_final(plan, limits)?;
    check_realization(&initial, &plan.signatures()?, &expected_final, limits)
}

/// `(initial + 2^Σalpha·K, final + 3^Σn·K)` for even `K`, confirmed by
/// simulating the shifted initial.
pub fn shifted_family(
    plan: &ComposePlan,
    k: &BigInt,
    limits: &Limits,
) -> Result<(BigUint, BigUint)> {
    if k.is_odd() {
        return Err(Error::InvalidParams(alloc::format!(
            "shift K must be even to keep the final odd, got {k}"
        )));
    }
    let (n, alpha, _) = plan.check()?;
    let initial = BigInt::from(compose_initial(plan, limits)?);
    let fin = BigInt::from(compose_final(plan, limits)?);
    let initial = positive(
        initial + BigInt::from(pow2(alpha, limits)?) * k,
        "shifted initial",
    )?;
    let fin = positive(fin + BigInt::from(pow3(n)) * k, "shifted final")?;
    check_realization(&initial, &plan.signatures()?, &fin, limits)?;
    Ok((initial, fin))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn lim() -> Limits {
        Limits::default()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn worked() -> Vec<CycleShape> {
        vec![
            CycleShape::new(1, 2, 2),
            CycleShape::new(1, 1, 4),
            CycleShape::new(2, 1, 3),
        ]
    }

    fn single() -> Vec<CycleShape> {
        vec![CycleShape::new(1, 1, 2)]
    }

    #[test]
    fn weight_sums() {
        assert_eq!(weight_sum(&worked(), &lim()).unwrap(), big(1451));
        assert_eq!(weight_sum(&single(), &lim()).unwrap(), big(1));
        let two = vec![CycleShape::new(1, 1, 2); 2];
        assert_eq!(weight_sum(&two, &lim()).unwrap(), big(7));
    }

    #[test]
    fn minimal_q() {
        assert_eq!(min_q(&worked(), 1, &lim()).unwrap(), big(1_173_985));
        assert_eq!(min_q(&single(), 3, &lim()).unwrap(), big(1));
        let two = vec![CycleShape::new(1, 1, 2); 2];
        assert_eq!(m_factor(&two, 3, &lim()).unwrap(), big(57));
        assert_eq!(min_q(&two, 3, &lim()).unwrap(), big(25));
        assert_eq!(min_j_delta(&worked()).unwrap(), 1);
        assert_eq!(min_j_delta(&single()).unwrap(), 3);
    }

    #[test]
    fn initial_and_final() {
        let p = ComposePlan::new(worked(), 1, 1_173_985u32);
        assert_eq!(compose_initial(&p, &lim()).unwrap(), big(1221));
        assert_eq!(compose_final(&p, &lim()).unwrap(), big(49));

        let p = ComposePlan::new(single(), 3, 1u32);
        assert_eq!(compose_initial(&p, &lim()).unwrap(), big(1));
        assert_eq!(compose_final(&p, &lim()).unwrap(), big(1));

        let p = ComposePlan::new(single(), 3, 29u32);
        assert_eq!(compose_initial(&p, &lim()).unwrap(), big(113));
        assert_eq!(compose_final(&p, &lim()).unwrap(), big(85));
    }

    #[test]
    fn inadmissible_plans() {
        assert!(delta_exponent(&single(), 1).is_err());
        assert!(delta_exponent(&single(), 2).is_err());
        let p = ComposePlan::new(worked(), 1, 1_173_983u32);
        assert!(matches!(
            compose_initial(&p, &lim()),
            Err(Error::NonPositive { .. })
        ));
        let p = ComposePlan::new(worked(), 1, 1_173_986u32);
        assert!(compose_initial(&p, &lim()).is_err());
    }

    #[test]
    fn plans_verify() {
        let r = verify_plan(&ComposePlan::new(worked(), 1, 1_173_985u32), &lim()).unwrap();
        let got: Vec<_> = r.per_cycle.iter().map(|c| c.actual).collect();
        assert_eq!(got, vec![(1, 4), (1, 4), (2, 3)]);
        assert_eq!(r.expected_final, big(49));

        verify_plan(&ComposePlan::new(single(), 3, 1u32), &lim()).unwrap();
        for k in 1..=5u64 {
            verify_plan(&ComposePlan::new(worked(), 1, 1_173_985 + 2 * k), &lim()).unwrap();
        }
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let wrong = vec![
            CycleShape::new(1, 1, 3),
            CycleShape::new(1, 1, 4),
            CycleShape::new(2, 1, 3),
        ];
        let err = check_realization(
            &big(1221),
            &ComposePlan::new(wrong, 1, 1u32).signatures().unwrap(),
            &big(49),
            &lim(),
        )
        .unwrap_err();
        assert_eq!(
            err,
            Error::ShapeMismatch {
                cycle: 1,
                expected: (1, 3),
                actual: Some((1, 4))
            }
        );
    }

    #[test]
    fn family_shifts() {
        let p = ComposePlan::new(worked(), 1, 1_173_985u32);
        assert_eq!(
            shifted_family(&p, &BigInt::from(0), &lim()).unwrap(),
            (big(1221), big(49))
        );
        assert_eq!(
            shifted_family(&p, &BigInt::from(2), &lim()).unwrap(),
            (big(5317), big(211))
        );
        assert_eq!(
            shifted_family(&p, &BigInt::from(4), &lim()).unwrap(),
            (big(9413), big(373))
        );
        let p = ComposePlan::new(single(), 3, 1u32);
        assert_eq!(
            shifted_family(&p, &BigInt::from(28), &lim()).unwrap(),
            (big(113), big(85))
        );
        assert!(shifted_family(&p, &BigInt::from(3), &lim()).is_err());
    }
}
