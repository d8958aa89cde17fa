//! Construction of a sequence that follows `i` prescribed cycle shapes and
//! then lands on a number that reaches 1 in a single cycle.
//!
//! With `N = Σn`, `A = Σalpha`, `E = 3^(N−1)·j_delta − A` and the weight sum
//! `S` from [`composer`](crate::composer):
//!
//! ```text
//! B   = 2^E·S − 1
//! F_L = (2^(3^(n_L−1)) + 1) / 3^(n_L)
//! X   = ((F_L − 1)^(a_E) − 1) / F_L
//! q_O = 3^N·K_O − C                          (C depends on the case)
//! Q   = (B + 2^(n_L)·(2^(3^(n_L−1)·q_O) + 1)/3^(n_L)) / 3^N
//! ```
//!
//! For `N <= n_L`, `C = 2^(3^(N−1)·j_beta − n_L)·X·B`. For `N > n_L`, with
//! `T = 3^(N−n_L−1)`,
//! `C = 2^T·2^(3^(N−1)−n_L)·X·(1 − 2^(T·(3^(n_L)·j_beta − 1)))/(1 + 2^T)·B`.
//!
//! The composed plan `(shapes, j_delta, Q)` then ends at
//! `3^N·Q − 2^E·S = 2^(n_L)·(2^(3^(n_L−1)·q_O) + 1)/3^(n_L) − 1`, which is
//! [`single_cycle_seed`]`(n_L, q_O)`.
//!
//! The division by `3^N` in `Q` is the step that can fail. It is reported as
//! [`Error::NonDivisible`], never papered over.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use crate::codec::single_cycle_seed;
use crate::composer::{
    compose_final, compose_initial, delta_exponent, min_j_delta, totals, weight_sum, ComposePlan,
    CycleShape,
};
use crate::error::ShapeSignature;
use crate::exactmath::{cyclotomic_quotient, div3_plus, exact_div_signed, f_value, pow2, pow3};
use crate::trajectory::{run_cycle, run_cycles, CycleTrace};
use crate::{Error, Limits, Result};

/// Largest `|K_O|` tried by the automatic search.
pub const K_SEARCH_BOUND: u64 = 999;

/// Odd `j_beta` candidates tried when none is given.
const J_BETA_CANDIDATES: usize = 8;

/// Which formula for `q_O` applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Case {
    /// `Σn <= n_L`
    Le,
    /// `Σn > n_L`
    Gt,
}

impl Case {
    pub fn of(sum_n: u32, n_l: u32) -> Self {
        if sum_n > n_l {
            Case::Gt
        } else {
            Case::Le
        }
    }
}

/// Fully specified free parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerminalParams {
    pub shapes: Vec<CycleShape>,
    pub j_delta: u64,
    pub n_l: u32,
    pub k_o: BigInt,
    pub a_e: u64,
    pub j_beta: u64,
    /// Only constrained (and only meaningful) when `Σn > n_L`.
    pub gamma_o: u64,
}

/// Optional overrides for [`build_terminal`]; anything left `None` is chosen
/// automatically.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Frees {
    pub j_delta: Option<u64>,
    pub j_beta: Option<u64>,
    pub gamma_o: Option<u64>,
    pub a_e: Option<u64>,
    pub k_o: Option<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerminalPlan {
    pub params: TerminalParams,
    pub case: Case,
    pub b: BigInt,
    pub f_l: BigUint,
    pub q_o: BigUint,
    pub q: BigUint,
    pub b_initial: BigUint,
    pub b_landing: BigUint,
}

impl TerminalPlan {
    pub fn compose_plan(&self) -> ComposePlan {
        ComposePlan::new(
            self.params.shapes.clone(),
            self.params.j_delta,
            self.q.clone(),
        )
    }
}

/// `B = 2^(3^(Σn−1)·j_delta − Σalpha)·S − 1`.
pub fn b_term(shapes: &[CycleShape], j_delta: u64, limits: &Limits) -> Result<BigInt> {
    let (_, alpha) = totals(shapes)?;
    let e = delta_exponent(shapes, j_delta)?;
    let s = weight_sum(shapes, limits)?;
    Ok(BigInt::from(pow2(e - alpha, limits)? * s) - 1)
}

/// Smallest even `a_E >= 2` with `2·a_E >= Σn`.
pub fn default_a_e(sum_n: u32) -> u64 {
    let half = u64::from(sum_n).div_ceil(2);
    let a = half.max(2);
    a + (a & 1)
}

/// Smallest odd `gamma_O` with `(Σn − n_L)·gamma_O >= Σn`.
pub fn default_gamma_o(sum_n: u32, n_l: u32) -> Option<u64> {
    let d = u64::from(sum_n.checked_sub(n_l).filter(|d| *d > 0)?);
    let g = u64::from(sum_n).div_ceil(d);
    Some(g + (1 - (g & 1)))
}

/// Smallest odd `j_beta` satisfying the case constraint.
pub fn min_j_beta(sum_n: u32, n_l: u32) -> Result<u64> {
    let base = pow3_u64(sum_n - 1)?;
    let need = match Case::of(sum_n, n_l) {
        Case::Le => u64::from(n_l),
        Case::Gt => pow3_u64(sum_n - n_l - 1)? + u64::from(n_l),
    };
    let mut j = need.div_ceil(base).max(1);
    if j.is_even() {
        j += 1;
    }
    Ok(j)
}

fn pow3_u64(e: u32) -> Result<u64> {
    pow3(e)
        .to_u64()
        .ok_or_else(|| Error::InvalidParams(alloc::format!("3^{e} overflows")))
}

/// `((F_L − 1)^(a_E) − 1) / F_L`; equals −1 whenever `F_L = 1`.
pub fn x_term(n_l: u32, a_e: u64, limits: &Limits) -> Result<BigInt> {
    let f = BigInt::from(f_value(n_l, limits)?);
    let a_e = u32::try_from(a_e).map_err(|_| Error::InvalidParams("a_E too large".into()))?;
    let numerator = num_traits::pow::pow(&f - 1, a_e as usize) - 1;
    exact_div_signed(&numerator, &f, "(F-1)^a_E - 1 by F")
}

impl TerminalParams {
    fn validate(&self) -> Result<(u32, Case)> {
        let (sum_n, _) = totals(&self.shapes)?;
        delta_exponent(&self.shapes, self.j_delta)?;
        if self.n_l == 0 {
            return Err(Error::InvalidParams("n_L must be >= 1".into()));
        }
        if self.k_o.is_even() {
            return Err(Error::InvalidParams(alloc::format!(
                "K_O must be odd, got {}",
                self.k_o
            )));
        }
        if self.a_e == 0 || self.a_e.is_odd() || 2 * self.a_e < u64::from(sum_n) {
            return Err(Error::InvalidParams(alloc::format!(
                "a_E must be even, >= 2 and >= Σn/2, got {}",
                self.a_e
            )));
        }
        if self.j_beta.is_even() {
            return Err(Error::InvalidParams(alloc::format!(
                "j_beta must be odd, got {}",
                self.j_beta
            )));
        }
        let case = Case::of(sum_n, self.n_l);
        let lead = (pow3(sum_n - 1) * self.j_beta)
            .to_u64()
            .ok_or_else(|| Error::InvalidParams("3^(Σn−1)·j_beta overflows".into()))?;
        match case {
            Case::Le => {
                if lead < u64::from(self.n_l) {
                    return Err(Error::InvalidParams(alloc::format!(
                        "3^(Σn−1)·j_beta = {lead} must be >= n_L = {}",
                        self.n_l
                    )));
                }
            }
            Case::Gt => {
                let t = pow3_u64(sum_n - self.n_l - 1)?;
                if lead < u64::from(self.n_l) || lead - u64::from(self.n_l) < t {
                    return Err(Error::InvalidParams(alloc::format!(
                        "3^(Σn−1)·j_beta − n_L must be >= 3^(Σn−n_L−1) = {t}"
                    )));
                }
                if self.gamma_o.is_even()
                    || u64::from(sum_n - self.n_l) * self.gamma_o < u64::from(sum_n)
                {
                    return Err(Error::InvalidParams(alloc::format!(
                        "gamma_O must be odd with (Σn−n_L)·gamma_O >= Σn, got {}",
                        self.gamma_o
                    )));
                }
            }
        }
        Ok((sum_n, case))
    }
}

/// The `K_O`-independent part `C` of `q_O = 3^Σn·K_O − C`.
pub fn q_offset(tp: &TerminalParams, limits: &Limits) -> Result<BigInt> {
    let (sum_n, case) = tp.validate()?;
    let b = b_term(&tp.shapes, tp.j_delta, limits)?;
    let x = x_term(tp.n_l, tp.a_e, limits)?;
    let lead = (pow3(sum_n - 1) * tp.j_beta).to_u64().expect("validated");
    match case {
        Case::Le => {
            let p = BigInt::from(pow2(lead - u64::from(tp.n_l), limits)?);
            Ok(p * x * b)
        }
        Case::Gt => {
            let t = pow3_u64(sum_n - tp.n_l - 1)?;
            let inner = pow3_u64(tp.n_l)?
                .checked_mul(tp.j_beta)
                .and_then(|v| v.checked_sub(1))
                .and_then(|v| v.checked_mul(t))
                .ok_or(Error::BitCapExceeded {
                    required_bits: u64::MAX,
                    cap: limits.bit_cap,
                })?;
            let y_num = BigInt::one() - BigInt::from(pow2(inner, limits)?);
            let y_den = BigInt::from(pow2(t, limits)?) + 1;
            let y = exact_div_signed(&y_num, &y_den, "1-2^(T(3^n_L·j_beta-1)) by 1+2^T")?;
            let front = pow2(t, limits)? * pow2(pow3_u64(sum_n - 1)? - u64::from(tp.n_l), limits)?;
            Ok(BigInt::from(front) * x * y * b)
        }
    }
}

fn finish_q(tp: &TerminalParams, c: &BigInt, sum_n: u32) -> Result<BigUint> {
    let three_n = BigInt::from(pow3(sum_n));
    let q = &three_n * &tp.k_o - c;
    if !q.is_positive() {
        return Err(Error::NonPositive {
            context: "q_O",
            value: q,
            suggested_k_o: smallest_k(c, &three_n, K_SEARCH_BOUND).map(|(k, _)| k),
        });
    }
    if q.is_even() {
        return Err(Error::NotOdd {
            context: "q_O",
            value: q,
        });
    }
    Ok(q.to_biguint().expect("positive"))
}

/// Smallest `|K|` (odd, positive first) within `bound` giving a positive odd
/// `3^N·K − C`.
fn smallest_k(c: &BigInt, three_n: &BigInt, bound: u64) -> Option<(BigInt, BigUint)> {
    // 3^N·K is odd, so the parity of q is fixed by C.
    if c.is_odd() {
        return None;
    }
    let mut m = 1u64;
    while m <= bound {
        for k in [BigInt::from(m), -BigInt::from(m)] {
            let q = three_n * &k - c;
            if q.is_positive() {
                return Some((k, q.to_biguint().expect("positive")));
            }
        }
        m += 2;
    }
    None
}

pub fn q_case_le(tp: &TerminalParams, limits: &Limits) -> Result<BigUint> {
    let (sum_n, _) = totals(&tp.shapes)?;
    if Case::of(sum_n, tp.n_l) != Case::Le {
        return Err(Error::WrongCase { sum_n, n_l: tp.n_l });
    }
    let c = q_offset(tp, limits)?;
    finish_q(tp, &c, sum_n)
}

pub fn q_case_gt(tp: &TerminalParams, limits: &Limits) -> Result<BigUint> {
    let (sum_n, _) = totals(&tp.shapes)?;
    if Case::of(sum_n, tp.n_l) != Case::Gt {
        return Err(Error::WrongCase { sum_n, n_l: tp.n_l });
    }
    let c = q_offset(tp, limits)?;
    finish_q(tp, &c, sum_n)
}

/// `Q = (B + 2^(n_L)·(2^(3^(n_L−1)·q_O) + 1)/3^(n_L)) / 3^Σn`, both divisions
/// exact and `Q` odd.
pub fn q_big(sum_n: u32, n_l: u32, b: &BigInt, q_o: &BigUint, limits: &Limits) -> Result<BigUint> {
    if n_l == 0 || sum_n == 0 {
        return Err(Error::InvalidParams("Σn and n_L must be >= 1".into()));
    }
    let g = div3_plus(n_l - 1, q_o, limits)?;
    let numerator = b + BigInt::from(pow2(u64::from(n_l), limits)? * g);
    let q = exact_div_signed(
        &numerator,
        &BigInt::from(pow3(sum_n)),
        "B + 2^n_L·G by 3^Σn",
    )?;
    if !q.is_positive() {
        return Err(Error::NonPositive {
            context: "Q",
            value: q,
            suggested_k_o: None,
        });
    }
    if q.is_even() {
        return Err(Error::NotOdd {
            context: "Q",
            value: q,
        });
    }
    Ok(q.to_biguint().expect("positive"))
}

/// `Q` through the expanded form valid for `Σn <= n_L`:
///
/// ```text
/// Q = 2^(n_L)·F·K_O + (2^(n_L)·F·(C(q_O) − q_O) − 2^(3^(Σn−1)·j_beta)·(F−1)^(a_E)·B
///                      + (1 + 2^(3^(Σn−1)·j_beta))·B) / 3^Σn
/// ```
///
/// where `C(q) = (2^(3^(n_L−1)·q) + 1)/(2^(3^(n_L−1)) + 1)`.
pub fn q_big_closed_form(tp: &TerminalParams, q_o: &BigUint, limits: &Limits) -> Result<BigUint> {
    let (sum_n, case) = tp.validate()?;
    if case != Case::Le {
        return Err(Error::WrongCase { sum_n, n_l: tp.n_l });
    }
    let f = BigInt::from(f_value(tp.n_l, limits)?);
    let b = b_term(&tp.shapes, tp.j_delta, limits)?;
    let two_nl = BigInt::from(pow2(u64::from(tp.n_l), limits)?);
    let lead = (pow3(sum_n - 1) * tp.j_beta).to_u64().expect("validated");
    let p = BigInt::from(pow2(lead, limits)?);
    let c = BigInt::from(cyclotomic_quotient(tp.n_l, q_o, limits)?);
    let a_e = usize::try_from(tp.a_e).map_err(|_| Error::InvalidParams("a_E too large".into()))?;
    let f1 = num_traits::pow::pow(&f - 1, a_e);

    let braces =
        &two_nl * &f * (c - BigInt::from(q_o.clone())) - &p * f1 * &b + (BigInt::one() + &p) * &b;
    let tail = exact_div_signed(
        &braces,
        &BigInt::from(pow3(sum_n)),
        "closed-form braces by 3^Σn",
    )?;
    let q = two_nl * f * &tp.k_o + tail;
    q.to_biguint().ok_or(Error::NonPositive {
        context: "closed-form Q",
        value: q,
        suggested_k_o: None,
    })
}

fn derive(tp: TerminalParams, case: Case, q_o: BigUint, limits: &Limits) -> Result<TerminalPlan> {
    let (sum_n, _) = totals(&tp.shapes)?;
    let b = b_term(&tp.shapes, tp.j_delta, limits)?;
    let f_l = f_value(tp.n_l, limits)?;
    let q = q_big(sum_n, tp.n_l, &b, &q_o, limits)?;
    let plan = ComposePlan::new(tp.shapes.clone(), tp.j_delta, q.clone());
    let b_initial = compose_initial(&plan, limits)?;
    let b_landing = single_cycle_seed(tp.n_l, &q_o, limits)?;
    let composed = compose_final(&plan, limits)?;
    if composed != b_landing {
        return Err(Error::LandingMismatch {
            expected: b_landing,
            actual: composed,
        });
    }
    Ok(TerminalPlan {
        params: tp,
        case,
        b,
        f_l,
        q_o,
        q,
        b_initial,
        b_landing,
    })
}

/// Computes `q_O` for fully specified parameters and derives the plan.
pub fn plan_from_params(tp: TerminalParams, limits: &Limits) -> Result<TerminalPlan> {
    let (_, case) = tp.validate()?;
    let q_o = match case {
        Case::Le => q_case_le(&tp, limits)?,
        Case::Gt => q_case_gt(&tp, limits)?,
    };
    derive(tp, case, q_o, limits)
}

/// Builds a terminal plan. Unset free parameters take their smallest
/// admissible values; when `j_beta` is unset, successive odd candidates are
/// tried until the `K_O` search succeeds.
pub fn build_terminal(
    shapes: &[CycleShape],
    n_l: u32,
    frees: &Frees,
    limits: &Limits,
) -> Result<TerminalPlan> {
    let (sum_n, _) = totals(shapes)?;
    if n_l == 0 {
        return Err(Error::InvalidParams("n_L must be >= 1".into()));
    }
    let case = Case::of(sum_n, n_l);
    let j_delta = match frees.j_delta {
        Some(j) => j,
        None => min_j_delta(shapes)?,
    };
    let a_e = frees.a_e.unwrap_or_else(|| default_a_e(sum_n));
    let gamma_o = frees
        .gamma_o
        .or_else(|| default_gamma_o(sum_n, n_l))
        .unwrap_or(1);
    let j_betas: Vec<u64> = match frees.j_beta {
        Some(j) => alloc::vec![j],
        None => {
            let first = min_j_beta(sum_n, n_l)?;
            (0..J_BETA_CANDIDATES as u64)
                .map(|i| first + 2 * i)
                .collect()
        }
    };

    let three_n = BigInt::from(pow3(sum_n));
    for &j_beta in &j_betas {
        let mut tp = TerminalParams {
            shapes: shapes.to_vec(),
            j_delta,
            n_l,
            k_o: frees.k_o.clone().unwrap_or_else(BigInt::one),
            a_e,
            j_beta,
            gamma_o,
        };
        if frees.k_o.is_some() {
            return plan_from_params(tp, limits);
        }
        let c = q_offset(&tp, limits)?;
        if let Some((k, q_o)) = smallest_k(&c, &three_n, K_SEARCH_BOUND) {
            tp.k_o = k;
            return derive(tp, case, q_o, limits);
        }
    }
    Err(Error::Infeasible {
        bound: K_SEARCH_BOUND,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerminalReport {
    pub cycles: Vec<CycleTrace>,
    pub landing: BigUint,
    pub landing_cycle: CycleTrace,
}

/// Simulates `initial` through the given shapes and checks that the value it
/// lands on reaches 1 in one further cycle (and equals `expected_landing`
/// when given).
pub fn verify_terminal_run(
    initial: &BigUint,
    shapes: &[ShapeSignature],
    expected_landing: Option<&BigUint>,
    limits: &Limits,
) -> Result<TerminalReport> {
    if shapes.is_empty() {
        return Err(Error::InvalidParams(
            "at least one cycle shape is required".into(),
        ));
    }
    let cycles = match run_cycles(initial, shapes.len(), limits) {
        Ok(c) => c,
        Err(Error::ReachedOneEarly { completed, .. }) => completed,
        Err(e) => return Err(e),
    };
    for (i, expected) in shapes.iter().enumerate() {
        let actual = cycles.get(i).map(CycleTrace::shape);
        if actual != Some(*expected) {
            return Err(Error::ShapeMismatch {
                cycle: i + 1,
                expected: *expected,
                actual,
            });
        }
    }
    let landing = cycles.last().expect("non-empty").final_odd.clone();
    if let Some(expected) = expected_landing {
        if *expected != landing {
            return Err(Error::LandingMismatch {
                expected: expected.clone(),
                actual: landing,
            });
        }
    }
    let landing_cycle = run_cycle(&landing, limits)?;
    if !landing_cycle.terminal {
        return Err(Error::NoConvergence {
            landing,
            reached: landing_cycle.final_odd,
        });
    }
    Ok(TerminalReport {
        cycles,
        landing,
        landing_cycle,
    })
}

pub fn verify_terminal(tp: &TerminalPlan, limits: &Limits) -> Result<TerminalReport> {
    let shapes = tp.compose_plan().signatures()?;
    verify_terminal_run(&tp.b_initial, &shapes, Some(&tp.b_landing), limits)
}

/// Bits needed to materialize the landing seed for `(n_L, q_O)`.
pub fn landing_bits(n_l: u32, q_o: &BigUint) -> Option<u64> {
    (pow3(n_l.checked_sub(1)?) * q_o)
        .to_u64()?
        .checked_add(u64::from(n_l) + 1)
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

    fn single() -> Vec<CycleShape> {
        vec![CycleShape::new(1, 1, 2)]
    }

    fn worked_params() -> TerminalParams {
        TerminalParams {
            shapes: single(),
            j_delta: 3,
            n_l: 1,
            k_o: BigInt::one(),
            a_e: 2,
            j_beta: 3,
            gamma_o: 1,
        }
    }

    #[test]
    fn b_examples() {
        assert_eq!(b_term(&single(), 3, &lim()).unwrap(), BigInt::from(1));
        assert_eq!(b_term(&single(), 5, &lim()).unwrap(), BigInt::from(7));
        let s = vec![
            CycleShape::new(1, 2, 2),
            CycleShape::new(1, 1, 4),
            CycleShape::new(2, 1, 3),
        ];
        assert_eq!(b_term(&s, 1, &lim()).unwrap(), BigInt::from(95_092_735));
    }

    #[test]
    fn defaults() {
        assert_eq!(default_a_e(1), 2);
        assert_eq!(default_a_e(4), 2);
        assert_eq!(default_a_e(5), 4);
        assert_eq!(default_gamma_o(3, 1), Some(3));
        assert_eq!(default_gamma_o(2, 1), Some(3));
        assert_eq!(default_gamma_o(4, 2), Some(3));
        assert_eq!(default_gamma_o(1, 1), None);
        assert_eq!(min_j_beta(1, 1).unwrap(), 1);
        assert_eq!(min_j_beta(1, 2).unwrap(), 3);
        assert_eq!(min_j_beta(2, 1).unwrap(), 1);
    }

    #[test]
    fn x_term_values() {
        assert_eq!(x_term(1, 2, &lim()).unwrap(), BigInt::from(-1));
        assert_eq!(x_term(2, 4, &lim()).unwrap(), BigInt::from(-1));
        // ((19-1)^2 - 1)/19 = 323/19
        assert_eq!(x_term(3, 2, &lim()).unwrap(), BigInt::from(17));
    }

    #[test]
    fn q_le_examples() {
        assert_eq!(q_case_le(&worked_params(), &lim()).unwrap(), big(7));

        let mut tp = worked_params();
        tp.j_beta = 1;
        assert_eq!(
            q_case_le(&tp, &lim()).unwrap_err(),
            Error::NotOdd {
                context: "q_O",
                value: BigInt::from(4)
            }
        );

        let mut tp = worked_params();
        tp.n_l = 2;
        tp.j_beta = 1;
        assert!(matches!(
            q_case_le(&tp, &lim()),
            Err(Error::InvalidParams(_))
        ));

        let mut tp = worked_params();
        tp.k_o = BigInt::from(-3);
        match q_case_le(&tp, &lim()) {
            Err(Error::NonPositive { suggested_k_o, .. }) => {
                assert_eq!(suggested_k_o, Some(BigInt::from(1)))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn q_gt_reduction_for_unit_f() {
        // Σn = 2, n_L = 1: T = 1, the offset is 2·2^(3−1)·(−1)·(1 − 2^(3·j_beta−1))/3·B.
        let tp = TerminalParams {
            shapes: vec![CycleShape::new(2, 1, 4)],
            j_delta: 3,
            n_l: 1,
            k_o: BigInt::from(1),
            a_e: 2,
            j_beta: 1,
            gamma_o: 3,
        };
        let b = b_term(&tp.shapes, 3, &lim()).unwrap();
        let y = (BigInt::from(1) - BigInt::from(4)) / 3;
        let expected_offset = BigInt::from(8) * BigInt::from(-1) * y * &b;
        assert_eq!(q_offset(&tp, &lim()).unwrap(), expected_offset);

        let mut le = tp.clone();
        le.n_l = 2;
        assert_eq!(
            q_case_gt(&le, &lim()).unwrap_err(),
            Error::WrongCase { sum_n: 2, n_l: 2 }
        );
        assert_eq!(
            q_case_le(&tp, &lim()).unwrap_err(),
            Error::WrongCase { sum_n: 2, n_l: 1 }
        );
    }

    #[test]
    fn q_big_examples() {
        assert_eq!(
            q_big(1, 1, &BigInt::from(1), &big(7), &lim()).unwrap(),
            big(29)
        );
        assert_eq!(
            q_big_closed_form(&worked_params(), &big(7), &lim()).unwrap(),
            big(29)
        );
        assert!(matches!(
            q_big(1, 1, &BigInt::from(2), &big(7), &lim()),
            Err(Error::NonDivisible { .. })
        ));
    }

    #[test]
    fn worked_chain() {
        let frees = Frees {
            j_delta: Some(3),
            j_beta: Some(3),
            k_o: Some(BigInt::one()),
            ..Frees::default()
        };
        let tp = build_terminal(&single(), 1, &frees, &lim()).unwrap();
        assert_eq!(tp.q_o, big(7));
        assert_eq!(tp.q, big(29));
        assert_eq!(tp.b_initial, big(113));
        assert_eq!(tp.b_landing, big(85));
        let r = verify_terminal(&tp, &lim()).unwrap();
        assert_eq!(r.landing, big(85));
        assert!(r.landing_cycle.terminal);

        let auto = build_terminal(&single(), 1, &Frees::default(), &lim()).unwrap();
        assert_eq!(auto, tp);
    }

    #[test]
    fn perturbed_q_is_caught() {
        let mut tp = build_terminal(&single(), 1, &Frees::default(), &lim()).unwrap();
        tp.q += 2u32;
        tp.b_initial = compose_initial(&tp.compose_plan(), &lim()).unwrap();
        assert!(matches!(
            verify_terminal(&tp, &lim()),
            Err(Error::LandingMismatch { .. })
        ));
    }

    #[test]
    fn landing_on_a_non_seed() {
        // 1221 follows (1,4),(1,4),(2,3) to 49, which does not reach 1 in one cycle.
        let err =
            verify_terminal_run(&big(1221), &[(1, 4), (1, 4), (2, 3)], None, &lim()).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { .. }));
    }
}
