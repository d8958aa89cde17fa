//! Brute-force 3x+1 simulation and cycle segmentation.
//!
//! A cycle starts at an odd value `a`. It alternates `3x+1` and `x/2` until
//! the value after an Up step still halves to an even number; that value is
//! the *upper bound*. Halving continues to the next odd value `a_F`.
//!
//! `alpha` counts every halving of the cycle, including the ones inside the
//! alternation. The value 1 is only ever reached as the final odd of a cycle.
//!
//! Two independent paths are provided: [`run_cycle`] jumps over the final
//! halving run with a trailing-zero shift, while [`run_to_one`] single-steps
//! with [`collatz_step`] and segments the raw values with [`CycleSegmenter`].

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::One;

use crate::error::ShapeSignature;
use crate::exactmath::pow3;
use crate::{Error, Limits, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StepKind {
    Up,
    Down,
}

/// One step of a trajectory: its kind and the value it produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub kind: StepKind,
    pub value: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub start: BigUint,
    pub steps: Vec<Step>,
    pub reached_one: bool,
}

impl Trajectory {
    pub fn ups(&self) -> u64 {
        self.steps.iter().filter(|s| s.kind == StepKind::Up).count() as u64
    }

    pub fn downs(&self) -> u64 {
        self.steps.len() as u64 - self.ups()
    }
}

/// One simulated cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleTrace {
    pub initial: BigUint,
    /// Value after the last Up step of the cycle.
    pub upper: BigUint,
    pub final_odd: BigUint,
    /// Number of Up steps.
    pub n: u32,
    /// Total number of Down steps.
    pub alpha: u64,
    /// The cycle ended at 1.
    pub terminal: bool,
}

impl CycleTrace {
    pub fn shape(&self) -> ShapeSignature {
        (self.n, self.alpha)
    }

    pub fn steps(&self) -> u64 {
        u64::from(self.n) + self.alpha
    }
}

pub fn collatz_step(x: &BigUint) -> BigUint {
    if x.is_odd() {
        x * 3u32 + 1u32
    } else {
        x >> 1u32
    }
}

fn require_odd_input(a: &BigUint) -> Result<()> {
    if a.is_odd() {
        Ok(())
    } else {
        Err(Error::NotOddInput(a.clone()))
    }
}

/// Runs one cycle, charging its steps to `used`.
fn cycle_from(a: &BigUint, limits: &Limits, used: &mut u64) -> Result<CycleTrace> {
    let mut x = a.clone();
    let mut n = 0u32;
    let mut alpha = 0u64;
    loop {
        let up = &x * 3u32 + 1u32;
        limits.check_bits(up.bits())?;
        n += 1;
        let tz = up.trailing_zeros().expect("3x+1 is nonzero");
        let charge = 1 + if tz >= 2 { tz } else { 1 };
        *used += charge;
        if *used > limits.step_cap {
            return Err(Error::StepCapExceeded {
                cap: limits.step_cap,
            });
        }
        if tz >= 2 {
            alpha += tz;
            let final_odd = &up >> tz;
            let terminal = final_odd.is_one();
            return Ok(CycleTrace {
                initial: a.clone(),
                upper: up,
                final_odd,
                n,
                alpha,
                terminal,
            });
        }
        alpha += 1;
        x = up >> 1u32;
    }
}

pub fn run_cycle(a: &BigUint, limits: &Limits) -> Result<CycleTrace> {
    require_odd_input(a)?;
    cycle_from(a, limits, &mut 0)
}

/// Runs exactly `i` chained cycles. Reaching 1 at the end of a cycle before
/// the `i`-th is reported as [`Error::ReachedOneEarly`] with the completed
/// cycles attached.
pub fn run_cycles(a: &BigUint, i: usize, limits: &Limits) -> Result<Vec<CycleTrace>> {
    require_odd_input(a)?;
    if i == 0 {
        return Err(Error::InvalidParams("cycle count must be >= 1".into()));
    }
    let mut used = 0;
    let mut out: Vec<CycleTrace> = Vec::with_capacity(i);
    let mut x = a.clone();
    while out.len() < i {
        if out.last().is_some_and(|c| c.terminal) {
            return Err(Error::ReachedOneEarly {
                requested: i,
                completed: out,
            });
        }
        let trace = cycle_from(&x, limits, &mut used)?;
        x = trace.final_odd.clone();
        out.push(trace);
    }
    Ok(out)
}

/// Runs cycles until one ends at 1, without recording individual steps.
pub fn cycles_to_one(a: &BigUint, limits: &Limits) -> Result<Vec<CycleTrace>> {
    require_odd_input(a)?;
    let mut used = 0;
    let mut out = Vec::new();
    let mut x = a.clone();
    loop {
        let trace = cycle_from(&x, limits, &mut used)?;
        let done = trace.terminal;
        x = trace.final_odd.clone();
        out.push(trace);
        if done {
            return Ok(out);
        }
    }
}

#[derive(Debug, Clone)]
enum Phase {
    /// Alternating Up/Down; `last_up` is the value after the latest Up.
    Alternating { last_up: Option<BigUint> },
    /// Past the upper bound, halving towards the next odd value.
    Descending { upper: BigUint },
}

/// Incremental cycle segmenter over a raw value sequence.
///
/// Feed every value after the start with [`push`](Self::push); a completed
/// cycle is returned as soon as its final odd value arrives.
#[derive(Debug, Clone)]
pub struct CycleSegmenter {
    prev: BigUint,
    initial: BigUint,
    n: u32,
    alpha: u64,
    phase: Phase,
}

impl CycleSegmenter {
    pub fn new(start: BigUint) -> Result<Self> {
        require_odd_input(&start)?;
        Ok(Self {
            prev: start.clone(),
            initial: start,
            n: 0,
            alpha: 0,
            phase: Phase::Alternating { last_up: None },
        })
    }

    /// Accepts the next value. Values that do not follow the 3x+1 rule from
    /// the previous one are rejected.
    pub fn push(&mut self, value: BigUint) -> Result<Option<CycleTrace>> {
        if collatz_step(&self.prev) != value {
            return Err(Error::InvalidParams(alloc::format!(
                "{value} does not follow {}",
                self.prev
            )));
        }
        let was_up = self.prev.is_odd();
        self.prev = value.clone();
        if was_up {
            self.n += 1;
            self.phase = Phase::Alternating {
                last_up: Some(value),
            };
            return Ok(None);
        }

        self.alpha += 1;
        match &self.phase {
            Phase::Alternating { last_up } => {
                if value.is_even() {
                    let upper = last_up.clone().expect("a Down step follows an Up step");
                    self.phase = Phase::Descending { upper };
                }
                Ok(None)
            }
            Phase::Descending { upper } => {
                if value.is_even() {
                    return Ok(None);
                }
                let trace = CycleTrace {
                    initial: core::mem::replace(&mut self.initial, value.clone()),
                    upper: upper.clone(),
                    terminal: value.is_one(),
                    final_odd: value,
                    n: self.n,
                    alpha: self.alpha,
                };
                self.n = 0;
                self.alpha = 0;
                self.phase = Phase::Alternating { last_up: None };
                Ok(Some(trace))
            }
        }
    }
}

/// Single-steps from `a`, segmenting as it goes, until `max_cycles` cycles
/// are complete or 1 is reached (at least one step is taken, so `a = 1`
/// yields the loop 1, 4, 2, 1).
pub fn trace(
    a: &BigUint,
    max_cycles: Option<usize>,
    limits: &Limits,
) -> Result<(Trajectory, Vec<CycleTrace>)> {
    let mut segmenter = CycleSegmenter::new(a.clone())?;
    let mut steps = Vec::new();
    let mut cycles = Vec::new();
    let mut x = a.clone();
    loop {
        if steps.len() as u64 >= limits.step_cap {
            return Err(Error::StepCapExceeded {
                cap: limits.step_cap,
            });
        }
        let kind = if x.is_odd() {
            StepKind::Up
        } else {
            StepKind::Down
        };
        x = collatz_step(&x);
        limits.check_bits(x.bits())?;
        steps.push(Step {
            kind,
            value: x.clone(),
        });
        if let Some(trace) = segmenter.push(x.clone())? {
            cycles.push(trace);
            if max_cycles == Some(cycles.len()) {
                break;
            }
        }
        if x.is_one() {
            break;
        }
    }
    Ok((
        Trajectory {
            start: a.clone(),
            steps,
            reached_one: x.is_one(),
        },
        cycles,
    ))
}

/// [`trace`] without a cycle limit.
pub fn run_to_one(a: &BigUint, limits: &Limits) -> Result<(Trajectory, Vec<CycleTrace>)> {
    trace(a, None, limits)
}

/// Both sides of `3^Σn · a = 2^Σα · a_F − S` over a run of cycles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    pub holds: bool,
    pub lhs: BigInt,
    pub rhs: BigInt,
    pub cycles: Vec<CycleTrace>,
}

/// `S` for a list of `(n, alpha)` shapes, accumulated cycle by cycle:
/// `S_k = 3^(n_k)·S_(k-1) + 2^(A_(k-1))·(3^(n_k) − 2^(n_k))` where `A` is the
/// running sum of `alpha`.
pub fn shape_offset(shapes: &[ShapeSignature], limits: &Limits) -> Result<BigInt> {
    let mut s = BigInt::from(0);
    let mut alpha_sum = 0u64;
    for &(n, alpha) in shapes {
        let p3 = BigInt::from(pow3(n));
        let p2n = BigInt::from(crate::exactmath::pow2(u64::from(n), limits)?);
        let p2a = BigInt::from(crate::exactmath::pow2(alpha_sum, limits)?);
        s = &p3 * s + p2a * (&p3 - p2n);
        alpha_sum = alpha_sum.saturating_add(alpha);
    }
    Ok(s)
}

/// Simulates `i` cycles from `a` and evaluates the chained cycle identity.
pub fn shape_identity_check(a: &BigUint, i: usize, limits: &Limits) -> Result<IdentityCheck> {
    let cycles = run_cycles(a, i, limits)?;
    let shapes: Vec<ShapeSignature> = cycles.iter().map(CycleTrace::shape).collect();
    let n_sum: u32 = shapes.iter().map(|s| s.0).sum();
    let alpha_sum: u64 = shapes.iter().map(|s| s.1).sum();
    let last = &cycles.last().expect("i >= 1").final_odd;

    let lhs = BigInt::from(pow3(n_sum) * a);
    let rhs = BigInt::from(crate::exactmath::pow2(alpha_sum, limits)? * last)
        - shape_offset(&shapes, limits)?;
    Ok(IdentityCheck {
        holds: lhs == rhs,
        lhs,
        rhs,
        cycles,
    })
}
