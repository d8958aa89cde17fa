use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};

use crate::trajectory::CycleTrace;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// A cycle shape as observed or requested: `(ups, halvings)`.
pub type ShapeSignature = (u32, u64);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// An exact division left a remainder. For the lemma kernels this is a
    /// counterexample, not a usage error.
    #[error("{context}: division by {divisor} leaves remainder {remainder}")]
    NonDivisible {
        context: &'static str,
        divisor: BigInt,
        remainder: BigInt,
    },

    #[error("computation needs {required_bits} bits, cap is {cap}")]
    BitCapExceeded { required_bits: u64, cap: u64 },

    #[error("simulation exceeded the step cap of {cap}")]
    StepCapExceeded { cap: u64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("input must be a positive odd integer, got {0}")]
    NotOddInput(BigUint),

    #[error("{context} is not positive: {value}")]
    NonPositive {
        context: &'static str,
        value: BigInt,
        /// Smallest odd K_O that would make the value positive, when one exists.
        suggested_k_o: Option<BigInt>,
    },

    #[error("{context} is not odd: {value}")]
    NotOdd {
        context: &'static str,
        value: BigInt,
    },

    #[error("value is divisible by 3")]
    DivisibleBy3,

    #[error("expected exactly one exponent in the window, found {hits}")]
    NoSolution { hits: usize },

    #[error("decode/encode round trip failed for {value}")]
    InconsistentDecode { value: BigUint },

    #[error("trajectory reached 1 after {} of {requested} cycles", .completed.len())]
    ReachedOneEarly {
        requested: usize,
        completed: Vec<CycleTrace>,
    },

    #[error("cycle {cycle}: expected shape {expected:?}, simulated {actual:?}")]
    ShapeMismatch {
        /// 1-based cycle index.
        cycle: usize,
        expected: ShapeSignature,
        actual: Option<ShapeSignature>,
    },

    #[error("closed-form final {expected} differs from simulated {actual}")]
    FinalMismatch { expected: BigUint, actual: BigUint },

    #[error("landing value {actual} differs from the single-cycle seed {expected}")]
    LandingMismatch { expected: BigUint, actual: BigUint },

    #[error("landing cycle from {landing} ends at {reached}, not 1")]
    NoConvergence { landing: BigUint, reached: BigUint },

    #[error("sum of grades {sum_n} vs final grade {n_l} selects the other case")]
    WrongCase { sum_n: u32, n_l: u32 },

    #[error("no K_O with |K_O| <= {bound} gives a positive odd q_O")]
    Infeasible { bound: u64 },

    #[error("patterns diverged at step {step}, before halving {expected_halvings}")]
    PrematureDivergence { step: usize, expected_halvings: u64 },

    #[error("patterns still agree one step after halving {halvings}")]
    MissingDivergence { halvings: u64 },

    #[error("shadow offset broke at step {step}")]
    ShadowIdentity { step: usize },
}
