//! Cycle algebra for 3x+1 trajectories.
//!
//! Every odd number starts a *cycle*: an alternating run of `3x+1` / `x/2`
//! steps up to an upper bound, followed by two or more halvings down to the
//! next odd number. This crate provides
//!
//! * [`exactmath`]: exact big-integer kernels for the `2^(3^m·K) ± 1`
//!   divisibility identities, where every quotient is checked to be exact,
//! * [`trajectory`]: the brute-force simulator and cycle segmenter used as the
//!   ground-truth oracle,
//! * [`codec`]: the `(n, k_n, j, K_O)` parametrization of odd numbers,
//! * [`composer`]: closed forms for sequences realizing a list of cycle shapes,
//! * [`terminal`]: construction of a sequence whose last cycle lands on 1,
//! * [`parallel`]: shadow trajectories `b = a + 2^β·K` and pattern uniqueness.
//!
//! The crate is `no_std` (it needs `alloc`). IO, wire formats and parallel
//! sweeps live in the companion CLI crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod codec;
pub mod composer;
mod error;
pub mod exactmath;
pub mod parallel;
pub mod terminal;
pub mod trajectory;

pub use error::{Error, Result};
pub use num_bigint::{BigInt, BigUint};

/// Resource guards applied to every computation that can blow up.
///
/// `bit_cap` bounds the size of any `2^e` the kernels are asked to build and of
/// any value the simulator walks through; `step_cap` bounds the number of
/// Collatz steps a single simulation may take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub bit_cap: u64,
    pub step_cap: u64,
}

impl Limits {
    pub const DEFAULT_BIT_CAP: u64 = 1 << 20;
    pub const DEFAULT_STEP_CAP: u64 = 10_000_000;

    pub const fn new(bit_cap: u64, step_cap: u64) -> Self {
        Self { bit_cap, step_cap }
    }

    pub const fn with_bit_cap(self, bit_cap: u64) -> Self {
        Self { bit_cap, ..self }
    }

    pub const fn with_step_cap(self, step_cap: u64) -> Self {
        Self { step_cap, ..self }
    }

    pub(crate) fn check_bits(&self, required_bits: u64) -> Result<()> {
        if required_bits > self.bit_cap {
            Err(Error::BitCapExceeded {
                required_bits,
                cap: self.bit_cap,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for Limits {
    fn default() -> Self {
        Self::new(Self::DEFAULT_BIT_CAP, Self::DEFAULT_STEP_CAP)
    }
}
