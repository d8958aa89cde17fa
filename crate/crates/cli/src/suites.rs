//! Bounded verification sweeps. Each case either passes, is skipped (resource
//! cap), or is recorded verbatim as a failure; tallies merge associatively so
//! the sweeps fan out over rayon.

use std::collections::BTreeMap;

use collatz_cycles::codec::{
    bound_check, decode, decode_with_trace, encode, final_of, grade, nd3_decode, upper_bound_of,
    validate_shape, OddParams,
};
use collatz_cycles::composer::{
    compose_final, compose_initial, min_j_delta, min_q, totals, verify_plan, weight_sum,
    ComposePlan, CycleShape,
};
use collatz_cycles::exactmath::{
    cyclotomic_alternating_sum, cyclotomic_quotient, div3_minus, div3_plus, even_alternating_sum,
    even_quotient, exponent, f_value, pow2, pow3, pure_power_of_3, verify_factorization_a4_5,
    verify_identity_a7_1,
};
use collatz_cycles::parallel::{check_parallel, patterns_in};
use collatz_cycles::terminal::{build_terminal, verify_terminal, Frees};
use collatz_cycles::trajectory::{cycles_to_one, shape_identity_check};
use collatz_cycles::{BigInt, BigUint, Error, Limits};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    A4,
    A5,
    A7,
    Roundtrip,
    Identity,
    Uniqueness,
    Compose,
    Terminal,
    Parallel,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::A4 => "a4",
            Suite::A5 => "a5",
            Suite::A7 => "a7",
            Suite::Roundtrip => "roundtrip",
            Suite::Identity => "identity",
            Suite::Uniqueness => "uniqueness",
            Suite::Compose => "compose",
            Suite::Terminal => "terminal",
            Suite::Parallel => "parallel",
        }
    }
}

/// Sweep bounds. `None` means the suite's own default.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SuiteParams {
    pub n_max: Option<u32>,
    pub k_max: Option<u64>,
    pub max: Option<u64>,
    pub beta_max: Option<u32>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

pub const DEFAULT_SEED: u64 = 0x00c0_ffee;

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Failure {
    pub check: String,
    pub input: String,
    pub error: String,
}

#[derive(Debug, Clone, Default, Serialize, PartialEq, Eq)]
pub struct Tally {
    pub cases: u64,
    pub passed: u64,
    pub skipped: u64,
    pub failures: Vec<Failure>,
    /// Named counters (per-check case counts, outcome breakdowns).
    pub counts: BTreeMap<String, u64>,
}

impl Tally {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn merge(mut self, other: Tally) -> Tally {
        self.cases += other.cases;
        self.passed += other.passed;
        self.skipped += other.skipped;
        self.failures.extend(other.failures);
        for (k, v) in other.counts {
            *self.counts.entry(k).or_default() += v;
        }
        self
    }

    fn bump(&mut self, key: &str) {
        *self.counts.entry(key.to_string()).or_default() += 1;
    }

    /// Records one case of `check`. Cap errors count as skipped, any other
    /// error or a `false` result as a failure.
    pub fn record(check: &str, input: impl FnOnce() -> String, r: Result<bool, Error>) -> Tally {
        let mut t = Tally {
            cases: 1,
            ..Tally::default()
        };
        t.bump(check);
        match r {
            Ok(true) => t.passed = 1,
            Err(Error::BitCapExceeded { .. } | Error::StepCapExceeded { .. }) => {
                t.skipped = 1;
                t.bump(&format!("{check}.skipped"));
            }
            Ok(false) => t.failures.push(Failure {
                check: check.into(),
                input: input(),
                error: "check returned false".into(),
            }),
            Err(e) => t.failures.push(Failure {
                check: check.into(),
                input: input(),
                error: e.to_string(),
            }),
        }
        t
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub ok: bool,
    #[serde(flatten)]
    pub tally: Tally,
}

fn sum<I: ParallelIterator<Item = Tally>>(it: I) -> Tally {
    it.reduce(Tally::default, Tally::merge)
}

fn odd_upto(max: u64) -> impl IndexedParallelIterator<Item = u64> {
    let count = usize::try_from(max.div_ceil(2)).unwrap_or(usize::MAX);
    (0..count).into_par_iter().map(|i| 2 * i as u64 + 1)
}

pub fn run(suite: Suite, params: &SuiteParams, limits: &Limits) -> SuiteReport {
    let tally = match suite {
        Suite::A4 => a4(params, limits),
        Suite::A5 => a5(params, limits),
        Suite::A7 => a7(params, limits),
        Suite::Roundtrip => roundtrip(params, limits),
        Suite::Identity => identity(params, limits),
        Suite::Uniqueness => uniqueness(params, limits),
        Suite::Compose => compose(params, limits),
        Suite::Terminal => terminal(params, limits),
        Suite::Parallel => parallel(params, limits),
    };
    SuiteReport {
        suite,
        ok: tally.ok(),
        tally,
    }
}

/// Divisibility of `2^(3^m·K) ± 1` by `3^(m+1)`, the product expansion of
/// `2^(3^n·K) + 1`, and the power-of-3 scan over `(2^(3^(n−1)·K) + 1)/3^n`.
pub fn a4(p: &SuiteParams, limits: &Limits) -> Tally {
    let m_max = p.n_max.unwrap_or(5);
    let k_max = p.k_max.unwrap_or(99);

    let plus = sum((0..=m_max).into_par_iter().flat_map_iter(|m| {
        (1..=k_max).step_by(2).map(move |k| {
            let r = div3_plus(m, &BigUint::from(k), limits).and_then(|q| {
                let e = exponent(m, &BigUint::from(k), limits)?;
                Ok(pow3(m + 1) * q == pow2(e, limits)? + 1u32)
            });
            Tally::record("div3_plus", || format!("m={m} K={k}"), r)
        })
    }));
    let minus = sum((0..=m_max).into_par_iter().flat_map_iter(|m| {
        (2..k_max).step_by(2).map(move |k| {
            let r = div3_minus(m, &BigUint::from(k), limits).and_then(|q| {
                let e = exponent(m, &BigUint::from(k), limits)?;
                Ok(pow3(m + 1) * q == pow2(e, limits)? - 1u32)
            });
            Tally::record("div3_minus", || format!("m={m} K={k}"), r)
        })
    }));
    let fact = sum((1..=3u32).into_par_iter().flat_map_iter(|n| {
        (1..=9u64).step_by(2).map(move |k| {
            Tally::record(
                "factorization",
                || format!("n={n} K={k}"),
                verify_factorization_a4_5(n, &BigUint::from(k), limits),
            )
        })
    }));

    // Only (n=1, K=3) may give a power of 3 above 3^0; the quotient is 1 at
    // (n=1, K=1) and (n=2, K=1).
    let hits: Vec<(u32, u64, u32)> = (1..=4u32)
        .into_par_iter()
        .flat_map_iter(|n| {
            (1..=27u64).step_by(2).filter_map(move |k| {
                let q = div3_plus(n - 1, &BigUint::from(k), limits).ok()?;
                pure_power_of_3(&q).filter(|e| *e > 0).map(|e| (n, k, e))
            })
        })
        .collect();
    let power = Tally::record(
        "power_of_3_scan",
        || format!("hits={hits:?}"),
        Ok(hits == [(1, 3, 1)]),
    );

    plus.merge(minus).merge(fact).merge(power)
}

/// Exponent-window decomposition `v = 3^n·K_O − 2^beta` for odd `v` prime to 3.
pub fn a5(p: &SuiteParams, limits: &Limits) -> Tally {
    let n_max = p.n_max.unwrap_or(4);
    let max = p.max.unwrap_or(2000);
    let sweep = sum((1..=n_max).into_par_iter().flat_map_iter(|n| {
        (1..=max).step_by(2).filter(|v| v % 3 != 0).map(move |v| {
            let r = nd3_decode(&BigUint::from(v), n, limits).and_then(|d| {
                let back = BigInt::from(pow3(n) * &d.k_o) - BigInt::from(pow2(d.beta(), limits)?);
                Ok(back == BigInt::from(v) && d.k_o.bit(0) && d.k_n >= 1)
            });
            Tally::record("nd3_decode", || format!("n={n} v={v}"), r)
        })
    }));
    let rows = [(1u64, 9u64, 19u64), (5, 14, 607)]
        .into_iter()
        .map(|(v, beta, k)| {
            let r = nd3_decode(&BigUint::from(v), 3, limits)
                .map(|d| d.beta() == beta && d.k_o == BigUint::from(k));
            Tally::record("table_row", || format!("n=3 v={v}"), r)
        });
    rows.fold(sweep, Tally::merge)
}

/// Cyclotomic quotients, their alternating-sum forms, `F − 1 ≡ 0 (mod 9)` and
/// the product identity for `2^(2E) − 2^E + 1`.
pub fn a7(p: &SuiteParams, limits: &Limits) -> Tally {
    let n_max = p.n_max.unwrap_or(5);
    let q_max = p.k_max.unwrap_or(49);
    let odd = sum((1..=n_max).into_par_iter().flat_map_iter(|n| {
        (1..=q_max).step_by(2).map(move |q| {
            let qb = BigUint::from(q);
            let r = cyclotomic_quotient(n, &qb, limits)
                .and_then(|d| Ok(d == cyclotomic_alternating_sum(n, &qb, limits)?));
            Tally::record("cyclotomic", || format!("n={n} q={q}"), r)
        })
    }));
    let even = sum((1..=n_max).into_par_iter().flat_map_iter(|n| {
        (2..q_max).step_by(2).map(move |q| {
            let qb = BigUint::from(q);
            let r = even_quotient(n, &qb, limits)
                .and_then(|d| Ok(d == even_alternating_sum(n, &qb, limits)?));
            Tally::record("even_quotient", || format!("n={n} q={q}"), r)
        })
    }));
    let f = (1..=6u32)
        .map(|n| {
            let r = f_value(n, limits).map(|f| ((f - 1u32) % 9u32).is_zero());
            Tally::record("f_value", || format!("n={n}"), r)
        })
        .fold(Tally::default(), Tally::merge);
    let ident = sum((0..=3u32).into_par_iter().flat_map_iter(|j| {
        (1..=15u64).step_by(2).map(move |q| {
            Tally::record(
                "identity_a7_1",
                || format!("j={j} q={q}"),
                verify_identity_a7_1(j, &BigUint::from(q), limits),
            )
        })
    }));
    odd.merge(even).merge(f).merge(ident)
}

/// Every `(n, k_n, j, K_O)` in a bounded grid that satisfies the shape and
/// positivity constraints.
pub fn param_grid(n_max: u32, j_max: u64, k_o_max: u64, limits: &Limits) -> Vec<OddParams> {
    let mut out = Vec::new();
    for n in 1..=n_max {
        let p = 2 * 3u64.pow(n - 1);
        for j in 1..=j_max {
            for k_n in 1..=p {
                if validate_shape(n, k_n, j).is_err() {
                    continue;
                }
                for k in (1..=k_o_max).step_by(2) {
                    let params = OddParams::new(n, k_n, j, k);
                    if params.validate(limits).is_ok() {
                        out.push(params);
                    }
                }
            }
        }
    }
    out
}

/// Codec against the simulator for every odd `a <= max`, and
/// `decode(encode(p)) = p` over the parameter grid.
pub fn roundtrip(p: &SuiteParams, limits: &Limits) -> Tally {
    let max = p.max.unwrap_or(100_000);
    let numbers = sum(odd_upto(max).map(|a| {
        let ab = BigUint::from(a);
        let r = decode_with_trace(&ab, limits).and_then(|(params, trace)| {
            Ok(encode(&params, limits)? == ab
                && final_of(&params, limits)? == trace.final_odd
                && grade(&ab)? == trace.n
                && upper_bound_of(&ab)? == trace.upper
                && bound_check(&params, limits)?)
        });
        Tally::record("encode_decode", || format!("a={a}"), r)
    }));
    let grid = param_grid(3, 3, 99, limits);
    let params = sum(grid.par_iter().map(|params| {
        let r = encode(params, limits).and_then(|a| Ok(decode(&a, limits)? == *params));
        Tally::record("decode_encode", || format!("{params:?}"), r)
    }));
    numbers.merge(params)
}

/// The chained cycle identity for every full-cycle prefix of every odd
/// `a <= max`.
pub fn identity(p: &SuiteParams, limits: &Limits) -> Tally {
    let max = p.max.unwrap_or(10_000);
    sum(odd_upto(max).map(|a| {
        let ab = BigUint::from(a);
        let count = match cycles_to_one(&ab, limits) {
            Ok(c) => c.len(),
            Err(e) => return Tally::record("identity", || format!("a={a}"), Err(e)),
        };
        (1..=count)
            .map(|i| {
                let r = shape_identity_check(&ab, i, limits).map(|c| c.holds);
                Tally::record("identity", || format!("a={a} i={i}"), r)
            })
            .fold(Tally::default(), Tally::merge)
    }))
}

/// Pairwise distinct halving patterns below `2^beta` for every
/// `beta <= beta_max`. Each range is split into chunks whose pattern maps are
/// merged.
pub fn uniqueness(p: &SuiteParams, limits: &Limits) -> Tally {
    let beta_max = p.beta_max.unwrap_or(12);
    (1..=beta_max)
        .map(|beta| {
            let hi = 1u64 << beta;
            let chunk = (hi / 64).max(2);
            let merged = (0..hi.div_ceil(chunk))
                .into_par_iter()
                .map(|c| patterns_in(beta, c * chunk, ((c + 1) * chunk).min(hi), limits))
                .try_reduce(BTreeMap::new, |mut acc, m| {
                    for (k, mut v) in m {
                        acc.entry(k).or_insert_with(Vec::new).append(&mut v);
                    }
                    Ok(acc)
                });
            let r = merged.map(|m| {
                m.values().map(Vec::len).sum::<usize>() as u64 == hi / 2
                    && m.values().all(|v| v.len() == 1)
            });
            Tally::record("uniqueness", || format!("beta={beta}"), r)
        })
        .fold(Tally::default(), Tally::merge)
}

/// All shapes with `n <= n_max`, `j <= j_max` and `k_n` in range.
pub fn all_shapes(n_max: u32, j_max: u64) -> Vec<CycleShape> {
    let mut out = Vec::new();
    for n in 1..=n_max {
        let p = 2 * 3u64.pow(n - 1);
        for j in 1..=j_max {
            for k in 1..=p {
                let s = CycleShape::new(n, j, k);
                if s.validate().is_ok() {
                    out.push(s);
                }
            }
        }
    }
    out
}

/// Every ordered list of `1..=len_max` shapes drawn from `shapes`, optionally
/// restricted to `Σn <= sum_n_max`.
pub fn shape_lists(
    shapes: &[CycleShape],
    len_max: usize,
    sum_n_max: Option<u32>,
) -> Vec<Vec<CycleShape>> {
    let mut out: Vec<Vec<CycleShape>> = Vec::new();
    let mut frontier: Vec<Vec<CycleShape>> = vec![Vec::new()];
    for _ in 0..len_max {
        let mut next = Vec::new();
        for prefix in &frontier {
            for s in shapes {
                let mut l = prefix.clone();
                l.push(*s);
                if sum_n_max.is_some_and(|m| l.iter().map(|s| s.n).sum::<u32>() > m) {
                    continue;
                }
                next.push(l);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn check_plan(plan: &ComposePlan, limits: &Limits) -> Result<bool, Error> {
    verify_plan(plan, limits)?;
    let (n, alpha) = totals(&plan.shapes)?;
    let a = BigInt::from(compose_initial(plan, limits)?);
    let f = BigInt::from(compose_final(plan, limits)?);
    let s = BigInt::from(weight_sum(&plan.shapes, limits)?);
    let closed = BigInt::from(pow3(n)) * &a - BigInt::from(pow2(alpha, limits)?) * &f == -s;

    let next = ComposePlan::new(plan.shapes.clone(), plan.j_delta, &plan.q + 2u32);
    let da = BigInt::from(compose_initial(&next, limits)?) - a;
    let df = BigInt::from(compose_final(&next, limits)?) - f;
    let family = da == BigInt::from(pow2(alpha, limits)?) * 2 && df == BigInt::from(pow3(n)) * 2;
    Ok(closed && family)
}

/// Every plan with up to three shapes (`n <= 2`, `j <= 2`), minimal
/// `j_delta`, and `Q` = the minimal value plus the first five odd increments.
pub fn compose(_: &SuiteParams, limits: &Limits) -> Tally {
    let lists = shape_lists(&all_shapes(2, 2), 3, None);
    sum(lists.par_iter().flat_map_iter(|shapes| {
        let base = min_j_delta(shapes).and_then(|jd| Ok((jd, min_q(shapes, jd, limits)?)));
        let cases: Vec<Tally> = match base {
            Err(e) => vec![Tally::record("plan", || format!("{shapes:?}"), Err(e))],
            Ok((jd, q0)) => (0..6u32)
                .map(|k| {
                    let plan = ComposePlan::new(shapes.clone(), jd, &q0 + 2u32 * k);
                    let r = check_plan(&plan, limits);
                    Tally::record(
                        "plan",
                        || format!("{shapes:?} j_delta={jd} Q={}", plan.q),
                        r,
                    )
                })
                .collect(),
        };
        cases
    }))
}

/// Terminal plans for `Σn <= 3`, `n_L <= 2` (shapes with `n <= 2`, `j <= 2`)
/// with automatically chosen free parameters.
pub fn terminal(p: &SuiteParams, limits: &Limits) -> Tally {
    let sum_n_max = p.n_max.unwrap_or(3);
    let lists = shape_lists(&all_shapes(2, 2), sum_n_max as usize, Some(sum_n_max));
    let jobs: Vec<(Vec<CycleShape>, u32)> = lists
        .into_iter()
        .flat_map(|l| (1..=2u32).map(move |n_l| (l.clone(), n_l)))
        .collect();
    sum(jobs.par_iter().map(|(shapes, n_l)| {
        let input = || format!("{shapes:?} n_L={n_l}");
        let case = if shapes.iter().map(|s| s.n).sum::<u32>() > *n_l {
            "case_gt"
        } else {
            "case_le"
        };
        let (mut t, outcome) = match build_terminal(shapes, *n_l, &Frees::default(), limits) {
            Err(Error::Infeasible { .. }) => {
                let t = Tally {
                    cases: 1,
                    skipped: 1,
                    ..Tally::default()
                };
                (t, "infeasible")
            }
            Err(e) => {
                let outcome = match e {
                    Error::NonDivisible { .. } => "non_divisible",
                    Error::BitCapExceeded { .. } => "bit_cap",
                    _ => "error",
                };
                (Tally::record("terminal", input, Err(e)), outcome)
            }
            Ok(tp) => {
                let r = verify_terminal(&tp, limits).map(|_| true);
                (Tally::record("terminal", input, r), "feasible")
            }
        };
        t.bump(case);
        t.bump(&format!("{case}.{outcome}"));
        t
    }))
}

/// `(57, 14, 1)` plus seeded random `(a, beta, K)` triples, each checked
/// pointwise along the shadow walk.
pub fn parallel(p: &SuiteParams, limits: &Limits) -> Tally {
    let samples = p.samples.unwrap_or(200);
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed.unwrap_or(DEFAULT_SEED));
    let triples: Vec<(u64, u64, u64)> = (0..samples)
        .map(|_| {
            let a = rng.gen_range(0..1u64 << 24) * 2 + 1;
            let beta = rng.gen_range(1..=32u64);
            let k = rng.gen_range(0..1u64 << 16) * 2 + 1;
            (a, beta, k)
        })
        .collect();

    let worked = check_parallel(&BigUint::from(57u32), 14, &BigUint::one(), limits).map(|r| {
        r.a_at_divergence == BigUint::from(26u32)
            && r.b_at_divergence == BigUint::from(6587u32)
            && &r.b_at_divergence - &r.a_at_divergence == pow3(8)
    });
    let worked = Tally::record("worked_57", || "a=57 beta=14 K=1".into(), worked);

    let random = sum(triples.par_iter().map(|&(a, beta, k)| {
        let r = check_parallel(&BigUint::from(a), beta, &BigUint::from(k), limits)
            .map(|r| r.halvings_matched == beta);
        Tally::record("shadow", || format!("a={a} beta={beta} K={k}"), r)
    }));
    worked.merge(random)
}
