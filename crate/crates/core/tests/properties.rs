use collatz_cycles::codec::{
    decode, encode, final_of, grade, nd3_decode, period, upper_bound_of, validate_shape, OddParams,
};
use collatz_cycles::composer::{verify_plan, ComposePlan, CycleShape};
use collatz_cycles::exactmath::{
    cyclotomic_alternating_sum, cyclotomic_quotient, div3_minus, div3_plus, exponent, pow2, pow3,
};
use collatz_cycles::parallel::check_parallel;
use collatz_cycles::trajectory::{collatz_step, run_cycle, shape_identity_check, CycleSegmenter};
use collatz_cycles::{BigUint, Error, Limits};
use proptest::prelude::*;

fn lim() -> Limits {
    Limits::default()
}

fn odd_u64(max: u64) -> impl Strategy<Value = u64> {
    (0..max / 2).prop_map(|i| 2 * i + 1)
}

fn odd_params() -> impl Strategy<Value = OddParams> {
    (1u32..=4)
        .prop_flat_map(|n| {
            let p = period(n).unwrap();
            (Just(n), 1..=p, 1u64..=3, odd_u64(1 << 20))
        })
        .prop_filter("alpha must exceed n", |(n, k_n, j, _)| {
            validate_shape(*n, *k_n, *j).is_ok()
        })
        .prop_map(|(n, k_n, j, k)| {
            // Smallest odd K_O with 3^n·K_O > 2^beta, shifted by an even amount.
            let beta = OddParams::new(n, k_n, j, 1u32).beta().unwrap();
            let mut base = (pow2(beta, &lim()).unwrap() / pow3(n)) + 1u32;
            if !base.bit(0) {
                base += 1u32;
            }
            OddParams::new(n, k_n, j, base + (k - 1))
        })
}

fn shape() -> impl Strategy<Value = CycleShape> {
    (1u32..=3)
        .prop_flat_map(|n| {
            let p = period(n).unwrap();
            (Just(n), 1u64..=2, 1..=p)
        })
        .prop_map(|(n, j, k_n)| CycleShape::new(n, j, k_n))
        .prop_filter("alpha must exceed n", |s| s.validate().is_ok())
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 200,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn kernels_are_exact(m in 0u32..5, k in 1u64..200) {
        let kb = BigUint::from(k);
        let e = exponent(m, &kb, &lim()).unwrap();
        let q = if k % 2 == 1 {
            div3_plus(m, &kb, &lim()).unwrap() * pow3(m + 1) - 1u32
        } else {
            div3_minus(m, &kb, &lim()).unwrap() * pow3(m + 1) + 1u32
        };
        prop_assert_eq!(q, pow2(e, &lim()).unwrap());
    }

    #[test]
    fn cyclotomic_forms_agree(n in 1u32..5, q in odd_u64(40)) {
        let qb = BigUint::from(q);
        prop_assert_eq!(
            cyclotomic_quotient(n, &qb, &lim()).unwrap(),
            cyclotomic_alternating_sum(n, &qb, &lim()).unwrap()
        );
    }

    #[test]
    fn decode_inverts_encode(p in odd_params()) {
        let a = encode(&p, &lim()).unwrap();
        prop_assert!(a.bit(0));
        prop_assert_eq!(decode(&a, &lim()).unwrap(), p.clone());
        let c = run_cycle(&a, &lim()).unwrap();
        prop_assert_eq!(final_of(&p, &lim()).unwrap(), c.final_odd.clone());
        prop_assert_eq!(c.shape(), (p.n, p.alpha().unwrap()));
    }

    #[test]
    fn encode_inverts_decode(a in odd_u64(1 << 40)) {
        // Grades above 12 need exponents past the default bit cap.
        prop_assume!((a + 1).trailing_zeros() <= 12);
        let a = BigUint::from(a);
        let p = decode(&a, &lim()).unwrap();
        prop_assert_eq!(encode(&p, &lim()).unwrap(), a.clone());
        let c = run_cycle(&a, &lim()).unwrap();
        prop_assert_eq!(grade(&a).unwrap(), c.n);
        prop_assert_eq!(upper_bound_of(&a).unwrap(), c.upper);
    }

    #[test]
    fn cycle_identity_over_prefixes(a in odd_u64(1 << 30), i in 1usize..6) {
        match shape_identity_check(&BigUint::from(a), i, &lim()) {
            Ok(r) => prop_assert!(r.holds, "lhs {} rhs {}", r.lhs, r.rhs),
            Err(Error::ReachedOneEarly { .. }) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn segmenter_agrees_with_run_cycle(a in odd_u64(1 << 24)) {
        let start = BigUint::from(a);
        let mut seg = CycleSegmenter::new(start.clone()).unwrap();
        let mut x = start.clone();
        let found = loop {
            x = collatz_step(&x);
            if let Some(c) = seg.push(x.clone()).unwrap() {
                break c;
            }
        };
        prop_assert_eq!(found, run_cycle(&start, &lim()).unwrap());
    }

    #[test]
    fn nd3_reconstructs(i in 0u64..1000, r in prop::sample::select(vec![1u64, 5]), n in 1u32..5) {
        let v = 6 * i + r;
        let d = nd3_decode(&BigUint::from(v), n, &lim()).unwrap();
        let back = pow3(n) * &d.k_o - pow2(d.beta(), &lim()).unwrap();
        prop_assert_eq!(back, BigUint::from(v));
    }

    #[test]
    fn composed_plans_realize(shapes in prop::collection::vec(shape(), 1..4), bump in 0u64..4) {
        let base = ComposePlan::with_defaults(shapes, None, None, &lim()).unwrap();
        let plan = ComposePlan::new(base.shapes.clone(), base.j_delta, base.q + 2 * bump);
        let r = verify_plan(&plan, &lim()).unwrap();
        prop_assert_eq!(r.per_cycle.len(), plan.shapes.len());
    }

    #[test]
    fn shadow_splits_after_beta_halvings(a in odd_u64(1 << 32), beta in 1u64..40, k in odd_u64(1 << 20)) {
        let r = check_parallel(&BigUint::from(a), beta, &BigUint::from(k), &lim()).unwrap();
        prop_assert_eq!(r.halvings_matched, beta);
        prop_assert_eq!(
            &r.b_at_divergence - &r.a_at_divergence,
            pow3(r.ups_at_divergence as u32) * BigUint::from(k)
        );
    }
}
