use num_bigint::BigUint;
use pell_lehmer::interval::{decide_lt_at, ln_ln, Interval, PRECISION_LADDER};
use pell_lehmer::verifier::{verify_range_with, VerifyOptions};
use pell_lehmer::{
    factor, lehmer_check, FactorCache, FactorPolicy, LehmerStatus, VerificationReport,
};
use proptest::prelude::*;

fn tiny() -> FactorPolicy {
    FactorPolicy {
        trial_bound: 7,
        rho_budget: 16,
        max_total: 64,
        seed: 3,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn larger_budgets_never_flip_a_verdict(n in 2u64..1_000_000_000_000) {
        let small = lehmer_check(&BigUint::from(n), &tiny()).unwrap();
        let large = lehmer_check(&BigUint::from(n), &FactorPolicy::generous()).unwrap();
        prop_assert_ne!(large.status, LehmerStatus::Undecided);
        if small.status != LehmerStatus::Undecided {
            prop_assert_eq!(small.status, large.status);
        }
        prop_assert!(small.recheck());
        prop_assert!(large.recheck());
    }

    #[test]
    fn complete_factorizations_are_budget_independent(n in 2u64..1_000_000_000_000) {
        let small = factor(&BigUint::from(n), &tiny()).unwrap();
        let large = factor(&BigUint::from(n), &FactorPolicy::generous()).unwrap();
        prop_assert!(large.is_complete());
        if small.is_complete() {
            prop_assert_eq!(small, large);
        } else {
            // Whatever was found is genuine.
            let mut product = small.cofactor().clone();
            for pp in small.factors() {
                product *= pp.prime.pow(pp.exponent);
            }
            prop_assert_eq!(product, BigUint::from(n));
        }
    }

    #[test]
    fn decided_comparisons_survive_refinement(n in 16u64..5000, k in 1u32..40) {
        // n / (4 log log n) < 2^k
        let build = |p: u32| {
            let lhs = Interval::int(n, p).div(&Interval::int(4, p).mul(&ln_ln(n, p)?))?;
            Ok((lhs, Interval::int(BigUint::from(1u32) << k, p)))
        };
        let mut first = None;
        for &prec in PRECISION_LADDER.iter().take(5) {
            if let Some(answer) = decide_lt_at(build, prec).unwrap() {
                match first {
                    None => first = Some(answer),
                    Some(prev) => prop_assert_eq!(prev, answer, "flipped at {}", prec),
                }
            }
        }
        prop_assert!(first.is_some());
    }
}

#[test]
fn report_is_deterministic_across_scheduling() {
    let policy = FactorPolicy::default();
    let run = |parallel| {
        let options = VerifyOptions {
            timings: false,
            parallel,
        };
        verify_range_with(120, &policy, &FactorCache::in_memory(), &options)
            .unwrap()
            .to_json()
            .unwrap()
    };
    let a = run(true);
    assert_eq!(a, run(true));
    assert_eq!(a, run(false));
}

#[test]
fn report_json_round_trips() {
    let report = verify_range_with(
        60,
        &FactorPolicy::default(),
        &FactorCache::in_memory(),
        &VerifyOptions::default(),
    )
    .unwrap();
    let back = VerificationReport::from_json(&report.to_json().unwrap()).unwrap();
    assert_eq!(back, report);
}
