use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use pell_lehmer::{pell_iterative, pell_lucas_iterative, pell_pair, size_bound_holds};

#[test]
fn fast_doubling_matches_recurrence_to_5000() {
    let (mut p0, mut p1) = (BigUint::zero(), BigUint::one());
    let (mut q0, mut q1) = (BigUint::from(2u32), BigUint::from(2u32));
    for n in 0..=5000u64 {
        let pair = pell_pair(n);
        assert_eq!(pair.p, p0, "P_{n}");
        assert_eq!(pair.q, q0, "Q_{n}");
        let p2 = (&p1 << 1) + &p0;
        let q2 = (&q1 << 1) + &q0;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
    }
}

#[test]
fn iterative_entry_points_agree() {
    for n in [0u64, 1, 2, 7, 64, 999, 4096] {
        let pair = pell_pair(n);
        assert_eq!(pell_iterative(n), pair.p);
        assert_eq!(pell_lucas_iterative(n), pair.q);
    }
}

#[test]
fn strictly_increasing_from_one() {
    let mut prev = pell_pair(1);
    for n in 2..=2000 {
        let cur = pell_pair(n);
        assert!(cur.p > prev.p, "P_{n}");
        assert!(cur.q > prev.q, "Q_{n}");
        prev = cur;
    }
}

#[test]
fn divisibility_along_divisors() {
    for n in 1..=1000u64 {
        let pn = pell_pair(n).p;
        for d in (1..=n / 2).filter(|d| n % d == 0) {
            assert!(pn.is_multiple_of(&pell_pair(d).p), "P_{d} | P_{n}");
        }
    }
}

#[test]
fn size_bound_over_range() {
    for n in 2..=5000 {
        assert!(size_bound_holds(n).unwrap(), "n = {n}");
    }
    assert!(size_bound_holds(1).is_err());
}
