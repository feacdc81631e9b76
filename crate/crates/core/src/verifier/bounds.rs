//! The inequality chain that rules out Lehmer Pell numbers beyond the machine
//! check, evaluated with certified interval comparisons.
//!
//! For a hypothetical Lehmer `P_n` with `K = omega(P_n)`:
//!
//! * `P_n < K^(2^K)` together with `P_n >= 2^(n/2)` gives `2^K log K > n / 3`;
//! * that in turn forces `2^K > n / (4 log log n)`;
//! * all prime factors are `1 (mod 4)`, so `2^(2K) | P_n - 1`, hence
//!   `2^(2K-1)` divides `(n - 1)/2` or `(n + 1)/2`;
//! * combining the last two gives `n^2 < 16 (n + 1) (log log n)^2`, which
//!   fails from `n = 21` on.

use num_bigint::BigUint;
use num_traits::{One, Pow};
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Result};
use crate::interval::{decide_lt, ln_ln, Interval};
use crate::sequences::pell_pair;

/// Best published lower bound on `omega(N)` for a Lehmer number `N`.
pub const OMEGA_LOWER_BOUND: u32 = 15;

/// Smallest index accepted by [`bound_chain`]; `log log n` must be positive
/// with margin.
pub const MIN_BOUND_INDEX: u64 = 16;

/// `K^(2^K)` is materialised only while `2^K` stays at or below this.
pub const POMERANCE_EXPONENT_CAP: u64 = 1 << 16;

/// Upper end of the scan in [`final_threshold`]; the chain already confines
/// `n` below `e^8 < 3000`.
pub const FINAL_SCAN_LIMIT: u64 = 3000;

/// `2^(2K-1)` must divide `(n - 1)/2` or `(n + 1)/2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoPowerRequirement {
    pub exponent: u32,
    /// `((n - 1)/2, (n + 1)/2)` for odd `n`; absent for even `n`, where
    /// `P_n` is even and cannot be a Lehmer number at all.
    pub halves: Option<(u64, u64)>,
    /// Largest 2-adic valuation among the halves.
    pub best_valuation: Option<u32>,
    pub satisfiable: bool,
    /// Smallest `n` for which a half can reach `2^(2K-1)`: `2^(2K) - 1`.
    #[serde(with = "crate::serde_dec")]
    pub smallest_admissible_n: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: u64,
    pub k: u32,
    /// `K^(2^K)`, when small enough to materialise.
    #[serde(with = "crate::serde_dec::option", default)]
    pub pomerance_rhs: Option<BigUint>,
    /// Decimal digits of `K^(2^K)`, when materialised.
    pub pomerance_rhs_digits: Option<u64>,
    /// Whether `P_n < K^(2^K)`; `None` when neither the exact value nor the
    /// bit-length bound settles it.
    pub pomerance_admits_pell: Option<bool>,
    /// `2^K log K > n / 3`.
    pub ineq_a_holds: bool,
    /// `2^K > n / (4 log log n)`.
    pub ineq_b_holds: bool,
    pub two_power_requirement: TwoPowerRequirement,
    pub final_threshold: u64,
}

impl BoundReport {
    /// Whether every necessary condition on a Lehmer `P_n` with `omega = k` is
    /// met; `false` means the hypothesis `(n, k)` is contradictory.
    pub fn consistent(&self) -> bool {
        self.ineq_a_holds
            && self.ineq_b_holds
            && self.two_power_requirement.satisfiable
            && self.pomerance_admits_pell != Some(false)
            && self.n < self.final_threshold
    }
}

/// `2^k log k > n / 3`, certified.
pub fn ineq_a(n: u64, k: u32) -> Result<bool> {
    // decide_lt answers `n/3 < 2^k log k`.
    decide_lt(|p| {
        let lhs = Interval::ratio(n, 3u32, p)?;
        let rhs = Interval::int(BigUint::one() << k, p).mul(&Interval::int(k, p).ln()?);
        Ok((lhs, rhs))
    })
}

/// `2^k > n / (4 log log n)`, certified. Needs `n >= 16`.
pub fn ineq_b(n: u64, k: u32) -> Result<bool> {
    decide_lt(|p| {
        let denom = Interval::int(4, p).mul(&ln_ln(n, p)?);
        let lhs = Interval::int(n, p).div(&denom)?;
        Ok((lhs, Interval::int(BigUint::one() << k, p)))
    })
}

/// `n^2 < 16 (n + 1) (log log n)^2`, certified. Needs `n >= 16`.
pub fn final_inequality_holds(n: u64) -> Result<bool> {
    if n < MIN_BOUND_INDEX {
        return Err(precondition(format!(
            "final inequality needs n >= {MIN_BOUND_INDEX}, got {n}"
        )));
    }
    decide_lt(|p| {
        let ll = ln_ln(n, p)?;
        let rhs = Interval::int(16 * (n + 1), p).mul(&ll.mul(&ll));
        Ok((Interval::int(n as u128 * n as u128, p), rhs))
    })
}

/// One more than the largest `n` in `16..=FINAL_SCAN_LIMIT` satisfying
/// `n^2 < 16 (n + 1) (log log n)^2`.
pub fn final_threshold() -> Result<u64> {
    let mut last = None;
    for n in MIN_BOUND_INDEX..=FINAL_SCAN_LIMIT {
        if final_inequality_holds(n)? {
            last = Some(n);
        }
    }
    last.map(|n| n + 1)
        .ok_or_else(|| precondition("final inequality holds nowhere in the scan range"))
}

/// Enclosure of `e^8`.
pub fn e8_enclosure(prec: u32) -> Interval {
    Interval::e(prec).powi(8)
}

/// Certifies `e^8 < 3000` and that `log log n < 3 log 2` switches off exactly
/// between `n = 2980` and `n = 2981`, i.e. that it is equivalent to
/// `n < e^8` on the integers around the bound.
pub fn e8_threshold_check() -> Result<bool> {
    let e8_below = decide_lt(|p| Ok((e8_enclosure(p), Interval::int(3000, p))))?;
    let three_ln2 = |p| Interval::int(3, p).mul(&Interval::ln2(p));
    let below_at_2980 = decide_lt(|p| Ok((ln_ln(2980, p)?, three_ln2(p))))?;
    let below_at_2981 = decide_lt(|p| Ok((ln_ln(2981, p)?, three_ln2(p))))?;
    let e8_above_2980 = decide_lt(|p| Ok((Interval::int(2980, p), e8_enclosure(p))))?;
    let e8_below_2981 = decide_lt(|p| Ok((e8_enclosure(p), Interval::int(2981, p))))?;
    Ok(e8_below && below_at_2980 && !below_at_2981 && e8_above_2980 && e8_below_2981)
}

fn two_power_requirement(n: u64, k: u32) -> TwoPowerRequirement {
    let exponent = 2 * k - 1;
    let smallest_admissible_n = (BigUint::one() << (2 * k)) - 1u32;
    if n.is_multiple_of(2) {
        return TwoPowerRequirement {
            exponent,
            halves: None,
            best_valuation: None,
            satisfiable: false,
            smallest_admissible_n,
        };
    }
    let halves = ((n - 1) / 2, (n + 1) / 2);
    // (n - 1)/2 is 0 only for n = 1, excluded by the domain guard.
    let best = halves.0.trailing_zeros().max(halves.1.trailing_zeros());
    TwoPowerRequirement {
        exponent,
        halves: Some(halves),
        best_valuation: Some(best),
        satisfiable: best >= exponent,
        smallest_admissible_n,
    }
}

/// Evaluates every step of the chain for index `n` under the hypothesis
/// `omega(P_n) = k`.
pub fn bound_chain(n: u64, k: u32) -> Result<BoundReport> {
    if n < MIN_BOUND_INDEX {
        return Err(precondition(format!(
            "bound chain needs n >= {MIN_BOUND_INDEX}, got {n}"
        )));
    }
    if k == 0 || k > 62 {
        return Err(precondition(format!(
            "bound chain needs 1 <= k <= 62, got {k}"
        )));
    }
    let two_to_k = 1u64 << k;
    let pomerance_rhs =
        (two_to_k <= POMERANCE_EXPONENT_CAP).then(|| BigUint::from(k).pow(two_to_k as u32));
    let pell = pell_pair(n).p;
    let pomerance_admits_pell = match &pomerance_rhs {
        Some(rhs) => Some(&pell < rhs),
        // P_n < 2^bits(P_n) <= 2^(2^K floor(log2 K)) <= K^(2^K).
        None => {
            let floor_log2_k = 31 - k.leading_zeros();
            let budget_bits = (two_to_k as u128) * floor_log2_k as u128;
            (pell.bits() as u128 <= budget_bits).then_some(true)
        }
    };
    Ok(BoundReport {
        n,
        k,
        pomerance_rhs_digits: pomerance_rhs.as_ref().map(|v| v.to_string().len() as u64),
        pomerance_rhs,
        pomerance_admits_pell,
        ineq_a_holds: ineq_a(n, k)?,
        ineq_b_holds: ineq_b(n, k)?,
        two_power_requirement: two_power_requirement(n, k),
        final_threshold: final_threshold()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_is_21() {
        assert_eq!(final_threshold().unwrap(), 21);
        assert!(final_inequality_holds(20).unwrap());
        assert!(!final_inequality_holds(21).unwrap());
        assert!(final_inequality_holds(15).is_err());
    }

    #[test]
    fn e8_is_certified_below_3000() {
        assert!(e8_threshold_check().unwrap());
        let e8 = e8_enclosure(128);
        assert!(e8.lower_f64() > 2980.9 && e8.upper_f64() < 2981.0, "{e8}");
    }

    #[test]
    fn chain_at_300() {
        let r = bound_chain(300, 15).unwrap();
        assert!(r.ineq_a_holds);
        assert!(r.ineq_b_holds);
        assert_eq!(r.final_threshold, 21);
        assert!(!r.consistent());
    }

    #[test]
    fn chain_at_3000_breaks_on_two_power() {
        let r = bound_chain(3000, 15).unwrap();
        assert_eq!(r.two_power_requirement.exponent, 29);
        assert!(!r.two_power_requirement.satisfiable);
        assert_eq!(
            r.two_power_requirement.smallest_admissible_n,
            BigUint::from((1u64 << 30) - 1)
        );
        let odd = bound_chain(2999, 15).unwrap();
        assert_eq!(odd.two_power_requirement.halves, Some((1499, 1500)));
        assert_eq!(odd.two_power_requirement.best_valuation, Some(2));
        assert!(!odd.two_power_requirement.satisfiable);
    }

    #[test]
    fn pomerance_digits_for_k15() {
        let r = bound_chain(201, 15).unwrap();
        // floor(32768 log10 15) + 1.
        assert_eq!(r.pomerance_rhs_digits, Some(38539));
        assert_eq!(r.pomerance_admits_pell, Some(true));
    }

    #[test]
    fn pomerance_falls_back_to_bit_lengths() {
        let r = bound_chain(201, 20).unwrap();
        assert!(r.pomerance_rhs.is_none());
        assert_eq!(r.pomerance_admits_pell, Some(true));
    }

    #[test]
    fn small_k_fails_inequality_a() {
        // 2 log 2 = 1.386 < 300 / 3.
        assert!(!ineq_a(300, 1).unwrap());
        assert!(!ineq_a(300, 2).unwrap());
    }

    #[test]
    fn domain_guards() {
        assert!(bound_chain(15, 15).is_err());
        assert!(bound_chain(300, 0).is_err());
    }
}
