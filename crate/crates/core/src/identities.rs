//! Pell identities as checkable predicates:
//!
//! * `Q_n^2 - 8 P_n^2 = 4 (-1)^n`;
//! * for odd `n`, `P_n - 1 = P_{(n-e)/2} Q_{(n+e)/2}` with `e = 1` when
//!   `n = 1 (mod 4)` and `e = -1` when `n = 3 (mod 4)`;
//! * `nu2(Q_n) = 1` and `nu2(P_n) = nu2(n)` for `n >= 1`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{nu2, rem_u64};
use crate::error::{precondition, Result};
use crate::sequences::{pell_pair, PellPair};

/// `P_n - 1` written as `P_{p_index} * Q_{q_index}` for odd `n >= 3`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PellMinusOneSplit {
    pub n: u64,
    /// `+1` when `n = 1 (mod 4)`, `-1` when `n = 3 (mod 4)`.
    pub sign: i8,
    pub p_index: u64,
    pub q_index: u64,
    #[serde(with = "crate::serde_dec")]
    pub p_part: BigUint,
    #[serde(with = "crate::serde_dec")]
    pub q_part: BigUint,
}

impl PellMinusOneSplit {
    pub fn product(&self) -> BigUint {
        &self.p_part * &self.q_part
    }
}

/// Whether `Q_n^2 - 8 P_n^2 = 4 (-1)^n` for the given pair.
pub fn pq_relation_holds(pair: &PellPair) -> bool {
    let expected = if pair.n.is_multiple_of(2) { 4 } else { -4 };
    pair.pq_discriminant() == BigInt::from(expected)
}

pub fn check_pq_relation(n: u64) -> bool {
    pq_relation_holds(&pell_pair(n))
}

/// The branch-correct factorization of `P_n - 1` for odd `n >= 3`.
///
/// The product is re-checked against `P_n - 1` computed independently; a
/// mismatch is reported as an error rather than returned.
pub fn split_pell_minus_one(n: u64) -> Result<PellMinusOneSplit> {
    if n.is_multiple_of(2) || n < 3 {
        return Err(precondition(format!(
            "P_n - 1 split needs odd n >= 3, got {n}"
        )));
    }
    let (sign, p_index, q_index) = if n % 4 == 1 {
        (1, (n - 1) / 2, (n + 1) / 2)
    } else {
        (-1, (n + 1) / 2, (n - 1) / 2)
    };
    let split = PellMinusOneSplit {
        n,
        sign,
        p_index,
        q_index,
        p_part: pell_pair(p_index).p,
        q_part: pell_pair(q_index).q,
    };
    let target = pell_pair(n).p - 1u32;
    if split.product() != target {
        return Err(precondition(format!(
            "split of P_{n} - 1 does not multiply back"
        )));
    }
    Ok(split)
}

/// Whether `nu2(Q_n) = 1` and `nu2(P_n) = nu2(n)` for the given pair (`n >= 1`).
pub fn nu2_lemma_holds(pair: &PellPair) -> Result<bool> {
    if pair.n == 0 {
        return Err(precondition("valuation lemma needs n >= 1"));
    }
    Ok(nu2(&pair.q)? == 1 && nu2(&pair.p)? == pair.n.trailing_zeros())
}

pub fn check_nu2_lemma(n: u64) -> Result<bool> {
    nu2_lemma_holds(&pell_pair(n))
}

/// `nu2(P_n - 1)` and `nu2(n - e)` for odd `n >= 3`, which should agree.
pub fn nu2_transfer(n: u64) -> Result<(u32, u32)> {
    let split = split_pell_minus_one(n)?;
    let shifted = if split.sign > 0 { n - 1 } else { n + 1 };
    Ok((nu2(&split.product())?, shifted.trailing_zeros()))
}

/// `q mod 4` for a prime `q` dividing `P_n` with `n` odd.
///
/// Reducing `Q_n^2 - 8 P_n^2 = -4` modulo `q` makes `-1` a square, so the
/// result is expected to be 1; it is returned rather than asserted.
pub fn residue_mod4_of_factor(n: u64, q: &BigUint) -> Result<u32> {
    if n.is_multiple_of(2) {
        return Err(precondition(format!("residue check needs odd n, got {n}")));
    }
    if q.is_zero() || !(pell_pair(n).p.is_multiple_of(q)) {
        return Err(precondition(format!("{q} does not divide P_{n}")));
    }
    Ok(rem_u64(q, 4) as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn pq_relation_examples() {
        assert!(check_pq_relation(0));
        assert!(check_pq_relation(3));
        assert!(check_pq_relation(5));
        assert_eq!(pell_pair(3).pq_discriminant(), BigInt::from(196 - 200));
        assert_eq!(pell_pair(5).pq_discriminant(), BigInt::from(6724 - 6728));
    }

    #[test]
    fn split_examples() {
        let s = split_pell_minus_one(5).unwrap();
        assert_eq!((s.sign, s.p_index, s.q_index), (1, 2, 3));
        assert_eq!((s.p_part.clone(), s.q_part.clone()), (big(2), big(14)));
        assert_eq!(s.product(), big(28));

        let s = split_pell_minus_one(7).unwrap();
        assert_eq!((s.sign, s.p_index, s.q_index), (-1, 4, 3));
        assert_eq!((s.p_part.clone(), s.q_part.clone()), (big(12), big(14)));
        assert_eq!(s.product(), big(168));

        let s = split_pell_minus_one(9).unwrap();
        assert_eq!((s.p_index, s.q_index), (4, 5));
        assert_eq!(s.product(), big(984));
    }

    #[test]
    fn split_rejects_even_and_small() {
        assert!(split_pell_minus_one(4).is_err());
        assert!(split_pell_minus_one(1).is_err());
    }

    #[test]
    fn nu2_lemma_examples() {
        assert!(check_nu2_lemma(4).unwrap());
        assert!(check_nu2_lemma(6).unwrap());
        assert!(check_nu2_lemma(1).unwrap());
        assert!(check_nu2_lemma(0).is_err());
    }

    #[test]
    fn transfer_spot_values() {
        assert_eq!(nu2_transfer(5).unwrap(), (2, 2));
        assert_eq!(nu2_transfer(9).unwrap(), (3, 3));
        assert_eq!(nu2_transfer(7).unwrap(), (3, 3));
    }

    #[test]
    fn residue_examples() {
        assert_eq!(residue_mod4_of_factor(5, &big(29)).unwrap(), 1);
        assert_eq!(residue_mod4_of_factor(7, &big(13)).unwrap(), 1);
        assert_eq!(residue_mod4_of_factor(9, &big(197)).unwrap(), 1);
        assert!(residue_mod4_of_factor(9, &big(13)).is_err());
        assert!(residue_mod4_of_factor(6, &big(5)).is_err());
    }
}
