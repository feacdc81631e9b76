//! Pell numbers `P_n` and Pell-Lucas numbers `Q_n`.
//!
//! Both sequences satisfy `x_{n+2} = 2 x_{n+1} + x_n`, with `P_0 = 0, P_1 = 1`
//! and `Q_0 = Q_1 = 2`. [`pell_pair`] reaches index `n` with a most-significant-bit
//! first doubling ladder; [`pell_iterative`] and [`pell_lucas_iterative`] walk the
//! recurrence and serve as the oracle for it.
//!
//! The ladder uses, with `alpha * beta = -1` for the characteristic roots `1 +- sqrt 2`:
//!
//! ```text
//! P_{2k}   = P_k Q_k            Q_{2k}   = Q_k^2 - 2 (-1)^k
//! P_{k+1}  = P_k + Q_k / 2      Q_{k+1}  = Q_k + 4 P_k
//! ```
//!
//! `Q_k` is always even, so the halving is exact.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Result};

/// `(P_n, Q_n)` at a shared index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PellPair {
    pub n: u64,
    #[serde(with = "crate::serde_dec")]
    pub p: BigUint,
    #[serde(with = "crate::serde_dec")]
    pub q: BigUint,
}

impl PellPair {
    fn origin() -> Self {
        PellPair {
            n: 0,
            p: BigUint::zero(),
            q: BigUint::from(2u32),
        }
    }

    fn doubled(&self) -> Self {
        let p = &self.p * &self.q;
        let q_sq = &self.q * &self.q;
        let q = if self.n.is_multiple_of(2) {
            q_sq - 2u32
        } else {
            q_sq + 2u32
        };
        PellPair {
            n: 2 * self.n,
            p,
            q,
        }
    }

    fn stepped(&self) -> Self {
        let p = &self.p + (&self.q >> 1);
        let q = &self.q + (&self.p << 2);
        PellPair {
            n: self.n + 1,
            p,
            q,
        }
    }

    /// `Q_n^2 - 8 P_n^2` in signed arithmetic; equals `4 (-1)^n`.
    pub fn pq_discriminant(&self) -> BigInt {
        let q = BigInt::from(self.q.clone());
        let p = BigInt::from(self.p.clone());
        &q * &q - 8 * &p * &p
    }
}

/// Exact `(P_n, Q_n)` in `O(log n)` big-integer multiplications.
pub fn pell_pair(n: u64) -> PellPair {
    let mut acc = PellPair::origin();
    if n == 0 {
        return acc;
    }
    let top = 63 - n.leading_zeros();
    for bit in (0..=top).rev() {
        acc = acc.doubled();
        if (n >> bit) & 1 == 1 {
            acc = acc.stepped();
        }
    }
    debug_assert_eq!(acc.n, n);
    acc
}

fn iterate(mut a: BigUint, mut b: BigUint, n: u64) -> BigUint {
    for _ in 0..n {
        let next = (&b << 1) + &a;
        a = std::mem::replace(&mut b, next);
    }
    a
}

/// `P_n` by walking the recurrence from `P_0 = 0, P_1 = 1`.
pub fn pell_iterative(n: u64) -> BigUint {
    iterate(BigUint::zero(), BigUint::one(), n)
}

/// `Q_n` by walking the recurrence from `Q_0 = Q_1 = 2`.
pub fn pell_lucas_iterative(n: u64) -> BigUint {
    iterate(BigUint::from(2u32), BigUint::from(2u32), n)
}

/// Whether `P_n >= 2^{n/2}`, checked as `P_n^2 >= 2^n`. Requires `n >= 2`.
pub fn size_bound_holds(n: u64) -> Result<bool> {
    if n < 2 {
        return Err(precondition(format!("size bound needs n >= 2, got {n}")));
    }
    let p = pell_pair(n).p;
    Ok(&p * &p >= BigUint::one() << n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(n: u64) -> (u64, u64) {
        let pq = pell_pair(n);
        (
            pq.p.try_into().expect("small"),
            pq.q.try_into().expect("small"),
        )
    }

    #[test]
    fn pair_examples() {
        assert_eq!(pair(0), (0, 2));
        assert_eq!(pair(1), (1, 2));
        assert_eq!(pair(2), (2, 6));
        assert_eq!(pair(7), (169, 478));
    }

    #[test]
    fn iterative_examples() {
        assert_eq!(pell_iterative(5), BigUint::from(29u32));
        assert_eq!(pell_iterative(9), BigUint::from(985u32));
        assert_eq!(pell_iterative(0), BigUint::zero());
        assert_eq!(pell_lucas_iterative(3), BigUint::from(14u32));
        assert_eq!(pell_lucas_iterative(5), BigUint::from(82u32));
        assert_eq!(pell_lucas_iterative(1), BigUint::from(2u32));
    }

    #[test]
    fn size_bound_examples() {
        assert!(size_bound_holds(2).unwrap());
        assert!(size_bound_holds(3).unwrap());
        assert!(size_bound_holds(200).unwrap());
        assert!(size_bound_holds(1).is_err());
        assert!(size_bound_holds(0).is_err());
    }

    #[test]
    fn discriminant_sign_alternates() {
        assert_eq!(pell_pair(0).pq_discriminant(), BigInt::from(4));
        assert_eq!(pell_pair(3).pq_discriminant(), BigInt::from(-4));
        assert_eq!(pell_pair(5).pq_discriminant(), BigInt::from(-4));
    }

    #[test]
    fn doubling_reaches_large_powers_of_two() {
        let n = 1u64 << 12;
        assert_eq!(pell_pair(n).p, pell_iterative(n));
    }
}
