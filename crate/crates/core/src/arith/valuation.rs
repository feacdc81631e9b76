use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{is_probable_prime, Factorization};
use crate::error::{precondition, Result};

/// Largest `e` with `2^e | n`.
pub fn nu2(n: &BigUint) -> Result<u32> {
    n.trailing_zeros()
        .map(|z| z as u32)
        .ok_or_else(|| precondition("2-adic valuation of 0 is infinite"))
}

/// Largest `e` with `p^e | n`, for prime `p`.
pub fn nu_p(n: &BigUint, p: &BigUint) -> Result<u32> {
    if n.is_zero() {
        return Err(precondition("p-adic valuation of 0 is infinite"));
    }
    if !is_probable_prime(p) {
        return Err(precondition(format!("{p} is not prime")));
    }
    if p == &BigUint::from(2u32) {
        return nu2(n);
    }
    let mut e = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return Ok(e);
        }
        m = q;
        e += 1;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Squarefree {
    Yes,
    No,
    Unknown,
}

/// Square-freeness as far as the factorization shows it.
pub fn is_squarefree(f: &Factorization) -> Squarefree {
    if f.factors().iter().any(|pp| pp.exponent >= 2) {
        Squarefree::No
    } else if f.is_complete() {
        Squarefree::Yes
    } else {
        Squarefree::Unknown
    }
}
