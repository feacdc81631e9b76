//! Miller-Rabin primality testing.
//!
//! Below 3.317e24 the first thirteen prime bases make the test deterministic
//! (Sorenson and Webster's bound for bases 2..=41). Above that, 51 further
//! bases drawn from a fixed-seed stream bring the count to 64 rounds.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};

const DETERMINISTIC_BASES: [u32; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
const EXTRA_ROUNDS: usize = 51;
const BASE_STREAM_SEED: u64 = 0x5045_4c4c_4c45_484d;
const CACHED_SIEVE_LIMIT: u32 = 1 << 20;

/// `ceil(3.317044064679887385961981e24)`; bases 2..=41 are exact below it.
fn deterministic_limit() -> &'static BigUint {
    static LIMIT: OnceLock<BigUint> = OnceLock::new();
    LIMIT.get_or_init(|| "3317044064679887385961981".parse().expect("literal"))
}

/// Primes up to `limit` (inclusive) by the sieve of Eratosthenes.
pub(crate) fn sieve(limit: u32) -> Vec<u32> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        primes.push(i as u32);
        let mut j = i * i;
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

/// Primes up to `limit`, served from a shared table when small enough.
pub(crate) fn primes_up_to(limit: u64) -> std::borrow::Cow<'static, [u32]> {
    static TABLE: OnceLock<Vec<u32>> = OnceLock::new();
    if limit <= CACHED_SIEVE_LIMIT as u64 {
        let table = TABLE.get_or_init(|| sieve(CACHED_SIEVE_LIMIT));
        let end = table.partition_point(|&p| p as u64 <= limit);
        std::borrow::Cow::Borrowed(&table[..end])
    } else {
        std::borrow::Cow::Owned(sieve(limit.min(u32::MAX as u64) as u32))
    }
}

/// `n mod m` without allocating.
pub(crate) fn rem_u64(n: &BigUint, m: u64) -> u64 {
    n.iter_u64_digits()
        .rev()
        .fold(0u128, |acc, d| ((acc << 64) | d as u128) % m as u128) as u64
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn strong_probable_prime_u64(n: u64, base: u64) -> bool {
    let base = base % n;
    if base == 0 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mut x = pow_mod(base, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    // Bases 2..=37 are exact for all 64-bit inputs.
    [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]
        .iter()
        .all(|&b| strong_probable_prime_u64(n, b))
}

fn strong_probable_prime(
    n: &BigUint,
    n_minus_1: &BigUint,
    d: &BigUint,
    s: u64,
    base: &BigUint,
) -> bool {
    let mut x = base.modpow(d, n);
    if x.is_one() || &x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = &x * &x % n;
        if &x == n_minus_1 {
            return true;
        }
        if x.is_one() {
            return false;
        }
    }
    false
}

/// Miller-Rabin test; never reports a prime as composite.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in primes_up_to(1000).iter() {
        if rem_u64(n, p as u64) == 0 {
            return false;
        }
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().expect("n > 1");
    let d = &n_minus_1 >> s;
    let passes = |base: &BigUint| strong_probable_prime(n, &n_minus_1, &d, s, base);

    if !DETERMINISTIC_BASES
        .iter()
        .all(|&b| passes(&BigUint::from(b)))
    {
        return false;
    }
    if n < deterministic_limit() {
        return true;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(BASE_STREAM_SEED);
    let span = n - 3u32;
    (0..EXTRA_ROUNDS).all(|_| {
        let raw = BigUint::from_slice(&[rng.gen(), rng.gen(), rng.gen(), rng.gen()]);
        let base = raw % &span + 2u32;
        debug_assert!(!base.is_zero());
        passes(&base)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        n >= 2
            && (2..)
                .take_while(|d| d * d <= n)
                .all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn examples() {
        assert!(!is_probable_prime(&BigUint::from(1u32)));
        assert!(is_probable_prime(&BigUint::from(5741u32)));
        assert!(!is_probable_prime(&BigUint::from(169u32)));
        assert!(!is_probable_prime(&BigUint::zero()));
    }

    #[test]
    fn agrees_with_trial_division_below_one_million() {
        for n in 0..1_000_000u64 {
            assert_eq!(
                is_probable_prime(&BigUint::from(n)),
                trial_division(n),
                "n = {n}"
            );
        }
    }

    #[test]
    fn big_inputs() {
        // 2^89 - 1 and 2^127 - 1 are Mersenne primes; 2^128 + 1 is not prime.
        let m89 = (BigUint::one() << 89u32) - 1u32;
        let m127 = (BigUint::one() << 127u32) - 1u32;
        assert!(is_probable_prime(&m89));
        assert!(is_probable_prime(&m127));
        assert!(!is_probable_prime(&((BigUint::one() << 128u32) + 1u32)));
        assert!(!is_probable_prime(&(&m89 * &m127)));
    }

    #[test]
    fn strong_pseudoprimes_are_caught() {
        // 3215031751 is a strong pseudoprime to bases 2, 3, 5 and 7.
        assert!(!is_probable_prime(&BigUint::from(3_215_031_751u64)));
        // Strong pseudoprime to every prime base up to 23.
        assert!(!is_probable_prime(&BigUint::from(
            3_825_123_056_546_413_051u64
        )));
    }

    #[test]
    fn rem_matches_bigint() {
        let n: BigUint = "123456789012345678901234567890123456789".parse().unwrap();
        for m in [2u64, 3, 97, 1_000_003, u64::MAX] {
            assert_eq!(BigUint::from(rem_u64(&n, m)), &n % m);
        }
    }
}
