use num_bigint::BigUint;
use num_traits::One;

use super::Factorization;
use crate::error::{Error, Result};

fn require_complete(f: &Factorization) -> Result<()> {
    if f.is_complete() {
        Ok(())
    } else {
        Err(Error::IncompleteFactorization {
            cofactor: f.cofactor().to_string(),
        })
    }
}

/// Euler's totient from a complete factorization: `prod p^(e-1) (p - 1)`.
pub fn euler_phi(f: &Factorization) -> Result<BigUint> {
    require_complete(f)?;
    Ok(f.factors().iter().fold(BigUint::one(), |acc, pp| {
        acc * pp.prime.pow(pp.exponent - 1) * (&pp.prime - 1u32)
    }))
}

/// Number of distinct prime divisors.
pub fn omega(f: &Factorization) -> Result<usize> {
    require_complete(f)?;
    Ok(f.factors().len())
}

#[cfg(test)]
mod tests {
    use num_integer::Integer;
    use num_traits::ToPrimitive;

    use super::*;
    use crate::arith::{factor, FactorPolicy, PrimePower};

    fn fact(n: u64) -> Factorization {
        factor(&BigUint::from(n), &FactorPolicy::generous()).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(euler_phi(&fact(1)).unwrap(), BigUint::from(1u32));
        assert_eq!(euler_phi(&fact(985)).unwrap(), BigUint::from(784u32));
        assert_eq!(euler_phi(&fact(169)).unwrap(), BigUint::from(156u32));
        assert_eq!(omega(&fact(1)).unwrap(), 0);
        assert_eq!(omega(&fact(985)).unwrap(), 2);
        assert_eq!(omega(&fact(169)).unwrap(), 1);
    }

    #[test]
    fn incomplete_is_rejected() {
        let partial = Factorization::new(
            BigUint::from(985u32),
            vec![PrimePower {
                prime: BigUint::from(5u32),
                exponent: 1,
            }],
            BigUint::from(197u32),
        )
        .unwrap();
        assert!(matches!(
            euler_phi(&partial),
            Err(Error::IncompleteFactorization { .. })
        ));
        assert!(omega(&partial).is_err());
    }

    #[test]
    fn agrees_with_gcd_count_small() {
        for n in 1..=500u64 {
            let brute = (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64;
            assert_eq!(
                euler_phi(&fact(n)).unwrap().to_u64(),
                Some(brute),
                "n = {n}"
            );
        }
    }
}
