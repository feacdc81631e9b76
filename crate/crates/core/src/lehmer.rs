//! Staged Lehmer-property decision.
//!
//! A composite `N` has the Lehmer property when `phi(N) | N - 1`. Such an `N`
//! must be odd and square-free, and every prime `p | N` must satisfy
//! `(p - 1) | (N - 1)` because `(p - 1) | phi(N)`. Those necessary conditions
//! reject almost every candidate long before a complete factorization exists.
//! The stages run in this order:
//!
//! 1. unit and prime screen;
//! 2. parity (`phi(N)` is even for `N >= 3`, so even `N` fails);
//! 3. factor harvesting, stopping at the first prime that is repeated or whose
//!    `p - 1` does not divide `N - 1`;
//! 4. if the harvest completed, the exact test `phi(N) | N - 1`;
//! 5. otherwise a Fermat test: `phi(N) | N - 1` forces `a^(N-1) = 1 (mod N)`
//!    for every `a` coprime to `N`, so any base that fails rejects `N`.
//!
//! Only when all of these are inconclusive is the verdict `Undecided`.

use std::fmt;
use std::ops::ControlFlow;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{
    euler_phi, factor_with, is_probable_prime, FactorPolicy, Factorization, PrimePower,
};
use crate::error::{precondition, Result};

const FERMAT_BASES: [u32; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LehmerStatus {
    NotComposite,
    Rejected,
    Holds,
    Undecided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LehmerReason {
    IsUnit,
    IsPrime,
    Even,
    /// `evidence^2 | N`.
    NotSquarefree,
    /// `evidence | N` and `evidence - 1` does not divide `N - 1`.
    FactorWitness,
    /// `gcd(evidence, N) = 1` and `evidence^(N-1) != 1 (mod N)`.
    FermatWitness,
    FullCheckFailed,
    FullCheckPassed,
    BudgetExhausted,
}

impl fmt::Display for LehmerReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LehmerReason::IsUnit => "is_unit",
            LehmerReason::IsPrime => "is_prime",
            LehmerReason::Even => "even",
            LehmerReason::NotSquarefree => "not_squarefree",
            LehmerReason::FactorWitness => "factor_witness",
            LehmerReason::FermatWitness => "fermat_witness",
            LehmerReason::FullCheckFailed => "full_check_failed",
            LehmerReason::FullCheckPassed => "full_check_passed",
            LehmerReason::BudgetExhausted => "budget_exhausted",
        };
        f.write_str(s)
    }
}

impl fmt::Display for LehmerStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LehmerStatus::NotComposite => "not_composite",
            LehmerStatus::Rejected => "rejected",
            LehmerStatus::Holds => "holds",
            LehmerStatus::Undecided => "undecided",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LehmerVerdict {
    #[serde(with = "crate::serde_dec")]
    pub target: BigUint,
    pub status: LehmerStatus,
    pub reason: LehmerReason,
    #[serde(with = "crate::serde_dec::option", default)]
    pub evidence: Option<BigUint>,
}

impl LehmerVerdict {
    fn new(
        target: &BigUint,
        status: LehmerStatus,
        reason: LehmerReason,
        evidence: Option<BigUint>,
    ) -> Self {
        LehmerVerdict {
            target: target.clone(),
            status,
            reason,
            evidence,
        }
    }

    /// Re-verifies the evidence behind a rejection from scratch.
    ///
    /// Verdicts whose reason carries no evidence, or which are not rejections,
    /// are re-checked only for consistency of status and reason.
    pub fn recheck(&self) -> bool {
        let n = &self.target;
        let n_minus_1 = || n - 1u32;
        match (self.status, self.reason, &self.evidence) {
            (LehmerStatus::NotComposite, LehmerReason::IsUnit, None) => n.is_one(),
            (LehmerStatus::NotComposite, LehmerReason::IsPrime, None) => is_probable_prime(n),
            (LehmerStatus::Rejected, LehmerReason::Even, _) => {
                n.is_even() && n > &BigUint::from(2u32)
            }
            (LehmerStatus::Rejected, LehmerReason::NotSquarefree, Some(p)) => {
                is_probable_prime(p) && n.is_multiple_of(&(p * p))
            }
            (LehmerStatus::Rejected, LehmerReason::FactorWitness, Some(p)) => {
                is_probable_prime(p)
                    && n.is_multiple_of(p)
                    && !n_minus_1().is_multiple_of(&(p - 1u32))
            }
            (LehmerStatus::Rejected, LehmerReason::FermatWitness, Some(a)) => {
                a.gcd(n).is_one() && !a.modpow(&n_minus_1(), n).is_one()
            }
            (LehmerStatus::Rejected, LehmerReason::FullCheckFailed, None)
            | (LehmerStatus::Holds, LehmerReason::FullCheckPassed, None)
            | (LehmerStatus::Undecided, LehmerReason::BudgetExhausted, None) => true,
            _ => false,
        }
    }
}

/// A verdict together with whatever factorization the harvest produced.
#[derive(Clone, Debug)]
pub struct LehmerOutcome {
    pub verdict: LehmerVerdict,
    pub factorization: Factorization,
}

/// Whether the prime `p | n` certifies that `n` is not a Lehmer number, i.e.
/// `(p - 1)` does not divide `n - 1`.
pub fn witness_reject(n: &BigUint, p: &BigUint) -> Result<bool> {
    if p <= &BigUint::one() || !n.is_multiple_of(p) || n.is_zero() {
        return Err(precondition(format!("{p} does not divide {n}")));
    }
    Ok(!(n - 1u32).is_multiple_of(&(p - 1u32)))
}

/// Decides the Lehmer property of `n` under `policy`.
pub fn lehmer_check(n: &BigUint, policy: &FactorPolicy) -> Result<LehmerVerdict> {
    lehmer_check_seeded(n, policy, &[]).map(|o| o.verdict)
}

/// [`lehmer_check`] with known divisors of `n` (or of its factors) to seed
/// the harvest.
pub fn lehmer_check_seeded(
    n: &BigUint,
    policy: &FactorPolicy,
    seeds: &[BigUint],
) -> Result<LehmerOutcome> {
    use LehmerReason::*;
    use LehmerStatus::*;

    if n.is_zero() {
        return Err(precondition("Lehmer check needs N >= 1"));
    }
    policy.validate()?;
    let verdict = |status, reason, evidence| LehmerVerdict::new(n, status, reason, evidence);

    if n.is_one() {
        return Ok(LehmerOutcome {
            verdict: verdict(NotComposite, IsUnit, None),
            factorization: Factorization::unfactored(n.clone()),
        });
    }
    if is_probable_prime(n) {
        let factorization = Factorization::new(
            n.clone(),
            vec![PrimePower {
                prime: n.clone(),
                exponent: 1,
            }],
            BigUint::one(),
        )?;
        return Ok(LehmerOutcome {
            verdict: verdict(NotComposite, IsPrime, None),
            factorization,
        });
    }
    if n.is_even() {
        let twos = n.trailing_zeros().expect("n > 0");
        let factorization = Factorization::new(
            n.clone(),
            vec![PrimePower {
                prime: BigUint::from(2u32),
                exponent: twos as u32,
            }],
            n >> twos,
        )?;
        return Ok(LehmerOutcome {
            verdict: verdict(Rejected, Even, Some(BigUint::from(2u32))),
            factorization,
        });
    }

    let n_minus_1 = n - 1u32;
    let mut rejection = None;
    let factorization = factor_with(n, policy, seeds, |p, exponent| {
        if exponent >= 2 {
            rejection = Some((NotSquarefree, p.clone()));
            return ControlFlow::Break(());
        }
        if !n_minus_1.is_multiple_of(&(p - 1u32)) {
            rejection = Some((FactorWitness, p.clone()));
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    })?;

    let verdict = if let Some((reason, p)) = rejection {
        verdict(Rejected, reason, Some(p))
    } else if factorization.is_complete() {
        let phi = euler_phi(&factorization)?;
        if n_minus_1.is_multiple_of(&phi) {
            verdict(Holds, FullCheckPassed, None)
        } else {
            verdict(Rejected, FullCheckFailed, None)
        }
    } else {
        match fermat_witness(n, &n_minus_1) {
            Some(a) => verdict(Rejected, FermatWitness, Some(a)),
            None => verdict(Undecided, BudgetExhausted, None),
        }
    };
    Ok(LehmerOutcome {
        verdict,
        factorization,
    })
}

fn fermat_witness(n: &BigUint, n_minus_1: &BigUint) -> Option<BigUint> {
    FERMAT_BASES
        .iter()
        .map(|&a| BigUint::from(a))
        .find(|a| a < n && a.gcd(n).is_one() && !a.modpow(n_minus_1, n).is_one())
}
