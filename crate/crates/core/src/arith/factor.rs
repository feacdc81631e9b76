//! Budgeted factorization: seed gcds, trial division, then Brent's variant of
//! Pollard rho on whatever composite pieces remain.
//!
//! Budgets are counted in rho iterations rather than wall-clock time so that
//! a given `(target, policy)` always produces the same factorization.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};
use serde::{Deserialize, Serialize};

use super::primality::{is_prime_u64, is_probable_prime, primes_up_to, rem_u64};
use crate::error::{precondition, Error, Result};

/// Limits for [`factor`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorPolicy {
    /// Largest trial-division prime.
    pub trial_bound: u64,
    /// Rho iterations allowed for a single split attempt.
    pub rho_budget: u64,
    /// Rho iterations allowed across all attempts on one target.
    pub max_total: u64,
    /// Seed for the rho starting points and polynomial constants.
    pub seed: u64,
}

impl Default for FactorPolicy {
    fn default() -> Self {
        FactorPolicy {
            trial_bound: 1 << 20,
            rho_budget: 1 << 18,
            max_total: 1 << 20,
            seed: 0x1ef1_2024,
        }
    }
}

impl FactorPolicy {
    /// Large enough to factor anything below `10^12` without fail.
    pub fn generous() -> Self {
        FactorPolicy {
            trial_bound: 1 << 20,
            rho_budget: 1 << 22,
            max_total: 1 << 26,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trial_bound < 2 {
            return Err(precondition("trial_bound must be at least 2"));
        }
        if self.rho_budget == 0 || self.max_total == 0 {
            return Err(precondition("rho budgets must be positive"));
        }
        Ok(())
    }
}

/// A prime and its multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimePower {
    #[serde(with = "crate::serde_dec")]
    pub prime: BigUint,
    pub exponent: u32,
}

/// `target = prod(prime^exponent) * cofactor`, with every listed prime certified
/// by [`is_probable_prime`]. The factorization is complete iff `cofactor == 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FactorizationRepr", into = "FactorizationRepr")]
pub struct Factorization {
    target: BigUint,
    factors: Vec<PrimePower>,
    cofactor: BigUint,
}

#[derive(Serialize, Deserialize)]
struct FactorizationRepr {
    #[serde(with = "crate::serde_dec")]
    target: BigUint,
    factors: Vec<PrimePower>,
    #[serde(with = "crate::serde_dec")]
    cofactor: BigUint,
    complete: bool,
}

impl From<Factorization> for FactorizationRepr {
    fn from(f: Factorization) -> Self {
        let complete = f.is_complete();
        FactorizationRepr {
            target: f.target,
            factors: f.factors,
            cofactor: f.cofactor,
            complete,
        }
    }
}

impl TryFrom<FactorizationRepr> for Factorization {
    type Error = Error;

    fn try_from(r: FactorizationRepr) -> Result<Self> {
        let f = Factorization::new(r.target, r.factors, r.cofactor)?;
        if f.is_complete() != r.complete {
            return Err(Error::InvalidFactorization(
                "complete flag disagrees with cofactor".into(),
            ));
        }
        Ok(f)
    }
}

impl Factorization {
    /// Builds a factorization, checking every invariant.
    pub fn new(target: BigUint, factors: Vec<PrimePower>, cofactor: BigUint) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidFactorization(msg));
        if target.is_zero() {
            return bad("target must be positive".into());
        }
        if cofactor.is_zero() {
            return bad("cofactor must be positive".into());
        }
        for pair in factors.windows(2) {
            if pair[0].prime >= pair[1].prime {
                return bad("primes must be strictly increasing".into());
            }
        }
        let mut product = cofactor.clone();
        for pp in &factors {
            if pp.exponent == 0 {
                return bad(format!("zero exponent on {}", pp.prime));
            }
            if !is_probable_prime(&pp.prime) {
                return bad(format!("{} is not prime", pp.prime));
            }
            product *= pp.prime.pow(pp.exponent);
        }
        if product != target {
            return bad(format!("factors multiply to {product}, not {target}"));
        }
        Ok(Factorization {
            target,
            factors,
            cofactor,
        })
    }

    /// The empty factorization `target = cofactor`.
    pub fn unfactored(target: BigUint) -> Self {
        Factorization {
            cofactor: target.clone(),
            target,
            factors: Vec::new(),
        }
    }

    pub fn target(&self) -> &BigUint {
        &self.target
    }

    pub fn factors(&self) -> &[PrimePower] {
        &self.factors
    }

    pub fn cofactor(&self) -> &BigUint {
        &self.cofactor
    }

    pub fn is_complete(&self) -> bool {
        self.cofactor.is_one()
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.factors.iter().map(|pp| &pp.prime)
    }
}

#[derive(Debug)]
struct Piece {
    value: BigUint,
    checked: bool,
    attempts: u32,
}

/// Incremental factorization state. Invariant:
/// `prod(found) * prod(pieces) == target`, and no piece shares a prime with `found`.
struct Harvest<'a, V> {
    policy: &'a FactorPolicy,
    found: BTreeMap<BigUint, u32>,
    pieces: Vec<Piece>,
    rho_spent: u64,
    rng: ChaCha8Rng,
    visit: V,
    stopped: bool,
}

impl<V> Harvest<'_, V>
where
    V: FnMut(&BigUint, u32) -> ControlFlow<()>,
{
    fn split(&mut self, index: usize, d: BigUint) {
        let piece = &mut self.pieces[index];
        let (q, r) = piece.value.div_rem(&d);
        debug_assert!(r.is_zero() && !d.is_one() && !q.is_one());
        piece.value = q;
        piece.checked = false;
        self.pieces.push(Piece {
            value: d,
            checked: false,
            attempts: 0,
        });
    }

    fn discover(&mut self, p: BigUint) {
        let mut exponent = 0;
        for piece in &mut self.pieces {
            loop {
                let (q, r) = piece.value.div_rem(&p);
                if !r.is_zero() {
                    break;
                }
                piece.value = q;
                piece.checked = false;
                exponent += 1;
            }
        }
        self.pieces.retain(|piece| !piece.value.is_one());
        debug_assert!(exponent > 0);
        let flow = (self.visit)(&p, exponent);
        self.found.insert(p, exponent);
        if flow.is_break() {
            self.stopped = true;
        }
    }

    /// Classifies unchecked pieces, smallest first, discovering the prime ones.
    fn settle(&mut self) {
        while !self.stopped {
            let next = self
                .pieces
                .iter()
                .enumerate()
                .filter(|(_, piece)| !piece.checked)
                .min_by(|a, b| a.1.value.cmp(&b.1.value))
                .map(|(i, _)| i);
            let Some(i) = next else { break };
            if is_probable_prime(&self.pieces[i].value) {
                let p = self.pieces[i].value.clone();
                self.discover(p);
                continue;
            }
            let root = self.pieces[i].value.sqrt();
            if &root * &root == self.pieces[i].value {
                self.split(i, root);
                continue;
            }
            self.pieces[i].checked = true;
        }
    }

    fn seed(&mut self, seeds: &[BigUint]) {
        for s in seeds {
            if self.stopped {
                return;
            }
            if s <= &BigUint::one() {
                continue;
            }
            let mut i = 0;
            while i < self.pieces.len() {
                let g = self.pieces[i].value.gcd(s);
                if !g.is_one() && g != self.pieces[i].value {
                    self.split(i, g);
                }
                i += 1;
            }
            self.settle();
        }
    }

    fn trial_divide(&mut self) {
        let primes = primes_up_to(self.policy.trial_bound);
        for &p in primes.iter() {
            if self.stopped || self.pieces.is_empty() {
                return;
            }
            let p = p as u64;
            if self
                .pieces
                .iter()
                .any(|piece| rem_u64(&piece.value, p) == 0)
            {
                self.discover(BigUint::from(p));
                self.settle();
            }
        }
    }

    fn rho(&mut self) {
        while !self.stopped && self.rho_spent < self.policy.max_total {
            let next = self
                .pieces
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1.attempts, &a.1.value).cmp(&(b.1.attempts, &b.1.value)))
                .map(|(i, _)| i);
            let Some(i) = next else { return };
            let budget = self
                .policy
                .rho_budget
                .min(self.policy.max_total - self.rho_spent);
            let c: u64 = self.rng.gen_range(1..u32::MAX as u64);
            let x0: u64 = self.rng.gen();
            self.pieces[i].attempts += 1;
            let (divisor, used) = brent_rho(&self.pieces[i].value, c, x0, budget);
            self.rho_spent += used;
            if let Some(d) = divisor {
                self.split(i, d);
                self.settle();
            }
        }
    }

    fn finish(self, target: BigUint) -> Factorization {
        let cofactor = self
            .pieces
            .iter()
            .fold(BigUint::one(), |acc, piece| acc * &piece.value);
        let factors = self
            .found
            .into_iter()
            .map(|(prime, exponent)| PrimePower { prime, exponent })
            .collect();
        Factorization {
            target,
            factors,
            cofactor,
        }
    }
}

/// Factors `n` under `policy`, reporting each newly found prime (with its full
/// multiplicity in `n`) to `visit`. Returning `Break` from `visit` stops the
/// harvest; the partial factorization found so far is returned.
///
/// `seeds` are known multiples or divisors of factors of `n`; they are used
/// through gcds before trial division starts.
pub fn factor_with<V>(
    n: &BigUint,
    policy: &FactorPolicy,
    seeds: &[BigUint],
    visit: V,
) -> Result<Factorization>
where
    V: FnMut(&BigUint, u32) -> ControlFlow<()>,
{
    if n.is_zero() {
        return Err(precondition("cannot factor 0"));
    }
    policy.validate()?;
    let mut harvest = Harvest {
        policy,
        found: BTreeMap::new(),
        pieces: Vec::new(),
        rho_spent: 0,
        rng: ChaCha8Rng::seed_from_u64(policy.seed),
        visit,
        stopped: false,
    };
    if !n.is_one() {
        harvest.pieces.push(Piece {
            value: n.clone(),
            checked: false,
            attempts: 0,
        });
    }
    harvest.settle();
    harvest.seed(seeds);
    harvest.trial_divide();
    harvest.rho();
    Ok(harvest.finish(n.clone()))
}

/// Factors `n` as far as `policy` allows.
pub fn factor(n: &BigUint, policy: &FactorPolicy) -> Result<Factorization> {
    factor_with(n, policy, &[], |_, _| ControlFlow::Continue(()))
}

const BATCH: u64 = 128;

/// One Brent-rho attempt with `f(x) = x^2 + c`. Returns a proper divisor if one
/// was found, and the number of iterations spent.
fn brent_rho(n: &BigUint, c: u64, x0: u64, budget: u64) -> (Option<BigUint>, u64) {
    if let Some(small) = n.to_u64() {
        let (d, used) = brent_rho_u64(small, c, x0, budget);
        return (d.map(BigUint::from), used);
    }
    let c = BigUint::from(c) % n;
    let step = |x: &BigUint| (x * x + &c) % n;
    let abs_diff = |a: &BigUint, b: &BigUint| if a > b { a - b } else { b - a };

    let mut y = BigUint::from(x0) % n;
    let mut x = y.clone();
    let mut ys = y.clone();
    let mut q = BigUint::one();
    let mut g = BigUint::one();
    let mut r = 1u64;
    let mut used = 0u64;

    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = step(&y);
        }
        used += r;
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            let batch = BATCH.min(r - k);
            for _ in 0..batch {
                y = step(&y);
                q = q * abs_diff(&x, &y) % n;
            }
            used += batch;
            g = q.gcd(n);
            k += batch;
        }
        r *= 2;
        if g.is_one() && used >= budget {
            return (None, used);
        }
    }
    if &g == n {
        loop {
            ys = step(&ys);
            used += 1;
            g = abs_diff(&x, &ys).gcd(n);
            if !g.is_one() || used >= budget.saturating_mul(2) {
                break;
            }
        }
    }
    if g.is_one() || &g == n {
        (None, used)
    } else {
        (Some(g), used)
    }
}

fn brent_rho_u64(n: u64, c: u64, x0: u64, budget: u64) -> (Option<u64>, u64) {
    if n.is_multiple_of(2) {
        return (Some(2), 0);
    }
    let m = n as u128;
    let c = c as u128 % m;
    let step = |x: u64| ((x as u128 * x as u128 + c) % m) as u64;

    let mut y = x0 % n;
    let mut x = y;
    let mut ys = y;
    let mut q = 1u64;
    let mut g = 1u64;
    let mut r = 1u64;
    let mut used = 0u64;

    while g == 1 {
        x = y;
        for _ in 0..r {
            y = step(y);
        }
        used += r;
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            let batch = BATCH.min(r - k);
            for _ in 0..batch {
                y = step(y);
                q = (q as u128 * x.abs_diff(y) as u128 % m) as u64;
            }
            used += batch;
            g = q.gcd(&n);
            k += batch;
        }
        r *= 2;
        if g == 1 && used >= budget {
            return (None, used);
        }
    }
    if g == n {
        loop {
            ys = step(ys);
            used += 1;
            g = x.abs_diff(ys).gcd(&n);
            if g != 1 || used >= budget.saturating_mul(2) {
                break;
            }
        }
    }
    if g == 1 || g == n {
        (None, used)
    } else {
        debug_assert!(!is_prime_u64(n));
        (Some(g), used)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    fn as_pairs(f: &Factorization) -> Vec<(u64, u32)> {
        f.factors()
            .iter()
            .map(|pp| (pp.prime.to_u64().unwrap(), pp.exponent))
            .collect()
    }

    #[test]
    fn examples() {
        let policy = FactorPolicy::default();
        let f = factor(&big(12), &policy).unwrap();
        assert_eq!(as_pairs(&f), vec![(2, 2), (3, 1)]);
        assert!(f.is_complete());

        let f = factor(&big(985), &policy).unwrap();
        assert_eq!(as_pairs(&f), vec![(5, 1), (197, 1)]);
        assert!(f.is_complete());

        let f = factor(&big(1), &policy).unwrap();
        assert!(f.factors().is_empty());
        assert!(f.cofactor().is_one());
        assert!(f.is_complete());
    }

    #[test]
    fn zero_is_rejected() {
        assert!(factor(&BigUint::zero(), &FactorPolicy::default()).is_err());
    }

    #[test]
    fn invalid_policy_is_rejected() {
        let policy = FactorPolicy {
            trial_bound: 1,
            ..FactorPolicy::default()
        };
        assert!(factor(&big(10), &policy).is_err());
    }

    #[test]
    fn rho_splits_semiprime_beyond_trial_bound() {
        let p = 1_000_000_007u64;
        let q = 998_244_353u64;
        let policy = FactorPolicy {
            trial_bound: 100,
            ..FactorPolicy::generous()
        };
        let f = factor(&(big(p) * big(q)), &policy).unwrap();
        assert_eq!(as_pairs(&f), vec![(q, 1), (p, 1)]);
    }

    #[test]
    fn rho_splits_multiword_semiprime() {
        // (2^61 - 1) * 1000003 * 1000033, beyond a small trial bound.
        let m61 = (BigUint::one() << 61u32) - 1u32;
        let n = &m61 * big(1_000_003) * big(1_000_033);
        let policy = FactorPolicy {
            trial_bound: 1000,
            ..FactorPolicy::generous()
        };
        let f = factor(&n, &policy).unwrap();
        assert!(f.is_complete());
        let primes: Vec<_> = f.primes().cloned().collect();
        assert_eq!(primes, vec![big(1_000_003), big(1_000_033), m61]);
    }

    #[test]
    fn large_prime_squares_are_detected() {
        let p = big(1_000_000_007);
        let f = factor(
            &(&p * &p * 3u32),
            &FactorPolicy {
                trial_bound: 10,
                ..FactorPolicy::default()
            },
        )
        .unwrap();
        assert_eq!(as_pairs(&f), vec![(3, 1), (1_000_000_007, 2)]);
    }

    #[test]
    fn exhausted_budget_leaves_composite_cofactor() {
        let p = 1_000_000_007u64;
        let q = 998_244_353u64;
        let policy = FactorPolicy {
            trial_bound: 2,
            rho_budget: 1,
            max_total: 1,
            seed: 1,
        };
        let n = big(p) * big(q) * 4u32;
        let f = factor(&n, &policy).unwrap();
        assert!(!f.is_complete());
        assert_eq!(as_pairs(&f), vec![(2, 2)]);
        assert_eq!(f.cofactor(), &(big(p) * big(q)));
    }

    #[test]
    fn seeds_split_before_trial_division() {
        let a = big(1_000_000_007);
        let b = big(998_244_353);
        let policy = FactorPolicy {
            trial_bound: 2,
            rho_budget: 1,
            max_total: 1,
            seed: 0,
        };
        let f = factor_with(&(&a * &b), &policy, std::slice::from_ref(&a), |_, _| {
            ControlFlow::Continue(())
        })
        .unwrap();
        assert!(f.is_complete());
    }

    #[test]
    fn visitor_can_stop_early() {
        let mut seen = Vec::new();
        let f = factor_with(
            &big(2 * 3 * 5 * 7),
            &FactorPolicy::default(),
            &[],
            |p, _| {
                seen.push(p.to_u64().unwrap());
                if seen.len() == 2 {
                    ControlFlow::Break(())
                } else {
                    ControlFlow::Continue(())
                }
            },
        )
        .unwrap();
        assert_eq!(seen, vec![2, 3]);
        assert_eq!(f.cofactor(), &big(35));
    }

    #[test]
    fn factorization_constructor_validates() {
        let pp = |p: u64, e| PrimePower {
            prime: big(p),
            exponent: e,
        };
        assert!(Factorization::new(big(985), vec![pp(5, 1), pp(197, 1)], big(1)).is_ok());
        assert!(Factorization::new(big(980), vec![pp(5, 1), pp(196, 1)], big(1)).is_err());
        assert!(Factorization::new(big(985), vec![pp(197, 1), pp(5, 1)], big(1)).is_err());
        assert!(Factorization::new(big(985), vec![pp(5, 1)], big(196)).is_err());
        assert!(Factorization::new(big(985), vec![pp(5, 0)], big(985)).is_err());
        let partial = Factorization::new(big(985), vec![pp(5, 1)], big(197)).unwrap();
        assert!(!partial.is_complete());
    }

    #[test]
    fn serde_rejects_inconsistent_complete_flag() {
        let json = r#"{"target":"12","factors":[{"prime":"2","exponent":2},{"prime":"3","exponent":1}],"cofactor":"1","complete":false}"#;
        assert!(serde_json::from_str::<Factorization>(json).is_err());
        let ok = json.replace("false", "true");
        let f: Factorization = serde_json::from_str(&ok).unwrap();
        assert!(f.is_complete());
    }
}
