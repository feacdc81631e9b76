//! Index-by-index verification that no `P_n` is a Lehmer number, the
//! certified inequality chain for indices past the machine check, and the
//! factor cache that lets runs reuse earlier evidence.

mod bounds;
mod cache;
mod report;

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use rayon::prelude::*;

pub use bounds::{
    bound_chain, e8_enclosure, e8_threshold_check, final_inequality_holds, final_threshold, ineq_a,
    ineq_b, BoundReport, TwoPowerRequirement, FINAL_SCAN_LIMIT, MIN_BOUND_INDEX, OMEGA_LOWER_BOUND,
    POMERANCE_EXPONENT_CAP,
};
pub use cache::{FactorCache, CACHE_HEADER};
pub use report::{
    CacheProvenance, HarvestedFactor, IdentityChecks, IndexReport, ProofChain, Summary,
    VerificationReport, REPORT_SCHEMA,
};

use crate::arith::{FactorPolicy, Factorization};
use crate::error::{precondition, Result};
use crate::identities::{nu2_lemma_holds, nu2_transfer, pq_relation_holds, split_pell_minus_one};
use crate::lehmer::lehmer_check_seeded;
use crate::sequences::pell_pair;

/// Index bound of the published machine check.
pub const DEFAULT_N_MAX: u64 = 200;

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Record per-index wall-clock time (makes reports non-reproducible).
    pub timings: bool,
    /// Verify independent indices on the rayon pool.
    pub parallel: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            timings: false,
            parallel: true,
        }
    }
}

/// Number of prime factors of `n` counted with multiplicity.
fn big_omega(mut n: u64) -> u32 {
    let mut count = 0;
    let mut d = 2;
    while d * d <= n {
        while n.is_multiple_of(d) {
            n /= d;
            count += 1;
        }
        d += 1;
    }
    count + u32::from(n > 1)
}

fn proper_divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            if d * d != n {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.retain(|&d| d != n);
    out.sort_unstable();
    out
}

struct Verified {
    report: IndexReport,
    factorization: Factorization,
}

fn verify_one(
    n: u64,
    policy: &FactorPolicy,
    known: &BTreeMap<u64, Factorization>,
    cache: Option<&FactorCache>,
    timings: bool,
) -> Result<Verified> {
    let start = Instant::now();
    let pair = pell_pair(n);
    let odd = n % 2 == 1;

    let identity_checks = IdentityChecks {
        pq_relation: pq_relation_holds(&pair),
        minus_one_split: (odd && n >= 3).then(|| split_pell_minus_one(n).is_ok()),
        nu2_lemma: nu2_lemma_holds(&pair)?,
        nu2_transfer: (odd && n >= 3).then(|| nu2_transfer(n).is_ok_and(|(lhs, rhs)| lhs == rhs)),
    };

    // P_d | P_n for d | n, so evidence for P_d carries over.
    let mut candidates: Vec<BigUint> = Vec::new();
    let mut seeded_from = Vec::new();
    let mut cache_hit = false;
    if odd {
        for d in proper_divisors(n).into_iter().filter(|&d| d >= 3) {
            if let Some(f) = known.get(&d) {
                seeded_from.push(d);
                candidates.extend(f.primes().cloned());
                if !f.is_complete() {
                    candidates.push(f.cofactor().clone());
                }
            }
        }
        // A corrupt entry is reported through the cache diagnostics and ignored.
        if let Some(Ok(Some(f))) = cache.map(|c| c.load(n)) {
            cache_hit = true;
            candidates.extend(f.primes().cloned());
        }
    }
    let candidate_count = candidates.len();
    let seeds: Vec<BigUint> = candidates
        .into_iter()
        .filter(|s| !s.is_one() && pair.p.is_multiple_of(s))
        .collect();
    let seed_mismatches = candidate_count - seeds.len();

    let outcome = lehmer_check_seeded(&pair.p, policy, &seeds)?;
    let factors_found = outcome
        .factorization
        .factors()
        .iter()
        .map(|pp| HarvestedFactor {
            prime: pp.prime.clone(),
            exponent: pp.exponent,
            residue_mod4: odd.then(|| crate::arith::rem_u64(&pp.prime, 4) as u32),
        })
        .collect();
    let cofactor = outcome.factorization.cofactor();
    let report = IndexReport {
        n,
        pell_digits: pair.p.to_string().len(),
        verdict: outcome.verdict,
        identity_checks,
        factors_found,
        cofactor_digits: if cofactor.is_one() {
            0
        } else {
            cofactor.to_string().len()
        },
        seeded_from,
        seed_mismatches,
        cache_hit,
        elapsed_ms: timings.then(|| start.elapsed().as_millis() as u64),
    };
    Ok(Verified {
        report,
        factorization: outcome.factorization,
    })
}

/// Verifies a single index without any prior evidence.
pub fn verify_index(n: u64, policy: &FactorPolicy) -> Result<IndexReport> {
    if n == 0 {
        return Err(precondition("verification starts at n = 1"));
    }
    policy.validate()?;
    verify_one(n, policy, &BTreeMap::new(), None, false).map(|v| v.report)
}

/// [`verify_range_with`] using default options.
pub fn verify_range(
    n_max: u64,
    policy: &FactorPolicy,
    cache: &FactorCache,
) -> Result<VerificationReport> {
    verify_range_with(n_max, policy, cache, &VerifyOptions::default())
}

/// Verifies every index `1..=n_max`.
///
/// Indices are processed in layers of equal `Omega(n)` (prime factors with
/// multiplicity), so every proper divisor of `n` is finished before `n`
/// starts and can seed its harvest. Within a layer indices run concurrently;
/// the report is ordered by index regardless of scheduling.
pub fn verify_range_with(
    n_max: u64,
    policy: &FactorPolicy,
    cache: &FactorCache,
    options: &VerifyOptions,
) -> Result<VerificationReport> {
    if n_max == 0 {
        return Err(precondition("n_max must be at least 1"));
    }
    policy.validate()?;

    let mut layers: BTreeMap<u32, Vec<u64>> = BTreeMap::new();
    for n in 1..=n_max {
        layers.entry(big_omega(n)).or_default().push(n);
    }

    let mut known: BTreeMap<u64, Factorization> = BTreeMap::new();
    let mut entries = Vec::with_capacity(n_max as usize);
    let mut stored = 0;
    for layer in layers.values() {
        let run = |&n: &u64| verify_one(n, policy, &known, Some(cache), options.timings);
        let results: Vec<Result<Verified>> = if options.parallel {
            layer.par_iter().map(run).collect()
        } else {
            layer.iter().map(run).collect()
        };
        for result in results {
            let Verified {
                report,
                factorization,
            } = result?;
            if report.n % 2 == 1 && report.n >= 3 {
                cache.store(report.n, &factorization)?;
                stored += 1;
                known.insert(report.n, factorization);
            }
            entries.push(report);
        }
    }
    entries.sort_by_key(|e| e.n);

    let summary = Summary::from_entries(&entries);
    Ok(VerificationReport {
        schema: REPORT_SCHEMA,
        n_max,
        policy: policy.clone(),
        summary,
        proof_chain: ProofChain {
            omega_lower_bound: OMEGA_LOWER_BOUND,
            final_threshold: final_threshold()?,
            e8_below_3000: e8_threshold_check()?,
        },
        cache: CacheProvenance {
            path: cache.path().map(|p| p.display().to_string()),
            entries_loaded: cache.loaded(),
            hits: entries.iter().filter(|e| e.cache_hit).count(),
            stored,
            discarded: cache.diagnostics(),
        },
        entries,
    })
}
