use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::arith::FactorPolicy;
use crate::error::Result;
use crate::lehmer::{LehmerStatus, LehmerVerdict};

pub const REPORT_SCHEMA: u32 = 1;

/// Outcomes of the Pell identities at one index. `None` marks identities
/// that do not apply (the `P_n - 1` split needs odd `n >= 3`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityChecks {
    pub pq_relation: bool,
    pub minus_one_split: Option<bool>,
    pub nu2_lemma: bool,
    pub nu2_transfer: Option<bool>,
}

impl IdentityChecks {
    pub fn all_hold(&self) -> bool {
        self.pq_relation
            && self.nu2_lemma
            && self.minus_one_split != Some(false)
            && self.nu2_transfer != Some(false)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarvestedFactor {
    #[serde(with = "crate::serde_dec")]
    pub prime: BigUint,
    pub exponent: u32,
    /// `prime mod 4`, recorded for odd `n`.
    pub residue_mod4: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexReport {
    pub n: u64,
    pub pell_digits: usize,
    pub verdict: LehmerVerdict,
    pub identity_checks: IdentityChecks,
    pub factors_found: Vec<HarvestedFactor>,
    /// Decimal digits of the part of `P_n` left unfactored (0 when complete).
    pub cofactor_digits: usize,
    /// Proper divisors `d | n` whose factor evidence seeded this harvest.
    pub seeded_from: Vec<u64>,
    /// Seeds rejected because they did not divide `P_n`; always 0 unless the
    /// seed source is corrupt.
    pub seed_mismatches: usize,
    pub cache_hit: bool,
    /// Wall-clock milliseconds, only when timings were requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl IndexReport {
    /// Whether every harvested factor of an odd-index `P_n` is `1 (mod 4)`.
    pub fn residues_ok(&self) -> bool {
        self.factors_found
            .iter()
            .all(|f| f.residue_mod4.is_none_or(|r| r == 1))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub indices: usize,
    pub not_composite: usize,
    pub rejected: usize,
    pub holds: usize,
    pub undecided: usize,
    pub by_reason: BTreeMap<String, usize>,
    pub identity_failures: usize,
    pub residue_violations: usize,
    pub harvested_factors: usize,
}

impl Summary {
    pub(crate) fn from_entries(entries: &[IndexReport]) -> Self {
        let mut s = Summary {
            indices: entries.len(),
            ..Summary::default()
        };
        for e in entries {
            match e.verdict.status {
                LehmerStatus::NotComposite => s.not_composite += 1,
                LehmerStatus::Rejected => s.rejected += 1,
                LehmerStatus::Holds => s.holds += 1,
                LehmerStatus::Undecided => s.undecided += 1,
            }
            *s.by_reason.entry(e.verdict.reason.to_string()).or_default() += 1;
            s.identity_failures += usize::from(!e.identity_checks.all_hold());
            s.residue_violations += e
                .factors_found
                .iter()
                .filter(|f| f.residue_mod4.is_some_and(|r| r != 1))
                .count();
            s.harvested_factors += e.factors_found.len();
        }
        s
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheProvenance {
    pub path: Option<String>,
    pub entries_loaded: usize,
    pub hits: usize,
    pub stored: usize,
    pub discarded: Vec<String>,
}

/// Certified results of the analytic half of the argument.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofChain {
    pub omega_lower_bound: u32,
    pub final_threshold: u64,
    pub e8_below_3000: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub n_max: u64,
    pub policy: FactorPolicy,
    pub summary: Summary,
    pub proof_chain: ProofChain,
    pub cache: CacheProvenance,
    pub entries: Vec<IndexReport>,
}

impl VerificationReport {
    /// No Lehmer index, nothing undecided, every identity and residue check
    /// passed.
    pub fn is_verified(&self) -> bool {
        let s = &self.summary;
        s.holds == 0 && s.undecided == 0 && s.identity_failures == 0 && s.residue_violations == 0
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// One line per index plus a summary, for terminals.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let timed = self.entries.iter().any(|e| e.elapsed_ms.is_some());
        let _ = write!(
            out,
            "{:>5} {:>6}  {:<13} {:<17} {:>24}  {:<4}",
            "n", "digits", "status", "reason", "evidence", "ids"
        );
        if timed {
            let _ = write!(out, " {:>8}", "ms");
        }
        trim_line(&mut out);
        for e in &self.entries {
            let evidence = e
                .verdict
                .evidence
                .as_ref()
                .map(|p| abbreviate(&p.to_string(), 24))
                .unwrap_or_else(|| "-".into());
            let _ = write!(
                out,
                "{:>5} {:>6}  {:<13} {:<17} {:>24}  {:<4}",
                e.n,
                e.pell_digits,
                e.verdict.status.to_string(),
                e.verdict.reason.to_string(),
                evidence,
                if e.identity_checks.all_hold() {
                    "ok"
                } else {
                    "FAIL"
                },
            );
            if let Some(ms) = e.elapsed_ms {
                let _ = write!(out, " {ms:>8}");
            }
            trim_line(&mut out);
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "\n{} indices: {} not composite, {} rejected, {} Lehmer, {} undecided",
            s.indices, s.not_composite, s.rejected, s.holds, s.undecided
        );
        for (reason, count) in &s.by_reason {
            let _ = writeln!(out, "  {reason:<18} {count}");
        }
        let _ = writeln!(
            out,
            "identity failures: {}, harvested factors: {}, residue violations: {}",
            s.identity_failures, s.harvested_factors, s.residue_violations
        );
        let _ = writeln!(
            out,
            "final threshold n < {}, e^8 < 3000: {}",
            self.proof_chain.final_threshold, self.proof_chain.e8_below_3000
        );
        let _ = writeln!(out, "{} Lehmer, {} undecided", s.holds, s.undecided);
        out
    }
}

fn trim_line(out: &mut String) {
    out.truncate(out.trim_end_matches(' ').len());
    out.push('\n');
}

fn abbreviate(s: &str, width: usize) -> String {
    if s.len() <= width {
        s.to_string()
    } else {
        let keep = (width - 3) / 2;
        format!("{}...{}", &s[..keep], &s[s.len() - keep..])
    }
}
