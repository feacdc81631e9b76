//! On-disk store of factor evidence for `P_n`, one record per line:
//!
//! ```text
//! # pell-lehmer factor cache v1
//! 9 5^1 197^1 cofactor=1 complete=1
//! 73 cofactor=<P_73> complete=0
//! ```
//!
//! Lines are parsed eagerly but validated against `P_n` only when loaded;
//! entries that fail either step are reported and discarded.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::{Mutex, RwLock};

use num_bigint::BigUint;

use crate::arith::{Factorization, PrimePower};
use crate::error::{Error, Result};
use crate::sequences::pell_pair;

pub const CACHE_HEADER: &str = "# pell-lehmer factor cache v1";

/// A parsed but not yet validated record.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Record {
    factors: Vec<PrimePower>,
    cofactor: BigUint,
    complete: bool,
}

impl Record {
    fn from_factorization(f: &Factorization) -> Self {
        Record {
            factors: f.factors().to_vec(),
            cofactor: f.cofactor().clone(),
            complete: f.is_complete(),
        }
    }

    fn render(&self, n: u64) -> String {
        let mut line = n.to_string();
        for pp in &self.factors {
            line.push_str(&format!(" {}^{}", pp.prime, pp.exponent));
        }
        line.push_str(&format!(
            " cofactor={} complete={}",
            self.cofactor,
            u8::from(self.complete)
        ));
        line
    }

    fn validate(&self, n: u64) -> Result<Factorization> {
        let target = pell_pair(n).p;
        let f = Factorization::new(target, self.factors.clone(), self.cofactor.clone()).map_err(
            |e| Error::CacheEntry {
                n,
                reason: e.to_string(),
            },
        )?;
        if f.is_complete() != self.complete {
            return Err(Error::CacheEntry {
                n,
                reason: "complete flag disagrees with cofactor".into(),
            });
        }
        Ok(f)
    }
}

fn parse_line(line: &str) -> std::result::Result<(u64, Record), String> {
    let mut tokens = line.split_whitespace();
    let n = tokens
        .next()
        .ok_or("empty record")?
        .parse::<u64>()
        .map_err(|e| format!("bad index: {e}"))?;
    let mut factors = Vec::new();
    let mut cofactor = None;
    let mut complete = None;
    for token in tokens {
        if let Some(v) = token.strip_prefix("cofactor=") {
            if cofactor.is_some() || complete.is_some() {
                return Err("cofactor out of place".into());
            }
            cofactor = Some(BigUint::from_str(v).map_err(|e| format!("bad cofactor: {e}"))?);
        } else if let Some(v) = token.strip_prefix("complete=") {
            if cofactor.is_none() || complete.is_some() {
                return Err("complete flag out of place".into());
            }
            complete = Some(match v {
                "0" => false,
                "1" => true,
                other => return Err(format!("bad complete flag {other:?}")),
            });
        } else if let Some((p, e)) = token.split_once('^') {
            if cofactor.is_some() {
                return Err("factor after cofactor".into());
            }
            factors.push(PrimePower {
                prime: BigUint::from_str(p).map_err(|e| format!("bad prime {p:?}: {e}"))?,
                exponent: e.parse().map_err(|e| format!("bad exponent: {e}"))?,
            });
        } else {
            return Err(format!("unknown token {token:?}"));
        }
    }
    Ok((
        n,
        Record {
            factors,
            cofactor: cofactor.ok_or("missing cofactor")?,
            complete: complete.ok_or("missing complete flag")?,
        },
    ))
}

/// Factor evidence keyed by Pell index. Reads may run concurrently; writes
/// are serialized.
#[derive(Debug, Default)]
pub struct FactorCache {
    path: Option<PathBuf>,
    records: RwLock<BTreeMap<u64, Record>>,
    diagnostics: Mutex<Vec<String>>,
    loaded: usize,
}

impl FactorCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Opens the cache file at `path`; a missing file yields an empty cache.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let text = match fs::read_to_string(&path) {
            Ok(text) => text,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => String::new(),
            Err(e) => return Err(e.into()),
        };
        let mut cache = Self::parse(&text, &path);
        cache.path = Some(path);
        Ok(cache)
    }

    fn parse(text: &str, path: &Path) -> Self {
        let mut records = BTreeMap::new();
        let mut diagnostics = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match parse_line(line) {
                Ok((n, record)) => {
                    records.insert(n, record);
                }
                Err(reason) => diagnostics.push(
                    Error::CacheFormat {
                        path: path.to_path_buf(),
                        line: i + 1,
                        reason,
                    }
                    .to_string(),
                ),
            }
        }
        FactorCache {
            path: None,
            loaded: records.len(),
            records: RwLock::new(records),
            diagnostics: Mutex::new(diagnostics),
        }
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    /// Records successfully parsed when the cache was opened.
    pub fn loaded(&self) -> usize {
        self.loaded
    }

    pub fn len(&self) -> usize {
        self.records.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Problems found while parsing or validating, in the order they occurred.
    pub fn diagnostics(&self) -> Vec<String> {
        self.diagnostics.lock().expect("cache lock").clone()
    }

    /// Stores `f` as the evidence for `P_n`, checking that it factors `P_n`.
    pub fn store(&self, n: u64, f: &Factorization) -> Result<()> {
        if f.target() != &pell_pair(n).p {
            return Err(Error::CacheEntry {
                n,
                reason: "factorization target is not P_n".into(),
            });
        }
        self.records
            .write()
            .expect("cache lock")
            .insert(n, Record::from_factorization(f));
        Ok(())
    }

    /// Loads and re-validates the evidence for `P_n`. An entry that does not
    /// multiply back to `P_n`, or lists a non-prime, is dropped and reported
    /// as an error.
    pub fn load(&self, n: u64) -> Result<Option<Factorization>> {
        let record = self.records.read().expect("cache lock").get(&n).cloned();
        let Some(record) = record else {
            return Ok(None);
        };
        match record.validate(n) {
            Ok(f) => Ok(Some(f)),
            Err(e) => {
                self.records.write().expect("cache lock").remove(&n);
                self.diagnostics
                    .lock()
                    .expect("cache lock")
                    .push(e.to_string());
                Err(e)
            }
        }
    }

    /// The cache in its file format.
    pub fn render(&self) -> String {
        let records = self.records.read().expect("cache lock");
        let mut out = String::from(CACHE_HEADER);
        out.push('\n');
        for (n, record) in records.iter() {
            out.push_str(&record.render(*n));
            out.push('\n');
        }
        out
    }

    /// Writes the cache back to its file, if it has one.
    pub fn save(&self) -> Result<()> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        let tmp = path.with_extension("tmp");
        {
            let mut file = fs::File::create(&tmp)?;
            file.write_all(self.render().as_bytes())?;
            file.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Inserts a raw line, bypassing [`store`](Self::store)'s check. Used to
    /// model externally edited cache files.
    #[doc(hidden)]
    pub fn insert_raw_line(&self, line: &str) -> std::result::Result<(), String> {
        let (n, record) = parse_line(line)?;
        self.records.write().expect("cache lock").insert(n, record);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{factor, FactorPolicy};

    #[test]
    fn store_then_load() {
        let cache = FactorCache::in_memory();
        let f = factor(&pell_pair(9).p, &FactorPolicy::default()).unwrap();
        cache.store(9, &f).unwrap();
        let back = cache.load(9).unwrap().unwrap();
        assert_eq!(back, f);
        let primes: Vec<String> = back.primes().map(|p| p.to_string()).collect();
        assert_eq!(primes, ["5", "197"]);
        assert!(back.is_complete());
    }

    #[test]
    fn missing_index_is_absent() {
        assert_eq!(FactorCache::in_memory().load(11).unwrap(), None);
    }

    #[test]
    fn tampered_entry_is_rejected_and_dropped() {
        let cache = FactorCache::in_memory();
        cache
            .insert_raw_line("9 5^1 196^1 cofactor=1 complete=1")
            .unwrap();
        assert!(matches!(cache.load(9), Err(Error::CacheEntry { n: 9, .. })));
        assert_eq!(cache.load(9).unwrap(), None);
        assert_eq!(cache.diagnostics().len(), 1);
    }

    #[test]
    fn wrong_complete_flag_is_rejected() {
        let cache = FactorCache::in_memory();
        cache
            .insert_raw_line("9 5^1 cofactor=197 complete=1")
            .unwrap();
        assert!(cache.load(9).is_err());
    }

    #[test]
    fn store_rejects_foreign_target() {
        let cache = FactorCache::in_memory();
        let f = factor(&BigUint::from(984u32), &FactorPolicy::default()).unwrap();
        assert!(cache.store(9, &f).is_err());
    }

    #[test]
    fn parse_rejects_unknown_lines() {
        let text =
            "# header\n9 5^1 197^1 cofactor=1 complete=1\nhello world\n7 13^2 cofactor=1\n\n";
        let cache = FactorCache::parse(text, Path::new("x"));
        assert_eq!(cache.len(), 1);
        let diags = cache.diagnostics();
        assert_eq!(diags.len(), 2);
        assert!(diags[0].contains("x:3"), "{}", diags[0]);
        assert!(diags[1].contains("missing complete flag"), "{}", diags[1]);
    }

    #[test]
    fn line_format_is_stable() {
        let cache = FactorCache::in_memory();
        let f = factor(&pell_pair(7).p, &FactorPolicy::default()).unwrap();
        cache.store(7, &f).unwrap();
        assert_eq!(
            cache.render(),
            format!("{CACHE_HEADER}\n7 13^2 cofactor=1 complete=1\n")
        );
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("factors.txt");
        let cache = FactorCache::open(&path).unwrap();
        assert!(cache.is_empty());
        for n in [7, 9, 15] {
            let f = factor(&pell_pair(n).p, &FactorPolicy::default()).unwrap();
            cache.store(n, &f).unwrap();
        }
        cache.save().unwrap();
        let reopened = FactorCache::open(&path).unwrap();
        assert_eq!(reopened.loaded(), 3);
        assert_eq!(reopened.render(), cache.render());
        assert!(reopened.diagnostics().is_empty());
    }
}
