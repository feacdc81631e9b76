//! Command-line front end for `pell-lehmer`.
//!
//! Exit status: 0 when the requested check passed, 1 when it failed or could
//! not be decided, 2 for invalid arguments. Reports go to stdout, diagnostics
//! to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use pell_lehmer::identities::{nu2_lemma_holds, nu2_transfer, pq_relation_holds};
use pell_lehmer::verifier::{verify_range_with, VerifyOptions, DEFAULT_N_MAX, MIN_BOUND_INDEX};
use pell_lehmer::{
    bound_chain, factor, lehmer_check, pell_pair, split_pell_minus_one, BoundReport, Error,
    FactorCache, FactorPolicy, Factorization, LehmerStatus,
};

/// Environment variable naming the default factor cache file.
pub const CACHE_ENV: &str = "PELL_LEHMER_CACHE";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Failed = 1,
    Usage = 2,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Human,
    /// Pretty-printed JSON.
    Structured,
}

#[derive(Debug, Parser)]
#[command(
    name = "pell-lehmer",
    version,
    about = "Check that no Pell number is a Lehmer number"
)]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    pub format: Format,

    /// Largest index any command will accept.
    #[arg(long, default_value_t = 1_000_000, global = true)]
    pub max_index: u64,

    #[command(flatten)]
    pub policy: PolicyArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct PolicyArgs {
    /// Largest prime used for trial division.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(2..))]
    pub trial_bound: Option<u64>,
    /// Rho iterations per split attempt.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub rho_budget: Option<u64>,
    /// Rho iterations across all attempts on one number.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_total: Option<u64>,
    /// Seed for rho starting points.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

impl PolicyArgs {
    pub fn policy(&self) -> FactorPolicy {
        let d = FactorPolicy::default();
        FactorPolicy {
            trial_bound: self.trial_bound.unwrap_or(d.trial_bound),
            rho_budget: self.rho_budget.unwrap_or(d.rho_budget),
            max_total: self.max_total.unwrap_or(d.max_total),
            seed: self.seed.unwrap_or(d.seed),
        }
    }
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Target {
    /// An explicit number.
    #[arg(long, value_parser = parse_biguint)]
    pub value: Option<BigUint>,
    /// The Pell number with this index.
    #[arg(long)]
    pub pell: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print P_n (or Q_n).
    Pell {
        #[arg(long)]
        n: u64,
        /// Print the companion Q_n instead.
        #[arg(long)]
        lucas: bool,
    },
    /// Factor a number within the policy budget.
    Factor {
        #[command(flatten)]
        target: Target,
    },
    /// Decide whether a number is a Lehmer number.
    Lehmer {
        #[command(flatten)]
        target: Target,
    },
    /// Check the Pell identities for every index up to n_max.
    Identities {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n_max: u64,
    },
    /// Verify that no P_n with n <= n_max is a Lehmer number.
    Verify {
        #[arg(long, default_value_t = DEFAULT_N_MAX, value_parser = clap::value_parser!(u64).range(1..))]
        n_max: u64,
        /// Factor cache file, read before and written after the run.
        #[arg(long, env = CACHE_ENV)]
        cache: Option<PathBuf>,
        /// Ignore any cache file, including one named in the environment.
        #[arg(long, conflicts_with = "cache")]
        no_cache: bool,
        /// Worker threads (defaults to one per core).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        jobs: Option<u64>,
        /// Verify one index at a time.
        #[arg(long, conflicts_with = "jobs")]
        sequential: bool,
        /// Record per-index wall-clock time. Reports are then not reproducible.
        #[arg(long)]
        timings: bool,
    },
    /// Evaluate the inequality chain for index n under omega(P_n) = k.
    Bounds {
        #[arg(long)]
        n: u64,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=62))]
        k: u32,
    },
}

fn parse_biguint(s: &str) -> Result<BigUint, String> {
    BigUint::from_str(s.trim()).map_err(|e| format!("not a non-negative integer: {e}"))
}

struct Failure {
    exit: Exit,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            exit: Exit::Usage,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let exit = match e {
            Error::Precondition(_) => Exit::Usage,
            _ => Exit::Failed,
        };
        Failure {
            exit,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            exit: Exit::Failed,
            message: e.to_string(),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure {
            exit: Exit::Failed,
            message: e.to_string(),
        }
    }
}

type Outcome = std::result::Result<Exit, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn main_with(
    args: impl IntoIterator<Item = impl Into<OsString> + Clone>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Exit {
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, out, err),
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                Exit::Usage
            } else {
                // --help and --version
                let _ = write!(out, "{}", e.render());
                Exit::Ok
            }
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Exit {
    match dispatch(cli, out, err) {
        Ok(exit) => exit,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.exit
        }
    }
}

fn check_index(flag: &str, n: u64, cap: u64) -> Result<(), Failure> {
    if n > cap {
        return Err(Failure::usage(format!(
            "{flag} {n} exceeds --max-index {cap}"
        )));
    }
    Ok(())
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let policy = cli.policy.policy();
    policy.validate()?;
    let cap = cli.max_index;
    match &cli.command {
        Command::Pell { n, lucas } => {
            check_index("--n", *n, cap)?;
            let pair = pell_pair(*n);
            match cli.format {
                Format::Structured => emit_json(out, &pair)?,
                Format::Human => writeln!(out, "{}", if *lucas { &pair.q } else { &pair.p })?,
            }
            Ok(Exit::Ok)
        }
        Command::Factor { target } => {
            let n = resolve(target, cap)?;
            let f = factor(&n, &policy)?;
            match cli.format {
                Format::Structured => emit_json(out, &f)?,
                Format::Human => writeln!(out, "{}", render_factorization(&f))?,
            }
            Ok(if f.is_complete() {
                Exit::Ok
            } else {
                Exit::Failed
            })
        }
        Command::Lehmer { target } => {
            let n = resolve(target, cap)?;
            let verdict = lehmer_check(&n, &policy)?;
            match cli.format {
                Format::Structured => emit_json(out, &verdict)?,
                Format::Human => {
                    write!(
                        out,
                        "{}: {} ({}",
                        verdict.target, verdict.status, verdict.reason
                    )?;
                    if let Some(e) = &verdict.evidence {
                        write!(out, ", evidence {e}")?;
                    }
                    writeln!(out, ")")?;
                }
            }
            Ok(match verdict.status {
                LehmerStatus::NotComposite | LehmerStatus::Rejected => Exit::Ok,
                LehmerStatus::Holds | LehmerStatus::Undecided => Exit::Failed,
            })
        }
        Command::Identities { n_max } => {
            check_index("--n-max", *n_max, cap)?;
            let report = identity_suite(*n_max)?;
            match cli.format {
                Format::Structured => emit_json(out, &report)?,
                Format::Human => write!(out, "{}", report.render())?,
            }
            Ok(if report.all_pass() {
                Exit::Ok
            } else {
                Exit::Failed
            })
        }
        Command::Verify {
            n_max,
            cache,
            no_cache,
            jobs,
            sequential,
            timings,
        } => {
            check_index("--n-max", *n_max, cap)?;
            let cache = match cache.as_ref().filter(|_| !no_cache) {
                Some(path) => FactorCache::open(path)?,
                None => FactorCache::in_memory(),
            };
            let options = VerifyOptions {
                timings: *timings,
                parallel: !sequential,
            };
            let report = match jobs {
                Some(j) => rayon::ThreadPoolBuilder::new()
                    .num_threads(*j as usize)
                    .build()
                    .map_err(|e| Failure::usage(format!("--jobs {j}: {e}")))?
                    .install(|| verify_range_with(*n_max, &policy, &cache, &options))?,
                None => verify_range_with(*n_max, &policy, &cache, &options)?,
            };
            for line in &report.cache.discarded {
                writeln!(err, "warning: discarded cache entry: {line}")?;
            }
            cache.save()?;
            match cli.format {
                Format::Structured => writeln!(out, "{}", report.to_json()?)?,
                Format::Human => write!(out, "{}", report.render_table())?,
            }
            Ok(if report.is_verified() {
                Exit::Ok
            } else {
                Exit::Failed
            })
        }
        Command::Bounds { n, k } => {
            check_index("--n", *n, cap)?;
            if *n < MIN_BOUND_INDEX {
                return Err(Failure::usage(format!(
                    "--n {n} is below {MIN_BOUND_INDEX}, where log log n is too small for the chain"
                )));
            }
            let report = bound_chain(*n, *k)?;
            match cli.format {
                Format::Structured => emit_json(out, &report)?,
                Format::Human => write!(out, "{}", render_bounds(&report))?,
            }
            Ok(Exit::Ok)
        }
    }
}

fn resolve(target: &Target, cap: u64) -> Result<BigUint, Failure> {
    match (&target.value, target.pell) {
        (Some(v), _) => Ok(v.clone()),
        (None, Some(n)) => {
            check_index("--pell", n, cap)?;
            Ok(pell_pair(n).p)
        }
        (None, None) => Err(Failure::usage("one of --value or --pell is required")),
    }
}

fn render_factorization(f: &Factorization) -> String {
    let mut parts: Vec<String> = f
        .factors()
        .iter()
        .map(|pp| match pp.exponent {
            1 => pp.prime.to_string(),
            e => format!("{}^{e}", pp.prime),
        })
        .collect();
    if !f.is_complete() {
        parts.push(format!("[{} unfactored]", f.cofactor()));
    }
    if parts.is_empty() {
        parts.push("1".into());
    }
    format!("{} = {}", f.target(), parts.join(" * "))
}

fn render_bounds(r: &BoundReport) -> String {
    let yes_no = |b: bool| if b { "holds" } else { "fails" };
    let mut s = format!("n = {}, K = {}\n", r.n, r.k);
    match (&r.pomerance_rhs_digits, r.pomerance_admits_pell) {
        (Some(d), Some(ok)) => s += &format!("  P_n < K^(2^K) ({d} digits): {}\n", yes_no(ok)),
        (None, Some(ok)) => s += &format!("  P_n < K^(2^K) (by bit length): {}\n", yes_no(ok)),
        (_, None) => s += "  P_n < K^(2^K): not settled\n",
    }
    s += &format!("  2^K log K > n/3: {}\n", yes_no(r.ineq_a_holds));
    s += &format!("  2^K > n/(4 log log n): {}\n", yes_no(r.ineq_b_holds));
    let t = &r.two_power_requirement;
    match (t.halves, t.best_valuation) {
        (Some((lo, hi)), Some(v)) => {
            s += &format!(
                "  2^{} must divide {lo} or {hi}; best 2-adic valuation is {v}: {}\n",
                t.exponent,
                yes_no(t.satisfiable)
            )
        }
        _ => {
            s += &format!(
                "  2^{} must divide (n-1)/2 or (n+1)/2: fails, n is even\n",
                t.exponent
            )
        }
    }
    if !t.satisfiable {
        s += &format!(
            "  contradiction: 2^{} divides neither half at n = {} (first possible at n = {})\n",
            t.exponent, r.n, t.smallest_admissible_n
        );
    }
    s += &format!(
        "  n^2 < 16(n+1)(log log n)^2 only for n < {}: {}\n",
        r.final_threshold,
        yes_no(r.n < r.final_threshold)
    );
    s += &format!(
        "hypothesis omega(P_{}) = {} is {}\n",
        r.n,
        r.k,
        if r.consistent() {
            "consistent"
        } else {
            "contradictory"
        }
    );
    s
}

/// Outcome of every identity check for `1..=n_max`; each list holds the
/// failing indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub n_max: u64,
    pub pq_relation: SuiteResult,
    pub minus_one_split: SuiteResult,
    pub nu2_lemma: SuiteResult,
    pub nu2_transfer: SuiteResult,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub checked: u64,
    pub failures: Vec<u64>,
}

impl SuiteResult {
    fn record(&mut self, n: u64, ok: bool) {
        self.checked += 1;
        if !ok {
            self.failures.push(n);
        }
    }
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        [
            &self.pq_relation,
            &self.minus_one_split,
            &self.nu2_lemma,
            &self.nu2_transfer,
        ]
        .iter()
        .all(|s| s.failures.is_empty())
    }

    fn render(&self) -> String {
        let mut s = String::new();
        for (name, r) in [
            ("Q_n^2 - 8 P_n^2 = 4(-1)^n", &self.pq_relation),
            ("P_n - 1 = P_a Q_b", &self.minus_one_split),
            ("nu2(Q_n) = 1, nu2(P_n) = nu2(n)", &self.nu2_lemma),
            ("nu2(P_n - 1) = nu2(n - e)", &self.nu2_transfer),
        ] {
            s += &format!(
                "{name:<34} {:>6} checked, {} failed\n",
                r.checked,
                r.failures.len()
            );
            if !r.failures.is_empty() {
                s += &format!("  failing n: {:?}\n", r.failures);
            }
        }
        s
    }
}

pub fn identity_suite(n_max: u64) -> Result<IdentityReport, Error> {
    let mut report = IdentityReport {
        n_max,
        ..IdentityReport::default()
    };
    for n in 1..=n_max {
        let pair = pell_pair(n);
        report.pq_relation.record(n, pq_relation_holds(&pair));
        report.nu2_lemma.record(n, nu2_lemma_holds(&pair)?);
        if n % 2 == 1 && n >= 3 {
            report
                .minus_one_split
                .record(n, split_pell_minus_one(n).is_ok());
            report
                .nu2_transfer
                .record(n, nu2_transfer(n).is_ok_and(|(lhs, rhs)| lhs == rhs));
        }
    }
    Ok(report)
}
