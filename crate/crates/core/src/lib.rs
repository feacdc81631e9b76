//! Exact arithmetic on the Pell numbers `P_n` and their companions `Q_n`, and
//! the machinery needed to check, index by index, that no Pell number is a
//! Lehmer number (a composite `N` with `phi(N) | N - 1`).
//!
//! The crate is organised bottom-up:
//!
//! * [`sequences`] computes `P_n`, `Q_n` exactly by fast doubling and by plain
//!   iteration (the two paths check each other).
//! * [`arith`] holds primality, budgeted factorization, totient, `omega` and
//!   p-adic valuations.
//! * [`identities`] turns the classical Pell identities into predicates.
//! * [`lehmer`] is the staged Lehmer-property decision procedure.
//! * [`interval`] provides outward-rounded interval arithmetic used to decide
//!   the transcendental inequalities of the non-existence argument.
//! * [`verifier`] orchestrates per-index verification, the bound chain, and
//!   the on-disk factor cache.

#![allow(clippy::manual_div_ceil)]

pub mod arith;
pub mod error;
pub mod identities;
pub mod interval;
pub mod lehmer;
pub mod sequences;
pub mod verifier;

mod serde_dec;

pub use arith::{
    euler_phi, factor, is_probable_prime, is_squarefree, nu2, nu_p, omega, FactorPolicy,
    Factorization, Squarefree,
};
pub use error::{Error, Result};
pub use identities::{
    check_nu2_lemma, check_pq_relation, residue_mod4_of_factor, split_pell_minus_one,
    PellMinusOneSplit,
};
pub use lehmer::{lehmer_check, witness_reject, LehmerReason, LehmerStatus, LehmerVerdict};
pub use sequences::{pell_iterative, pell_lucas_iterative, pell_pair, size_bound_holds, PellPair};
pub use verifier::{
    bound_chain, e8_threshold_check, final_threshold, verify_index, verify_range, BoundReport,
    FactorCache, IndexReport, VerificationReport,
};

/// Arbitrary-precision non-negative integer used for every sequence value.
pub type BigNat = num_bigint::BigUint;
