//! Integer machinery: primality, budgeted factorization, totient, omega and
//! p-adic valuations.

mod factor;
mod primality;
mod totient;
mod valuation;

pub use factor::{factor, factor_with, FactorPolicy, Factorization, PrimePower};
pub use primality::is_probable_prime;
pub use totient::{euler_phi, omega};
pub use valuation::{is_squarefree, nu2, nu_p, Squarefree};

pub(crate) use primality::rem_u64;
