//! Exact arithmetic in `K = Q(ζ_p)(π)` with `π^N = ζ - 1`, truncated Laurent series over its
//! valuation ring, and the boundary normal forms of order-p automorphisms.
//!
//! Valuations are normalized by `v(π) = 1`, so `v(λ) = N` and `v(p) = N(p-1)` for `λ = ζ - 1`.

mod automorphism;
mod elt;
mod series;

pub use automorphism::{BoundaryAutomorphism, BoundaryKind, SeriesPrecision};
pub use elt::{Ramification, RamifiedElt};
pub use series::BoundarySeries;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("p = {0} is not prime")]
    NotPrime(u32),
    #[error("ramification index must be positive")]
    ZeroRamification,
    #[error("operands live in different fields")]
    FieldMismatch,
    #[error("series has no stored terms within the cutoffs")]
    AllTermsTruncated,
    #[error("series is not a principal unit: {0}")]
    NotPrincipalUnit(String),
    #[error("conductor parameter m = {0} is divisible by p or zero")]
    BadConductor(i64),
    #[error("level n = {n} is outside (0, {ram}]")]
    BadLevel { n: i64, ram: u32 },
    #[error("residue parameter h = {0} vanishes in F_p")]
    BadResidue(i64),
    #[error("series coefficient of negative valuation at Z^{0}")]
    NonIntegral(i64),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("rho = {0} lies outside the region where the series is known to converge")]
    OutsideConvergence(String),
}
