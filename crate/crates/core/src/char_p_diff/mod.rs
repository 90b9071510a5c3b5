//! Rational functions and differential forms on the projective line over `F_{p^n}`:
//! logarithmic and exact differentials, divisors, residues and certificate checks.

mod field;
mod forms;
mod poly;

pub use field::{FqElt, GaloisField, MAX_FIELD_SIZE};
pub use forms::{dexact, dlog, verify_certificate, CertificateKind, DiffForm, Divisor, EdgeAssignment, Point, RatFunc};
pub use poly::Poly;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharPError {
    #[error("p = {0} is not prime")]
    NotPrime(u32),
    #[error("F_{{{p}^{n}}} is empty or exceeds the supported size")]
    FieldTooLarge { p: u32, n: u32 },
    #[error("zero input")]
    ZeroInput,
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("a factor of degree {0} does not split over the working field; enlarge n")]
    UnsplitFactor(usize),
}
