use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArborError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("matrix has determinant {0}, expected 1")]
    DeterminantNotOne(String),
    #[error("isometries over different primes ({0} and {1})")]
    MixedPrimes(u64, u64),
    #[error("a tuple needs at least one element")]
    EmptyTuple,
    #[error("tuples of size {0} exceed the supported maximum of {max}", max = crate::descent::MAX_TUPLE)]
    TupleTooLarge(usize),
    #[error("invalid replacement: {0}")]
    InvalidReplacement(String),
    #[error("element is not elliptic (translation length {0})")]
    NotElliptic(u64),
    #[error("element is not hyperbolic")]
    NotHyperbolic,
    #[error("element {0} of the tuple is not hyperbolic")]
    ElementNotHyperbolic(usize),
    #[error("axis overlap not resolved within cutoff radius {0}")]
    OverlapBeyondCutoff(i64),
    #[error("inconsistent product lengths: l1={l1}, l2={l2}, l(g1g2)={prod}, l(g1g2^-1)={prod_inv}")]
    InconsistentLengths {
        l1: u64,
        l2: u64,
        prod: u64,
        prod_inv: u64,
    },
    #[error("word letter {0} does not name a generator")]
    BadLetter(i64),
    #[error("invalid input at {path}: {message}")]
    Input { path: String, message: String },
}

pub type Result<T, E = ArborError> = std::result::Result<T, E>;
