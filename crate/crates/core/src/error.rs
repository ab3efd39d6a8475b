use thiserror::Error;

/// Failures of the residue, p-adic and special-value arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("{a} is not invertible modulo {m}")]
    NotInvertible { a: u64, m: u64 },
    #[error("prime {p} divides the base {b}")]
    DividesBase { b: i64, p: u64 },
    #[error("no fraction with |n|, d <= {bound} matches {residue} modulo {modulus}")]
    NoReconstruction {
        residue: String,
        modulus: String,
        bound: String,
    },
    #[error("reconstruction bound must be positive")]
    InvalidBound,
    #[error("{0} is not a supported odd prime")]
    InvalidPrime(u64),
    #[error("unsupported modulus exponent {0}")]
    InvalidExponent(u32),
    #[error("value with valuation {val} is not p-integral")]
    NotPIntegral { val: i32 },
    #[error("division by the zero value")]
    DivisionByZeroValue,
    #[error("binomial ({n} choose {k}) outside the factorial table of length {len}")]
    OutOfRange { n: i64, k: i64, len: usize },
    #[error("floor-binomial top {top} is not below p = {p}")]
    TopOutOfRange { top: i64, p: u64 },
    #[error("recurrence produced a non-integer at index {n}")]
    NonIntegral { n: usize },
    #[error("x = {x} is even; cannot normalize to x ≡ 1 (mod 4)")]
    NormalizationImpossible { x: i64 },
    #[error("{what} is undefined at p = {p}")]
    PrimeClassMismatch { what: &'static str, p: u64 },
}

/// A registry source error with its 1-based location.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

/// Failures while evaluating a case at one prime.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("symbol `{0}` is not bound by the case condition")]
    UnboundSymbol(&'static str),
    #[error("sum `{0}` is not defined in this conjecture")]
    UnknownSum(String),
    #[error("exponent {0} is not supported for this operand")]
    BadExponent(i64),
}

/// Failures that abort a whole verification run.
#[derive(Debug, Error)]
pub enum RunError {
    #[error("registry: {0}")]
    Parse(#[from] ParseError),
    #[error("invalid prime range {lo}..{hi}: need 3 <= lo <= hi < 2^20")]
    InvalidRange { lo: u64, hi: u64 },
    #[error("invalid filter pattern: {0}")]
    Filter(String),
    #[error("worker pool: {0}")]
    Pool(String),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
}

/// Failures of constant fitting.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FitError {
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("need at least {need} qualifying primes, got {got}")]
    NotEnoughPrimes { need: usize, got: usize },
    #[error("at p = {p} the product is not divisible by p^2")]
    NotDivisible { p: u64 },
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("primes disagree: {}", .0.join("; "))]
    Inconsistent(Vec<String>),
}
