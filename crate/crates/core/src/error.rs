use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("lattice is not closed under multiplication: e{0} * e{1} escapes")]
    NotARing(usize, usize),
    #[error("lattice does not contain 1")]
    NoUnity,
    #[error("unsupported base order: {0}")]
    UnsupportedBaseOrder(String),
    #[error("local result at p = {p} changed between precision {k1} and {k2}")]
    PrecisionUnstable { p: u64, k1: u32, k2: u32 },
    #[error("search inconclusive at p = {0}")]
    SearchInconclusive(u64),
    #[error("ideal is not locally principal at p = {0}")]
    NotLocallyPrincipal(u64),
    #[error("the algebra is indefinite")]
    IndefiniteAlgebra,
    #[error("quadratic field Q(sqrt {0}) does not embed into the algebra")]
    NotEmbeddable(i64),
    #[error("orders are not in the same genus: {0}")]
    NotSameGenus(String),
    #[error("local embedding condition fails at p = {0}")]
    ConditionStarFails(u64),
    #[error("no reference order with an optimal embedding")]
    NoReferenceOrder,
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("mass shortfall: achieved {achieved} of {target}")]
    MassShortfall { achieved: String, target: String },
    #[error("verification mismatch: {0}")]
    Mismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
