use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("not a unit")]
    NotAUnit,
    #[error("zero input")]
    Zero,
    #[error("precision exhausted")]
    PrecisionExhausted,
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid parameter: {0}")]
    Invalid(String),
    #[error("central sign mismatch")]
    CentralSign,
    #[error("reducible: use Steinberg/EvenWeil")]
    Reducible,
    #[error("not in K^{eps}: {detail}")]
    NotInCompact { eps: u8, detail: String },
    #[error("outside truncated model")]
    OutsideModel,
    #[error("odd character")]
    OddCharacter,
    #[error("not generic for the requested character")]
    NotGeneric,
    #[error("genericity undetermined")]
    Undetermined,
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("no stabilization: {0}")]
    NoStabilization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
