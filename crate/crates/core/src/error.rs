use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    InvalidParameter(&'static str),
    NotPrime(u64),
    DimensionMismatch { expected: usize, found: usize },
    CellOutOfRange,
    NotACycle,
    NotInComplex,
    RequiresTorus,
    Unsupported(&'static str),
    TooLarge { cells: usize, limit: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::NotPrime(q) => write!(f, "{q} is not prime"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::CellOutOfRange => write!(f, "cell outside the complex"),
            Error::NotACycle => write!(f, "chain is not a cycle"),
            Error::NotInComplex => write!(f, "chain is not supported on the subcomplex"),
            Error::RequiresTorus => write!(f, "operation requires a torus"),
            Error::Unsupported(what) => write!(f, "unsupported: {what}"),
            Error::TooLarge { cells, limit } => {
                write!(f, "enumeration over {cells} free cells exceeds limit {limit}")
            }
        }
    }
}
