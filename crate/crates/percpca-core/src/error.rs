use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A neighbourhood needs at least one offset.
    #[error("neighbourhood must contain at least one offset")]
    EmptyNeighborhood,

    /// A ring site index outside `[[-n, n-1]]`.
    #[error("site {site} outside the ring [[-{n}, {n}-1]]")]
    SiteOutOfRange { site: i64, n: i64 },

    /// The evolution cone (or a massif scan) left the represented window.
    #[error("evolution cone leaves the window [[{lo}, {hi}]]")]
    ConeViolation { lo: i64, hi: i64 },

    /// An exact-enumeration guard was exceeded. Guards are hard errors: an
    /// oracle that silently truncates is not an oracle.
    #[error("{what} = {got} exceeds the enumeration guard {limit}")]
    GuardExceeded {
        what: &'static str,
        got: u64,
        limit: u64,
    },

    /// A probability parameter outside its admissible range.
    #[error("{name} = {value} outside {range}")]
    Domain {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    /// Root bracketing failed (no sign change over the search interval).
    #[error("bisection bracket has no sign change")]
    NoBracket,

    /// Coupled runs require nested neighbourhoods.
    #[error("neighbourhoods are not nested")]
    NotNested,

    /// A positive integer parameter was zero.
    #[error("{name} must be >= 1")]
    ZeroSize { name: &'static str },

    /// The initial configuration does not hold a single live zero-massif.
    #[error("initial configuration must hold exactly one zero-massif of length > span, away from the window edges")]
    InvalidMassif,

    /// An iteration cap was reached before the requested precision.
    #[error("no convergence within {cap} iterations")]
    NoConvergence { cap: u64 },
}

pub type Result<T> = core::result::Result<T, Error>;
