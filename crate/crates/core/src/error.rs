use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("symbol count k = {0} must be at least 2")]
    SymbolCount(usize),
    #[error("basis of {size} cylinders at depth {depth} exceeds the cap of {cap}")]
    BasisTooLarge { depth: usize, size: u128, cap: usize },
    #[error("value table has {got} entries, expected {expected} for depth {depth}")]
    TableLength {
        depth: usize,
        expected: usize,
        got: usize,
    },
    #[error("symbol counts differ: {0} vs {1}")]
    SymbolMismatch(usize, usize),
    #[error("word has {got} symbols but at least {expected} are needed")]
    WordTooShort { expected: usize, got: usize },
    #[error("symbol {0} outside 1..={1}")]
    BadSymbol(u32, usize),
    #[error("a depth-{measure} measure cannot integrate a depth-{function} function")]
    MeasureDepth { measure: usize, function: usize },
    #[error("masses must be nonnegative with total mass 1, found total {total}")]
    BadMass { total: f64 },
    #[error("values must be strictly positive, found minimum {0}")]
    NotPositive(f64),
    #[error("power iteration stalled after {iterations} steps, residual {residual:.3e}")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("jacobian is not normalized: sup |L_p 1 - 1| = {0:.3e}")]
    NotNormalized(f64),
    #[error(
        "term (f depth {f_depth}, level {level}, g depth {g_depth}) \
         exceeds the depth-{depth} working budget"
    )]
    DepthBudget {
        f_depth: usize,
        level: usize,
        g_depth: usize,
        depth: usize,
    },
    #[error("series exponent {0} must exceed 1 for convergence")]
    SeriesDiverges(f64),
    #[error("atom table has {got} entries but only {max} atoms are resolved")]
    AtomTable { got: usize, max: usize },
    #[error("{0}")]
    Domain(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("tolerance exceeded: {0}")]
    Tolerance(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Exit code the command-line front end maps this error to.
    /// Config problems exit with 2, tolerance failures with 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Tolerance(_) => 1,
            _ => 2,
        }
    }
}
