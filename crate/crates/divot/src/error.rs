//! Error variants shared across the crate.

use thiserror::Error;

/// Everything that can go wrong constructing or solving an instance.
#[derive(Debug, Error)]
pub enum Error {
    /// Unknown divergence selection string.
    #[error("unknown divergence `{0}` (expected kl, reverse_kl, jensen_shannon, hellinger_sq, or alpha:<value>)")]
    UnknownGenerator(String),

    /// α-family parameter outside the open interval (0, 1).
    #[error("alpha parameter must lie strictly in (0, 1), got {0}")]
    InvalidAlpha(f64),

    /// Matrix built from no rows or no columns.
    #[error("matrix must have at least one row and one column")]
    EmptyMatrix,

    /// Nested-row input with inconsistent row lengths.
    #[error("row {row} has {got} entries, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        got: usize,
    },

    /// A marginal entry is zero, negative, or non-finite.
    #[error("marginal `{which}` entry {index} is {value}; atoms must be strictly positive (trim zero-mass support points)")]
    NonPositiveMarginal {
        which: &'static str,
        index: usize,
        value: f64,
    },

    /// A marginal does not sum to one within tolerance.
    #[error("marginal `{which}` sums to {sum}, expected 1 within {tol}")]
    MarginalSum {
        which: &'static str,
        sum: f64,
        tol: f64,
    },

    /// Cost matrix entry is NaN or infinite.
    #[error("cost[{row}][{col}] = {value}; costs must be finite")]
    NonFiniteCost { row: usize, col: usize, value: f64 },

    /// Cost matrix shape does not match the marginals.
    #[error("cost matrix is {got_rows}×{got_cols}, expected {rows}×{cols} from the marginals")]
    CostShape {
        rows: usize,
        cols: usize,
        got_rows: usize,
        got_cols: usize,
    },

    /// Regularization strength must be strictly positive.
    #[error("lambda must be strictly positive and finite, got {0}")]
    InvalidLambda(f64),

    /// Solver configuration out of range.
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(&'static str),

    /// Potential vector length does not match the marginal it pairs with.
    #[error("potential `{which}` has length {got}, expected {expected}")]
    PotentialLength {
        which: &'static str,
        expected: usize,
        got: usize,
    },

    /// Scalar root bracketing ran out of doubling steps.
    #[error("failed to bracket the scaling equation root after {doublings} doublings")]
    BracketFailure { doublings: usize },

    /// A coordinate update failed; reports the offending coordinate.
    #[error("coordinate update failed at {axis} {index}")]
    CoordinateUpdate {
        axis: &'static str,
        index: usize,
        #[source]
        source: Box<Error>,
    },

    /// Potentials violate the admissibility bound for this generator.
    #[error("potentials inadmissible: (f[{row}] + g[{col}] - c[{row}][{col}])/lambda = {value} exceeds the bound {bound}")]
    Inadmissible {
        row: usize,
        col: usize,
        value: f64,
        bound: f64,
    },

    /// A transformed cost entry came out non-finite.
    #[error("transformed cost v[{row}][{col}] is {value}; source potentials too close to the conjugate boundary")]
    NonFiniteTransform { row: usize, col: usize, value: f64 },

    /// Problem file I/O failure.
    #[error("cannot access `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Problem file parse failure.
    #[error("cannot parse `{path}`: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
