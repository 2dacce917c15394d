//! Exact discrete joint distributions and the conditional-independence
//! checks built on them.

mod audit;
mod ci;
mod factor;
mod graphoid;
mod sampling;
mod table;

use thiserror::Error;

use crate::graph::GraphError;

pub use audit::{
    causal_completeness_check, causal_markov_check, compatible, reichenbach_check, RpccVerdict,
};
pub use ci::{ci_holds, CiReport};
pub use factor::{chain_factorize, conditionals_on_graph, joint_from_tables, multiply_chain};
pub use graphoid::{check_axiom, graphoid_audit, Axiom, AxiomOutcome, AxiomTally, GraphoidReport};
pub use sampling::{random_compatible, random_tables};
pub(crate) use sampling::simplex_point;
pub use table::{
    parse_distribution, ConditionalTable, JointTable, Variable, INPUT_SUM_TOL, MAX_ENTRIES,
};

/// Default absolute tolerance for CI verdicts.
pub const DEFAULT_EPS: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(f64),
    #[error("invalid probability {0}")]
    InvalidProbability(f64),
    #[error("expected {expected} entries, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("table would exceed {} entries", MAX_ENTRIES)]
    TooLarge,
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("variable `{0}` must have cardinality >= 1")]
    ZeroCardinality(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable mismatch: {0}")]
    VariableMismatch(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("order is not a permutation of the table's variables")]
    NotPermutation,
    #[error("no conditional table for `{0}`")]
    MissingTable(String),
    #[error("conditional table for `{0}` is not a node of the graph or is given twice")]
    ExtraTable(String),
    #[error("conditional table for `{0}` lists parents that differ from the graph")]
    ParentMismatch(String),
    #[error("cardinality of `{0}` differs from the graph")]
    CardinalityMismatch(String),
    #[error("tolerance must be positive, got {0}")]
    InvalidEpsilon(f64),
}
