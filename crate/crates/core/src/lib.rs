//! Exact-arithmetic constructions for chain recurrence and positive shadowing of linear
//! operators on sequence spaces.
//!
//! Every construction is checked after it is built: chains are re-validated against
//! their operator, shadows are re-iterated, schedules are enumerated. Scalars are exact
//! rationals throughout; p = 2 norms are handled through their squares.

pub mod chains;
pub mod fhc;
pub mod operators;
pub mod rational;
pub mod report;
pub mod shadowing;
pub mod vector;

pub use chains::{Chain, ChainFactory};
pub use operators::{Block, Operator, OperatorSpec, PolyFunction, WeightSeq};
pub use rational::{parse_rational, Rational};
pub use shadowing::{PseudoOrbit, ShadowCertificate, ShadowSolver};
pub use vector::{Domain, NormKind, NormValue, SeqVector};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported capability: {0}")]
    Unsupported(String),
    #[error("not an {eps}-chain: step {index} has defect {defect}")]
    ChainInvalid {
        index: usize,
        defect: NormValue,
        eps: String,
    },
    #[error("not a {delta}-pseudo orbit: step {index} has defect {defect}")]
    PseudoOrbitInvalid {
        index: usize,
        defect: NormValue,
        delta: String,
    },
    #[error("chain factory failed at interpolation point {index}: {source}")]
    Factory {
        index: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("certificate check failed: {0}")]
    Certificate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
