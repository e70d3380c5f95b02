//! Simulation of quantum frequent-itemset mining on a dense statevector.
//!
//! Supports of candidate itemsets are estimated in parallel by phase
//! estimation of a Grover-like operator built from a bit-query oracle on
//! the transaction matrix. Candidates above the support threshold are then
//! boosted by amplitude amplification and read out. Exact Apriori and a
//! sampling estimator run on the same databases, so every quantum answer
//! can be checked against a classical one.
//!
//! Modules, bottom up:
//! - [`data`]: transaction databases, itemsets, exact supports, FIMI I/O.
//! - [`qsim`]: register layouts and the statevector kernels.
//! - [`oracle`]: the basic bit oracle, phase oracles and query counters.
//! - [`qpe`]: Grover operator, parallel amplitude estimation, decoding.
//! - [`mining`]: amplification, the measurement loop and the level-wise driver.
//! - [`classical`]: Apriori, sampling baseline, rule generation, speedup ratio.
//! - [`cli`]: experiment configuration and reports behind the `qarm` binary.

pub mod classical;
pub mod cli;
pub mod data;
pub mod mining;
pub mod oracle;
pub mod qpe;
pub mod qsim;

use thiserror::Error;

pub use data::{exact_support, parse_fimi, ExactSupport, ItemId, Itemset, Ratio, TransactionDb};
pub use oracle::QueryCounter;
pub use qsim::{Register, RegisterLayout, Statevector};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Data(#[from] data::DataError),
    #[error(transparent)]
    Qsim(#[from] qsim::QsimError),
    #[error("ancilla qubits are not in the required initial state: {0}")]
    AncillaState(String),
    #[error("support {0} outside [0, 1]")]
    SupportOutOfRange(f64),
    #[error("T = {0} is not a power of two >= 2")]
    InvalidGridSize(usize),
    #[error("grid index {y} out of range for T = {t}")]
    GridIndexOutOfRange { y: usize, t: usize },
    #[error("minimum support must be in (0, 1], got {0}")]
    InvalidMinSupport(f64),
    #[error("no candidate itemsets given")]
    NoCandidates,
    #[error("candidate {itemset} has size {size}, expected {k}")]
    CandidateSize { itemset: Itemset, size: usize, k: usize },
    #[error("candidate {0} listed twice")]
    DuplicateCandidate(Itemset),
    #[error("no frequent candidates at this threshold/grid")]
    NoGoodOutcomes,
    #[error("amplitude amplification did not reach the good subspace after {0} rounds")]
    AmplificationDidNotConverge(usize),
    #[error("support of {0} is missing; input is not downward closed")]
    MissingSubsetSupport(Itemset),
    #[error("speedup ratio undefined: denominator is zero")]
    ZeroDenominator,
    #[error("empty statistics")]
    EmptyStats,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
