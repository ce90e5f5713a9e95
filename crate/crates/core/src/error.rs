use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("graph has no nodes or no edges")]
    EmptyGraph,
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("node id {id} out of range for a graph with {n} nodes")]
    NodeOutOfRange { id: usize, n: usize },
    #[error("node {0} is isolated")]
    IsolatedNode(usize),
    #[error("empty node set")]
    EmptySet,
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("k = {k} out of range: {reason}")]
    InvalidK { k: usize, reason: &'static str },
    #[error("eigensolver did not converge at index {index} after {iterations} iterations")]
    NoConvergence { index: usize, iterations: usize },
    #[error("embedded row of node {0} has near-zero norm")]
    DegenerateRow(usize),
    #[error("non-finite coordinate at node {0}")]
    NonFinite(usize),
    #[error("size guard exceeded: {what} = {got} > {limit}")]
    SizeGuard {
        what: &'static str,
        got: usize,
        limit: usize,
    },
    #[error("gap undefined: lambda_(k+1) and the average conductance are both zero")]
    DegenerateGap,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("construction failed after {0} retries")]
    RetriesExhausted(usize),
    #[error("lower-bound violation at epsilon = {epsilon}: cost {cost} < {bound} and no permutation witness exists")]
    LowerBoundViolation { epsilon: f64, cost: f64, bound: f64 },
}
