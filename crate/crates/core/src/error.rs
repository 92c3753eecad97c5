use thiserror::Error;

use crate::graph::{Edge, NodeId, StateSubset};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a network needs at least one state node")]
    NoStates,
    #[error("node {node} is out of range (valid states are 1..={n})")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("edge ({node},{node}) is a self edge; diagonal entries are derived, not listed")]
    SelfEdge { node: usize },
    #[error("edge ({i},{j}) is listed more than once")]
    DuplicateEdge { i: usize, j: usize },
    #[error("inputs {first} and {second} are both assigned to state {state}; the input map must be injective")]
    NonInjectiveInputs {
        state: usize,
        first: usize,
        second: usize,
    },
    #[error("expected {expected} diagonal signs, found {found}")]
    DiagonalLength { expected: usize, found: usize },
    #[error("diagonal sign of state {node} is zero; declared diagonals must be nonzero")]
    ZeroDiagonalSign { node: usize },
    #[error("nominal weight of edge ({i},{j}) disagrees with its sign")]
    WeightSignMismatch { i: usize, j: usize },
    #[error("edge ({i},{j}) has no nominal weight")]
    MissingWeight { i: usize, j: usize },
    #[error("nominal weight given for ({i},{j}), which is not an edge")]
    UnexpectedWeight { i: usize, j: usize },
    #[error("node {0} is not a state node")]
    NotAStateNode(NodeId),
    #[error("subset must be nonempty")]
    EmptySubset,
    #[error("{what} has {size} elements, above the enumeration cap of {cap}; use the decomposition pipeline or raise the cap")]
    EnumerationCap {
        what: &'static str,
        size: usize,
        cap: usize,
    },
    #[error("graphs overlap at node {0}")]
    OverlappingGraphs(NodeId),
    #[error("edge {0} does not connect the two graphs")]
    EdgeNotConnecting(Edge),
    #[error("edge {0} references a node outside the graph")]
    EdgeOutsideGraph(Edge),
    #[error("merging with these edges leaves subset {0} without a dedicated node")]
    MergePrecondition(StateSubset),
    #[error("path search from root {root} produced more than {cap} paths at level {level}")]
    PathSetOverflow {
        root: NodeId,
        level: usize,
        cap: usize,
    },
    #[error("gave up after {retries} resamples: declared diagonal signs look infeasible")]
    SamplingExhausted { retries: usize },
    #[error("matrix contains non-finite entries")]
    NonFiniteMatrix,
    #[error("rank tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("trial count must be at least 1")]
    ZeroTrials,
    #[error("invalid weight range [{lo}, {hi}]")]
    InvalidWeightRange { lo: f64, hi: f64 },
    #[error("only a NotCertified verdict can be numerically refuted")]
    NotRefutable,
}
