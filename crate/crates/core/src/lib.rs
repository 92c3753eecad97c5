//! Sign-pattern topological controllability of diffusively coupled networks.
//!
//! A network is a set of state nodes joined by signed undirected edges, with
//! inputs attached to distinct states. [`certify`] decides the dedicated-node
//! condition exhaustively, [`decompose`] and [`merge`] reach the same kind of
//! verdict by splitting the graph into input-rooted paths and merging them
//! back, and [`numeric`] samples weightings to check controllability ranks.

pub mod certify;
pub mod decompose;
pub mod error;
pub mod fixtures;
pub mod graph;
pub mod merge;
pub mod numeric;
pub mod subsets;

pub use certify::{
    certify_bruteforce, find_dedicated_node, find_dedicated_node_fast, first_failing_subset, AssumptionReport,
    DedicatedWitness, LMatrixStatus, Status, Verdict, Witness,
};
pub use decompose::{path_search, path_search_with, ClaimRule, DecomposeOptions, Path};
pub use error::{Error, Result};
pub use graph::{build_graph, Edge, Graph, NodeId, Sign, SignedNetwork, StateSubset};
pub use merge::{
    analyze, graph_merging, verdict_from_report, ConnectingEdgeSet, MergeOptions, MergeReport, MergeRule,
    PipelineOptions, PipelineOutcome,
};
pub use numeric::{monte_carlo, numeric_rank, RankReport, Realization, SamplingMode};
pub use subsets::DEFAULT_ENUMERATION_CAP;
