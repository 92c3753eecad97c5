//! Merging of path graphs into a certified subgraph.
//!
//! Paths are merged in order: the graph built so far is joined with the next
//! path using the largest set of connecting edges that keeps every subset
//! covered. Edges that never make it into the merged graph, and states that
//! no path reached, are what prevents certification.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use serde::Serialize;

use crate::certify::{AssumptionReport, Status, Verdict, Witness};
use crate::decompose::{path_search_with, DecomposeOptions, Path};
use crate::error::{Error, Result};
use crate::graph::{build_graph, Edge, Graph, NodeId, SignedNetwork, StateSubset};
use crate::subsets::{for_each_combination, for_each_subset_by_size, NeighborMasks, DEFAULT_ENUMERATION_CAP};

/// Edges with one endpoint in each of two disjoint graphs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct ConnectingEdgeSet(BTreeSet<Edge>);

impl ConnectingEdgeSet {
    pub fn new(edges: impl IntoIterator<Item = Edge>) -> ConnectingEdgeSet {
        ConnectingEdgeSet(edges.into_iter().collect())
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = Edge> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.0.contains(&e)
    }

    pub fn endpoints(&self) -> BTreeSet<NodeId> {
        self.0.iter().flat_map(|e| e.endpoints()).collect()
    }

    pub fn difference(&self, other: &ConnectingEdgeSet) -> ConnectingEdgeSet {
        ConnectingEdgeSet(self.0.difference(&other.0).copied().collect())
    }
}

impl FromIterator<Edge> for ConnectingEdgeSet {
    fn from_iter<T: IntoIterator<Item = Edge>>(iter: T) -> Self {
        ConnectingEdgeSet::new(iter)
    }
}

impl std::fmt::Display for ConnectingEdgeSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("{")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

/// Which subsets of the merged graph are checked when edges are added.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MergeRule {
    /// Every subset of the merged states that contains an endpoint of an
    /// added edge. Exact when both parts are certified.
    #[default]
    Exact,
    /// Only subsets of the endpoint set itself.
    Endpoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MergeOptions {
    pub rule: MergeRule,
    /// Largest connecting edge set searched exhaustively.
    pub max_connecting_edges: usize,
    /// Largest state set whose subsets are enumerated.
    pub enumeration_cap: usize,
}

impl Default for MergeOptions {
    fn default() -> Self {
        MergeOptions {
            rule: MergeRule::Exact,
            max_connecting_edges: DEFAULT_ENUMERATION_CAP,
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MergeStep {
    /// Indices (0-based, input order) of the paths already merged.
    pub merged_paths: Vec<usize>,
    pub incoming_path: usize,
    pub found: ConnectingEdgeSet,
    pub accepted: ConnectingEdgeSet,
    pub discarded: ConnectingEdgeSet,
    /// Subset left uncovered when all found edges are added.
    pub blocking: Option<StateSubset>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MergeReport {
    pub rule: MergeRule,
    pub paths: Vec<Path>,
    pub steps: Vec<MergeStep>,
    pub final_graph: Graph,
    /// Nominal state edges missing from the final graph.
    pub discarded_total: Vec<Edge>,
    /// States missing from the final graph.
    pub uncovered_nodes: Vec<NodeId>,
}

/// The subgraph formed by a path and its root input.
pub fn path_graph(g: &Graph, path: &Path) -> Result<Graph> {
    Graph::subgraph(g, &path.node_set(), path.edges())
}

/// Nominal edges between two node-disjoint subgraphs of `nominal`.
pub fn connecting_edges(ga: &Graph, gb: &Graph, nominal: &Graph) -> Result<ConnectingEdgeSet> {
    if let Some(&v) = ga.states().intersection(gb.states()).next() {
        return Err(Error::OverlappingGraphs(v));
    }
    Ok(nominal
        .state_edges()
        .iter()
        .copied()
        .filter(|e| {
            let (a, b) = (e.low(), e.high());
            (ga.is_state(a) && gb.is_state(b)) || (ga.is_state(b) && gb.is_state(a))
        })
        .collect())
}

fn check_connecting(ga: &Graph, gb: &Graph, candidate: &ConnectingEdgeSet) -> Result<()> {
    if let Some(&v) = ga.states().intersection(gb.states()).next() {
        return Err(Error::OverlappingGraphs(v));
    }
    for e in candidate.iter() {
        let (a, b) = (e.low(), e.high());
        let crosses = (ga.is_state(a) && gb.is_state(b)) || (ga.is_state(b) && gb.is_state(a));
        if !crosses {
            return Err(Error::EdgeNotConnecting(e));
        }
    }
    Ok(())
}

/// First subset (by size, then lexicographically) of `pool` that has no
/// dedicated node in `merged`, skipping subsets rejected by `keep`.
fn first_blocking(
    merged: &Graph,
    pool: &[NodeId],
    cap: usize,
    keep: impl Fn(&[usize]) -> bool,
) -> Result<Option<StateSubset>> {
    if pool.len() > cap.min(63) {
        return Err(Error::EnumerationCap {
            what: "merge subset pool",
            size: pool.len(),
            cap,
        });
    }
    let masks = NeighborMasks::new(merged);
    let rows = masks.rows_for(pool);
    let mut scratch = masks.scratch();
    let found = for_each_subset_by_size(pool.len(), |idx| {
        if !keep(idx) || masks.has_dedicated(idx.iter().map(|&i| rows[i]), &mut scratch) {
            ControlFlow::Continue(())
        } else {
            ControlFlow::Break(StateSubset::new(idx.iter().map(|&i| pool[i])))
        }
    });
    Ok(match found {
        ControlFlow::Break(s) => Some(s),
        ControlFlow::Continue(()) => None,
    })
}

/// Endpoint-set merge check: every nonempty subset of the endpoints of
/// `candidate` must keep a dedicated node once the edges are added.
pub fn merge_condition(ga: &Graph, gb: &Graph, candidate: &ConnectingEdgeSet) -> Result<Option<StateSubset>> {
    merge_condition_with(MergeRule::Endpoint, ga, gb, candidate, DEFAULT_ENUMERATION_CAP)
}

/// Merge check under `rule`; returns the first blocking subset, if any.
pub fn merge_condition_with(
    rule: MergeRule,
    ga: &Graph,
    gb: &Graph,
    candidate: &ConnectingEdgeSet,
    cap: usize,
) -> Result<Option<StateSubset>> {
    check_connecting(ga, gb, candidate)?;
    if candidate.is_empty() {
        return Ok(None);
    }
    let merged = ga.union_with(gb, candidate.iter())?;
    let endpoints = candidate.endpoints();
    match rule {
        MergeRule::Endpoint => {
            let pool: Vec<NodeId> = endpoints.into_iter().collect();
            first_blocking(&merged, &pool, cap, |_| true)
        }
        MergeRule::Exact => {
            let pool: Vec<NodeId> = merged.states().iter().copied().collect();
            let touches: Vec<bool> = pool.iter().map(|v| endpoints.contains(v)).collect();
            first_blocking(&merged, &pool, cap, |idx| idx.iter().any(|&i| touches[i]))
        }
    }
}

/// Maximum-cardinality admissible subset of `all_edges` and its complement.
///
/// Among admissible subsets of the same size, the one discarding edges with
/// the largest summed endpoint degree in `nominal` wins; remaining ties go to
/// the lexicographically smallest accepted edge list.
pub fn largest_edge_set(
    ga: &Graph,
    gb: &Graph,
    all_edges: &ConnectingEdgeSet,
    nominal: &Graph,
    opts: &MergeOptions,
) -> Result<(ConnectingEdgeSet, ConnectingEdgeSet)> {
    let edges: Vec<Edge> = all_edges.iter().collect();
    if edges.len() > opts.max_connecting_edges {
        return Err(Error::EnumerationCap {
            what: "connecting edge set",
            size: edges.len(),
            cap: opts.max_connecting_edges,
        });
    }
    let degree = |v: NodeId| nominal.state_neighbors(v).count();
    let weight: Vec<usize> = edges.iter().map(|e| degree(e.low()) + degree(e.high())).collect();
    for k in (0..=edges.len()).rev() {
        let mut best: Option<(usize, Vec<usize>)> = None;
        let mut failure = None;
        let _ = for_each_combination::<()>(edges.len(), k, |idx| {
            let cand: ConnectingEdgeSet = idx.iter().map(|&i| edges[i]).collect();
            match merge_condition_with(opts.rule, ga, gb, &cand, opts.enumeration_cap) {
                Ok(None) => {
                    let total: usize = weight.iter().sum();
                    let discarded_weight = total - idx.iter().map(|&i| weight[i]).sum::<usize>();
                    // combinations arrive in lexicographic order, so only a
                    // strictly heavier discard replaces the incumbent
                    if best.as_ref().is_none_or(|(w, _)| discarded_weight > *w) {
                        best = Some((discarded_weight, idx.to_vec()));
                    }
                    ControlFlow::Continue(())
                }
                Ok(Some(_)) => ControlFlow::Continue(()),
                Err(e) => {
                    failure = Some(e);
                    ControlFlow::Break(())
                }
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        if let Some((_, idx)) = best {
            let accepted: ConnectingEdgeSet = idx.iter().map(|&i| edges[i]).collect();
            let discarded = all_edges.difference(&accepted);
            return Ok((accepted, discarded));
        }
    }
    unreachable!("the empty edge set is always admissible")
}

/// Union of two graphs joined by `accepted`, which must pass the merge check.
pub fn merge_graphs(ga: &Graph, gb: &Graph, accepted: &ConnectingEdgeSet, opts: &MergeOptions) -> Result<Graph> {
    if let Some(alpha) = merge_condition_with(opts.rule, ga, gb, accepted, opts.enumeration_cap)? {
        return Err(Error::MergePrecondition(alpha));
    }
    ga.union_with(gb, accepted.iter())
}

/// Merge the paths in order, recording every step.
pub fn graph_merging(paths: &[Path], nominal: &Graph, opts: &MergeOptions) -> Result<MergeReport> {
    let mut current = match paths.first() {
        Some(p) => path_graph(nominal, p)?,
        None => Graph::from_parts(
            nominal.universe_states(),
            nominal.universe_inputs(),
            BTreeSet::new(),
            BTreeSet::new(),
            BTreeSet::new(),
        )?,
    };
    let mut steps = Vec::new();
    for (idx, path) in paths.iter().enumerate().skip(1) {
        let incoming = path_graph(nominal, path)?;
        let found = connecting_edges(&current, &incoming, nominal)?;
        let blocking = merge_condition_with(opts.rule, &current, &incoming, &found, opts.enumeration_cap)?;
        let (accepted, discarded) = if blocking.is_none() {
            (found.clone(), ConnectingEdgeSet::default())
        } else {
            largest_edge_set(&current, &incoming, &found, nominal, opts)?
        };
        current = merge_graphs(&current, &incoming, &accepted, opts)?;
        steps.push(MergeStep {
            merged_paths: (0..idx).collect(),
            incoming_path: idx,
            found,
            accepted,
            discarded,
            blocking,
        });
    }
    let discarded_total = nominal.state_edges().difference(current.state_edges()).copied().collect();
    let uncovered_nodes = nominal.states().difference(current.states()).copied().collect();
    Ok(MergeReport {
        rule: opts.rule,
        paths: paths.to_vec(),
        steps,
        final_graph: current,
        discarded_total,
        uncovered_nodes,
    })
}

/// Certified exactly when the merged graph is the whole nominal graph and
/// every state is accessible.
pub fn verdict_from_report(report: &MergeReport, nominal: &Graph) -> Verdict {
    let assumptions = AssumptionReport::from_graph(nominal);
    let certified = report.uncovered_nodes.is_empty()
        && report.discarded_total.is_empty()
        && assumptions.inaccessible.is_empty();
    let (status, witness) = if certified {
        (Status::Certified, Witness::None)
    } else {
        (
            Status::NotCertified,
            Witness::Pipeline {
                discarded_edges: report.discarded_total.clone(),
                uncovered_nodes: report.uncovered_nodes.clone(),
                inaccessible_nodes: assumptions.inaccessible.clone(),
            },
        )
    };
    Verdict {
        status,
        witness,
        assumptions,
        refutation_trials: None,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PipelineOptions {
    pub decompose: DecomposeOptions,
    pub merge: MergeOptions,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineOutcome {
    pub report: MergeReport,
    pub verdict: Verdict,
}

/// Decompose, merge and judge a network.
pub fn analyze(net: &SignedNetwork, opts: &PipelineOptions) -> Result<PipelineOutcome> {
    let g = build_graph(net);
    let paths = path_search_with(net, &g, opts.decompose)?;
    let report = graph_merging(&paths, &g, &opts.merge)?;
    let verdict = verdict_from_report(&report, &g);
    Ok(PipelineOutcome { report, verdict })
}
