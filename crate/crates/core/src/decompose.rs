//! Decomposition of a network into input-rooted induced paths.
//!
//! Starting from the state driven by each input, in input order, all admissible
//! paths are grown one level at a time until no path can be extended; the
//! longest one is kept and its nodes are claimed before the next root is
//! processed.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{build_graph, Edge, Graph, NodeId, SignedNetwork};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Path {
    pub root_input: NodeId,
    /// State sequence starting at the state driven by `root_input`.
    pub nodes: Vec<NodeId>,
}

impl Path {
    pub fn rooted(root_input: NodeId, root_state: NodeId) -> Path {
        Path {
            root_input,
            nodes: vec![root_state],
        }
    }

    pub fn root(&self) -> NodeId {
        self.nodes[0]
    }

    pub fn terminal(&self) -> NodeId {
        *self.nodes.last().expect("paths are nonempty")
    }

    /// Number of state-state edges; a lone root has length 0.
    pub fn len(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.nodes.windows(2).map(|w| Edge::new(w[0].0, w[1].0))
    }

    pub fn node_set(&self) -> BTreeSet<NodeId> {
        self.nodes.iter().copied().collect()
    }

    pub fn extended(&self, child: NodeId) -> Path {
        let mut nodes = self.nodes.clone();
        nodes.push(child);
        Path {
            root_input: self.root_input,
            nodes,
        }
    }
}

impl std::fmt::Display for Path {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "u{}", self.root_input)?;
        for v in &self.nodes {
            write!(f, " -> {v}")?;
        }
        Ok(())
    }
}

/// How nodes of already finished paths restrict new children.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimRule {
    /// A child may not be a node of a finished path.
    #[default]
    Member,
    /// A child may neither be nor neighbour a node of a finished path.
    Adjacent,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathSearchState {
    pub claimed: BTreeSet<NodeId>,
    /// States driven by some input.
    pub roots: BTreeSet<NodeId>,
    pub claim_rule: ClaimRule,
}

impl PathSearchState {
    pub fn new(net: &SignedNetwork, claim_rule: ClaimRule) -> PathSearchState {
        PathSearchState {
            claimed: BTreeSet::new(),
            roots: net.input_states().iter().copied().collect(),
            claim_rule,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecomposeOptions {
    pub claim_rule: ClaimRule,
    /// Upper bound on the number of candidate paths held at one level.
    pub max_paths_per_level: usize,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions {
            claim_rule: ClaimRule::Member,
            max_paths_per_level: 1_000_000,
        }
    }
}

/// Admissible extensions of `path` at its terminal node.
///
/// A neighbour of the terminal qualifies unless it is already on the path,
/// neighbours an earlier node of the path, is itself a driven root, or is
/// excluded by the claim rule.
pub fn children_of(g: &Graph, path: &Path, state: &PathSearchState) -> BTreeSet<NodeId> {
    let ancestors = &path.nodes[..path.nodes.len() - 1];
    g.state_neighbors(path.terminal())
        .filter(|c| !path.nodes.contains(c))
        .filter(|&c| !ancestors.iter().any(|&a| g.has_edge(a, c)))
        .filter(|c| !state.roots.contains(c))
        .filter(|c| !state.claimed.contains(c))
        .filter(|&c| match state.claim_rule {
            ClaimRule::Member => true,
            ClaimRule::Adjacent => !state.claimed.iter().any(|&k| g.has_edge(k, c)),
        })
        .collect()
}

/// Every one-node extension of every path, in input order then child order.
pub fn update_paths(g: &Graph, paths: &[Path], state: &PathSearchState) -> Vec<Path> {
    paths
        .iter()
        .flat_map(|p| children_of(g, p, state).into_iter().map(move |c| p.extended(c)))
        .collect()
}

/// Grow every path from `root_state` and return the longest one.
///
/// Ties prefer paths through higher-degree states, then the lexicographically
/// smallest node sequence.
fn longest_path_from(
    g: &Graph,
    root_input: NodeId,
    root_state: NodeId,
    state: &PathSearchState,
    max_paths: usize,
) -> Result<Path> {
    let mut level = vec![Path::rooted(root_input, root_state)];
    let mut depth = 0;
    loop {
        let next = update_paths(g, &level, state);
        if next.is_empty() {
            break;
        }
        depth += 1;
        if next.len() > max_paths {
            return Err(Error::PathSetOverflow {
                root: root_state,
                level: depth,
                cap: max_paths,
            });
        }
        level = next;
    }
    let degree_sum = |p: &Path| -> usize { p.nodes.iter().map(|&v| g.state_neighbors(v).count()).sum() };
    let best = level
        .into_iter()
        .min_by(|a, b| {
            b.len()
                .cmp(&a.len())
                .then_with(|| degree_sum(b).cmp(&degree_sum(a)))
                .then_with(|| a.nodes.cmp(&b.nodes))
        })
        .expect("the root path is always present");
    Ok(best)
}

/// Decompose the network into one path per input, in input order.
pub fn path_search(net: &SignedNetwork) -> Result<Vec<Path>> {
    path_search_with(net, &build_graph(net), DecomposeOptions::default())
}

pub fn path_search_with(net: &SignedNetwork, g: &Graph, opts: DecomposeOptions) -> Result<Vec<Path>> {
    let mut state = PathSearchState::new(net, opts.claim_rule);
    let mut out = Vec::with_capacity(net.m());
    for (k, &root) in net.input_states().iter().enumerate() {
        let p = longest_path_from(g, net.input_node(k), root, &state, opts.max_paths_per_level)?;
        state.claimed.extend(p.nodes.iter().copied());
        out.push(p);
    }
    Ok(out)
}

/// States not on any path.
pub fn uncovered_states(g: &Graph, paths: &[Path]) -> Vec<NodeId> {
    let covered: BTreeSet<NodeId> = paths.iter().flat_map(|p| p.nodes.iter().copied()).collect();
    g.states().iter().filter(|s| !covered.contains(s)).copied().collect()
}
