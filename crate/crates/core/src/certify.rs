//! Dedicated-node certification.
//!
//! A subset `alpha` of states is covered when some vertex outside `alpha`
//! is adjacent to exactly one member of `alpha` (its *dedicated node*). A
//! graph in which every nonempty subset of states is covered is certified
//! topologically controllable. The condition is sufficient only: a graph that
//! fails it is reported as not certified, never as uncontrollable.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::ControlFlow;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, NodeId, StateSubset};
use crate::numeric::Realization;
use crate::subsets::{for_each_subset_by_size, NeighborMasks};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DedicatedWitness {
    /// Member of `alpha` that owns the dedicated node.
    pub holder: NodeId,
    pub dedicated: NodeId,
}

impl fmt::Display for DedicatedWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.holder, self.dedicated)
    }
}

/// `N(alpha) \ alpha` together with each member's share of it.
fn external_shares(g: &Graph, alpha: &StateSubset) -> Result<Vec<(NodeId, BTreeSet<NodeId>)>> {
    let n_alpha = g.neighborhood_of_set(alpha)?;
    debug_assert!(alpha.members().iter().all(|v| n_alpha.contains(v)));
    let outside: BTreeSet<NodeId> = n_alpha.into_iter().filter(|v| !alpha.contains(*v)).collect();
    alpha
        .members()
        .iter()
        .map(|&i| {
            let share = g.neighbors(i)?.intersection(&outside).copied().collect();
            Ok((i, share))
        })
        .collect()
}

/// Smallest `(holder, dedicated)` pair such that `dedicated` lies in
/// `N(alpha) \ alpha` and is adjacent to `holder` only.
pub fn find_dedicated_node(g: &Graph, alpha: &StateSubset) -> Result<Option<DedicatedWitness>> {
    let shares = external_shares(g, alpha)?;
    for (pos, (holder, share)) in shares.iter().enumerate() {
        let others: BTreeSet<NodeId> = shares
            .iter()
            .enumerate()
            .filter(|&(q, _)| q != pos)
            .flat_map(|(_, (_, s))| s.iter().copied())
            .collect();
        if let Some(&dedicated) = share.difference(&others).next() {
            return Ok(Some(DedicatedWitness {
                holder: *holder,
                dedicated,
            }));
        }
    }
    Ok(None)
}

/// Cheaper sufficient form: a member whose whole external share is disjoint
/// from every other member's share. `None` is inconclusive.
pub fn find_dedicated_node_fast(g: &Graph, alpha: &StateSubset) -> Result<Option<DedicatedWitness>> {
    let shares = external_shares(g, alpha)?;
    for (pos, (holder, share)) in shares.iter().enumerate() {
        let Some(&first) = share.iter().next() else {
            continue;
        };
        let disjoint = shares
            .iter()
            .enumerate()
            .all(|(q, (_, other))| q == pos || share.is_disjoint(other));
        if disjoint {
            return Ok(Some(DedicatedWitness {
                holder: *holder,
                dedicated: first,
            }));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Certified,
    NotCertified,
    NumericallyRefuted,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Certified => 0,
            Status::NotCertified => 1,
            Status::NumericallyRefuted => 2,
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Certified => "certified",
            Status::NotCertified => "not certified",
            Status::NumericallyRefuted => "numerically refuted",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    None,
    /// A subset of states with no dedicated node.
    FailingSubset { subset: StateSubset },
    /// What the decomposition and merging pipeline could not cover.
    Pipeline {
        discarded_edges: Vec<Edge>,
        uncovered_nodes: Vec<NodeId>,
        inaccessible_nodes: Vec<NodeId>,
    },
    /// A sign-consistent weighting whose controllability matrix is rank
    /// deficient.
    Realization {
        trial: usize,
        rank: usize,
        realization: Box<Realization>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum LMatrixStatus {
    NotChecked,
    NoRefutationFound { trials: usize },
    Refuted { trial: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub inaccessible: Vec<NodeId>,
    pub l_matrix: LMatrixStatus,
}

impl AssumptionReport {
    pub fn from_graph(g: &Graph) -> AssumptionReport {
        AssumptionReport {
            inaccessible: g.inaccessible_states(),
            l_matrix: LMatrixStatus::NotChecked,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub witness: Witness,
    pub assumptions: AssumptionReport,
    /// Monte-Carlo trials spent trying to refute a NotCertified verdict.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refutation_trials: Option<usize>,
}

impl Verdict {
    pub fn summary(&self) -> &'static str {
        match self.status {
            Status::Certified => "certified by the dedicated-node condition",
            Status::NotCertified => "not certified by the dedicated-node condition",
            Status::NumericallyRefuted => {
                "numerically refuted: a sign-consistent realization is uncontrollable"
            }
        }
    }

    pub fn failing_subset(&self) -> Option<&StateSubset> {
        match &self.witness {
            Witness::FailingSubset { subset } => Some(subset),
            _ => None,
        }
    }
}

/// Check every nonempty subset of states, smallest first.
///
/// Returns the first subset (by size, then lexicographically) lacking a
/// dedicated node as the witness of a NotCertified verdict.
pub fn certify_bruteforce(g: &Graph, cap: usize) -> Result<Verdict> {
    let failing = first_failing_subset(g, cap)?;
    let (status, witness) = match failing {
        None => (Status::Certified, Witness::None),
        Some(subset) => (Status::NotCertified, Witness::FailingSubset { subset }),
    };
    Ok(Verdict {
        status,
        witness,
        assumptions: AssumptionReport::from_graph(g),
        refutation_trials: None,
    })
}

/// First subset of the graph's states with no dedicated node, if any.
pub fn first_failing_subset(g: &Graph, cap: usize) -> Result<Option<StateSubset>> {
    let states: Vec<NodeId> = g.states().iter().copied().collect();
    if states.len() > cap.min(63) {
        return Err(Error::EnumerationCap {
            what: "state set",
            size: states.len(),
            cap,
        });
    }
    let masks = NeighborMasks::new(g);
    let rows = masks.rows_for(&states);
    let mut scratch = masks.scratch();
    let found = for_each_subset_by_size(states.len(), |idx| {
        if masks.has_dedicated(idx.iter().map(|&i| rows[i]), &mut scratch) {
            ControlFlow::Continue(())
        } else {
            ControlFlow::Break(StateSubset::new(idx.iter().map(|&i| states[i])))
        }
    });
    Ok(match found {
        ControlFlow::Break(s) => Some(s),
        ControlFlow::Continue(()) => None,
    })
}
