//! Network and graph data model.
//!
//! A [`SignedNetwork`] is the sign pattern of `T = [L, B]`: `n` state nodes
//! coupled by undirected signed edges and `m` input nodes, each driving exactly
//! one state. [`Graph`] is its graph representation: states `1..=n`, inputs
//! `n+1..=n+m`, a self-loop on every state and a directed edge from each
//! driven state to its input (edge directions are reversed with respect to the
//! signal flow).

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vertex index. States occupy `1..=n`, inputs `n+1..=n+m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for NodeId {
    fn from(v: usize) -> Self {
        NodeId(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "-")]
    Negative,
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "+")]
    Positive,
}

impl Sign {
    pub fn of(x: f64) -> Sign {
        if x > 0.0 {
            Sign::Positive
        } else if x < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Negative => -1.0,
            Sign::Zero => 0.0,
            Sign::Positive => 1.0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Negative => "-",
            Sign::Zero => "0",
            Sign::Positive => "+",
        }
    }

    pub fn negate(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

/// Unordered pair of distinct state nodes, stored as `(low, high)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "[usize; 2]", try_from = "[usize; 2]")]
pub struct Edge(NodeId, NodeId);

impl Edge {
    /// Panics if `i == j`; use [`Edge::try_new`] for unchecked input.
    pub fn new(i: usize, j: usize) -> Edge {
        Edge::try_new(i, j).expect("edge endpoints must differ")
    }

    pub fn try_new(i: usize, j: usize) -> Result<Edge> {
        if i == j {
            return Err(Error::SelfEdge { node: i });
        }
        Ok(Edge(NodeId(i.min(j)), NodeId(i.max(j))))
    }

    pub fn low(self) -> NodeId {
        self.0
    }

    pub fn high(self) -> NodeId {
        self.1
    }

    pub fn endpoints(self) -> [NodeId; 2] {
        [self.0, self.1]
    }

    pub fn contains(self, v: NodeId) -> bool {
        self.0 == v || self.1 == v
    }

    /// The endpoint that is not `v`, if `v` is an endpoint.
    pub fn other(self, v: NodeId) -> Option<NodeId> {
        if self.0 == v {
            Some(self.1)
        } else if self.1 == v {
            Some(self.0)
        } else {
            None
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0, self.1)
    }
}

impl From<Edge> for [usize; 2] {
    fn from(e: Edge) -> Self {
        [e.0 .0, e.1 .0]
    }
}

impl TryFrom<[usize; 2]> for Edge {
    type Error = Error;
    fn try_from(v: [usize; 2]) -> Result<Edge> {
        Edge::try_new(v[0], v[1])
    }
}

/// Sign pattern of `[L, B]` plus optional declared diagonal signs and a
/// nominal weighting.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedNetwork {
    n: usize,
    edges: BTreeMap<Edge, Sign>,
    inputs: Vec<NodeId>,
    diagonal_signs: Option<Vec<Sign>>,
    nominal_weights: Option<BTreeMap<Edge, f64>>,
}

impl SignedNetwork {
    /// `edges` lists `(i, j, sign)` over states `1..=n`; zero signs are
    /// accepted and mean "no edge". `inputs[k]` is the state driven by input
    /// `k + 1`.
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize, Sign)>,
        inputs: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::NoStates);
        }
        let check = |v: usize| {
            if (1..=n).contains(&v) {
                Ok(())
            } else {
                Err(Error::NodeOutOfRange { node: v, n })
            }
        };

        let mut seen = BTreeSet::new();
        let mut edge_map = BTreeMap::new();
        for (i, j, sign) in edges {
            check(i)?;
            check(j)?;
            let e = Edge::try_new(i, j)?;
            if !seen.insert(e) {
                return Err(Error::DuplicateEdge {
                    i: e.low().0,
                    j: e.high().0,
                });
            }
            if sign != Sign::Zero {
                edge_map.insert(e, sign);
            }
        }

        let mut driven: BTreeMap<usize, usize> = BTreeMap::new();
        let mut input_states = Vec::new();
        for (k, s) in inputs.into_iter().enumerate() {
            check(s)?;
            if let Some(&first) = driven.get(&s) {
                return Err(Error::NonInjectiveInputs {
                    state: s,
                    first,
                    second: k + 1,
                });
            }
            driven.insert(s, k + 1);
            input_states.push(NodeId(s));
        }

        Ok(SignedNetwork {
            n,
            edges: edge_map,
            inputs: input_states,
            diagonal_signs: None,
            nominal_weights: None,
        })
    }

    pub fn with_diagonal_signs(mut self, signs: Vec<Sign>) -> Result<Self> {
        if signs.len() != self.n {
            return Err(Error::DiagonalLength {
                expected: self.n,
                found: signs.len(),
            });
        }
        if let Some(pos) = signs.iter().position(|&s| s == Sign::Zero) {
            return Err(Error::ZeroDiagonalSign { node: pos + 1 });
        }
        self.diagonal_signs = Some(signs);
        Ok(self)
    }

    /// Attach a nominal weighting; it must cover exactly the nonzero edges and
    /// agree with their signs.
    pub fn with_nominal_weights(
        mut self,
        weights: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, j, w) in weights {
            let e = Edge::try_new(i, j)?;
            match self.edges.get(&e) {
                None if w == 0.0 => continue,
                None => {
                    return Err(Error::UnexpectedWeight {
                        i: e.low().0,
                        j: e.high().0,
                    })
                }
                Some(&s) if Sign::of(w) != s || !w.is_finite() => {
                    return Err(Error::WeightSignMismatch {
                        i: e.low().0,
                        j: e.high().0,
                    })
                }
                Some(_) => {
                    if map.insert(e, w).is_some() {
                        return Err(Error::DuplicateEdge {
                            i: e.low().0,
                            j: e.high().0,
                        });
                    }
                }
            }
        }
        if let Some(e) = self.edges.keys().find(|e| !map.contains_key(e)) {
            return Err(Error::MissingWeight {
                i: e.low().0,
                j: e.high().0,
            });
        }
        self.nominal_weights = Some(map);
        Ok(self)
    }

    /// Same network with the sign of one pair replaced (`Zero` removes it).
    /// Nominal weights are dropped since they would no longer be consistent.
    pub fn with_edge_sign(&self, i: usize, j: usize, sign: Sign) -> Result<Self> {
        for v in [i, j] {
            if !(1..=self.n).contains(&v) {
                return Err(Error::NodeOutOfRange { node: v, n: self.n });
            }
        }
        let e = Edge::try_new(i, j)?;
        let mut out = self.clone();
        out.nominal_weights = None;
        if sign == Sign::Zero {
            out.edges.remove(&e);
        } else {
            out.edges.insert(e, sign);
        }
        Ok(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.inputs.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Edge, Sign)> + '_ {
        self.edges.iter().map(|(&e, &s)| (e, s))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn sign(&self, i: usize, j: usize) -> Sign {
        Edge::try_new(i, j)
            .ok()
            .and_then(|e| self.edges.get(&e).copied())
            .unwrap_or(Sign::Zero)
    }

    /// State driven by each input, in input order.
    pub fn input_states(&self) -> &[NodeId] {
        &self.inputs
    }

    /// Graph vertex of input `k` (0-based).
    pub fn input_node(&self, k: usize) -> NodeId {
        NodeId(self.n + 1 + k)
    }

    pub fn diagonal_signs(&self) -> Option<&[Sign]> {
        self.diagonal_signs.as_deref()
    }

    pub fn nominal_weights(&self) -> Option<&BTreeMap<Edge, f64>> {
        self.nominal_weights.as_ref()
    }

    /// Number of signed state edges incident to `i`.
    pub fn degree(&self, i: NodeId) -> usize {
        self.edges.keys().filter(|e| e.contains(i)).count()
    }

    /// Signs the derived diagonal `l_ii = -sum a_ij` can take over the sign
    /// family, ignoring measure-zero cancellations only when both signs occur.
    pub fn attainable_diagonal_signs(&self, i: NodeId) -> BTreeSet<Sign> {
        let mut pos = false;
        let mut neg = false;
        for (e, s) in self.edges() {
            if e.contains(i) {
                match s {
                    Sign::Positive => pos = true,
                    Sign::Negative => neg = true,
                    Sign::Zero => {}
                }
            }
        }
        match (pos, neg) {
            (false, false) => [Sign::Zero].into(),
            (true, false) => [Sign::Negative].into(),
            (false, true) => [Sign::Positive].into(),
            (true, true) => [Sign::Negative, Sign::Zero, Sign::Positive].into(),
        }
    }
}

/// Graph representation `G(T)` or a subgraph of it.
///
/// Every state carries a self-loop, so [`Graph::neighbors`] of a state always
/// contains the state itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    m: usize,
    states: BTreeSet<NodeId>,
    state_edges: BTreeSet<Edge>,
    input_edges: BTreeSet<(NodeId, NodeId)>,
    adjacency: BTreeMap<NodeId, BTreeSet<NodeId>>,
}

/// Build `G(T)` from a validated network.
pub fn build_graph(net: &SignedNetwork) -> Graph {
    let states = (1..=net.n()).map(NodeId).collect();
    let state_edges = net.edges().map(|(e, _)| e).collect();
    let input_edges = net
        .input_states()
        .iter()
        .enumerate()
        .map(|(k, &s)| (s, net.input_node(k)))
        .collect();
    Graph::from_parts(net.n(), net.m(), states, state_edges, input_edges)
        .expect("a validated network yields a consistent graph")
}

impl Graph {
    /// Assemble a (sub)graph over the universe of a network with `n` states
    /// and `m` inputs.
    pub fn from_parts(
        n: usize,
        m: usize,
        states: BTreeSet<NodeId>,
        state_edges: BTreeSet<Edge>,
        input_edges: BTreeSet<(NodeId, NodeId)>,
    ) -> Result<Graph> {
        for &s in &states {
            if s.0 == 0 || s.0 > n {
                return Err(Error::NotAStateNode(s));
            }
        }
        let mut adjacency: BTreeMap<NodeId, BTreeSet<NodeId>> =
            states.iter().map(|&s| (s, BTreeSet::from([s]))).collect();
        for &e in &state_edges {
            if !states.contains(&e.low()) || !states.contains(&e.high()) {
                return Err(Error::EdgeOutsideGraph(e));
            }
            adjacency.get_mut(&e.low()).unwrap().insert(e.high());
            adjacency.get_mut(&e.high()).unwrap().insert(e.low());
        }
        let mut driven = BTreeSet::new();
        for &(s, u) in &input_edges {
            if !states.contains(&s) {
                return Err(Error::NotAStateNode(s));
            }
            if u.0 <= n || u.0 > n + m || !driven.insert(u) {
                return Err(Error::NodeOutOfRange { node: u.0, n });
            }
            adjacency.get_mut(&s).unwrap().insert(u);
        }
        if let Some(s) = input_edges
            .iter()
            .map(|&(s, _)| s)
            .collect::<Vec<_>>()
            .windows(2)
            .find(|w| w[0] == w[1])
            .map(|w| w[0])
        {
            return Err(Error::NonInjectiveInputs {
                state: s.0,
                first: 0,
                second: 0,
            });
        }
        Ok(Graph {
            n,
            m,
            states,
            state_edges,
            input_edges,
            adjacency,
        })
    }

    /// Subgraph on `states` keeping the given edges and the input edges of
    /// those states found in `parent`.
    pub fn subgraph(
        parent: &Graph,
        states: &BTreeSet<NodeId>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Graph> {
        let input_edges = parent
            .input_edges
            .iter()
            .filter(|(s, _)| states.contains(s))
            .copied()
            .collect();
        Graph::from_parts(
            parent.n,
            parent.m,
            states.clone(),
            edges.into_iter().collect(),
            input_edges,
        )
    }

    /// Union of two graphs over the same universe plus extra state edges.
    pub fn union_with(&self, other: &Graph, extra: impl IntoIterator<Item = Edge>) -> Result<Graph> {
        let states = self.states.union(&other.states).copied().collect();
        let mut edges: BTreeSet<Edge> = self.state_edges.union(&other.state_edges).copied().collect();
        edges.extend(extra);
        let input_edges = self.input_edges.union(&other.input_edges).copied().collect();
        Graph::from_parts(self.n.max(other.n), self.m.max(other.m), states, edges, input_edges)
    }

    pub fn universe_states(&self) -> usize {
        self.n
    }

    pub fn universe_inputs(&self) -> usize {
        self.m
    }

    pub fn is_state(&self, v: NodeId) -> bool {
        self.states.contains(&v)
    }

    pub fn is_input(&self, v: NodeId) -> bool {
        self.input_edges.iter().any(|&(_, u)| u == v)
    }

    pub fn states(&self) -> &BTreeSet<NodeId> {
        &self.states
    }

    /// All vertices: states plus the inputs attached to them.
    pub fn vertices(&self) -> BTreeSet<NodeId> {
        let mut v = self.states.clone();
        v.extend(self.input_edges.iter().map(|&(_, u)| u));
        v
    }

    pub fn state_edges(&self) -> &BTreeSet<Edge> {
        &self.state_edges
    }

    /// Directed `(state, input)` pairs.
    pub fn input_edges(&self) -> &BTreeSet<(NodeId, NodeId)> {
        &self.input_edges
    }

    pub fn self_loops(&self) -> &BTreeSet<NodeId> {
        &self.states
    }

    pub fn has_edge(&self, i: NodeId, j: NodeId) -> bool {
        self.adjacency.get(&i).is_some_and(|a| a.contains(&j))
    }

    /// `N_i`, including `i` itself and any input attached to `i`.
    pub fn neighbors(&self, i: NodeId) -> Result<&BTreeSet<NodeId>> {
        self.adjacency.get(&i).ok_or(Error::NotAStateNode(i))
    }

    /// State neighbours of `i`, excluding `i` and inputs.
    pub fn state_neighbors(&self, i: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.adjacency
            .get(&i)
            .into_iter()
            .flatten()
            .copied()
            .filter(move |&v| v != i && self.states.contains(&v))
    }

    /// `N(alpha)`, the union of `N_i` over `i` in `alpha`.
    pub fn neighborhood_of_set(&self, alpha: &StateSubset) -> Result<BTreeSet<NodeId>> {
        if alpha.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mut out = BTreeSet::new();
        for &i in alpha.members() {
            out.extend(self.neighbors(i)?);
        }
        Ok(out)
    }

    /// For each state, whether some input node is reachable from it.
    pub fn check_accessibility(&self) -> BTreeMap<NodeId, bool> {
        let mut reached: BTreeSet<NodeId> = self.input_edges.iter().map(|&(s, _)| s).collect();
        let mut queue: VecDeque<NodeId> = reached.iter().copied().collect();
        while let Some(v) = queue.pop_front() {
            for w in self.state_neighbors(v) {
                if reached.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        self.states.iter().map(|&s| (s, reached.contains(&s))).collect()
    }

    pub fn inaccessible_states(&self) -> Vec<NodeId> {
        self.check_accessibility()
            .into_iter()
            .filter(|&(_, ok)| !ok)
            .map(|(s, _)| s)
            .collect()
    }
}

/// A nonempty or empty set of state nodes, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateSubset(Vec<NodeId>);

impl StateSubset {
    pub fn new(members: impl IntoIterator<Item = NodeId>) -> StateSubset {
        let set: BTreeSet<NodeId> = members.into_iter().collect();
        StateSubset(set.into_iter().collect())
    }

    pub fn from_indices(members: &[usize]) -> StateSubset {
        StateSubset::new(members.iter().map(|&i| NodeId(i)))
    }

    /// Like [`StateSubset::new`] but checks membership against a graph.
    pub fn in_graph(g: &Graph, members: impl IntoIterator<Item = NodeId>) -> Result<StateSubset> {
        let s = StateSubset::new(members);
        if let Some(&bad) = s.0.iter().find(|v| !g.is_state(**v)) {
            return Err(Error::NotAStateNode(bad));
        }
        Ok(s)
    }

    pub fn members(&self) -> &[NodeId] {
        &self.0
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for StateSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, v) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}
