use std::collections::BTreeSet;

use proptest::prelude::*;
use topoctl_core::certify::{certify_bruteforce, find_dedicated_node, Status};
use topoctl_core::decompose::{path_search, uncovered_states};
use topoctl_core::merge::{
    analyze, connecting_edges, largest_edge_set, merge_condition_with, ConnectingEdgeSet, MergeOptions, MergeRule,
    PipelineOptions,
};
use topoctl_core::numeric::{l_matrix_refutation, monte_carlo, LMatrixOutcome, SamplingMode};
use topoctl_core::{build_graph, Edge, Graph, NodeId, Sign, SignedNetwork, StateSubset};

fn sign_of(b: bool) -> Sign {
    if b {
        Sign::Positive
    } else {
        Sign::Negative
    }
}

prop_compose! {
    /// A network on 3..=max_n states with up to three inputs on distinct states.
    fn arb_network(max_n: usize)(n in 3..=max_n)
        (n in Just(n),
         bits in prop::collection::vec((prop::bool::weighted(0.4), any::<bool>()), n * (n - 1) / 2),
         order in Just((1..=n).collect::<Vec<_>>()).prop_shuffle(),
         m in 1..=3usize)
        -> SignedNetwork
    {
        let mut edges = Vec::new();
        let mut k = 0;
        for i in 1..=n {
            for j in i + 1..=n {
                let (present, positive) = bits[k];
                k += 1;
                if present {
                    edges.push((i, j, sign_of(positive)));
                }
            }
        }
        SignedNetwork::new(n, edges, order[..m.min(n)].to_vec()).unwrap()
    }
}

fn certified(g: &Graph) -> bool {
    certify_bruteforce(g, 20).unwrap().status == Status::Certified
}

/// Two certified parts over states `1..=na` and `na+1..=na+nb`, plus cross
/// edges. Each part is a driven path with random chords; chords are dropped
/// if they break certification.
#[derive(Debug, Clone)]
struct TwoParts {
    net: SignedNetwork,
    a: Graph,
    b: Graph,
    cross: ConnectingEdgeSet,
}

fn part_edges(offset: usize, len: usize, chords: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut e: Vec<(usize, usize)> = (1..len).map(|i| (offset + i, offset + i + 1)).collect();
    for &(x, y) in chords {
        let (x, y) = (x % len + 1, y % len + 1);
        if x != y && !e.contains(&(offset + x.min(y), offset + x.max(y))) {
            e.push((offset + x.min(y), offset + x.max(y)));
        }
    }
    e
}

fn build_two_parts(
    na: usize,
    nb: usize,
    chords_a: &[(usize, usize)],
    chords_b: &[(usize, usize)],
    cross: &[(usize, usize)],
) -> TwoParts {
    let n = na + nb;
    let inputs = [na, n];
    let cross: BTreeSet<(usize, usize)> = cross.iter().map(|&(x, y)| (x % na + 1, na + y % nb + 1)).collect();
    let make = |ea: &[(usize, usize)], eb: &[(usize, usize)]| {
        let all = ea.iter().chain(eb).chain(cross.iter()).map(|&(i, j)| (i, j, Sign::Positive));
        let net = SignedNetwork::new(n, all, inputs).unwrap();
        let g = build_graph(&net);
        let part = |lo: usize, hi: usize, es: &[(usize, usize)]| {
            let states = (lo..=hi).map(NodeId).collect();
            Graph::subgraph(&g, &states, es.iter().map(|&(i, j)| Edge::new(i, j))).unwrap()
        };
        let (a, b) = (part(1, na, ea), part(na + 1, n, eb));
        (net, a, b)
    };
    let mut ea = part_edges(0, na, chords_a);
    let mut eb = part_edges(na, nb, chords_b);
    let (_, a, b) = make(&ea, &eb);
    if !certified(&a) {
        ea = part_edges(0, na, &[]);
    }
    if !certified(&b) {
        eb = part_edges(na, nb, &[]);
    }
    let (net, a, b) = make(&ea, &eb);
    let g = build_graph(&net);
    let cross = connecting_edges(&a, &b, &g).unwrap();
    TwoParts { net, a, b, cross }
}

prop_compose! {
    fn arb_two_parts(max_part: usize, max_cross: usize)
        (na in 1..=max_part, nb in 1..=max_part,
         chords_a in prop::collection::vec((0..8usize, 0..8usize), 0..3),
         chords_b in prop::collection::vec((0..8usize, 0..8usize), 0..3),
         cross in prop::collection::vec((0..8usize, 0..8usize), 0..=max_cross))
        -> TwoParts
    {
        build_two_parts(na, nb, &chords_a, &chords_b, &cross)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn pipeline_certified_implies_bruteforce_certified(net in arb_network(9)) {
        let out = analyze(&net, &PipelineOptions::default()).unwrap();
        if out.verdict.status == Status::Certified {
            prop_assert!(certified(&build_graph(&net)));
        }
    }

    #[test]
    fn pipeline_is_deterministic(net in arb_network(8)) {
        let a = analyze(&net, &PipelineOptions::default()).unwrap();
        let b = analyze(&net, &PipelineOptions::default()).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn decomposition_invariants(net in arb_network(9)) {
        let g = build_graph(&net);
        let paths = path_search(&net).unwrap();
        prop_assert_eq!(paths.len(), net.m());
        let roots: BTreeSet<NodeId> = net.input_states().iter().copied().collect();
        let mut seen = BTreeSet::new();
        for (k, p) in paths.iter().enumerate() {
            prop_assert_eq!(p.root(), net.input_states()[k]);
            for (a, &u) in p.nodes.iter().enumerate() {
                prop_assert!(seen.insert(u));
                if a > 0 {
                    prop_assert!(!roots.contains(&u));
                    prop_assert!(g.has_edge(p.nodes[a - 1], u));
                }
                for &w in p.nodes.iter().skip(a + 2) {
                    prop_assert!(!g.has_edge(u, w));
                }
            }
            let sub = Graph::subgraph(&g, &p.node_set(), p.edges()).unwrap();
            prop_assert!(certified(&sub));
        }
        let covered: usize = paths.iter().map(|p| p.nodes.len()).sum();
        prop_assert_eq!(covered + uncovered_states(&g, &paths).len(), net.n());
    }

    #[test]
    fn exact_rule_matches_bruteforce(t in arb_two_parts(5, 3)) {
        prop_assert!(certified(&t.a) && certified(&t.b));
        let merged = t.a.union_with(&t.b, t.cross.iter()).unwrap();
        let blocking = merge_condition_with(MergeRule::Exact, &t.a, &t.b, &t.cross, 20).unwrap();
        prop_assert_eq!(blocking.is_none(), certified(&merged));
        if let Some(alpha) = blocking {
            prop_assert!(find_dedicated_node(&merged, &alpha).unwrap().is_none());
        }
    }

    #[test]
    fn single_edge_merge_stays_certified(t in arb_two_parts(6, 1)) {
        prop_assume!(t.cross.len() == 1);
        let merged = t.a.union_with(&t.b, t.cross.iter()).unwrap();
        prop_assert!(certified(&merged));
        for rule in [MergeRule::Exact, MergeRule::Endpoint] {
            prop_assert_eq!(merge_condition_with(rule, &t.a, &t.b, &t.cross, 20).unwrap(), None);
        }
    }

    #[test]
    fn largest_edge_set_is_maximal(t in arb_two_parts(4, 5)) {
        let g = build_graph(&t.net);
        for rule in [MergeRule::Exact, MergeRule::Endpoint] {
            let opts = MergeOptions { rule, ..Default::default() };
            let (acc, disc) = largest_edge_set(&t.a, &t.b, &t.cross, &g, &opts).unwrap();
            prop_assert_eq!(acc.len() + disc.len(), t.cross.len());
            prop_assert_eq!(merge_condition_with(rule, &t.a, &t.b, &acc, 20).unwrap(), None);
            for e in disc.iter() {
                let bigger: ConnectingEdgeSet = acc.iter().chain([e]).collect();
                prop_assert!(merge_condition_with(rule, &t.a, &t.b, &bigger, 20).unwrap().is_some());
            }
        }
    }

    #[test]
    fn subsets_of_certified_witness_are_consistent(net in arb_network(7)) {
        let g = build_graph(&net);
        let v = certify_bruteforce(&g, 20).unwrap();
        if let Some(alpha) = v.failing_subset() {
            prop_assert!(find_dedicated_node(&g, alpha).unwrap().is_none());
            prop_assert!(!alpha.is_empty());
        } else {
            let all = StateSubset::in_graph(&g, g.states().iter().copied()).unwrap();
            prop_assert!(find_dedicated_node(&g, &all).unwrap().is_some());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn certified_networks_have_full_rank(net in arb_network(7), seed in any::<u64>()) {
        let g = build_graph(&net);
        prop_assume!(certified(&g));
        let lm = l_matrix_refutation(&net, 50, seed).unwrap();
        let no_refutation = matches!(lm, LMatrixOutcome::NoRefutationFound { .. });
        prop_assert!(no_refutation);
        for mode in [SamplingMode::continuous(), SamplingMode::integer()] {
            let report = monte_carlo(&net, 50, mode, seed).unwrap();
            prop_assert!(report.all_full(), "{:?}", report.deficient_trials);
        }
    }
}
