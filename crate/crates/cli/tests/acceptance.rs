//! Acceptance checks, one PASS/FAIL line each. Exits nonzero on any failure
//! not listed in `KNOWN_FAILURES`.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use topoctl_cli::{check, CheckOptions, NetworkFile};
use topoctl_core::certify::{certify_bruteforce, find_dedicated_node, Status};
use topoctl_core::merge::{analyze, merge_condition_with, ConnectingEdgeSet, MergeOptions, MergeRule, PipelineOptions};
use topoctl_core::numeric::{l_matrix_refutation, monte_carlo, LMatrixOutcome, SamplingMode};
use topoctl_core::{build_graph, Edge, Graph, NodeId, Sign, SignedNetwork, StateSubset};

const CORPUS_SEED: u64 = 7_301;
const RANK_SEED: u64 = 42;
const TWO_PART_SEED: u64 = 20_261_018;

/// Criteria expected to fail. They still print FAIL but do not change the
/// exit status. The endpoint-only merge check is unsound: a subset holding
/// one endpoint and interior states of both parts can lose every dedicated
/// node, and random two-part instances hit this a few times per hundred.
const KNOWN_FAILURES: &[&str] = &["6d"];

struct Outcome {
    id: &'static str,
    title: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
}

fn run(id: &'static str, title: &'static str, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (pass, detail) = f();
    Outcome {
        id,
        title,
        pass,
        detail,
        elapsed: start.elapsed(),
    }
}

fn fixture(name: &str) -> SignedNetwork {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.json"));
    NetworkFile::load(&path).and_then(|f| f.to_network()).expect("fixture loads")
}

fn edge_set(list: &[(usize, usize)]) -> BTreeSet<Edge> {
    list.iter().map(|&(i, j)| Edge::new(i, j)).collect()
}

fn certified(g: &Graph) -> bool {
    certify_bruteforce(g, 20).unwrap().status == Status::Certified
}

fn within(elapsed: Duration, limit: Duration) -> bool {
    elapsed < limit
}

fn fig1_reproduction() -> (bool, String) {
    let start = Instant::now();
    let r = check(&fixture("fig1"), &CheckOptions::default()).unwrap();
    let elapsed = start.elapsed();
    let mut covered = BTreeSet::new();
    let disjoint = r.paths.iter().flat_map(|p| p.nodes.iter()).all(|v| covered.insert(*v));
    let all: BTreeSet<NodeId> = (1..=5).map(NodeId).collect();
    let step = |k: usize| -> (BTreeSet<Edge>, BTreeSet<Edge>) {
        let s = &r.merge_steps[k];
        (s.found.iter().copied().collect(), s.accepted.iter().copied().collect())
    };
    let ok_steps = r.merge_steps.len() == 2 && {
        let (_, acc1) = step(0);
        let (found2, acc2) = step(1);
        acc1 == edge_set(&[(3, 4), (2, 4)]) && found2 == edge_set(&[(1, 2), (1, 3), (2, 5), (4, 5)]) && acc2 == found2
    };
    let pass = r.status == Status::Certified
        && r.paths.len() == 3
        && disjoint
        && covered == all
        && ok_steps
        && within(elapsed, Duration::from_secs(1));
    let paths: Vec<String> = r.paths.iter().map(|p| format!("{:?}", p.nodes.iter().map(|v| v.0).collect::<Vec<_>>())).collect();
    (pass, format!("status {}, paths {}, {} steps, {:?}", r.status, paths.join(" "), r.merge_steps.len(), elapsed))
}

fn fig8_reproduction() -> (bool, String) {
    let start = Instant::now();
    let r = check(&fixture("fig8"), &CheckOptions::default()).unwrap();
    let elapsed = start.elapsed();
    let pass = r.status == Status::NotCertified
        && r.discarded_edges == vec![Edge::new(1, 4)]
        && r.uncovered_nodes.is_empty()
        && within(elapsed, Duration::from_secs(1));
    let discarded: Vec<String> = r.discarded_edges.iter().map(|e| e.to_string()).collect();
    (
        pass,
        format!(
            "status {}, discarded [{}], uncovered {:?}, {:?}",
            r.status,
            discarded.join(" "),
            r.uncovered_nodes,
            elapsed
        ),
    )
}

fn rank_experiments() -> (bool, String) {
    let start = Instant::now();
    let a = monte_carlo(&fixture("fig1"), 1000, SamplingMode::continuous(), RANK_SEED).unwrap();
    let b = monte_carlo(&fixture("fig8_signs"), 10_000, SamplingMode::integer(), RANK_SEED).unwrap();
    let c = monte_carlo(&fixture("fig8_signs_a14_zero"), 10_000, SamplingMode::integer(), RANK_SEED).unwrap();
    let d = monte_carlo(&fixture("fig8_signs_a14_pos"), 10_000, SamplingMode::integer(), RANK_SEED).unwrap();
    let elapsed = start.elapsed();
    let pass = a.all_full()
        && a.min_rank() == 5
        && !b.deficient_trials.is_empty()
        && c.all_full()
        && d.all_full()
        && within(elapsed, Duration::from_secs(60));
    (
        pass,
        format!(
            "(a) deficient {}/1000 (b) {}/10000 (c) {}/10000 (d) {}/10000, {:?}",
            a.deficient_trials.len(),
            b.deficient_trials.len(),
            c.deficient_trials.len(),
            d.deficient_trials.len(),
            elapsed
        ),
    )
}

/// Connected network: random spanning tree plus extra edges, random signs,
/// inputs on distinct random states.
fn random_connected(rng: &mut ChaCha8Rng) -> SignedNetwork {
    let n = rng.gen_range(3..=10);
    let m = rng.gen_range(1..=3);
    let mut labels: Vec<usize> = (1..=n).collect();
    labels.shuffle(rng);
    let mut pairs = BTreeSet::new();
    for k in 1..n {
        let parent = rng.gen_range(0..k);
        let (a, b) = (labels[k], labels[parent]);
        pairs.insert((a.min(b), a.max(b)));
    }
    let density: f64 = rng.gen_range(0.0..0.5);
    for i in 1..=n {
        for j in i + 1..=n {
            if rng.gen_bool(density) {
                pairs.insert((i, j));
            }
        }
    }
    let edges: Vec<(usize, usize, Sign)> = pairs
        .into_iter()
        .map(|(i, j)| (i, j, if rng.gen_bool(0.5) { Sign::Positive } else { Sign::Negative }))
        .collect();
    let mut states: Vec<usize> = (1..=n).collect();
    states.shuffle(rng);
    SignedNetwork::new(n, edges, states[..m].to_vec()).unwrap()
}

fn corpus() -> Vec<SignedNetwork> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    (0..500).map(|_| random_connected(&mut rng)).collect()
}

fn oracle_equivalence(corpus: &[SignedNetwork]) -> (bool, String) {
    let start = Instant::now();
    let mut certified_by_pipeline = 0;
    let mut certified_by_bruteforce = 0;
    let mut disagreements = 0;
    let mut endpoint_disagreements = 0;
    let endpoint = PipelineOptions {
        merge: MergeOptions {
            rule: MergeRule::Endpoint,
            ..Default::default()
        },
        ..Default::default()
    };
    for net in corpus {
        let brute = certified(&build_graph(net));
        certified_by_bruteforce += brute as usize;
        let pipeline = analyze(net, &PipelineOptions::default()).unwrap().verdict.status == Status::Certified;
        certified_by_pipeline += pipeline as usize;
        if pipeline && !brute {
            disagreements += 1;
        }
        let literal = analyze(net, &endpoint).unwrap().verdict.status == Status::Certified;
        if literal && !brute {
            endpoint_disagreements += 1;
        }
    }
    let elapsed = start.elapsed();
    let pass = disagreements == 0 && within(elapsed, Duration::from_secs(300));
    (
        pass,
        format!(
            "{} networks, pipeline certified {}, brute force certified {}, disagreements {} (endpoint rule: {}), {:?}",
            corpus.len(),
            certified_by_pipeline,
            certified_by_bruteforce,
            disagreements,
            endpoint_disagreements,
            elapsed
        ),
    )
}

fn certified_means_controllable(corpus: &[SignedNetwork]) -> (bool, String) {
    let mut checked = 0;
    let mut failures = Vec::new();
    for (k, net) in corpus.iter().enumerate() {
        let g = build_graph(net);
        if !certified(&g) || !g.inaccessible_states().is_empty() {
            continue;
        }
        let seed = RANK_SEED + k as u64;
        if !matches!(l_matrix_refutation(net, 1000, seed).unwrap(), LMatrixOutcome::NoRefutationFound { .. }) {
            continue;
        }
        checked += 1;
        for mode in [SamplingMode::continuous(), SamplingMode::integer()] {
            let r = monte_carlo(net, 100, mode, seed).unwrap();
            if !r.all_full() {
                failures.push(format!("network {k} ({mode}): {} deficient", r.deficient_trials.len()));
            }
        }
    }
    let pass = failures.is_empty() && checked > 0;
    (pass, format!("{checked} certified networks x 2 modes x 100 trials, failures {:?}", failures))
}

fn paths_certified() -> (bool, String) {
    let mut bad = Vec::new();
    for len in 1..=12 {
        let net = SignedNetwork::new(len, (1..len).map(|i| (i, i + 1, Sign::Positive)), [len]).unwrap();
        let brute = certified(&build_graph(&net));
        let pipeline = analyze(&net, &PipelineOptions::default()).unwrap().verdict.status == Status::Certified;
        if !(brute && pipeline) {
            bad.push(len);
        }
    }
    (bad.is_empty(), format!("lengths 1..=12, failures {bad:?}"))
}

/// Random tree with a single input and two leaves sharing a parent, neither
/// of which carries the input.
fn random_tree(rng: &mut ChaCha8Rng) -> (SignedNetwork, Vec<usize>) {
    loop {
        let n = rng.gen_range(3..=12);
        let mut parent = vec![0; n + 1];
        let mut edges = Vec::new();
        for v in 2..=n {
            parent[v] = rng.gen_range(1..v);
            let s = if rng.gen_bool(0.5) { Sign::Positive } else { Sign::Negative };
            edges.push((parent[v], v, s));
        }
        let mut degree = vec![0; n + 1];
        for &(a, b, _) in &edges {
            degree[a] += 1;
            degree[b] += 1;
        }
        let input = rng.gen_range(1..=n);
        let leaves: Vec<usize> = (1..=n).filter(|&v| degree[v] == 1).collect();
        let has_siblings = leaves.iter().any(|&a| {
            leaves
                .iter()
                .any(|&b| a < b && a != input && b != input && neighbour_of(&edges, a) == neighbour_of(&edges, b))
        });
        if leaves.len() >= 2 && has_siblings {
            return (SignedNetwork::new(n, edges, [input]).unwrap(), leaves);
        }
    }
}

fn neighbour_of(edges: &[(usize, usize, Sign)], leaf: usize) -> usize {
    edges
        .iter()
        .find_map(|&(a, b, _)| if a == leaf { Some(b) } else if b == leaf { Some(a) } else { None })
        .unwrap()
}

fn trees_not_certified() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED + 1);
    let mut bad = 0;
    let trials = 200;
    for _ in 0..trials {
        let (net, leaves) = random_tree(&mut rng);
        let v = certify_bruteforce(&build_graph(&net), 20).unwrap();
        let edges: Vec<(usize, usize, Sign)> = net.edges().map(|(e, s)| (e.low().0, e.high().0, s)).collect();
        let ok = v.status == Status::NotCertified
            && v.failing_subset().is_some_and(|w| {
                let m: Vec<usize> = w.members().iter().map(|v| v.0).collect();
                m.len() == 2
                    && m.iter().all(|x| leaves.contains(x))
                    && neighbour_of(&edges, m[0]) == neighbour_of(&edges, m[1])
            });
        bad += !ok as usize;
    }
    (bad == 0, format!("{trials} trees, failures {bad}"))
}

/// A certified graph on states `offset+1..=offset+size` of an `n`-state
/// universe, with one or two inputs, found by rejection sampling. Returns
/// its edges and driven states.
fn random_certified_part(rng: &mut ChaCha8Rng, offset: usize, size: usize) -> (Vec<(usize, usize)>, Vec<usize>) {
    loop {
        let mut edges = Vec::new();
        for i in 1..=size {
            for j in i + 1..=size {
                if rng.gen_bool(0.5) {
                    edges.push((offset + i, offset + j));
                }
            }
        }
        let mut states: Vec<usize> = (offset + 1..=offset + size).collect();
        states.shuffle(rng);
        let m = rng.gen_range(1..=2.min(size));
        let inputs = states[..m].to_vec();
        let net = SignedNetwork::new(offset + size, edges.iter().map(|&(i, j)| (i, j, Sign::Positive)), inputs.clone()).unwrap();
        let g = build_graph(&net);
        let part: BTreeSet<NodeId> = (offset + 1..=offset + size).map(NodeId).collect();
        let sub = Graph::subgraph(&g, &part, g.state_edges().iter().copied()).unwrap();
        if certified(&sub) {
            return (edges, inputs);
        }
    }
}

struct TwoParts {
    a: Graph,
    b: Graph,
    cross: ConnectingEdgeSet,
}

fn random_two_parts(rng: &mut ChaCha8Rng, max_part: usize, max_cross: usize, min_cross: usize) -> TwoParts {
    let na = rng.gen_range(1..=max_part);
    let nb = rng.gen_range(1..=max_part);
    let (ea, ia) = random_certified_part(rng, 0, na);
    let (eb, ib) = random_certified_part(rng, na, nb);
    let mut all_cross: Vec<(usize, usize)> = (1..=na).flat_map(|i| (na + 1..=na + nb).map(move |j| (i, j))).collect();
    all_cross.shuffle(rng);
    let k = rng.gen_range(min_cross..=max_cross.min(all_cross.len()));
    let cross_pairs = &all_cross[..k];
    let n = na + nb;
    let edges = ea.iter().chain(&eb).chain(cross_pairs).map(|&(i, j)| (i, j, Sign::Positive));
    let inputs: Vec<usize> = ia.iter().chain(&ib).copied().collect();
    let net = SignedNetwork::new(n, edges, inputs).unwrap();
    let g = build_graph(&net);
    let part = |lo: usize, hi: usize, es: &[(usize, usize)]| {
        let states = (lo..=hi).map(NodeId).collect();
        Graph::subgraph(&g, &states, es.iter().map(|&(i, j)| Edge::new(i, j))).unwrap()
    };
    TwoParts {
        a: part(1, na, &ea),
        b: part(na + 1, n, &eb),
        cross: cross_pairs.iter().map(|&(i, j)| Edge::new(i, j)).collect(),
    }
}

fn single_edge_closure() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED + 2);
    let mut bad = 0;
    for _ in 0..200 {
        let t = random_two_parts(&mut rng, 6, 1, 1);
        let merged = t.a.union_with(&t.b, t.cross.iter()).unwrap();
        bad += !certified(&merged) as usize;
    }
    (bad == 0, format!("200 pairs, failures {bad}"))
}

fn endpoint_check_matches_bruteforce() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(TWO_PART_SEED);
    let mut endpoint_mismatch = Vec::new();
    let mut exact_mismatch = 0;
    for k in 0..200 {
        let t = random_two_parts(&mut rng, 5, 3, 1);
        let merged = t.a.union_with(&t.b, t.cross.iter()).unwrap();
        let truth = certified(&merged);
        let endpoint = merge_condition_with(MergeRule::Endpoint, &t.a, &t.b, &t.cross, 20).unwrap().is_none();
        let exact = merge_condition_with(MergeRule::Exact, &t.a, &t.b, &t.cross, 20).unwrap().is_none();
        if endpoint != truth {
            let failing = certify_bruteforce(&merged, 20).unwrap().failing_subset().cloned();
            endpoint_mismatch.push(format!(
                "#{k}: states {:?}+{:?} edges {} blocking {}",
                t.a.states().iter().map(|v| v.0).collect::<Vec<_>>(),
                t.b.states().iter().map(|v| v.0).collect::<Vec<_>>(),
                t.cross,
                failing.map_or("-".into(), |s: StateSubset| s.to_string())
            ));
        }
        exact_mismatch += (exact != truth) as usize;
    }
    (
        endpoint_mismatch.is_empty(),
        format!(
            "200 instances, endpoint-rule mismatches {} {:?} (exact rule: {})",
            endpoint_mismatch.len(),
            endpoint_mismatch,
            exact_mismatch
        ),
    )
}

fn fixture_verdicts() -> (bool, String) {
    let expected = [
        ("fig2a", Status::Certified, None),
        ("fig2b", Status::NotCertified, Some(&[1, 2][..])),
        ("fig3a", Status::NotCertified, Some(&[1, 2][..])),
        ("fig3b", Status::Certified, None),
        ("fig4", Status::NotCertified, Some(&[2, 4][..])),
    ];
    let mut notes = Vec::new();
    let mut pass = true;
    for (name, status, witness) in expected {
        let g = build_graph(&fixture(name));
        let v = certify_bruteforce(&g, 20).unwrap();
        let mut ok = v.status == status;
        if let Some(w) = witness {
            let alpha = StateSubset::from_indices(w);
            ok &= find_dedicated_node(&g, &alpha).unwrap().is_none();
        }
        pass &= ok;
        notes.push(format!("{name} {}", v.status));
    }
    (pass, notes.join(", "))
}

fn main() {
    let corpus = corpus();
    let outcomes = vec![
        run("1", "fig1 fixture: certified, three covering paths, merge steps", fig1_reproduction),
        run("2", "fig8 fixture: not certified, discarded {(1,4)}", fig8_reproduction),
        run("3", "rank experiments at rel_tol 1e-9", rank_experiments),
        run("4", "pipeline soundness on 500 random connected networks", || oracle_equivalence(&corpus)),
        run("5", "certified networks have full-rank realizations", || certified_means_controllable(&corpus)),
        run("6a", "driven paths of length 1..12 are certified", paths_certified),
        run("6b", "single-input trees fail on a sibling leaf pair", trees_not_certified),
        run("6c", "single-edge merges of certified graphs stay certified", single_edge_closure),
        run("6d", "endpoint merge check agrees with brute force", endpoint_check_matches_bruteforce),
        run("7", "small fixture verdicts and witness subsets", fixture_verdicts),
    ];
    let mut failed = 0;
    let mut unexpected = 0;
    for o in &outcomes {
        let known = KNOWN_FAILURES.contains(&o.id);
        let tag = match (o.pass, known) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("{tag} [{:>2}] {} ({:.2?}): {}", o.id, o.title, o.elapsed, o.detail);
        failed += !o.pass as usize;
        unexpected += (!o.pass && !known) as usize;
    }
    println!("{} passed, {} failed, {} unexpected", outcomes.len() - failed, failed, unexpected);
    if unexpected > 0 {
        std::process::exit(1);
    }
}
