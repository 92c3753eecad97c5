//! Command implementations and their reports.
//!
//! Every report serializes to JSON and renders to text from the same fields.

use std::fmt::Write as _;
use std::path::Path as FsPath;

use anyhow::{bail, Result};
use serde::Serialize;
use topoctl_core::certify::{certify_bruteforce, LMatrixStatus, Status, Verdict};
use topoctl_core::decompose::{path_search_with, uncovered_states, ClaimRule, DecomposeOptions, Path};
use topoctl_core::merge::{analyze, MergeOptions, MergeRule, MergeStep, PipelineOptions};
use topoctl_core::numeric::{l_matrix_refutation, monte_carlo, refute_certification, RankReport, SamplingMode};
use topoctl_core::{build_graph, Edge, NodeId, Sign, SignedNetwork, StateSubset, Witness};

fn join<T: std::fmt::Display>(items: impl IntoIterator<Item = T>, sep: &str) -> String {
    let v: Vec<String> = items.into_iter().map(|x| x.to_string()).collect();
    if v.is_empty() {
        "none".into()
    } else {
        v.join(sep)
    }
}

fn edge_set<'a>(edges: impl IntoIterator<Item = &'a Edge>) -> String {
    format!("{{{}}}", edges.into_iter().map(|e| e.to_string()).collect::<Vec<_>>().join(","))
}

#[derive(Clone, Debug, Serialize)]
pub struct PathEntry {
    /// 1-based input index.
    pub input_index: usize,
    /// Graph id of the input node.
    pub input: NodeId,
    pub nodes: Vec<NodeId>,
    pub length: usize,
}

impl PathEntry {
    fn new(k: usize, p: &Path) -> PathEntry {
        PathEntry {
            input_index: k + 1,
            input: p.root_input,
            nodes: p.nodes.clone(),
            length: p.len(),
        }
    }
}

fn render_path(p: &PathEntry) -> String {
    let mut s = format!("u{} ({})", p.input_index, p.input);
    for v in &p.nodes {
        let _ = write!(s, " -> {v}");
    }
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct StepEntry {
    /// 1-based indices of the paths merged so far.
    pub merged_paths: Vec<usize>,
    pub incoming_path: usize,
    pub found: Vec<Edge>,
    pub accepted: Vec<Edge>,
    pub discarded: Vec<Edge>,
    pub blocking: Option<StateSubset>,
}

impl From<&MergeStep> for StepEntry {
    fn from(s: &MergeStep) -> StepEntry {
        StepEntry {
            merged_paths: s.merged_paths.iter().map(|k| k + 1).collect(),
            incoming_path: s.incoming_path + 1,
            found: s.found.iter().collect(),
            accepted: s.accepted.iter().collect(),
            discarded: s.discarded.iter().collect(),
            blocking: s.blocking.clone(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BruteForceEntry {
    pub status: Status,
    pub failing_subset: Option<StateSubset>,
    pub agrees_with_pipeline: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MonteCarloSummary {
    pub trials: usize,
    pub mode: SamplingMode,
    pub seed: u64,
    pub min_rank: usize,
    pub max_rank: usize,
    pub deficient_count: usize,
    pub deficient_trials: Vec<usize>,
    pub resamples: usize,
}

impl From<&RankReport> for MonteCarloSummary {
    fn from(r: &RankReport) -> Self {
        MonteCarloSummary {
            trials: r.trials,
            mode: r.mode,
            seed: r.seed,
            min_rank: r.min_rank(),
            max_rank: r.max_rank(),
            deficient_count: r.deficient_trials.len(),
            deficient_trials: r.deficient_trials.clone(),
            resamples: r.resamples,
        }
    }
}

fn render_mc(out: &mut String, n: usize, s: &MonteCarloSummary) {
    let _ = writeln!(
        out,
        "rank of C_L over {} trials ({}, seed {}): min {}, max {}, deficient {} (n = {})",
        s.trials, s.mode, s.seed, s.min_rank, s.max_rank, s.deficient_count, n
    );
    if s.resamples > 0 {
        let _ = writeln!(out, "resampled draws for declared diagonal signs: {}", s.resamples);
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefuteOptions {
    pub trials: usize,
    pub mode: SamplingMode,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckOptions {
    pub brute_force: bool,
    /// Enumeration cap for subset and edge-set searches.
    pub max_n: usize,
    pub merge_rule: MergeRule,
    pub claim_rule: ClaimRule,
    pub refute: Option<RefuteOptions>,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            brute_force: false,
            max_n: topoctl_core::DEFAULT_ENUMERATION_CAP,
            merge_rule: MergeRule::Exact,
            claim_rule: ClaimRule::Member,
            refute: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub command: &'static str,
    pub n: usize,
    pub m: usize,
    pub edge_count: usize,
    pub status: Status,
    pub summary: &'static str,
    pub merge_rule: MergeRule,
    pub claim_rule: ClaimRule,
    pub pipeline_status: Status,
    pub paths: Vec<PathEntry>,
    pub merge_steps: Vec<StepEntry>,
    pub discarded_edges: Vec<Edge>,
    pub uncovered_nodes: Vec<NodeId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub brute_force: Option<BruteForceEntry>,
    pub verdict: Verdict,
}

impl CheckReport {
    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "network: {} states, {} inputs, {} edges", self.n, self.m, self.edge_count);
        let _ = writeln!(out, "paths:");
        for p in &self.paths {
            let _ = writeln!(out, "  {}", render_path(p));
        }
        let _ = writeln!(out, "merge steps ({} rule):", rule_name(self.merge_rule));
        if self.merge_steps.is_empty() {
            let _ = writeln!(out, "  none");
        }
        for (k, s) in self.merge_steps.iter().enumerate() {
            let _ = write!(
                out,
                "  {}: paths {} + path {}: found {}, accepted {}, discarded {}",
                k + 1,
                join(&s.merged_paths, ","),
                s.incoming_path,
                edge_set(&s.found),
                edge_set(&s.accepted),
                edge_set(&s.discarded)
            );
            if let Some(b) = &s.blocking {
                let _ = write!(out, " (all found edges leave {b} without a dedicated node)");
            }
            out.push('\n');
        }
        let _ = writeln!(out, "harmful edges: {}", join(&self.discarded_edges, " "));
        let _ = writeln!(out, "uncovered states: {}", join(&self.uncovered_nodes, " "));
        let _ = writeln!(out, "inaccessible states: {}", join(&self.verdict.assumptions.inaccessible, " "));
        let _ = writeln!(out, "pipeline: {}", self.pipeline_status);
        if let Some(b) = &self.brute_force {
            let _ = write!(out, "brute force: {}", b.status);
            if let Some(s) = &b.failing_subset {
                let _ = write!(out, ", no dedicated node for {s}");
            }
            let agreement = if b.agrees_with_pipeline { "agrees" } else { "disagrees" };
            let _ = writeln!(out, " ({agreement} with the pipeline)");
        }
        if let Witness::Realization { trial, rank, .. } = &self.verdict.witness {
            let _ = writeln!(out, "refutation: trial {trial} has rank {rank} < {}", self.n);
        } else if let Some(t) = self.verdict.refutation_trials {
            let _ = writeln!(out, "refutation: no rank-deficient realization in {t} trials");
        }
        let _ = writeln!(out, "verdict: {} ({})", self.status, self.summary);
        out
    }
}

fn rule_name(r: MergeRule) -> &'static str {
    match r {
        MergeRule::Exact => "exact",
        MergeRule::Endpoint => "endpoint",
    }
}

/// Decompose, merge and judge; optionally cross-check by brute force and
/// try a numerical refutation.
pub fn check(net: &SignedNetwork, opts: &CheckOptions) -> Result<CheckReport> {
    let g = build_graph(net);
    let pipeline = PipelineOptions {
        decompose: DecomposeOptions {
            claim_rule: opts.claim_rule,
            ..Default::default()
        },
        merge: MergeOptions {
            rule: opts.merge_rule,
            max_connecting_edges: opts.max_n,
            enumeration_cap: opts.max_n,
        },
    };
    let outcome = analyze(net, &pipeline)?;
    let pipeline_status = outcome.verdict.status;
    let mut verdict = outcome.verdict;
    let mut brute_force = None;
    if opts.brute_force {
        let b = certify_bruteforce(&g, opts.max_n)?;
        brute_force = Some(BruteForceEntry {
            status: b.status,
            failing_subset: b.failing_subset().cloned(),
            agrees_with_pipeline: b.status == pipeline_status,
        });
        // the exhaustive check decides the condition exactly
        verdict = b;
    }
    if let Some(r) = opts.refute {
        if verdict.status == Status::NotCertified {
            verdict = refute_certification(net, verdict, r.trials, r.mode, r.seed)?;
        }
    }
    let report = outcome.report;
    Ok(CheckReport {
        command: "check",
        n: net.n(),
        m: net.m(),
        edge_count: net.edge_count(),
        status: verdict.status,
        summary: verdict.summary(),
        merge_rule: opts.merge_rule,
        claim_rule: opts.claim_rule,
        pipeline_status,
        paths: report.paths.iter().enumerate().map(|(k, p)| PathEntry::new(k, p)).collect(),
        merge_steps: report.steps.iter().map(StepEntry::from).collect(),
        discarded_edges: report.discarded_total.clone(),
        uncovered_nodes: report.uncovered_nodes.clone(),
        brute_force,
        verdict,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DecomposeReport {
    pub command: &'static str,
    pub claim_rule: ClaimRule,
    pub paths: Vec<PathEntry>,
    pub uncovered_nodes: Vec<NodeId>,
}

impl DecomposeReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for p in &self.paths {
            let _ = writeln!(out, "{}", render_path(p));
        }
        if !self.uncovered_nodes.is_empty() {
            let _ = writeln!(out, "warning: states not covered by any path: {}", join(&self.uncovered_nodes, " "));
        }
        out
    }
}

pub fn decompose(net: &SignedNetwork, claim_rule: ClaimRule) -> Result<DecomposeReport> {
    let g = build_graph(net);
    let opts = DecomposeOptions {
        claim_rule,
        ..Default::default()
    };
    let paths = path_search_with(net, &g, opts)?;
    Ok(DecomposeReport {
        command: "decompose",
        claim_rule,
        uncovered_nodes: uncovered_states(&g, &paths),
        paths: paths.iter().enumerate().map(|(k, p)| PathEntry::new(k, p)).collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub command: &'static str,
    pub n: usize,
    #[serde(flatten)]
    pub summary: MonteCarloSummary,
    #[serde(skip)]
    pub ranks: RankReport,
}

impl VerifyReport {
    pub fn exit_code(&self) -> i32 {
        if self.summary.deficient_count > 0 {
            Status::NumericallyRefuted.exit_code()
        } else {
            0
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        render_mc(&mut out, self.n, &self.summary);
        if let Some(first) = self.summary.deficient_trials.first() {
            let _ = writeln!(out, "first deficient trial: {first}");
        }
        out
    }

    /// One `trial,rank` row per trial.
    pub fn write_csv(&self, path: &FsPath) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["trial", "rank"])?;
        for (t, r) in self.ranks.ranks.iter().enumerate() {
            w.write_record([t.to_string(), r.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn verify(net: &SignedNetwork, trials: usize, mode: SamplingMode, seed: u64) -> Result<VerifyReport> {
    if trials == 0 {
        bail!("--trials must be at least 1");
    }
    let ranks = monte_carlo(net, trials, mode, seed)?;
    Ok(VerifyReport {
        command: "verify",
        n: net.n(),
        summary: MonteCarloSummary::from(&ranks),
        ranks,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AccessEntry {
    pub state: NodeId,
    pub accessible: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagonalEntry {
    pub state: NodeId,
    pub declared: Option<Sign>,
    pub attainable: Vec<Sign>,
    pub feasible: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AssumptionsReport {
    pub command: &'static str,
    pub accessibility: Vec<AccessEntry>,
    pub inaccessible: Vec<NodeId>,
    pub l_matrix: LMatrixStatus,
    pub seed: u64,
    pub diagonal_declared: bool,
    pub diagonal: Vec<DiagonalEntry>,
    pub ok: bool,
}

impl AssumptionsReport {
    pub fn exit_code(&self) -> i32 {
        if self.ok {
            0
        } else {
            1
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "accessibility:");
        for a in &self.accessibility {
            let _ = writeln!(out, "  state {}: {}", a.state, if a.accessible { "accessible" } else { "NOT accessible" });
        }
        let lm = match &self.l_matrix {
            LMatrixStatus::NotChecked => "not checked".to_string(),
            LMatrixStatus::NoRefutationFound { trials } => {
                format!("no refutation in {trials} trials (seed {}); not a proof", self.seed)
            }
            LMatrixStatus::Refuted { trial } => format!("refuted: rank [L, B] < n at trial {trial} (seed {})", self.seed),
        };
        let _ = writeln!(out, "row independence of [L, B]: {lm}");
        if self.diagonal_declared {
            let _ = writeln!(out, "declared diagonal signs:");
            for d in &self.diagonal {
                let declared = d.declared.map_or("?", |s| s.symbol());
                let attainable = join(d.attainable.iter().map(|s| s.symbol()), " ");
                let state = if d.feasible { "feasible" } else { "INFEASIBLE" };
                let _ = writeln!(out, "  state {}: {declared} (attainable {attainable}) {state}", d.state);
            }
        } else {
            let _ = writeln!(out, "declared diagonal signs: none");
        }
        let _ = writeln!(out, "assumptions {}", if self.ok { "hold" } else { "fail" });
        out
    }
}

pub fn assumptions(net: &SignedNetwork, trials: usize, seed: u64) -> Result<AssumptionsReport> {
    if trials == 0 {
        bail!("--trials must be at least 1");
    }
    let g = build_graph(net);
    let access = g.check_accessibility();
    let inaccessible = g.inaccessible_states();
    let declared = net.diagonal_signs();
    let diagonal: Vec<DiagonalEntry> = g
        .states()
        .iter()
        .map(|&s| {
            let attainable = net.attainable_diagonal_signs(s);
            let d = declared.map(|d| d[s.index() - 1]);
            DiagonalEntry {
                state: s,
                declared: d,
                feasible: d.is_none_or(|d| attainable.contains(&d)),
                attainable: attainable.into_iter().collect(),
            }
        })
        .collect();
    // an infeasible declared diagonal would make sampling spin until it gives up
    let l_matrix = if diagonal.iter().all(|d| d.feasible) {
        l_matrix_refutation(net, trials, seed)?.status()
    } else {
        LMatrixStatus::NotChecked
    };
    let ok = inaccessible.is_empty()
        && diagonal.iter().all(|d| d.feasible)
        && matches!(l_matrix, LMatrixStatus::NoRefutationFound { .. });
    Ok(AssumptionsReport {
        command: "assumptions",
        accessibility: access.into_iter().map(|(state, accessible)| AccessEntry { state, accessible }).collect(),
        inaccessible,
        l_matrix,
        seed,
        diagonal_declared: declared.is_some(),
        diagonal,
        ok,
    })
}
