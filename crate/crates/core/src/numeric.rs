//! Sampled realizations of a sign pattern and controllability-matrix rank.
//!
//! Every trial draws its own ChaCha stream from `(seed, trial)`, so reports
//! do not depend on how trials are scheduled across threads.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::certify::{LMatrixStatus, Status, Verdict, Witness};
use crate::error::{Error, Result};
use crate::graph::{Edge, Sign, SignedNetwork};

pub const DEFAULT_REL_TOL: f64 = 1e-9;
pub const MAX_RESAMPLES: usize = 1000;

/// A weighted Laplacian `L` and unit input matrix `B` consistent with a
/// network's sign pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct Realization {
    pub laplacian: DMatrix<f64>,
    pub input_matrix: DMatrix<f64>,
    pub weights: BTreeMap<Edge, f64>,
}

impl Realization {
    /// Assemble `L` and `B` from explicit edge weights.
    pub fn from_weights(net: &SignedNetwork, weights: BTreeMap<Edge, f64>) -> Realization {
        let n = net.n();
        let mut l = DMatrix::zeros(n, n);
        for (&e, &w) in &weights {
            let (i, j) = (e.low().index() - 1, e.high().index() - 1);
            l[(i, j)] = w;
            l[(j, i)] = w;
            l[(i, i)] -= w;
            l[(j, j)] -= w;
        }
        Realization {
            laplacian: l,
            input_matrix: input_matrix(net),
            weights,
        }
    }

    /// The realization given by the network's nominal weights, if it has any.
    pub fn from_nominal(net: &SignedNetwork) -> Option<Realization> {
        net.nominal_weights().map(|w| Realization::from_weights(net, w.clone()))
    }

    pub fn n(&self) -> usize {
        self.laplacian.nrows()
    }

    pub fn m(&self) -> usize {
        self.input_matrix.ncols()
    }
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

#[derive(Serialize)]
struct WeightEntry {
    i: usize,
    j: usize,
    weight: f64,
}

impl Serialize for Realization {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let weights: Vec<WeightEntry> = self
            .weights
            .iter()
            .map(|(e, &weight)| WeightEntry {
                i: e.low().0,
                j: e.high().0,
                weight,
            })
            .collect();
        let mut st = s.serialize_struct("Realization", 3)?;
        st.serialize_field("laplacian", &rows_of(&self.laplacian))?;
        st.serialize_field("input_matrix", &rows_of(&self.input_matrix))?;
        st.serialize_field("weights", &weights)?;
        st.end()
    }
}

/// `B` with `b[s(k), k] = 1` for input `k` driving state `s(k)`.
pub fn input_matrix(net: &SignedNetwork) -> DMatrix<f64> {
    let mut b = DMatrix::zeros(net.n(), net.m());
    for (k, s) in net.input_states().iter().enumerate() {
        b[(s.index() - 1, k)] = 1.0;
    }
    b
}

/// Distribution of edge weight magnitudes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SamplingMode {
    Continuous { lo: f64, hi: f64 },
    Integer { lo: u32, hi: u32 },
}

impl SamplingMode {
    pub const fn continuous() -> SamplingMode {
        SamplingMode::Continuous { lo: 0.5, hi: 5.0 }
    }

    pub const fn integer() -> SamplingMode {
        SamplingMode::Integer { lo: 1, hi: 5 }
    }

    fn validate(self) -> Result<()> {
        let (lo, hi) = match self {
            SamplingMode::Continuous { lo, hi } => (lo, hi),
            SamplingMode::Integer { lo, hi } => (lo as f64, hi as f64),
        };
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
            return Err(Error::InvalidWeightRange { lo, hi });
        }
        Ok(())
    }

    fn magnitude(self, rng: &mut impl Rng) -> f64 {
        match self {
            SamplingMode::Continuous { lo, hi } => rng.gen_range(lo..=hi),
            SamplingMode::Integer { lo, hi } => rng.gen_range(lo..=hi) as f64,
        }
    }
}

impl std::fmt::Display for SamplingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SamplingMode::Continuous { lo, hi } => write!(f, "continuous [{lo}, {hi}]"),
            SamplingMode::Integer { lo, hi } => write!(f, "integer {{{lo}..{hi}}}"),
        }
    }
}

/// The RNG used for trial `trial` of a campaign seeded with `seed`.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn diagonal_matches(l: &DMatrix<f64>, declared: &[Sign]) -> bool {
    declared.iter().enumerate().all(|(i, &s)| Sign::of(l[(i, i)]) == s)
}

/// Draw one realization; the second value counts rejected draws.
///
/// When the network declares diagonal signs, draws whose derived diagonal
/// disagrees are rejected, up to [`MAX_RESAMPLES`] times.
pub fn sample_realization(
    net: &SignedNetwork,
    mode: SamplingMode,
    rng: &mut impl Rng,
) -> Result<(Realization, usize)> {
    mode.validate()?;
    for attempt in 0..=MAX_RESAMPLES {
        let weights = net
            .edges()
            .map(|(e, sign)| (e, sign.as_f64() * mode.magnitude(rng)))
            .collect();
        let r = Realization::from_weights(net, weights);
        match net.diagonal_signs() {
            Some(declared) if !diagonal_matches(&r.laplacian, declared) => continue,
            _ => return Ok((r, attempt)),
        }
    }
    Err(Error::SamplingExhausted {
        retries: MAX_RESAMPLES,
    })
}

/// `[B, LB, ..., L^(n-1) B]`.
pub fn controllability_matrix(r: &Realization) -> DMatrix<f64> {
    let (n, m) = (r.n(), r.m());
    let mut c = DMatrix::zeros(n, n * m);
    let mut block = r.input_matrix.clone();
    for k in 0..n {
        c.view_mut((0, k * m), (n, m)).copy_from(&block);
        block = &r.laplacian * block;
    }
    c
}

/// Number of singular values above `rel_tol * sigma_max * max(rows, cols)`.
pub fn numeric_rank(m: &DMatrix<f64>, rel_tol: f64) -> Result<usize> {
    if !(rel_tol > 0.0 && rel_tol.is_finite()) {
        return Err(Error::InvalidTolerance(rel_tol));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteMatrix);
    }
    if m.is_empty() {
        return Ok(0);
    }
    let sv = m.singular_values();
    let smax = sv.max();
    if smax == 0.0 {
        return Ok(0);
    }
    let cut = rel_tol * smax * m.nrows().max(m.ncols()) as f64;
    Ok(sv.iter().filter(|&&s| s > cut).count())
}

/// Scale every nonzero column to unit Euclidean norm.
pub fn equilibrate_columns(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for mut col in out.column_iter_mut() {
        let norm = col.norm();
        if norm > 0.0 {
            col /= norm;
        }
    }
    out
}

/// Rank of the column-equilibrated controllability matrix.
///
/// Krylov columns grow geometrically with the weights; without scaling the
/// relative cut discards directions that are exactly present.
pub fn controllability_rank(r: &Realization, rel_tol: f64) -> Result<usize> {
    numeric_rank(&equilibrate_columns(&controllability_matrix(r)), rel_tol)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankReport {
    pub n: usize,
    pub trials: usize,
    pub ranks: Vec<usize>,
    pub deficient_trials: Vec<usize>,
    pub mode: SamplingMode,
    pub seed: u64,
    /// Total rejected draws across all trials.
    pub resamples: usize,
}

impl RankReport {
    pub fn min_rank(&self) -> usize {
        self.ranks.iter().copied().min().unwrap_or(0)
    }

    pub fn max_rank(&self) -> usize {
        self.ranks.iter().copied().max().unwrap_or(0)
    }

    pub fn all_full(&self) -> bool {
        self.deficient_trials.is_empty()
    }
}

/// The realization drawn for a given trial of a seeded campaign.
pub fn trial_realization(net: &SignedNetwork, mode: SamplingMode, seed: u64, trial: usize) -> Result<(Realization, usize)> {
    sample_realization(net, mode, &mut trial_rng(seed, trial))
}

/// Rank of `C_L` over independently sampled realizations.
pub fn monte_carlo(net: &SignedNetwork, trials: usize, mode: SamplingMode, seed: u64) -> Result<RankReport> {
    if trials == 0 {
        return Err(Error::ZeroTrials);
    }
    mode.validate()?;
    let outcomes: Vec<(usize, usize)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (r, resamples) = trial_realization(net, mode, seed, t)?;
            Ok((controllability_rank(&r, DEFAULT_REL_TOL)?, resamples))
        })
        .collect::<Result<_>>()?;
    let ranks: Vec<usize> = outcomes.iter().map(|&(r, _)| r).collect();
    let deficient_trials = ranks
        .iter()
        .enumerate()
        .filter(|&(_, &r)| r < net.n())
        .map(|(t, _)| t)
        .collect();
    Ok(RankReport {
        n: net.n(),
        trials,
        ranks,
        deficient_trials,
        mode,
        seed,
        resamples: outcomes.iter().map(|&(_, s)| s).sum(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum LMatrixOutcome {
    NoRefutationFound { trials: usize },
    Refuted { trial: usize, realization: Box<Realization> },
}

impl LMatrixOutcome {
    pub fn status(&self) -> LMatrixStatus {
        match self {
            LMatrixOutcome::NoRefutationFound { trials } => LMatrixStatus::NoRefutationFound { trials: *trials },
            LMatrixOutcome::Refuted { trial, .. } => LMatrixStatus::Refuted { trial: *trial },
        }
    }
}

/// Randomized search for a realization with `rank [L, B] < n`.
///
/// Finding none proves nothing; finding one shows the rows of the pattern
/// are not independent for every member of its family.
pub fn l_matrix_refutation(net: &SignedNetwork, trials: usize, seed: u64) -> Result<LMatrixOutcome> {
    if trials == 0 {
        return Err(Error::ZeroTrials);
    }
    let mode = SamplingMode::continuous();
    let first = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Option<(usize, Realization)>> {
            let (r, _) = trial_realization(net, mode, seed, t)?;
            let t_mat = DMatrix::from_fn(r.n(), r.n() + r.m(), |i, j| {
                if j < r.n() {
                    r.laplacian[(i, j)]
                } else {
                    r.input_matrix[(i, j - r.n())]
                }
            });
            let rank = numeric_rank(&equilibrate_columns(&t_mat), DEFAULT_REL_TOL)?;
            Ok((rank < r.n()).then_some((t, r)))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .next();
    Ok(match first {
        Some((trial, r)) => LMatrixOutcome::Refuted {
            trial,
            realization: Box::new(r),
        },
        None => LMatrixOutcome::NoRefutationFound { trials },
    })
}

/// Try to turn a NotCertified verdict into a concrete uncontrollable
/// realization.
pub fn refute_certification(
    net: &SignedNetwork,
    verdict: Verdict,
    trials: usize,
    mode: SamplingMode,
    seed: u64,
) -> Result<Verdict> {
    if verdict.status != Status::NotCertified {
        return Err(Error::NotRefutable);
    }
    let report = monte_carlo(net, trials, mode, seed)?;
    let Some(&trial) = report.deficient_trials.first() else {
        return Ok(Verdict {
            refutation_trials: Some(trials),
            ..verdict
        });
    };
    let (realization, _) = trial_realization(net, mode, seed, trial)?;
    Ok(Verdict {
        status: Status::NumericallyRefuted,
        witness: Witness::Realization {
            trial,
            rank: report.ranks[trial],
            realization: Box::new(realization),
        },
        refutation_trials: Some(trials),
        ..verdict
    })
}
