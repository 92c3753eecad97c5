//! JSON network files.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use topoctl_core::{Sign, SignedNetwork};

/// A nonzero sign as written in network files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignSymbol {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl SignSymbol {
    pub fn sign(self) -> Sign {
        match self {
            SignSymbol::Plus => Sign::Positive,
            SignSymbol::Minus => Sign::Negative,
        }
    }

    pub fn from_sign(s: Sign) -> Option<SignSymbol> {
        match s {
            Sign::Positive => Some(SignSymbol::Plus),
            Sign::Negative => Some(SignSymbol::Minus),
            Sign::Zero => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub i: usize,
    pub j: usize,
    pub sign: SignSymbol,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputEntry {
    /// 1-based input index.
    #[serde(alias = "input_index")]
    pub input: usize,
    pub state: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub n: usize,
    #[serde(default)]
    pub edges: Vec<EdgeEntry>,
    pub inputs: Vec<InputEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagonal_signs: Option<Vec<SignSymbol>>,
}

impl NetworkFile {
    pub fn from_json(text: &str) -> Result<NetworkFile> {
        serde_json::from_str(text).context("invalid network file")
    }

    pub fn load(path: &Path) -> Result<NetworkFile> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        NetworkFile::from_json(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network files always serialize")
    }

    /// Validate every entry and build the network.
    pub fn to_network(&self) -> Result<SignedNetwork> {
        let n = self.n;
        if n == 0 {
            bail!("n must be at least 1");
        }
        let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (k, e) in self.edges.iter().enumerate() {
            if e.i >= e.j {
                bail!("edges[{k}]: expected i < j, got ({}, {})", e.i, e.j);
            }
            if e.i == 0 || e.j > n {
                bail!("edges[{k}]: ({}, {}) is outside states 1..={n}", e.i, e.j);
            }
            if let Some(first) = seen.insert((e.i, e.j), k) {
                bail!("edges[{k}]: ({}, {}) duplicates edges[{first}]", e.i, e.j);
            }
            if let Some(w) = e.weight {
                if !w.is_finite() || Sign::of(w) != e.sign.sign() {
                    bail!("edges[{k}]: weight {w} does not match sign {}", e.sign.sign().symbol());
                }
            }
        }
        let weighted = self.edges.iter().filter(|e| e.weight.is_some()).count();
        if weighted != 0 && weighted != self.edges.len() {
            let k = self.edges.iter().position(|e| e.weight.is_none()).unwrap();
            bail!("edges[{k}]: weight missing while other edges have one");
        }

        let m = self.inputs.len();
        let mut by_index: BTreeMap<usize, usize> = BTreeMap::new();
        let mut driven: BTreeMap<usize, usize> = BTreeMap::new();
        for (k, u) in self.inputs.iter().enumerate() {
            if u.input == 0 || u.input > m {
                bail!("inputs[{k}]: input index {} is outside 1..={m}", u.input);
            }
            if u.state == 0 || u.state > n {
                bail!("inputs[{k}]: state {} is outside 1..={n}", u.state);
            }
            if by_index.insert(u.input, u.state).is_some() {
                bail!("inputs[{k}]: input {} is listed twice", u.input);
            }
            if let Some(other) = driven.insert(u.state, u.input) {
                bail!("inputs[{k}]: state {} is already driven by input {other}", u.state);
            }
        }

        let mut net = SignedNetwork::new(n, self.edges.iter().map(|e| (e.i, e.j, e.sign.sign())), by_index.into_values())?;
        if weighted != 0 {
            net = net.with_nominal_weights(self.edges.iter().map(|e| (e.i, e.j, e.weight.unwrap())))?;
        }
        if let Some(diag) = &self.diagonal_signs {
            if diag.len() != n {
                bail!("diagonal_signs: expected {n} entries, found {}", diag.len());
            }
            net = net.with_diagonal_signs(diag.iter().map(|s| s.sign()).collect())?;
        }
        Ok(net)
    }

    pub fn from_network(net: &SignedNetwork, description: Option<String>) -> NetworkFile {
        let weights = net.nominal_weights();
        NetworkFile {
            description,
            n: net.n(),
            edges: net
                .edges()
                .map(|(e, s)| EdgeEntry {
                    i: e.low().0,
                    j: e.high().0,
                    sign: SignSymbol::from_sign(s).expect("stored signs are nonzero"),
                    weight: weights.map(|w| w[&e]),
                })
                .collect(),
            inputs: net
                .input_states()
                .iter()
                .enumerate()
                .map(|(k, s)| InputEntry { input: k + 1, state: s.0 })
                .collect(),
            diagonal_signs: net
                .diagonal_signs()
                .map(|d| d.iter().map(|&s| SignSymbol::from_sign(s).expect("declared diagonals are nonzero")).collect()),
        }
    }
}
