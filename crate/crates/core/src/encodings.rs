//! The two encodings of graph 3-coloring and their diagonal cost functions.
//!
//! * [`EncodingKind::Qutrit`]: one qutrit per node, basis digit = color. The
//!   per-edge cost is the diagonal of `l3 (x) l3 + l8 (x) l8`, which is `4/3`
//!   for equal colors and `-2/3` otherwise.
//! * [`EncodingKind::QubitSpaceEfficient`]: two qubits per node (node `v` owns
//!   sites `2v` and `2v + 1`). Bit pairs `00, 01, 10` are colors `0, 1, 2`,
//!   `11` is invalid and penalized by the suppression term scaled by `alpha`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::sim::digits_into;

/// Costs are tabulated up front when the basis has at most this many states.
pub const TABLE_THRESHOLD: usize = 19_683;

pub const DEFAULT_ALPHA: f64 = 2.0;

const SAME_COLOR: f64 = 4.0 / 3.0;
const DIFFERENT_COLOR: f64 = -2.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingKind {
    #[serde(rename = "qubit")]
    QubitSpaceEfficient,
    Qutrit,
}

impl EncodingKind {
    pub fn local_dim(self) -> usize {
        match self {
            EncodingKind::QubitSpaceEfficient => 2,
            EncodingKind::Qutrit => 3,
        }
    }

    pub fn num_sites(self, num_nodes: usize) -> usize {
        match self {
            EncodingKind::QubitSpaceEfficient => 2 * num_nodes,
            EncodingKind::Qutrit => num_nodes,
        }
    }

    /// Trainable parameters per QAOA layer.
    pub fn params_per_layer(self) -> usize {
        match self {
            EncodingKind::QubitSpaceEfficient => 3,
            EncodingKind::Qutrit => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            EncodingKind::QubitSpaceEfficient => "qubit",
            EncodingKind::Qutrit => "qutrit",
        }
    }
}

impl fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for EncodingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qubit" => Ok(EncodingKind::QubitSpaceEfficient),
            "qutrit" => Ok(EncodingKind::Qutrit),
            other => Err(Error::InvalidArgument(format!("unknown encoding {other:?}"))),
        }
    }
}

/// Decoded assignment: one entry per node, `None` where a qubit pair reads `11`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coloring(pub Vec<Option<u8>>);

impl Coloring {
    pub fn from_colors(colors: &[u8]) -> Self {
        Coloring(colors.iter().map(|&c| Some(c)).collect())
    }

    pub fn has_invalid(&self) -> bool {
        self.0.iter().any(Option::is_none)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Site digits to a coloring.
pub fn decode(encoding: EncodingKind, digits: &[u8]) -> Coloring {
    match encoding {
        EncodingKind::Qutrit => Coloring::from_colors(digits),
        EncodingKind::QubitSpaceEfficient => Coloring(
            digits
                .chunks_exact(2)
                .map(|pair| match (pair[0], pair[1]) {
                    (0, 0) => Some(0),
                    (0, 1) => Some(1),
                    (1, 0) => Some(2),
                    _ => None,
                })
                .collect(),
        ),
    }
}

pub fn is_valid_coloring(graph: &Graph, coloring: &Coloring) -> bool {
    if coloring.has_invalid() || coloring.len() != graph.num_nodes() {
        return false;
    }
    graph.edges().iter().all(|&(u, v)| coloring.0[u] != coloring.0[v])
}

/// Edge cost of the qutrit encoding for site digits (colors).
pub fn qutrit_cost(graph: &Graph, digits: &[u8]) -> f64 {
    graph
        .edges()
        .iter()
        .map(|&(u, v)| {
            if digits[u] == digits[v] {
                SAME_COLOR
            } else {
                DIFFERENT_COLOR
            }
        })
        .sum()
}

fn z(bit: u8) -> f64 {
    if bit == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Edge-coloring cost plus `alpha` times the suppression cost, for qubit digits.
pub fn qubit_cost(graph: &Graph, alpha: f64, bits: &[u8]) -> f64 {
    let edge: f64 = graph
        .edges()
        .iter()
        .map(|&(v, w)| {
            let (v1, v2, w1, w2) = (z(bits[2 * v]), z(bits[2 * v + 1]), z(bits[2 * w]), z(bits[2 * w + 1]));
            v1 * v2 * w1 * w2 + v1 * w1 + v2 * w2
        })
        .sum();
    let suppression: f64 = (0..graph.num_nodes())
        .map(|v| {
            let (v1, v2) = (z(bits[2 * v]), z(bits[2 * v + 1]));
            v1 * v2 - v1 - v2
        })
        .sum();
    edge + alpha * suppression
}

/// Classification of a basis state with respect to the coloring problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Proper,
    Improper,
    /// At least one qubit pair in `11`.
    Invalid,
}

pub fn classify(graph: &Graph, encoding: EncodingKind, digits: &[u8]) -> Outcome {
    let coloring = decode(encoding, digits);
    if coloring.has_invalid() {
        Outcome::Invalid
    } else if is_valid_coloring(graph, &coloring) {
        Outcome::Proper
    } else {
        Outcome::Improper
    }
}

/// Success probabilities for a distribution over basis states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuccessProbability {
    /// Probability of a proper coloring.
    pub raw: f64,
    /// Same, renormalized over outcomes without an invalid node.
    pub postselected: f64,
}

/// Per-basis-state cost of one encoding on one graph.
#[derive(Debug, Clone)]
pub struct DiagonalCost {
    encoding: EncodingKind,
    graph: Graph,
    alpha: f64,
    num_sites: usize,
    dim: usize,
    table: Option<Vec<f64>>,
}

impl DiagonalCost {
    pub fn new(graph: &Graph, encoding: EncodingKind, alpha: f64) -> Result<Self> {
        if graph.num_nodes() == 0 {
            return Err(Error::InvalidGraph("graph has no nodes".into()));
        }
        let num_sites = encoding.num_sites(graph.num_nodes());
        let d = encoding.local_dim();
        let dim = u32::try_from(num_sites)
            .ok()
            .and_then(|n| d.checked_pow(n))
            .ok_or_else(|| Error::InvalidArgument("basis too large".into()))?;
        let mut cost = DiagonalCost {
            encoding,
            graph: graph.clone(),
            alpha,
            num_sites,
            dim,
            table: None,
        };
        if dim <= TABLE_THRESHOLD {
            cost.table = Some((0..dim).map(|i| cost.compute(i)).collect());
        }
        Ok(cost)
    }

    pub fn qutrit(graph: &Graph) -> Result<Self> {
        Self::new(graph, EncodingKind::Qutrit, 0.0)
    }

    pub fn qubit(graph: &Graph, alpha: f64) -> Result<Self> {
        Self::new(graph, EncodingKind::QubitSpaceEfficient, alpha)
    }

    pub fn encoding(&self) -> EncodingKind {
        self.encoding
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn local_dim(&self) -> usize {
        self.encoding.local_dim()
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    fn compute(&self, index: usize) -> f64 {
        let mut digits = vec![0u8; self.num_sites];
        digits_into(index, self.local_dim(), &mut digits);
        self.cost_of_digits(&digits)
    }

    fn cost_of_digits(&self, digits: &[u8]) -> f64 {
        match self.encoding {
            EncodingKind::Qutrit => qutrit_cost(&self.graph, digits),
            EncodingKind::QubitSpaceEfficient => qubit_cost(&self.graph, self.alpha, digits),
        }
    }

    /// Cost of basis state `index`.
    pub fn evaluate(&self, index: usize) -> f64 {
        match &self.table {
            Some(t) => t[index],
            None => self.compute(index),
        }
    }

    /// `sum_i probs[i] * cost(i)`.
    pub fn expectation(&self, probs: &[f64]) -> f64 {
        match &self.table {
            Some(t) => t.iter().zip(probs).map(|(c, p)| c * p).sum(),
            None => probs
                .par_iter()
                .enumerate()
                .with_min_len(4096)
                .map(|(i, p)| if *p == 0.0 { 0.0 } else { p * self.compute(i) })
                .sum(),
        }
    }

    pub fn minimum(&self) -> f64 {
        (0..self.dim).map(|i| self.evaluate(i)).fold(f64::INFINITY, f64::min)
    }
}

/// Raw and postselected probability of sampling a proper coloring.
pub fn success_probability(graph: &Graph, encoding: EncodingKind, probs: &[f64]) -> SuccessProbability {
    let num_sites = encoding.num_sites(graph.num_nodes());
    let d = encoding.local_dim();
    let mut digits = vec![0u8; num_sites];
    let mut proper = 0.0;
    let mut invalid = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        digits_into(i, d, &mut digits);
        match classify(graph, encoding, &digits) {
            Outcome::Proper => proper += p,
            Outcome::Invalid => invalid += p,
            Outcome::Improper => {}
        }
    }
    let kept = 1.0 - invalid;
    SuccessProbability {
        raw: proper,
        postselected: if kept > 0.0 { (proper / kept).min(1.0) } else { 0.0 },
    }
}

/// Success probabilities estimated from sampled basis indices.
pub fn sampled_success(graph: &Graph, encoding: EncodingKind, samples: &[usize]) -> SuccessProbability {
    let num_sites = encoding.num_sites(graph.num_nodes());
    let d = encoding.local_dim();
    let mut digits = vec![0u8; num_sites];
    let (mut proper, mut invalid) = (0usize, 0usize);
    for &i in samples {
        digits_into(i, d, &mut digits);
        match classify(graph, encoding, &digits) {
            Outcome::Proper => proper += 1,
            Outcome::Invalid => invalid += 1,
            Outcome::Improper => {}
        }
    }
    let shots = samples.len();
    let kept = shots - invalid;
    SuccessProbability {
        raw: if shots > 0 { proper as f64 / shots as f64 } else { 0.0 },
        postselected: if kept > 0 { proper as f64 / kept as f64 } else { 0.0 },
    }
}
