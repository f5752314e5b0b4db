//! Weighted undirected graphs and the benchmark dataset generators.
//!
//! Text format, one record per line:
//!
//! ```text
//! n <count> weighted <0|1>
//! <u> <v> <w>
//! ...
//! ```
//!
//! Weights are written with Rust's shortest round-trip float formatting, so
//! reading back a written graph gives the identical bit pattern. Blank lines
//! and lines starting with `#` are ignored.

use std::collections::HashSet;
use std::fmt::{self, Write as _};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Pairing-model attempts before regular generation gives up.
pub const REGULAR_RETRY_CAP: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Undirected simple graph on nodes `0..n` with edges stored in canonical
/// `(u, v)` order, `u < v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct Graph {
    n: usize,
    weighted: bool,
    edges: Vec<Edge>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    n: usize,
    weighted: bool,
    edges: Vec<(usize, usize, f64)>,
}

impl TryFrom<RawGraph> for Graph {
    type Error = Error;
    fn try_from(raw: RawGraph) -> Result<Self> {
        let edges = raw
            .edges
            .into_iter()
            .map(|(u, v, w)| Edge { u, v, w })
            .collect();
        Graph::new(raw.n, raw.weighted, edges)
    }
}

impl From<Graph> for RawGraph {
    fn from(g: Graph) -> Self {
        RawGraph {
            n: g.n,
            weighted: g.weighted,
            edges: g.edges.iter().map(|e| (e.u, e.v, e.w)).collect(),
        }
    }
}

impl Graph {
    /// Builds a graph, canonicalizing endpoint order and sorting edges.
    ///
    /// Rejects self-loops, duplicate edges, out-of-range endpoints, non-unit
    /// weights on unweighted graphs and weights outside `(0, 1]` on weighted
    /// ones.
    pub fn new(n: usize, weighted: bool, mut edges: Vec<Edge>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("graph needs at least one node".into()));
        }
        for e in &mut edges {
            if e.u == e.v {
                return Err(Error::Argument(format!("self-loop on node {}", e.u)));
            }
            if e.u > e.v {
                std::mem::swap(&mut e.u, &mut e.v);
            }
            if e.v >= n {
                return Err(Error::Argument(format!(
                    "edge ({}, {}) out of range for n = {n}",
                    e.u, e.v
                )));
            }
            check_weight(weighted, e.w)?;
        }
        edges.sort_by_key(|e| (e.u, e.v));
        if let Some(pair) = edges.windows(2).find(|p| (p[0].u, p[0].v) == (p[1].u, p[1].v)) {
            return Err(Error::Argument(format!(
                "duplicate edge ({}, {})",
                pair[0].u, pair[0].v
            )));
        }
        Ok(Graph { n, weighted, edges })
    }

    pub fn unweighted(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let edges = pairs.iter().map(|&(u, v)| Edge { u, v, w: 1.0 }).collect();
        Graph::new(n, false, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weighted(&self) -> bool {
        self.weighted
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for e in &self.edges {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        deg
    }

    /// Induced subgraph on `nodes`, relabeled `0..nodes.len()` in the given
    /// order. The returned map sends each new label to its original node.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<(Graph, Vec<usize>)> {
        if nodes.is_empty() {
            return Err(Error::Argument("empty node subset".into()));
        }
        let mut relabel = vec![None; self.n];
        for (new, &old) in nodes.iter().enumerate() {
            if old >= self.n {
                return Err(Error::Argument(format!(
                    "node {old} out of range for n = {}",
                    self.n
                )));
            }
            if relabel[old].replace(new).is_some() {
                return Err(Error::Argument(format!("duplicate node {old} in subset")));
            }
        }
        let edges = self
            .edges
            .iter()
            .filter_map(|e| match (relabel[e.u], relabel[e.v]) {
                (Some(u), Some(v)) => Some(Edge { u, v, w: e.w }),
                _ => None,
            })
            .collect();
        let sub = Graph::new(nodes.len(), self.weighted, edges)?;
        Ok((sub, nodes.to_vec()))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        self.write_text(&mut out).expect("writing to a String");
        out
    }

    fn write_text(&self, out: &mut impl fmt::Write) -> fmt::Result {
        writeln!(out, "n {} weighted {}", self.n, u8::from(self.weighted))?;
        for e in &self.edges {
            writeln!(out, "{} {} {:?}", e.u, e.v, e.w)?;
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut header = None;
        let mut edges = Vec::new();
        let mut seen = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let Some((n, weighted)) = header else {
                header = Some(parse_header(&fields).map_err(parse_err)?);
                continue;
            };
            if fields.len() != 3 {
                return Err(parse_err(format!("expected `u v w`, got {line:?}")));
            }
            let node = |s: &str| {
                s.parse::<usize>()
                    .map_err(|_| parse_err(format!("bad node index {s:?}")))
            };
            let (mut u, mut v) = (node(fields[0])?, node(fields[1])?);
            let w: f64 = fields[2]
                .parse()
                .map_err(|_| parse_err(format!("bad weight {:?}", fields[2])))?;
            if u == v {
                return Err(parse_err(format!("self-loop on node {u}")));
            }
            if u > v {
                std::mem::swap(&mut u, &mut v);
            }
            if v >= n {
                return Err(parse_err(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if !seen.insert((u, v)) {
                return Err(parse_err(format!("duplicate edge ({u}, {v})")));
            }
            check_weight(weighted, w).map_err(|e| parse_err(e.to_string()))?;
            edges.push(Edge { u, v, w });
        }
        let (n, weighted) = header.ok_or(Error::Parse {
            line: text.lines().count().max(1),
            message: "missing `n <count> weighted <0|1>` header".into(),
        })?;
        Graph::new(n, weighted, edges)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Graph::from_text(&text)
    }

    /// First 16 hex digits of the SHA-256 of the text serialization.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        digest[..8].iter().fold(String::with_capacity(16), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

fn parse_header(fields: &[&str]) -> std::result::Result<(usize, bool), String> {
    match fields {
        ["n", count, "weighted", flag] => {
            let n = count
                .parse::<usize>()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| format!("bad node count {count:?}"))?;
            let weighted = match *flag {
                "0" => false,
                "1" => true,
                other => return Err(format!("weighted flag must be 0 or 1, got {other:?}")),
            };
            Ok((n, weighted))
        }
        _ => Err(format!(
            "expected header `n <count> weighted <0|1>`, got {:?}",
            fields.join(" ")
        )),
    }
}

fn check_weight(weighted: bool, w: f64) -> Result<()> {
    if weighted {
        if !(w > 0.0 && w <= 1.0) {
            return Err(Error::Argument(format!("weight {w} outside (0, 1]")));
        }
    } else if w != 1.0 {
        return Err(Error::Argument(format!("unweighted graph has weight {w}")));
    }
    Ok(())
}

/// Weight in `(0, 1]` for weighted graphs, exactly 1 otherwise.
fn draw_weight(rng: &mut Rng, weighted: bool) -> f64 {
    if weighted {
        1.0 - rng.uniform()
    } else {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Random { ep: f64 },
    Regular { d: usize },
    Complete,
}

/// One cell of the dataset: family parameters, size, weighting and seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    #[serde(flatten)]
    pub family: Family,
    pub n: usize,
    pub weighted: bool,
    pub seed: u64,
}

impl DatasetSpec {
    pub fn generate(&self) -> Result<Graph> {
        match self.family {
            Family::Random { ep } => generate_random(self.n, ep, self.weighted, self.seed),
            Family::Regular { d } => generate_regular(self.n, d, self.weighted, self.seed),
            Family::Complete => generate_complete(self.n, self.weighted, self.seed),
        }
    }

    /// Identifier in the style `u-ran-n6-ep0.4`, `w-reg-n9-d4`, `u-com-n5`.
    pub fn id(&self) -> String {
        let x = if self.weighted { 'w' } else { 'u' };
        match self.family {
            Family::Random { ep } => format!("{x}-ran-n{}-ep{ep}", self.n),
            Family::Regular { d } => format!("{x}-reg-n{}-d{d}", self.n),
            Family::Complete => format!("{x}-com-n{}", self.n),
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self.family {
            Family::Random { .. } => "random",
            Family::Regular { .. } => "regular",
            Family::Complete => "complete",
        }
    }

    /// Edge probability or degree, empty for complete graphs.
    pub fn ep_or_d(&self) -> String {
        match self.family {
            Family::Random { ep } => ep.to_string(),
            Family::Regular { d } => d.to_string(),
            Family::Complete => String::new(),
        }
    }
}

/// Erdős–Rényi graph: candidate pairs are visited in `(u, v)` lexicographic
/// order; each draws one uniform for inclusion (`< ep`) and, if included and
/// weighted, one more for the weight.
pub fn generate_random(n: usize, ep: f64, weighted: bool, seed: u64) -> Result<Graph> {
    if n < 1 {
        return Err(Error::Config("random graph needs n >= 1".into()));
    }
    if !(ep > 0.0 && ep < 1.0) {
        return Err(Error::Config(format!("edge probability {ep} outside (0, 1)")));
    }
    let mut rng = Rng::new(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.uniform() < ep {
                let w = draw_weight(&mut rng, weighted);
                edges.push(Edge { u, v, w });
            }
        }
    }
    Graph::new(n, weighted, edges)
}

/// Random `d`-regular graph from the pairing (configuration) model,
/// rejecting pairings with loops or multi-edges. Weights are drawn after a
/// pairing is accepted, in canonical edge order.
pub fn generate_regular(n: usize, d: usize, weighted: bool, seed: u64) -> Result<Graph> {
    if d >= n {
        return Err(Error::Config(format!("degree {d} must be below n = {n}")));
    }
    if (n * d) % 2 != 0 {
        return Err(Error::Config(format!("n * d = {} is odd", n * d)));
    }
    let mut rng = Rng::new(seed);
    let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    'attempt: for _ in 0..REGULAR_RETRY_CAP {
        rng.shuffle(&mut points);
        let mut pairs = HashSet::with_capacity(points.len() / 2);
        for chunk in points.chunks_exact(2) {
            let (u, v) = (chunk[0].min(chunk[1]), chunk[0].max(chunk[1]));
            if u == v || !pairs.insert((u, v)) {
                continue 'attempt;
            }
        }
        let mut pairs: Vec<_> = pairs.into_iter().collect();
        pairs.sort_unstable();
        let edges = pairs
            .into_iter()
            .map(|(u, v)| Edge {
                u,
                v,
                w: draw_weight(&mut rng, weighted),
            })
            .collect();
        return Graph::new(n, weighted, edges);
    }
    Err(Error::Generation(format!(
        "no simple {d}-regular pairing on {n} nodes after {REGULAR_RETRY_CAP} attempts"
    )))
}

pub fn generate_complete(n: usize, weighted: bool, seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::Config("complete graph needs n >= 2".into()));
    }
    let mut rng = Rng::new(seed);
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for u in 0..n {
        for v in u + 1..n {
            edges.push(Edge {
                u,
                v,
                w: draw_weight(&mut rng, weighted),
            });
        }
    }
    Graph::new(n, weighted, edges)
}

/// Unweighted cycle `0-1-...-(n-1)-0`.
pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::Argument("cycle needs n >= 3".into()));
    }
    let pairs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::unweighted(n, &pairs)
}
