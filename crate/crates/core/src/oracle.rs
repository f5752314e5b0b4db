//! Exact MaxCut by enumeration and the random-partition baseline.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::Rng;

/// Largest node count accepted by exhaustive enumeration and dense simulation.
pub const MAX_ENUM_NODES: usize = 24;

/// Side assignment of every node: bit `i` of `bits` is the side of node `i`
/// (0 for V+, 1 for V-). Displayed as a string whose `i`-th character is
/// node `i`'s bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Assignment {
    n: usize,
    bits: u64,
}

impl Assignment {
    pub fn new(n: usize, bits: u64) -> Result<Self> {
        if n == 0 || n > 64 {
            return Err(Error::Argument(format!("assignment length {n} outside 1..=64")));
        }
        if n < 64 && bits >> n != 0 {
            return Err(Error::Argument(format!("bits {bits:#x} exceed length {n}")));
        }
        Ok(Assignment { n, bits })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn side(&self, node: usize) -> bool {
        self.bits >> node & 1 == 1
    }

    pub fn complement(&self) -> Self {
        let mask = if self.n == 64 { u64::MAX } else { (1 << self.n) - 1 };
        Assignment {
            n: self.n,
            bits: !self.bits & mask,
        }
    }

    /// Re-expresses an assignment of a relabeled subgraph in the labels of a
    /// graph with `target_n` nodes; `map[new] = original`. Nodes outside the
    /// map stay on side 0.
    pub fn relabel(&self, map: &[usize], target_n: usize) -> Result<Self> {
        if map.len() != self.n {
            return Err(Error::Argument(format!(
                "relabel map has {} entries for an assignment of length {}",
                map.len(),
                self.n
            )));
        }
        let bits = map
            .iter()
            .enumerate()
            .filter(|&(new, _)| self.side(new))
            .fold(0u64, |acc, (_, &old)| acc | 1 << old);
        Assignment::new(target_n, bits)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        (0..self.n)
            .try_for_each(|i| f.write_str(if self.side(i) { "1" } else { "0" }))
    }
}

impl std::str::FromStr for Assignment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut bits = 0u64;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' if i < 64 => bits |= 1 << i,
                _ => return Err(Error::Argument(format!("bad assignment string {s:?}"))),
            }
        }
        Assignment::new(s.len(), bits)
    }
}

impl Serialize for Assignment {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Assignment {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub c_star: f64,
    pub witness: Assignment,
}

/// Total weight of edges whose endpoints sit on different sides.
pub fn cut_value(g: &Graph, z: &Assignment) -> Result<f64> {
    if z.len() != g.n() {
        return Err(Error::Argument(format!(
            "assignment length {} does not match n = {}",
            z.len(),
            g.n()
        )));
    }
    Ok(cut_bits(g, z.bits()))
}

/// Cut value of a raw little-endian bit pattern. Edges are summed in
/// canonical order, so every caller obtains the same double for the same `z`.
pub(crate) fn cut_bits(g: &Graph, z: u64) -> f64 {
    g.edges()
        .iter()
        .filter(|e| (z >> e.u ^ z >> e.v) & 1 == 1)
        .map(|e| e.w)
        .sum()
}

pub(crate) fn check_enum_cap(n: usize) -> Result<()> {
    if n > MAX_ENUM_NODES {
        return Err(Error::Resource(format!(
            "n = {n} exceeds the enumeration cap of {MAX_ENUM_NODES}"
        )));
    }
    Ok(())
}

/// Exact maximum cut over all `2^(n-1)` assignments with node 0 on side 0
/// (every cut equals the cut of its complement). Candidates are scanned in
/// lexicographic order of their string form and the first maximum wins, so
/// the witness is the lexicographically smallest optimal bitstring.
pub fn max_cut_bruteforce(g: &Graph) -> Result<OracleResult> {
    check_enum_cap(g.n())?;
    let n = g.n();
    let half = 1u64 << (n - 1);
    let (mut best, mut best_z) = (f64::NEG_INFINITY, 0);
    for rank in 0..half {
        // Node 0 is the most significant character of the string.
        let z = rank.reverse_bits() >> (64 - n);
        let c = cut_bits(g, z);
        if c > best {
            best = c;
            best_z = z;
        }
    }
    Ok(OracleResult {
        c_star: best,
        witness: Assignment::new(n, best_z)?,
    })
}

/// Best cut over `k` uniformly random assignments (each bit a fair coin).
pub fn random_partition_max(g: &Graph, k: usize, seed: u64) -> Result<f64> {
    if k == 0 {
        return Err(Error::Argument("random partition count k must be >= 1".into()));
    }
    check_enum_cap(g.n())?;
    let mut rng = Rng::new(seed);
    Ok((0..k)
        .map(|_| cut_bits(g, rng.bits(g.n())))
        .fold(f64::NEG_INFINITY, f64::max))
}
