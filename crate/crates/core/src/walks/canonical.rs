use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::tree::Tree;
use crate::error::{Error, Result};

/// Largest walk length accepted by [`enumerate_canonical_walks`].
pub const MAX_WALK_LENGTH: usize = 10;

/// A closed walk `(c_0, ..., c_k)` in restricted-growth form: starts and ends
/// at vertex 1, and each step visits a known vertex or the next new one.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct CanonicalWalk {
    seq: Vec<usize>,
    t: usize,
}

impl TryFrom<Vec<usize>> for CanonicalWalk {
    type Error = Error;

    fn try_from(seq: Vec<usize>) -> Result<Self> {
        Self::new(seq)
    }
}

impl From<CanonicalWalk> for Vec<usize> {
    fn from(w: CanonicalWalk) -> Self {
        w.seq
    }
}

impl fmt::Display for CanonicalWalk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.seq.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl CanonicalWalk {
    pub fn new(seq: Vec<usize>) -> Result<Self> {
        let bad = |reason| Error::MalformedWalk {
            seq: seq.clone(),
            reason,
        };
        if seq.len() < 2 {
            return Err(bad("a closed walk needs at least one step"));
        }
        if seq[0] != 1 || *seq.last().unwrap() != 1 {
            return Err(bad("must start and end at vertex 1"));
        }
        let mut max = 0;
        for &c in &seq {
            if c == 0 || c > max + 1 {
                return Err(bad("labels must follow restricted growth"));
            }
            max = max.max(c);
        }
        Ok(Self { t: max, seq })
    }

    /// Number of steps.
    pub fn k(&self) -> usize {
        self.seq.len() - 1
    }

    /// Number of distinct vertices.
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn seq(&self) -> &[usize] {
        &self.seq
    }

    /// Undirected edges `{a, b}` (`a <= b`, loops allowed) with the number of
    /// times the walk crosses each.
    pub fn edge_multiplicities(&self) -> BTreeMap<(usize, usize), usize> {
        let mut edges = BTreeMap::new();
        for w in self.seq.windows(2) {
            let e = (w[0].min(w[1]), w[0].max(w[1]));
            *edges.entry(e).or_insert(0) += 1;
        }
        edges
    }

    /// The tree `G(c)` of a [`WalkTag::TreePair`] walk, on vertices
    /// `0..t` (label `c` becomes vertex `c - 1`).
    pub fn tree(&self) -> Result<Tree> {
        let class = classify_walk(self);
        if class.tag != WalkTag::TreePair {
            return Err(Error::NotATree("walk is not a tree pair"));
        }
        Tree::from_edges(
            self.t,
            class.graph.edges.iter().map(|&((a, b), _)| (a - 1, b - 1)).collect(),
        )
    }
}

/// Every canonical closed walk of length `k`, grouped by vertex count:
/// entry `t - 1` lists `gamma(k, t)` in lexicographic order.
pub fn enumerate_canonical_walks(k: usize) -> Result<Vec<Vec<CanonicalWalk>>> {
    if !(1..=MAX_WALK_LENGTH).contains(&k) {
        return Err(Error::SizeGuard(format!(
            "walk length {k} outside 1..={MAX_WALK_LENGTH}"
        )));
    }
    let mut by_t: Vec<Vec<CanonicalWalk>> = vec![Vec::new(); k];
    let mut seq = vec![1usize; k + 1];
    fn extend(pos: usize, max: usize, seq: &mut Vec<usize>, by_t: &mut Vec<Vec<CanonicalWalk>>) {
        let k = seq.len() - 1;
        if pos == k {
            // seq[k] stays 1: closing the walk never adds a label
            by_t[max - 1].push(CanonicalWalk {
                seq: seq.clone(),
                t: max,
            });
            return;
        }
        for c in 1..=max + 1 {
            seq[pos] = c;
            extend(pos + 1, max.max(c), seq, by_t);
        }
    }
    extend(1, 1, &mut seq, &mut by_t);
    Ok(by_t)
}

/// Walks of length `k` whose graph is a tree crossed exactly twice per edge.
pub fn tree_pair_walks(k: usize) -> Result<Vec<CanonicalWalk>> {
    if k % 2 == 1 {
        return Ok(Vec::new());
    }
    let all = enumerate_canonical_walks(k)?;
    Ok(all
        .into_iter()
        .flatten()
        .filter(|w| classify_walk(w).tag == WalkTag::TreePair)
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WalkTag {
    /// Some edge is crossed exactly once.
    ZeroedOut,
    /// `t = k/2 + 1` and every edge is crossed exactly twice.
    TreePair,
    /// Every edge crossed at least twice, `t < k/2 + 1`.
    SubLeading,
}

impl fmt::Display for WalkTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::ZeroedOut => "zeroed-out",
            Self::TreePair => "tree-pair",
            Self::SubLeading => "sub-leading",
        })
    }
}

/// `G(c)`: vertices `1..=t` and undirected edges with multiplicities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkGraph {
    pub vertices: usize,
    pub edges: Vec<((usize, usize), usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkClass {
    pub tag: WalkTag,
    pub graph: WalkGraph,
}

pub fn classify_walk(c: &CanonicalWalk) -> WalkClass {
    let edges: Vec<((usize, usize), usize)> = c.edge_multiplicities().into_iter().collect();
    let tag = if edges.iter().any(|&(_, m)| m == 1) {
        WalkTag::ZeroedOut
    } else if 2 * c.t() == c.k() + 2 && edges.iter().all(|&(_, m)| m == 2) {
        WalkTag::TreePair
    } else {
        WalkTag::SubLeading
    };
    let graph = WalkGraph {
        vertices: c.t(),
        edges,
    };
    if tag == WalkTag::TreePair {
        debug_assert!(graph.edges.len() + 1 == graph.vertices);
        debug_assert!(graph.edges.iter().all(|&((a, b), _)| a != b));
    }
    WalkClass { tag, graph }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn walk(s: &[usize]) -> CanonicalWalk {
        CanonicalWalk::new(s.to_vec()).unwrap()
    }

    #[test]
    fn small_censuses() {
        let w2 = enumerate_canonical_walks(2).unwrap();
        assert_eq!(w2[0], vec![walk(&[1, 1, 1])]);
        assert_eq!(w2[1], vec![walk(&[1, 2, 1])]);
        let w3 = enumerate_canonical_walks(3).unwrap();
        let counts: Vec<usize> = w3.iter().map(Vec::len).collect();
        assert_eq!(counts, vec![1, 3, 1]);
        let w4 = enumerate_canonical_walks(4).unwrap();
        assert!(w4[2].contains(&walk(&[1, 2, 1, 3, 1])));
        assert!(w4[2].contains(&walk(&[1, 2, 3, 2, 1])));
        assert!(enumerate_canonical_walks(0).is_err());
        assert!(enumerate_canonical_walks(11).is_err());
    }

    #[test]
    fn totals_are_bell_numbers() {
        let bell = [1usize, 2, 5, 15, 52, 203, 877, 4140, 21147, 115975];
        for k in 1..=10 {
            let total: usize = enumerate_canonical_walks(k).unwrap().iter().map(Vec::len).sum();
            assert_eq!(total, bell[k - 1], "k={k}");
        }
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_walk(&walk(&[1, 2, 3, 1])).tag, WalkTag::ZeroedOut);
        let star = classify_walk(&walk(&[1, 2, 1, 3, 1]));
        assert_eq!(star.tag, WalkTag::TreePair);
        assert_eq!(star.graph.edges, vec![((1, 2), 2), ((1, 3), 2)]);
        let double = classify_walk(&walk(&[1, 2, 1, 2, 1]));
        assert_eq!(double.tag, WalkTag::SubLeading);
        assert_eq!(double.graph.edges, vec![((1, 2), 4)]);
        assert_eq!(classify_walk(&walk(&[1, 1, 1])).tag, WalkTag::SubLeading);
    }

    #[test]
    fn malformed_walks_rejected() {
        for bad in [vec![1], vec![2, 1], vec![1, 2], vec![1, 3, 1], vec![1, 0, 1]] {
            assert!(matches!(
                CanonicalWalk::new(bad),
                Err(Error::MalformedWalk { .. })
            ));
        }
    }

    #[test]
    fn tree_pair_counts() {
        for (k, c) in [(2, 1), (4, 2), (6, 5), (8, 14), (10, 42)] {
            assert_eq!(tree_pair_walks(k).unwrap().len(), c);
        }
        assert!(tree_pair_walks(5).unwrap().is_empty());
    }

    #[test]
    fn serde_as_sequence() {
        let w = walk(&[1, 2, 1]);
        assert_eq!(serde_json::to_string(&w).unwrap(), "[1,2,1]");
        assert!(serde_json::from_str::<CanonicalWalk>("[1,3,1]").is_err());
    }
}
