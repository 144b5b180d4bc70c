use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::canonical::tree_pair_walks;
use crate::ensemble::VarianceProfile;
use crate::error::{Error, Result};

/// A tree on vertices `0..t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tree {
    t: usize,
    edges: Vec<(usize, usize)>,
}

impl Tree {
    pub fn from_edges(t: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if t == 0 {
            return Err(Error::NotATree("no vertices"));
        }
        if edges.len() + 1 != t {
            return Err(Error::NotATree("edge count must be one less than vertex count"));
        }
        if edges.iter().any(|&(a, b)| a == b || a >= t || b >= t) {
            return Err(Error::NotATree("loop or vertex out of range"));
        }
        let tree = Self { t, edges };
        if tree.bfs_order().len() != t {
            return Err(Error::NotATree("not connected"));
        }
        Ok(tree)
    }

    /// `0 - 1 - ... - (t-1)`.
    pub fn path(t: usize) -> Result<Self> {
        Self::from_edges(t, (1..t).map(|v| (v - 1, v)).collect())
    }

    /// Center 0 joined to every other vertex.
    pub fn star(t: usize) -> Result<Self> {
        Self::from_edges(t, (1..t).map(|v| (0, v)).collect())
    }

    pub fn vertex_count(&self) -> usize {
        self.t
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.t];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// `(vertex, parent)` in breadth-first order from vertex 0.
    fn bfs_order(&self) -> Vec<(usize, Option<usize>)> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.t];
        let mut out = Vec::with_capacity(self.t);
        let mut queue = VecDeque::from([(0usize, None)]);
        seen[0] = true;
        while let Some((v, p)) = queue.pop_front() {
            out.push((v, p));
            for &u in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back((u, Some(v)));
                }
            }
        }
        out
    }
}

/// Result of [`tree_injection_sum`]. When `exact` is false the true value
/// lies in `[value - error_bound, value]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeSumResult {
    pub value: f64,
    pub exact: bool,
    pub error_bound: f64,
}

/// Largest number of class assignments enumerated for an exact sum.
pub const EXACT_ASSIGNMENT_LIMIT: f64 = 1e7;

/// `sum over injective F: V(T) -> {1..n} of prod_{xy in E(T)} sigma2[F(x)][F(y)]`.
///
/// Exact whenever the profile's index classes make `r^t` class assignments
/// affordable: off-diagonal values depend only on the class pair, so the
/// injections with a given class assignment number `prod_c (n_c)_{m_c}`
/// and share one weight. Otherwise the sum over all maps (computed by
/// leaf elimination) is returned with a bound on the non-injective part.
pub fn tree_injection_sum(tree: &Tree, profile: &VarianceProfile) -> Result<TreeSumResult> {
    let r = profile.class_count();
    if (r as f64).powi(tree.t as i32) <= EXACT_ASSIGNMENT_LIMIT {
        Ok(TreeSumResult {
            value: class_sum(tree, profile),
            exact: true,
            error_bound: 0.0,
        })
    } else {
        let value = all_maps_sum(tree, profile);
        Ok(TreeSumResult {
            value,
            exact: false,
            error_bound: collision_bound(tree.t, profile).min(value),
        })
    }
}

fn class_sum(tree: &Tree, profile: &VarianceProfile) -> f64 {
    let (sizes, table) = profile.class_table();
    let r = sizes.len();
    let order = tree.bfs_order();
    // position in `order` of each vertex's parent
    let mut pos = vec![0usize; tree.t];
    for (idx, &(v, _)) in order.iter().enumerate() {
        pos[v] = idx;
    }
    let parents: Vec<Option<usize>> = order.iter().map(|&(_, p)| p.map(|p| pos[p])).collect();

    struct Walker<'a> {
        r: usize,
        sizes: &'a [usize],
        table: &'a [f64],
        parents: &'a [Option<usize>],
        assigned: Vec<usize>,
        used: Vec<usize>,
        total: f64,
    }

    impl Walker<'_> {
        fn go(&mut self, idx: usize, weight: f64) {
            if idx == self.parents.len() {
                self.total += weight;
                return;
            }
            for c in 0..self.r {
                let free = self.sizes[c] - self.used[c];
                if free == 0 {
                    continue;
                }
                let edge = match self.parents[idx] {
                    Some(p) => self.table[self.assigned[p] * self.r + c],
                    None => 1.0,
                };
                if edge == 0.0 {
                    continue;
                }
                self.assigned[idx] = c;
                self.used[c] += 1;
                self.go(idx + 1, weight * edge * free as f64);
                self.used[c] -= 1;
            }
        }
    }

    let mut w = Walker {
        r,
        sizes: &sizes,
        table: &table,
        parents: &parents,
        assigned: vec![0; tree.t],
        used: vec![0; r],
        total: 0.0,
    };
    w.go(0, 1.0);
    w.total
}

/// Sum over all maps `V(T) -> {1..n}` by leaf elimination, `O(t n^2)`.
pub fn all_maps_sum(tree: &Tree, profile: &VarianceProfile) -> f64 {
    let n = profile.n();
    let order = tree.bfs_order();
    let mut msg: Vec<Vec<f64>> = vec![vec![1.0; n]; tree.t];
    for &(v, parent) in order.iter().rev() {
        if let Some(p) = parent {
            let child = std::mem::take(&mut msg[v]);
            let up: Vec<f64> = (0..n)
                .map(|i| profile.row(i).iter().zip(&child).map(|(s, m)| s * m).sum())
                .collect();
            for (m, u) in msg[p].iter_mut().zip(up) {
                *m *= u;
            }
        }
    }
    msg[0].iter().sum()
}

/// Bound on the sum over non-injective maps: each of the `C(t, 2)` vertex
/// coincidences contracts the tree to a connected graph on `t - 1` vertices
/// with `t - 1` edges; dropping one edge (at most `max sigma2`) leaves a
/// spanning tree summing to at most `n C^{t-2}`, `C` the largest row sum.
fn collision_bound(t: usize, profile: &VarianceProfile) -> f64 {
    if t < 2 {
        return 0.0;
    }
    let pairs = (t * (t - 1) / 2) as f64;
    let c = profile.max_row_sum();
    profile.n() as f64 * pairs * profile.max_entry() * c.powi(t as i32 - 2)
}

/// `(1/n) sum_{c in Gamma_k} sum_{F injective} Pi(F)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentPrediction {
    pub k: usize,
    pub value: f64,
    pub exact: bool,
    pub error_bound: f64,
}

pub fn moment_prediction(profile: &VarianceProfile, k: usize) -> Result<MomentPrediction> {
    if k > super::MAX_WALK_LENGTH {
        return Err(Error::SizeGuard(format!("moment order {k} above 10")));
    }
    if k % 2 == 1 {
        return Ok(MomentPrediction {
            k,
            value: 0.0,
            exact: true,
            error_bound: 0.0,
        });
    }
    if k == 0 {
        return Ok(MomentPrediction {
            k,
            value: 1.0,
            exact: true,
            error_bound: 0.0,
        });
    }
    let nf = profile.n() as f64;
    let mut value = 0.0;
    let mut bound = 0.0;
    let mut exact = true;
    for w in tree_pair_walks(k)? {
        let s = tree_injection_sum(&w.tree()?, profile)?;
        value += s.value;
        bound += s.error_bound;
        exact &= s.exact;
    }
    Ok(MomentPrediction {
        k,
        value: value / nf,
        exact,
        error_bound: bound / nf,
    })
}

/// `(n)_t / n^t`, the per-tree prediction for the uniform `1/n` profile.
pub fn uniform_tree_fraction(n: usize, t: usize) -> f64 {
    let nf = n as f64;
    (0..t).map(|i| (nf - i as f64) / nf).product()
}
