use std::collections::VecDeque;

use super::canonical::{classify_walk, CanonicalWalk, WalkTag};
use crate::error::{Error, Result};

pub const MAX_DYCK_LENGTH: usize = 16;

/// All nonnegative `+-1` paths of length `k` from 0 back to 0, in
/// lexicographic order of their height sequences.
pub fn dyck_paths(k: usize) -> Result<Vec<Vec<usize>>> {
    if k % 2 == 1 || k > MAX_DYCK_LENGTH {
        return Err(Error::SizeGuard(format!(
            "Dyck length {k} must be even and at most {MAX_DYCK_LENGTH}"
        )));
    }
    let mut out = Vec::new();
    let mut path = vec![0usize; k + 1];
    fn go(pos: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let k = path.len() - 1;
        if pos > k {
            out.push(path.clone());
            return;
        }
        let h = path[pos - 1];
        let remaining = k - pos;
        if h > 0 {
            path[pos] = h - 1;
            go(pos + 1, path, out);
        }
        // after stepping up the path must still be able to return
        if h + 1 <= remaining {
            path[pos] = h + 1;
            go(pos + 1, path, out);
        }
    }
    if k == 0 {
        return Ok(vec![vec![0]]);
    }
    go(1, &mut path, &mut out);
    Ok(out)
}

/// Heights `x_s = dist(c_0, c_s)` in the tree `G(c)`.
pub fn dyck_bijection(c: &CanonicalWalk) -> Result<Vec<usize>> {
    let class = classify_walk(c);
    if class.tag != WalkTag::TreePair {
        return Err(Error::NotATree("Dyck bijection needs a tree-pair walk"));
    }
    let t = c.t();
    let mut adj = vec![Vec::new(); t + 1];
    for &((a, b), _) in &class.graph.edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut dist = vec![usize::MAX; t + 1];
    dist[1] = 0;
    let mut queue = VecDeque::from([1usize]);
    while let Some(v) = queue.pop_front() {
        for &u in &adj[v] {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    Ok(c.seq().iter().map(|&v| dist[v]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::catalan;
    use crate::walks::tree_pair_walks;
    use std::collections::BTreeSet;

    #[test]
    fn small_paths() {
        assert_eq!(dyck_paths(2).unwrap(), vec![vec![0, 1, 0]]);
        assert_eq!(dyck_paths(4).unwrap().len(), 2);
        assert_eq!(dyck_paths(8).unwrap().len(), 14);
        assert!(dyck_paths(3).is_err());
        assert!(dyck_paths(18).is_err());
    }

    #[test]
    fn counts_are_catalan() {
        for k in (0..=16).step_by(2) {
            let paths = dyck_paths(k).unwrap();
            assert_eq!(paths.len() as u64, catalan(k as u32 / 2));
            let unique: BTreeSet<_> = paths.iter().collect();
            assert_eq!(unique.len(), paths.len());
        }
    }

    #[test]
    fn bijection_examples() {
        let a = CanonicalWalk::new(vec![1, 2, 3, 2, 1]).unwrap();
        let b = CanonicalWalk::new(vec![1, 2, 1, 3, 1]).unwrap();
        assert_eq!(dyck_bijection(&a).unwrap(), vec![0, 1, 2, 1, 0]);
        assert_eq!(dyck_bijection(&b).unwrap(), vec![0, 1, 0, 1, 0]);
        let sub = CanonicalWalk::new(vec![1, 2, 1, 2, 1]).unwrap();
        assert!(dyck_bijection(&sub).is_err());
    }

    #[test]
    fn bijection_is_onto_dyck_paths() {
        for k in [2usize, 4, 6, 8, 10] {
            let image: BTreeSet<Vec<usize>> = tree_pair_walks(k)
                .unwrap()
                .iter()
                .map(|w| dyck_bijection(w).unwrap())
                .collect();
            let paths: BTreeSet<Vec<usize>> = dyck_paths(k).unwrap().into_iter().collect();
            assert_eq!(image, paths);
        }
    }
}
