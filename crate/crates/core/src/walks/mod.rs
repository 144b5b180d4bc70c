//! Exact moment engine: canonical closed walks, their classification,
//! tree-injection sums, moment predictions, Dyck paths, and a trace-moment
//! oracle for small discrete ensembles.

mod canonical;
mod dyck;
mod oracle;
mod tree;

use std::io::Write;

pub use canonical::{
    classify_walk, enumerate_canonical_walks, tree_pair_walks, CanonicalWalk, WalkClass,
    WalkGraph, WalkTag, MAX_WALK_LENGTH,
};
pub use dyck::{dyck_bijection, dyck_paths, MAX_DYCK_LENGTH};
pub use oracle::{
    exact_trace_moment, exact_trace_moment_by_walk, exhaustive_trace_moment, WalkContribution,
    EXHAUSTIVE_LIMIT, ORACLE_MAX_K, ORACLE_MAX_N,
};
pub use tree::{
    all_maps_sum, moment_prediction, tree_injection_sum, uniform_tree_fraction, MomentPrediction,
    Tree, TreeSumResult, EXACT_ASSIGNMENT_LIMIT,
};

use crate::error::{io_err, Result};

/// Every canonical walk of length `k` as CSV rows
/// `k, t, seq, class, tree_edges` (`seq` dash-separated, tree edges as
/// `a-b` pairs separated by `;`, empty unless the walk is a tree pair).
pub fn write_census_csv<W: Write>(k: usize, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["k", "t", "seq", "class", "tree_edges"])?;
    for walk in enumerate_canonical_walks(k)?.into_iter().flatten() {
        let class = classify_walk(&walk);
        let seq: Vec<String> = walk.seq().iter().map(|c| c.to_string()).collect();
        let edges = if class.tag == WalkTag::TreePair {
            class
                .graph
                .edges
                .iter()
                .map(|((a, b), _)| format!("{a}-{b}"))
                .collect::<Vec<_>>()
                .join(";")
        } else {
            String::new()
        };
        w.write_record([
            k.to_string(),
            walk.t().to_string(),
            seq.join("-"),
            class.tag.to_string(),
            edges,
        ])?;
    }
    w.flush().map_err(io_err("<csv>"))?;
    Ok(())
}

/// Walk counts by vertex count and class for length `k`.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct CensusRow {
    pub k: usize,
    pub t: usize,
    pub walks: usize,
    pub zeroed_out: usize,
    pub tree_pair: usize,
    pub sub_leading: usize,
}

pub fn census(k: usize) -> Result<Vec<CensusRow>> {
    Ok(enumerate_canonical_walks(k)?
        .iter()
        .enumerate()
        .map(|(idx, walks)| {
            let mut row = CensusRow {
                k,
                t: idx + 1,
                walks: walks.len(),
                zeroed_out: 0,
                tree_pair: 0,
                sub_leading: 0,
            };
            for w in walks {
                match classify_walk(w).tag {
                    WalkTag::ZeroedOut => row.zeroed_out += 1,
                    WalkTag::TreePair => row.tree_pair += 1,
                    WalkTag::SubLeading => row.sub_leading += 1,
                }
            }
            row
        })
        .collect())
}
