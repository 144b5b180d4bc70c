use serde::{Deserialize, Serialize};

use super::canonical::{classify_walk, enumerate_canonical_walks, CanonicalWalk, WalkTag};
use crate::ensemble::{EnsembleSpec, MatrixSample};
use crate::error::{Error, Result};
use crate::metrics::compensated_sum;

pub const ORACLE_MAX_N: usize = 12;
pub const ORACLE_MAX_K: usize = 8;

/// `E[w_ij^m]` for every entry and `m <= k`, row-major by `(i, j)`.
struct MomentTable {
    n: usize,
    k: usize,
    data: Vec<f64>,
}

impl MomentTable {
    fn new(spec: &EnsembleSpec, k: usize) -> Result<Self> {
        let n = spec.n();
        let mut data = Vec::with_capacity(n * n * (k + 1));
        for i in 0..n {
            for j in 0..n {
                let law = spec.law_at(i, j);
                if law.atoms().is_none() || !law.is_real() {
                    return Err(Error::UnsupportedLaw("exact trace moments"));
                }
                for m in 0..=k {
                    data.push(law.raw_moment(m as u32)?);
                }
            }
        }
        Ok(Self { n, k, data })
    }

    #[inline]
    fn get(&self, i: usize, j: usize, m: usize) -> f64 {
        self.data[(i * self.n + j) * (self.k + 1) + m]
    }
}

/// Contribution of one canonical walk to `(1/n) E tr W^k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkContribution {
    pub walk: CanonicalWalk,
    pub tag: WalkTag,
    pub value: f64,
}

fn guard(spec: &EnsembleSpec, k: usize) -> Result<()> {
    let n = spec.n();
    if n > ORACLE_MAX_N || k == 0 || k > ORACLE_MAX_K {
        return Err(Error::SizeGuard(format!(
            "exact trace moments need n <= {ORACLE_MAX_N} and 1 <= k <= {ORACLE_MAX_K}, got n = {n}, k = {k}"
        )));
    }
    Ok(())
}

/// Sum over injective labelings of the walk's vertices of
/// `prod_edges E[w^{m_e}]`.
fn labeled_sum(walk: &CanonicalWalk, table: &MomentTable) -> f64 {
    let t = walk.t();
    // edges grouped by their later endpoint, so each factor is applied as
    // soon as both ends are labeled
    let mut closing: Vec<Vec<(usize, usize)>> = vec![Vec::new(); t + 1];
    for ((a, b), m) in walk.edge_multiplicities() {
        closing[b].push((a, m));
    }
    let mut label = vec![0usize; t + 1];
    let mut used = vec![false; table.n];

    fn go(
        v: usize,
        weight: f64,
        closing: &[Vec<(usize, usize)>],
        label: &mut [usize],
        used: &mut [bool],
        table: &MomentTable,
    ) -> f64 {
        if v == closing.len() {
            return weight;
        }
        let mut total = 0.0;
        for i in 0..table.n {
            if used[i] {
                continue;
            }
            label[v] = i;
            let mut w = weight;
            for &(a, m) in &closing[v] {
                w *= table.get(label[a], i, m);
            }
            if w == 0.0 {
                continue;
            }
            used[i] = true;
            total += go(v + 1, w, closing, label, used, table);
            used[i] = false;
        }
        total
    }

    go(1, 1.0, &closing, &mut label, &mut used, table)
}

/// `(1/n) E tr W^k` split by canonical walk, in enumeration order.
///
/// Needs real discrete entry laws (two-point, Rademacher, zero or their
/// truncations), `n <= 12` and `k <= 8`.
pub fn exact_trace_moment_by_walk(spec: &EnsembleSpec, k: usize) -> Result<Vec<WalkContribution>> {
    guard(spec, k)?;
    let table = MomentTable::new(spec, k)?;
    let nf = spec.n() as f64;
    Ok(enumerate_canonical_walks(k)?
        .into_iter()
        .flatten()
        .map(|walk| {
            let value = labeled_sum(&walk, &table) / nf;
            let tag = classify_walk(&walk).tag;
            WalkContribution { walk, tag, value }
        })
        .collect())
}

/// Exact `(1/n) E tr W^k` from the walk expansion.
pub fn exact_trace_moment(spec: &EnsembleSpec, k: usize) -> Result<f64> {
    Ok(compensated_sum(
        exact_trace_moment_by_walk(spec, k)?.iter().map(|c| c.value),
    ))
}

/// Largest number of joint atom assignments [`exhaustive_trace_moment`]
/// will visit.
pub const EXHAUSTIVE_LIMIT: u64 = 1 << 22;

/// `(1/n) E tr W^k` by visiting every joint assignment of the upper
/// triangle's atoms. Independent of the walk machinery; used as its check.
pub fn exhaustive_trace_moment(spec: &EnsembleSpec, k: u32) -> Result<f64> {
    let n = spec.n();
    let mut slots: Vec<(usize, usize, Vec<(f64, f64)>)> = Vec::new();
    let mut combos: u64 = 1;
    for i in 0..n {
        for j in i..n {
            let law = spec.law_at(i, j);
            let atoms = match law.atoms() {
                Some(a) if law.is_real() => a.iter().map(|a| (a.value.re, a.prob)).collect::<Vec<_>>(),
                _ => return Err(Error::UnsupportedLaw("exhaustive trace moments")),
            };
            combos = combos.saturating_mul(atoms.len() as u64);
            slots.push((i, j, atoms));
        }
    }
    if combos > EXHAUSTIVE_LIMIT {
        return Err(Error::SizeGuard(format!("{combos} atom assignments")));
    }
    let mut choice = vec![0usize; slots.len()];
    let mut terms = Vec::with_capacity(combos as usize);
    loop {
        let mut data = vec![0.0; n * n];
        let mut prob = 1.0;
        for (s, &(i, j, ref atoms)) in slots.iter().enumerate() {
            let (v, p) = atoms[choice[s]];
            data[i * n + j] = v;
            data[j * n + i] = v;
            prob *= p;
        }
        let m = MatrixSample::from_real(n, data)?;
        terms.push(prob * m.trace_power(k) / n as f64);
        let mut s = 0;
        loop {
            if s == slots.len() {
                return Ok(compensated_sum(terms));
            }
            choice[s] += 1;
            if choice[s] < slots[s].2.len() {
                break;
            }
            choice[s] = 0;
            s += 1;
        }
    }
}
