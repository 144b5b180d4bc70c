//! Dense Hermitian eigenvalues.
//!
//! Two interchangeable solvers meet the same contract: all `n` eigenvalues
//! with power sums accurate to `1e-7 n ||W||^k` for `k <= 8`.
//!
//! * [`EigenSolver::Reference`]: Householder reduction to tridiagonal form
//!   followed by implicit-shift QL. Complex Hermitian input is handled through
//!   the real symmetric embedding `[[A, -B], [B, A]]` of `A + iB`, whose
//!   spectrum is that of `A + iB` with every eigenvalue doubled.
//! * [`EigenSolver::Faer`]: the blocked self-adjoint solver of `faer`, run
//!   sequentially so results do not depend on the thread count.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self, ComputeEigenvectors};
use faer::{c64, Par};
use faer::{diag::Diag, MatRef};

use crate::ensemble::{Entries, MatrixSample};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EigenSolver {
    Reference,
    #[default]
    Faer,
}

/// Eigenvalues in no particular order.
pub(crate) fn solve(m: &MatrixSample, solver: EigenSolver) -> Result<Vec<f64>> {
    m.check_hermitian()?;
    match solver {
        EigenSolver::Reference => reference(m),
        EigenSolver::Faer => with_faer(m),
    }
}

fn with_faer(m: &MatrixSample) -> Result<Vec<f64>> {
    let n = m.n();
    if n == 0 {
        return Ok(Vec::new());
    }
    let par = Par::Seq;
    match m.entries() {
        Entries::Real(data) => {
            let a = MatRef::from_row_major_slice(data, n, n);
            let mut s = Diag::<f64>::zeros(n);
            let mut buf = MemBuffer::new(evd::self_adjoint_evd_scratch::<f64>(
                n,
                ComputeEigenvectors::No,
                par,
                Default::default(),
            ));
            evd::self_adjoint_evd(a, s.as_mut(), None, par, MemStack::new(&mut buf), Default::default())
                .map_err(|_| Error::NoConvergence)?;
            Ok(s.column_vector().iter().copied().collect())
        }
        Entries::Complex(data) => {
            let a = MatRef::from_row_major_slice(data.as_slice(), n, n);
            let mut s = Diag::<c64>::zeros(n);
            let mut buf = MemBuffer::new(evd::self_adjoint_evd_scratch::<c64>(
                n,
                ComputeEigenvectors::No,
                par,
                Default::default(),
            ));
            evd::self_adjoint_evd(a, s.as_mut(), None, par, MemStack::new(&mut buf), Default::default())
                .map_err(|_| Error::NoConvergence)?;
            Ok(s.column_vector().iter().map(|z| z.re).collect())
        }
    }
}

fn reference(m: &MatrixSample) -> Result<Vec<f64>> {
    let n = m.n();
    match m.entries() {
        Entries::Real(data) => symmetric_eigenvalues(data.clone(), n),
        Entries::Complex(data) => {
            let big = 2 * n;
            let mut e = vec![0.0; big * big];
            for i in 0..n {
                for j in 0..n {
                    let z = data[i * n + j];
                    e[i * big + j] = z.re;
                    e[(i + n) * big + (j + n)] = z.re;
                    e[i * big + (j + n)] = -z.im;
                    e[(i + n) * big + j] = z.im;
                }
            }
            let mut vals = symmetric_eigenvalues(e, big)?;
            vals.sort_by(|a, b| b.total_cmp(a));
            Ok(vals.into_iter().step_by(2).collect())
        }
    }
}

/// Eigenvalues of a real symmetric row-major matrix (consumed).
pub fn symmetric_eigenvalues(mut a: Vec<f64>, n: usize) -> Result<Vec<f64>> {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return Ok(Vec::new());
    }
    let (mut d, mut e) = tridiagonalize(&mut a, n);
    tridiagonal_ql(&mut d, &mut e)?;
    Ok(d)
}

/// Householder reduction of the lower triangle. Returns the diagonal and the
/// subdiagonal, `e[i]` coupling rows `i - 1` and `i` (`e[0] = 0`).
fn tridiagonalize(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    let idx = |i: usize, j: usize| i * n + j;
    for i in (1..n).rev() {
        let l = i - 1;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| a[idx(i, k)].abs()).sum();
            if scale == 0.0 {
                e[i] = a[idx(i, l)];
                continue;
            }
            let mut h = 0.0;
            for k in 0..=l {
                a[idx(i, k)] /= scale;
                h += a[idx(i, k)] * a[idx(i, k)];
            }
            let f = a[idx(i, l)];
            let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
            e[i] = scale * g;
            h -= f * g;
            a[idx(i, l)] = f - g;
            // p = A u / h, stored in e[0..=l]
            let mut f = 0.0;
            for j in 0..=l {
                let mut g = 0.0;
                for k in 0..=j {
                    g += a[idx(j, k)] * a[idx(i, k)];
                }
                for k in j + 1..=l {
                    g += a[idx(k, j)] * a[idx(i, k)];
                }
                e[j] = g / h;
                f += e[j] * a[idx(i, j)];
            }
            let hh = f / (h + h);
            for j in 0..=l {
                let f = a[idx(i, j)];
                let g = e[j] - hh * f;
                e[j] = g;
                for k in 0..=j {
                    a[idx(j, k)] -= f * e[k] + g * a[idx(i, k)];
                }
            }
        } else {
            e[i] = a[idx(i, l)];
        }
    }
    for (i, di) in d.iter_mut().enumerate() {
        *di = a[idx(i, i)];
    }
    (d, e)
}

/// Implicit QL with Wilkinson-type shifts on a symmetric tridiagonal matrix.
/// Overwrites `d` with the eigenvalues.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NoConvergence);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
