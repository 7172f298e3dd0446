//! Clustered spectral decomposition.
//!
//! The matrix is brought to complex Schur form, eigenvalues are clustered by
//! single linkage at radius `tol`, the Schur form is reordered so each
//! cluster occupies a contiguous diagonal block, and the off-diagonal blocks
//! are removed by solving triangular Sylvester equations. The resulting
//! similarity `V` maps the block-diagonal form back to the input, so the
//! spectral projector of cluster `k` is `V[:, k] V^{-1}[k, :]`.

use std::ops::Range;

use nalgebra::Schur;
use num_complex::Complex64;

use super::{check_matrix, identity, CMatrix};
use crate::error::{Error, Result};

const SCHUR_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone)]
pub struct Cluster {
    pub eigenvalue: Complex64,
    pub multiplicity: usize,
    pub projector: CMatrix,
    /// Upper-triangular Schur block of the cluster (unitarily similar to the
    /// restriction of the input to its generalized eigenspace).
    pub schur_block: CMatrix,
    range: Range<usize>,
}

impl Cluster {
    /// Columns of [`SpectralData::basis`] spanning this generalized eigenspace.
    pub fn range(&self) -> Range<usize> {
        self.range.clone()
    }
}

#[derive(Debug, Clone)]
pub struct SpectralData {
    pub clusters: Vec<Cluster>,
    pub tol: f64,
    basis: CMatrix,
    dual: CMatrix,
}

impl SpectralData {
    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Columns adapted to the generalized eigenspaces, grouped by cluster.
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    /// Inverse of [`Self::basis`].
    pub fn dual(&self) -> &CMatrix {
        &self.dual
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.clusters.iter().map(|c| c.eigenvalue).collect()
    }

    /// `sum_k f(lambda_k) P_k`.
    pub fn spectral_function(&self, f: impl Fn(Complex64) -> Complex64) -> CMatrix {
        let n = self.dim();
        let mut d = CMatrix::zeros(n, n);
        for c in &self.clusters {
            let v = f(c.eigenvalue);
            for i in c.range() {
                d[(i, i)] = v;
            }
        }
        &self.basis * d * &self.dual
    }

    /// The semisimple part `sum_k lambda_k P_k`.
    pub fn semisimple_part(&self) -> CMatrix {
        self.spectral_function(|z| z)
    }

    /// Index of the cluster containing `z` within `tol`, if any.
    pub fn find(&self, z: Complex64) -> Option<usize> {
        self.clusters
            .iter()
            .position(|c| (c.eigenvalue - z).norm() <= self.tol)
    }
}

/// Eigenvalues (with multiplicity) from the complex Schur form.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    let (_, t) = schur(m)?;
    Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
}

fn schur(m: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let n = check_matrix(m, "schur")?;
    if n == 0 {
        return Ok((CMatrix::zeros(0, 0), CMatrix::zeros(0, 0)));
    }
    let (q, mut t) = Schur::try_new(m.clone(), f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or(Error::SchurFailure)?
        .unpack();
    for j in 0..n {
        for i in j + 1..n {
            t[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    if t.iter().chain(q.iter()).any(|z| !z.is_finite()) {
        return Err(Error::NonFinite { context: "schur" });
    }
    Ok((q, t))
}

/// Single-linkage clusters of `values` at radius `tol`; refuses when two
/// values from different clusters lie in `(tol, 2 tol]`.
///
/// Returns a cluster label per value, with labels ordered by the cluster mean
/// (real part, then imaginary part).
pub(crate) fn cluster_labels(values: &[Complex64], tol: f64) -> Result<(Vec<usize>, Vec<Complex64>)> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= tol {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| root(&mut parent, i)).collect();

    for i in 0..n {
        for j in i + 1..n {
            let d = (values[i] - values[j]).norm();
            if roots[i] != roots[j] && d <= 2.0 * tol {
                return Err(Error::ClusterAmbiguity {
                    a: values[i],
                    b: values[j],
                    distance: d,
                    tol,
                });
            }
        }
    }

    let mut distinct: Vec<usize> = roots.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let mut means: Vec<(usize, Complex64)> = distinct
        .iter()
        .map(|&r| {
            let members: Vec<Complex64> = (0..n).filter(|&i| roots[i] == r).map(|i| values[i]).collect();
            let mean = members.iter().sum::<Complex64>() / members.len() as f64;
            (r, mean)
        })
        .collect();
    means.sort_by(|a, b| a.1.re.total_cmp(&b.1.re).then(a.1.im.total_cmp(&b.1.im)));

    for (k, a) in means.iter().enumerate() {
        for b in &means[k + 1..] {
            let d = (a.1 - b.1).norm();
            if d <= 2.0 * tol {
                return Err(Error::ClusterAmbiguity {
                    a: a.1,
                    b: b.1,
                    distance: d,
                    tol,
                });
            }
        }
    }

    let labels = roots
        .iter()
        .map(|r| means.iter().position(|(root, _)| root == r).expect("root has a mean"))
        .collect();
    Ok((labels, means.into_iter().map(|(_, m)| m).collect()))
}

/// Swaps the adjacent diagonal entries `p`, `p + 1` of the triangular `t`
/// with a Givens rotation, updating the Schur vectors `q`.
fn swap_adjacent(t: &mut CMatrix, q: &mut CMatrix, p: usize) {
    let n = t.nrows();
    let a = t[(p, p)];
    let b = t[(p, p + 1)];
    let c = t[(p + 1, p + 1)];
    // Eigenvector of the 2x2 block for eigenvalue `c`.
    let (x, y) = (b, c - a);
    let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
    let (g1, g2) = (x / r, y / r);
    // G = [[g1, -conj(g2)], [g2, conj(g1)]]
    for j in 0..n {
        let u = t[(p, j)];
        let v = t[(p + 1, j)];
        t[(p, j)] = g1.conj() * u + g2.conj() * v;
        t[(p + 1, j)] = -g2 * u + g1 * v;
    }
    for i in 0..n {
        let u = t[(i, p)];
        let v = t[(i, p + 1)];
        t[(i, p)] = u * g1 + v * g2;
        t[(i, p + 1)] = -u * g2.conj() + v * g1.conj();
        let u = q[(i, p)];
        let v = q[(i, p + 1)];
        q[(i, p)] = u * g1 + v * g2;
        q[(i, p + 1)] = -u * g2.conj() + v * g1.conj();
    }
    t[(p + 1, p)] = Complex64::new(0.0, 0.0);
}

/// Solves `A X - X B = R` for upper-triangular `A`, `B` with disjoint spectra.
fn triangular_sylvester(a: &CMatrix, b: &CMatrix, r: &CMatrix) -> CMatrix {
    let p = a.nrows();
    let q = b.nrows();
    let mut x = CMatrix::zeros(p, q);
    for j in 0..q {
        let mut rhs = r.column(j).clone_owned();
        for l in 0..j {
            let blj = b[(l, j)];
            for i in 0..p {
                rhs[i] += x[(i, l)] * blj;
            }
        }
        let shift = b[(j, j)];
        for i in (0..p).rev() {
            let mut s = rhs[i];
            for k in i + 1..p {
                s -= a[(i, k)] * x[(k, j)];
            }
            x[(i, j)] = s / (a[(i, i)] - shift);
        }
    }
    x
}

/// Clustered eigenvalues of `m` with spectral projectors onto the
/// generalized eigenspaces.
pub fn spectral_decompose(m: &CMatrix, tol: f64) -> Result<SpectralData> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tol must be positive, got {tol}")));
    }
    let n = check_matrix(m, "spectral_decompose")?;
    let (mut q, mut t) = schur(m)?;
    let raw: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();
    let (mut labels, _) = cluster_labels(&raw, tol)?;

    // Bubble the diagonal into cluster order.
    let mut swapped = true;
    while swapped {
        swapped = false;
        for p in 0..n.saturating_sub(1) {
            if labels[p] > labels[p + 1] {
                swap_adjacent(&mut t, &mut q, p);
                labels.swap(p, p + 1);
                swapped = true;
            }
        }
    }

    let mut ranges: Vec<Range<usize>> = Vec::new();
    let mut start = 0;
    for p in 1..=n {
        if p == n || labels[p] != labels[start] {
            ranges.push(start..p);
            start = p;
        }
    }

    let blocks: Vec<CMatrix> = ranges
        .iter()
        .map(|r| t.view((r.start, r.start), (r.len(), r.len())).clone_owned())
        .collect();

    // Block-diagonalise: Y^{-1} T Y = diag(T_11, ..., T_KK).
    let mut y = identity(n);
    let mut y_inv = identity(n);
    for r in &ranges {
        let rest = r.end..n;
        if rest.is_empty() {
            break;
        }
        let a = t.view((r.start, r.start), (r.len(), r.len())).clone_owned();
        let b = t.view((rest.start, rest.start), (rest.len(), rest.len())).clone_owned();
        let c = t.view((r.start, rest.start), (r.len(), rest.len())).clone_owned();
        let x = triangular_sylvester(&a, &b, &(-c));
        let mut z = identity(n);
        let mut z_inv = identity(n);
        z.view_mut((r.start, rest.start), (r.len(), rest.len())).copy_from(&x);
        z_inv.view_mut((r.start, rest.start), (r.len(), rest.len())).copy_from(&(-&x));
        t = &z_inv * &t * &z;
        y = &y * &z;
        y_inv = &z_inv * &y_inv;
    }

    let basis = &q * &y;
    let dual = &y_inv * q.adjoint();
    if !super::is_finite(&basis) || !super::is_finite(&dual) {
        return Err(Error::NonFinite { context: "spectral projectors" });
    }

    let clusters = ranges
        .into_iter()
        .zip(blocks)
        .map(|(r, block)| {
            let mult = r.len();
            let eigenvalue = block.trace() / mult as f64;
            let projector = basis.columns(r.start, mult) * dual.rows(r.start, mult);
            Cluster {
                eigenvalue,
                multiplicity: mult,
                projector,
                schur_block: block,
                range: r,
            }
        })
        .collect();

    Ok(SpectralData {
        clusters,
        tol,
        basis,
        dual,
    })
}
