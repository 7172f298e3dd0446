//! Dense complex matrix algebra: spectral decomposition, exponential,
//! unipotent logarithm and conjugacy testing.

mod conjugacy;
mod expm;
pub mod random;
pub(crate) mod spectral;

pub use conjugacy::{
    conjugacy_test, conjugacy_test_seeded, intertwining_residual, weyr_characteristic,
    ConjugacyVerdict,
};
pub(crate) use conjugacy::cluster_weyr;
pub use expm::{mat_exp, nilpotent_exp, nilpotent_log};
pub use spectral::{eigenvalues, spectral_decompose, Cluster, SpectralData};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::INVERTIBLE_RCOND;

/// Dense square complex matrix. Elements of GL(n, C) and gl(n, C) alike.
pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);
pub const TWO_PI_I: Complex64 = Complex64::new(0.0, std::f64::consts::TAU);

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Diagonal matrix from real entries.
pub fn diag_real(entries: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(
        entries.len(),
        entries.iter().map(|&x| c64(x, 0.0)),
    ))
}

pub fn diag(entries: &[Complex64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_column_slice(entries))
}

/// Elementary matrix `E_ij` (zero-based).
pub fn elementary(n: usize, i: usize, j: usize) -> CMatrix {
    let mut e = CMatrix::zeros(n, n);
    e[(i, j)] = c64(1.0, 0.0);
    e
}

/// Checks the `CMatrix` invariants: square with finite entries. Returns `n`.
pub fn check_matrix(m: &CMatrix, context: &'static str) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite { context });
    }
    Ok(m.nrows())
}

pub fn check_same_dim(a: &CMatrix, b: &CMatrix) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    Ok(())
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Thin singular value decomposition `m = u diag(s) v^*`, singular values
/// in descending order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    /// Least-squares solution of `m x = b` ignoring singular values at or
    /// below `threshold`.
    pub fn solve(&self, b: &CVector, threshold: f64) -> CVector {
        let mut x = CVector::zeros(self.v.nrows());
        for (i, &s) in self.s.iter().enumerate() {
            if s > threshold {
                x += self.v.column(i) * (self.u.column(i).dotc(b) / s);
            }
        }
        x
    }

    pub fn max(&self) -> f64 {
        self.s.first().copied().unwrap_or(0.0)
    }
}

/// Computed with faer: nalgebra's complex SVD can return factors that
/// reconstruct a rank-deficient input only to about 1e-4.
pub fn svd(m: &CMatrix) -> Svd {
    let (r, c) = m.shape();
    let k = r.min(c);
    if k == 0 {
        return Svd {
            u: CMatrix::zeros(r, 0),
            s: Vec::new(),
            v: CMatrix::zeros(c, 0),
        };
    }
    let f = faer::Mat::<Complex64>::from_fn(r, c, |i, j| m[(i, j)]);
    match f.thin_svd() {
        Ok(d) => {
            let (u, sv, v) = (d.U(), d.S().column_vector(), d.V());
            Svd {
                u: CMatrix::from_fn(r, k, |i, j| u[(i, j)]),
                s: (0..k).map(|i| sv[i].re).collect(),
                v: CMatrix::from_fn(c, k, |i, j| v[(i, j)]),
            }
        }
        Err(_) => Svd {
            u: CMatrix::zeros(r, k),
            s: vec![f64::NAN; k],
            v: CMatrix::zeros(c, k),
        },
    }
}

/// Singular values in descending order.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    svd(m).s
}

/// Number of singular values strictly above `threshold`.
pub fn rank(m: &CMatrix, threshold: f64) -> usize {
    singular_values(m).into_iter().filter(|&s| s > threshold).count()
}

/// Reciprocal 2-norm condition number `sigma_min / sigma_max` (0 for singular).
pub fn rcond(m: &CMatrix) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if hi > 0.0 => lo / hi,
        _ => 0.0,
    }
}

pub fn inverse(m: &CMatrix) -> Result<CMatrix> {
    let n = check_matrix(m, "inverse")?;
    if n == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    if rcond(m) < 1e-14 {
        return Err(Error::Singular { context: "inverse" });
    }
    m.clone()
        .try_inverse()
        .filter(is_finite)
        .ok_or(Error::Singular { context: "inverse" })
}

/// True when `m` is numerically invertible at the witness threshold.
pub fn is_invertible(m: &CMatrix) -> bool {
    rcond(m) > INVERTIBLE_RCOND
}

/// Orthonormal basis of the right null space, using singular values `<= threshold`.
///
/// Works for any shape: wide matrices are padded with zero rows so the thin
/// SVD returns a full right factor.
pub fn null_space(m: &CMatrix, threshold: f64) -> Vec<CVector> {
    let cols = m.ncols();
    if cols == 0 {
        return Vec::new();
    }
    let rows = m.nrows().max(cols);
    let mut padded = CMatrix::zeros(rows, cols);
    padded.view_mut((0, 0), m.shape()).copy_from(m);
    let d = svd(&padded);
    d.s.iter()
        .enumerate()
        .filter(|(_, &s)| !(s > threshold))
        .map(|(i, _)| d.v.column(i).into_owned())
        .collect()
}

/// Column-major vectorisation.
pub fn vec_of(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

pub fn unvec(v: &CVector, n: usize) -> CMatrix {
    CMatrix::from_column_slice(n, n, v.as_slice())
}

/// Stacks vectorised matrices as columns.
pub fn column_stack(ms: &[CMatrix]) -> CMatrix {
    let rows = ms.first().map_or(0, |m| m.len());
    let mut out = CMatrix::zeros(rows, ms.len());
    for (j, m) in ms.iter().enumerate() {
        out.column_mut(j).copy_from_slice(m.as_slice());
    }
    out
}

/// Coefficients `c_0 .. c_n` of the monic characteristic polynomial
/// `det(x I - M) = sum c_k x^k`, computed from the Schur eigenvalues.
pub fn char_poly(m: &CMatrix) -> Result<Vec<Complex64>> {
    let ev = eigenvalues(m)?;
    Ok(poly_from_roots(&ev))
}

pub fn poly_from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut coeffs = vec![c64(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
        for (k, &a) in coeffs.iter().enumerate() {
            next[k + 1] += a;
            next[k] -= a * r;
        }
        coeffs = next;
    }
    coeffs
}

/// Integer power by repeated multiplication (`k` is small in all uses).
pub fn mat_pow(m: &CMatrix, k: usize) -> CMatrix {
    let mut out = identity(m.nrows());
    for _ in 0..k {
        out = &out * m;
    }
    out
}

/// `Q X Q^{-1}` given both factors.
pub fn conjugate(q: &CMatrix, x: &CMatrix, q_inv: &CMatrix) -> CMatrix {
    q * x * q_inv
}

/// Relative distance `||a - b|| / max(1, ||b||)`.
pub fn rel_dist(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}
