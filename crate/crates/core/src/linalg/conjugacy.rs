//! Conjugacy classes of matrices: Weyr characteristics and intertwiners.

use num_complex::Complex64;

use super::spectral::{spectral_decompose, SpectralData};
use super::{
    check_matrix, check_same_dim, identity, null_space, random, rank, rcond, singular_values, unvec,
    CMatrix, CVector,
};
use crate::error::Result;
use crate::tolerance::{DEFAULT_TRIALS, INVERTIBLE_RCOND};

#[derive(Debug, Clone)]
pub enum ConjugacyVerdict {
    /// Same class; `witness * m1 = m2 * witness` with `witness` invertible.
    EqualClass { witness: CMatrix, residual: f64 },
    /// Same clustered spectrum and Weyr data, but no invertible intertwiner
    /// was found in the sampled solution space.
    EqualClassNoWitness,
    Distinct { reason: String },
}

impl ConjugacyVerdict {
    pub fn is_equal_class(&self) -> bool {
        !matches!(self, ConjugacyVerdict::Distinct { .. })
    }

    pub fn witness(&self) -> Option<&CMatrix> {
        match self {
            ConjugacyVerdict::EqualClass { witness, .. } => Some(witness),
            _ => None,
        }
    }
}

/// Weyr characteristic of one cluster: `w_j = rank(T^{j-1}) - rank(T^j)` for
/// `T = block - lambda I`, stopping at the first zero.
pub(crate) fn cluster_weyr(block: &CMatrix, lambda: Complex64, tol: f64) -> Vec<usize> {
    let m = block.nrows();
    let t = block - identity(m) * lambda;
    let scale = t.norm().max(1.0);
    let mut out = Vec::new();
    let mut prev = m;
    let mut power = identity(m);
    for j in 1..=m {
        power = &power * &t;
        let threshold = tol * j as f64 * scale.powi(j as i32 - 1);
        let r = rank(&power, threshold);
        if prev == r {
            break;
        }
        out.push(prev - r);
        prev = r;
        if r == 0 {
            break;
        }
    }
    out
}

/// Clustered eigenvalues of `m` with the Weyr characteristic of each.
pub fn weyr_characteristic(m: &CMatrix, tol: f64) -> Result<Vec<(Complex64, Vec<usize>)>> {
    let sd = spectral_decompose(m, tol)?;
    Ok(weyr_from_spectral(&sd))
}

pub(crate) fn weyr_from_spectral(sd: &SpectralData) -> Vec<(Complex64, Vec<usize>)> {
    sd.clusters
        .iter()
        .map(|c| (c.eigenvalue, cluster_weyr(&c.schur_block, c.eigenvalue, sd.tol)))
        .collect()
}

/// Relative intertwining residual `||g m1 - m2 g|| / ||m2 g||`.
pub fn intertwining_residual(g: &CMatrix, m1: &CMatrix, m2: &CMatrix) -> f64 {
    let lhs = g * m1;
    let rhs = m2 * g;
    let denom = rhs.norm().max(lhs.norm()).max(f64::MIN_POSITIVE);
    (lhs - rhs).norm() / denom
}

/// Compares conjugacy classes and, for equal classes, searches for an
/// intertwiner `g` with `g m1 g^{-1} = m2`. Randomized with seed 0.
pub fn conjugacy_test(m1: &CMatrix, m2: &CMatrix, tol: f64) -> Result<ConjugacyVerdict> {
    conjugacy_test_seeded(m1, m2, tol, 0, DEFAULT_TRIALS)
}

pub fn conjugacy_test_seeded(
    m1: &CMatrix,
    m2: &CMatrix,
    tol: f64,
    seed: u64,
    trials: usize,
) -> Result<ConjugacyVerdict> {
    let n = check_matrix(m1, "conjugacy_test")?;
    check_matrix(m2, "conjugacy_test")?;
    check_same_dim(m1, m2)?;
    let sd1 = spectral_decompose(m1, tol)?;
    let sd2 = spectral_decompose(m2, tol)?;
    let w1 = weyr_from_spectral(&sd1);
    let w2 = weyr_from_spectral(&sd2);
    if w1.len() != w2.len() {
        return Ok(ConjugacyVerdict::Distinct {
            reason: format!("{} vs {} distinct eigenvalues", w1.len(), w2.len()),
        });
    }
    let mut used = vec![false; w2.len()];
    for (lambda, weyr) in &w1 {
        let hit = w2
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .min_by(|a, b| (a.1 .0 - lambda).norm().total_cmp(&(b.1 .0 - lambda).norm()));
        let Some((k, (mu, weyr2))) = hit else {
            return Ok(ConjugacyVerdict::Distinct {
                reason: format!("no eigenvalue matching {lambda}"),
            });
        };
        if (mu - lambda).norm() > 2.0 * tol {
            return Ok(ConjugacyVerdict::Distinct {
                reason: format!("eigenvalue {:.6} has no partner within tolerance", lambda),
            });
        }
        if weyr != weyr2 {
            return Ok(ConjugacyVerdict::Distinct {
                reason: format!("Weyr characteristics {weyr:?} and {weyr2:?} differ at {:.6}", lambda),
            });
        }
        used[k] = true;
    }

    let centralizer_dim: usize = w1.iter().flat_map(|(_, w)| w.iter().map(|x| x * x)).sum();
    match find_intertwiner(m1, m2, n, centralizer_dim, tol, seed, trials) {
        Some((witness, residual)) => Ok(ConjugacyVerdict::EqualClass { witness, residual }),
        None => Ok(ConjugacyVerdict::EqualClassNoWitness),
    }
}

/// Random invertible element of `{g : g m1 = m2 g}`, whose dimension is
/// `dim` when the classes agree.
fn find_intertwiner(
    m1: &CMatrix,
    m2: &CMatrix,
    n: usize,
    dim: usize,
    tol: f64,
    seed: u64,
    trials: usize,
) -> Option<(CMatrix, f64)> {
    let id = identity(n);
    let r = intertwining_residual(&id, m1, m2);
    if r < tol {
        return Some((id, r));
    }
    // vec(g m1 - m2 g) = (m1^T (x) I - I (x) m2) vec(g)
    let k = m1.transpose().kronecker(&id) - id.kronecker(m2);
    let sv = singular_values(&k);
    let kernel_threshold = sv
        .get(sv.len().saturating_sub(dim))
        .copied()
        .unwrap_or(0.0)
        .max(0.0);
    let kernel: Vec<CVector> = null_space(&k, kernel_threshold * (1.0 + 1e-12));
    if kernel.is_empty() {
        return None;
    }
    let mut rng = random::rng(seed);
    let mut best: Option<(CMatrix, f64, f64)> = None;
    for _ in 0..trials.max(1) {
        let mut v = CVector::zeros(n * n);
        for b in &kernel {
            v += b * random::complex_unit(&mut rng);
        }
        let g = unvec(&v, n);
        let g = &g / Complex64::new(g.norm().max(f64::MIN_POSITIVE), 0.0);
        let rc = rcond(&g);
        let res = intertwining_residual(&g, m1, m2);
        if rc > INVERTIBLE_RCOND && res < tol {
            if best.as_ref().is_none_or(|b| rc > b.2) {
                best = Some((g, res, rc));
            }
            if rc > 1e-3 {
                break;
            }
        }
    }
    best.map(|(g, res, _)| (g, res))
}
