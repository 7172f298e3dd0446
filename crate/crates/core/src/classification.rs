//! Monodromy data `(M, h, A)`: validation, the Levelt normal form functor,
//! separating invariants and equivalence testing.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::grading::{classify_integer, intertwiner_from_grading, IntegerClass, ResidualCheck, WeightGrading};
use crate::jordan::additive_jc;
use crate::linalg::{
    check_matrix, check_same_dim, cluster_weyr, column_stack, commutator, conjugacy_test_seeded,
    identity, intertwining_residual, inverse, mat_pow, nilpotent_log, null_space, random, rcond,
    CMatrix, ConjugacyVerdict, SpectralData, TWO_PI_I,
};
use crate::local::PolyConnection;
use crate::tolerance::INVERTIBLE_RCOND;

/// Trivialized monodromy datum: monodromy `m`, torsor representative `h`
/// and residue `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonodromyDatum {
    pub m: CMatrix,
    pub h: CMatrix,
    pub a: CMatrix,
}

impl MonodromyDatum {
    pub fn new(m: CMatrix, h: CMatrix, a: CMatrix) -> Result<Self> {
        check_matrix(&m, "datum M")?;
        check_matrix(&h, "datum h")?;
        check_matrix(&a, "datum A")?;
        check_same_dim(&m, &h)?;
        check_same_dim(&m, &a)?;
        Ok(MonodromyDatum { m, h, a })
    }

    /// `(exp(2 pi i A), I, A)`.
    pub fn trivial(a: CMatrix) -> Result<Self> {
        let m = crate::linalg::mat_exp(&(&a * TWO_PI_I))?;
        let n = a.nrows();
        Self::new(m, identity(n), a)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    /// `M' = h^{-1} M h`.
    pub fn reduced(&self) -> Result<CMatrix> {
        Ok(inverse(&self.h)? * &self.m * &self.h)
    }

    /// The datum whose reduced monodromy is `g M' g^{-1}`, for `g` in
    /// `C(A) ⋉ U_N(S)`.
    pub fn act(&self, g: &CMatrix) -> Result<Self> {
        let g_inv = inverse(g)?;
        Self::new(self.m.clone(), &self.h * g_inv, self.a.clone())
    }
}

/// Grading by `S`, and `exp(±2 pi i S)`, from the spectral data of `A`.
struct ResidueData {
    spectral: SpectralData,
    grading: WeightGrading,
    n: CMatrix,
    e: CMatrix,
    e_inv: CMatrix,
}

impl ResidueData {
    fn new(a: &CMatrix, tol: f64) -> Result<Self> {
        let jc = additive_jc(a, tol)?;
        let grading = WeightGrading::from_spectral(&jc.spectral)?;
        let e = jc.spectral.spectral_function(|l| (l * TWO_PI_I).exp());
        let e_inv = jc.spectral.spectral_function(|l| (-l * TWO_PI_I).exp());
        Ok(ResidueData {
            spectral: jc.spectral,
            grading,
            n: jc.n,
            e,
            e_inv,
        })
    }

    /// Components of `x` at integer weights `>= 0`, and the norm of the rest.
    fn nonnegative_split(&self, x: &CMatrix) -> Result<(Vec<(i64, CMatrix)>, f64)> {
        let (parts, rest) = self.grading.integer_split(x)?;
        let mut forbidden = rest;
        let mut kept = Vec::new();
        for (k, c) in parts {
            if k < 0 {
                forbidden += c;
            } else {
                kept.push((k, c));
            }
        }
        Ok((kept, forbidden.norm()))
    }
}

/// Per-condition residuals of [`validate_datum`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatumReport {
    /// Weight support of `M'` in the nonnegative integers.
    pub support: ResidualCheck,
    /// `chi(M') = exp(2 pi i A)`.
    pub chi: ResidualCheck,
    /// Semisimple part of `M'` equal to `exp(2 pi i S)`.
    pub semisimple: ResidualCheck,
}

impl DatumReport {
    pub fn passed(&self) -> bool {
        self.support.passed && self.chi.passed && self.semisimple.passed
    }

    pub fn summary(&self) -> String {
        let row = |name: &str, c: &ResidualCheck| {
            format!(
                "{name}: residual {:.3e} (threshold {:.1e}) {}",
                c.residual,
                c.threshold,
                if c.passed { "pass" } else { "FAIL" }
            )
        };
        [
            row("support", &self.support),
            row("chi", &self.chi),
            row("semisimple", &self.semisimple),
        ]
        .join("; ")
    }
}

pub fn validate_datum(d: &MonodromyDatum, tol: f64) -> Result<DatumReport> {
    let rd = ResidueData::new(&d.a, tol)?;
    validate_with(d, &rd, tol)
}

fn validate_with(d: &MonodromyDatum, rd: &ResidueData, tol: f64) -> Result<DatumReport> {
    if rcond(&d.m) < 1e-14 {
        return Err(Error::Singular { context: "datum M" });
    }
    let mp = d.reduced()?;
    let scale = mp.norm().max(1.0);

    let (parts, forbidden) = rd.nonnegative_split(&mp)?;
    let support = ResidualCheck::new(forbidden / scale, tol);

    let chi_m = parts
        .iter()
        .find(|(k, _)| *k == 0)
        .map(|(_, c)| c.clone())
        .unwrap_or_else(|| CMatrix::zeros(d.dim(), d.dim()));
    let target = crate::linalg::mat_exp(&(&d.a * TWO_PI_I))?;
    let chi = ResidualCheck::new((chi_m - &target).norm() / target.norm().max(1.0), tol);

    let comm = commutator(&rd.e, &mp).norm() / (rd.e.norm() * mp.norm()).max(1.0);
    let x = &rd.e_inv * &mp - identity(d.dim());
    let n = d.dim();
    let nil = mat_pow(&x, n).norm() / x.norm().max(1.0).powi(n as i32);
    let semisimple = ResidualCheck::new(comm.max(nil), tol);

    Ok(DatumReport {
        support,
        chi,
        semisimple,
    })
}

/// Levelt normal form `A + sum_{i >= 1} N_i z^i` of a valid datum. The
/// residue coefficient is `d.a` itself.
pub fn functor_r(d: &MonodromyDatum, tol: f64) -> Result<PolyConnection> {
    let rd = ResidueData::new(&d.a, tol)?;
    let report = validate_with(d, &rd, tol)?;
    if !report.passed() {
        return Err(Error::ValidationFailure(report.summary()));
    }
    let n = d.dim();
    let mp = d.reduced()?;
    let log_u = nilpotent_log(&(&rd.e_inv * &mp), tol)?;
    let n_prime = log_u / TWO_PI_I;
    let scale = n_prime.norm().max(1.0);
    let (parts, leak) = rd.nonnegative_split(&n_prime)?;
    if leak > tol * scale {
        return Err(Error::WeightLeak { residual: leak });
    }
    let n0 = parts
        .iter()
        .find(|(k, _)| *k == 0)
        .map(|(_, c)| c.clone())
        .unwrap_or_else(|| CMatrix::zeros(n, n));
    let gap = (&n0 - &rd.n).norm();
    if gap > tol * scale.max(rd.n.norm()) {
        return Err(Error::ValidationFailure(format!(
            "weight-zero part of log of the unipotent part differs from the nilpotent part of A by {gap:.3e}"
        )));
    }
    let degree = parts
        .iter()
        .filter(|(k, c)| *k > 0 && c.norm() > tol * scale)
        .map(|(k, _)| *k as usize)
        .max()
        .unwrap_or(0);
    let mut coeffs = vec![CMatrix::zeros(n, n); degree + 1];
    coeffs[0] = d.a.clone();
    for (k, c) in parts {
        let k = k as usize;
        if k > 0 && k <= degree && c.norm() > tol * scale {
            coeffs[k] = c;
        }
    }
    PolyConnection::new(coeffs)
}

/// Conjugation invariants of a datum under `C(A) ⋉ U_N(S)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DatumInvariants {
    /// Clustered eigenvalues of `A` with multiplicities.
    pub residue_spectrum: Vec<(Complex64, usize)>,
    /// Eigenvalues `mu` of `M` with the Weyr characteristic of `M` at `mu`.
    pub monodromy_weyr: Vec<(Complex64, Vec<usize>)>,
    /// `D_k` for `k = 1, 2, ...`: the dimension by which
    /// `N' = log(M'_u) / (2 pi i)` raises the filtration `W_lambda` by at
    /// least `k` steps, summed over the eigenvalues `lambda` of `S`.
    pub weight_profile: Vec<usize>,
}

impl DatumInvariants {
    /// Short human-readable form, e.g. `Weyr {1: [1, 1]}, profile [1]`.
    pub fn describe(&self) -> String {
        let weyr: Vec<String> = self
            .monodromy_weyr
            .iter()
            .map(|(mu, w)| format!("{}: {:?}", fmt_complex(*mu), w))
            .collect();
        format!("Weyr {{{}}}, profile {:?}", weyr.join(", "), self.weight_profile)
    }

    pub fn agrees_with(&self, other: &DatumInvariants, tol: f64) -> bool {
        let close = |a: Complex64, b: Complex64| (a - b).norm() <= tol * a.norm().max(1.0);
        self.residue_spectrum.len() == other.residue_spectrum.len()
            && self
                .residue_spectrum
                .iter()
                .zip(&other.residue_spectrum)
                .all(|(a, b)| close(a.0, b.0) && a.1 == b.1)
            && self.monodromy_weyr.len() == other.monodromy_weyr.len()
            && self
                .monodromy_weyr
                .iter()
                .zip(&other.monodromy_weyr)
                .all(|(a, b)| close(a.0, b.0) && a.1 == b.1)
            && self.weight_profile == other.weight_profile
    }
}

/// Orthonormal basis of the column span, keeping singular values above `threshold`.
fn orth(m: &CMatrix, threshold: f64) -> CMatrix {
    if m.ncols() == 0 {
        return m.clone();
    }
    let svd = crate::linalg::svd(m);
    let keep = svd.s.iter().filter(|&&s| s > threshold).count();
    svd.u.columns(0, keep).into_owned()
}

fn hstack(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.columns_mut(0, a.ncols()).copy_from(a);
    out.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    out
}

fn intersection_dim(x: &CMatrix, y: &CMatrix, threshold: f64) -> usize {
    let joint = orth(&hstack(x, y), threshold).ncols();
    (x.ncols() + y.ncols()).saturating_sub(joint)
}

pub fn datum_invariants(d: &MonodromyDatum, tol: f64) -> Result<DatumInvariants> {
    let rd = ResidueData::new(&d.a, tol)?;
    let mp = d.reduced()?;
    let eig = rd.grading.eigenvalues.clone();
    let k = eig.len();
    let residue_spectrum = rd
        .spectral
        .clusters
        .iter()
        .map(|c| (c.eigenvalue, c.multiplicity))
        .collect();

    // offset[i][j] = Some(k) when lambda_j - lambda_i = k is an integer.
    let mut offset = vec![vec![None; k]; k];
    for i in 0..k {
        for j in 0..k {
            if let IntegerClass::Integer(v) = classify_integer(eig[j] - eig[i], tol)? {
                offset[i][j] = Some(v);
            }
        }
    }

    // Eigenvalues of exp(2 pi i S) group the clusters whose lambdas differ
    // by integers; M' restricted to each group has that single eigenvalue.
    let mut monodromy_weyr = Vec::new();
    let mut seen = vec![false; k];
    for i in 0..k {
        if seen[i] {
            continue;
        }
        let group: Vec<usize> = (0..k).filter(|&j| offset[i][j].is_some()).collect();
        for &j in &group {
            seen[j] = true;
        }
        let cols: Vec<CMatrix> = group.iter().map(|&j| rd.grading.cluster_basis(j)).collect();
        let rows: Vec<CMatrix> = group.iter().map(|&j| rd.grading.cluster_dual(j)).collect();
        let v = cols.iter().skip(1).fold(cols[0].clone(), |acc, c| hstack(&acc, c));
        let w = rows
            .iter()
            .skip(1)
            .fold(rows[0].clone(), |acc, r| hstack(&acc.transpose(), &r.transpose()).transpose());
        let mu = (eig[i] * TWO_PI_I).exp();
        let restricted = &w * &mp * &v;
        monodromy_weyr.push((mu, cluster_weyr(&restricted, mu, tol)));
    }

    let n_prime = nilpotent_log(&(&rd.e_inv * &mp), tol)? / TWO_PI_I;
    let threshold = tol * n_prime.norm().max(1.0);
    // W(i, s) = sum of eigenspaces lambda_j with lambda_j - lambda_i >= s.
    let filtration = |i: usize, s: i64| -> CMatrix {
        let cols: Vec<CMatrix> = (0..k)
            .filter(|&j| offset[i][j].is_some_and(|v| v >= s))
            .map(|j| rd.grading.cluster_basis(j))
            .collect();
        match cols.split_first() {
            None => CMatrix::zeros(d.dim(), 0),
            Some((first, rest)) => orth(&rest.iter().fold(first.clone(), |acc, c| hstack(&acc, c)), tol),
        }
    };
    let max_weight = (0..k)
        .flat_map(|i| offset[i].iter().flatten().copied())
        .max()
        .unwrap_or(0)
        .max(0);
    let mut weight_profile = Vec::new();
    for step in 1..=max_weight {
        let mut total = 0;
        for i in 0..k {
            let image = orth(&(&n_prime * filtration(i, 0)), threshold);
            let upper = filtration(i, step);
            let inside = intersection_dim(&image, &upper, threshold);
            let lower = orth(&(&n_prime * &upper), threshold).ncols();
            total += inside.saturating_sub(lower);
        }
        weight_profile.push(total);
    }

    Ok(DatumInvariants {
        residue_spectrum,
        monodromy_weyr,
        weight_profile,
    })
}

#[derive(Debug, Clone)]
pub enum Equivalence {
    /// `witness` lies in `C(A) ⋉ U_N(S)` and conjugates the aligned reduced
    /// monodromy of the first datum to that of the second;
    /// `residue_alignment` conjugates `A_1` to `A_2`.
    Equivalent {
        witness: CMatrix,
        residue_alignment: CMatrix,
        residual: f64,
    },
    InequivalentCertified { reason: String },
    Undecided { reason: String },
}

impl Equivalence {
    pub fn label(&self) -> &'static str {
        match self {
            Equivalence::Equivalent { .. } => "equivalent",
            Equivalence::InequivalentCertified { .. } => "inequivalent",
            Equivalence::Undecided { .. } => "undecided",
        }
    }
}

pub fn equivalent(d1: &MonodromyDatum, d2: &MonodromyDatum, trials: usize, seed: u64, tol: f64) -> Result<Equivalence> {
    check_same_dim(&d1.m, &d2.m)?;
    let n = d1.dim();
    for d in [d1, d2] {
        let report = validate_datum(d, tol)?;
        if !report.passed() {
            return Err(Error::ValidationFailure(report.summary()));
        }
    }

    let g0 = if d1.a == d2.a {
        identity(n)
    } else {
        match conjugacy_test_seeded(&d1.a, &d2.a, tol, seed, trials)? {
            ConjugacyVerdict::EqualClass { witness, .. } => witness,
            ConjugacyVerdict::Distinct { reason } => {
                return Ok(Equivalence::InequivalentCertified {
                    reason: format!("residues are not conjugate: {reason}"),
                })
            }
            ConjugacyVerdict::EqualClassNoWitness => {
                return Ok(Equivalence::Undecided {
                    reason: "no invertible residue alignment found".into(),
                })
            }
        }
    };
    let g0_inv = inverse(&g0)?;
    let m1 = &g0 * d1.reduced()? * &g0_inv;
    let m2 = d2.reduced()?;
    let found = |x: CMatrix| -> Option<Equivalence> {
        let residual = intertwining_residual(&x, &m1, &m2);
        (rcond(&x) > INVERTIBLE_RCOND && residual < tol).then(|| Equivalence::Equivalent {
            witness: x,
            residue_alignment: g0.clone(),
            residual,
        })
    };
    if let Some(v) = found(identity(n)) {
        return Ok(v);
    }

    let rd = ResidueData::new(&d2.a, tol)?;
    let algebra = intertwiner_from_grading(&d2.a, &rd.grading)?;
    let images: Vec<CMatrix> = algebra.basis.iter().map(|b| b * &m1 - &m2 * b).collect();
    let scale = m1.norm().max(m2.norm()).max(1.0);
    let space: Vec<CMatrix> = if images.is_empty() {
        Vec::new()
    } else {
        null_space(&column_stack(&images), tol * scale)
            .into_iter()
            .map(|c| algebra.combine(c.as_slice()))
            .collect()
    };

    if !space.is_empty() {
        let mut rng = random::rng(seed);
        for _ in 0..trials {
            let x = space
                .iter()
                .fold(CMatrix::zeros(n, n), |acc, b| acc + b * random::complex_unit(&mut rng));
            if let Some(v) = found(x) {
                return Ok(v);
            }
        }
        // Deterministic grid of roots-of-unity coefficient vectors.
        let p = 2 * space.len() + 1;
        for j in 0..p {
            let x = space.iter().enumerate().fold(CMatrix::zeros(n, n), |acc, (k, b)| {
                let phase = std::f64::consts::TAU * ((j * (k + 1)) % p) as f64 / p as f64;
                acc + b * Complex64::from_polar(1.0, phase)
            });
            if let Some(v) = found(x) {
                return Ok(v);
            }
        }
    }

    let inv1 = datum_invariants(d1, tol)?;
    let inv2 = datum_invariants(d2, tol)?;
    if !inv1.agrees_with(&inv2, tol.sqrt()) {
        return Ok(Equivalence::InequivalentCertified {
            reason: format!(
                "invariants differ: {} vs {}",
                inv1.describe(),
                inv2.describe()
            ),
        });
    }
    Ok(Equivalence::Undecided {
        reason: format!(
            "no invertible intertwiner among {} sampled elements of a {}-dimensional solution space",
            trials + 2 * space.len() + 1,
            space.len()
        ),
    })
}

/// Random element of `C(A) ⋉ U_N(S)`: the exponential of a random element
/// of its Lie algebra, scaled to norm `scale`.
pub fn random_group_element<R: Rng>(rng: &mut R, a: &CMatrix, scale: f64, tol: f64) -> Result<CMatrix> {
    let algebra = crate::grading::intertwiner_algebra(a, tol)?;
    let x = algebra
        .basis
        .iter()
        .fold(CMatrix::zeros(a.nrows(), a.ncols()), |acc, b| acc + b * random::complex_unit(rng));
    let f = x.norm();
    let x = if f > 0.0 { x * Complex64::new(scale / f, 0.0) } else { x };
    crate::linalg::mat_exp(&x)
}

fn fmt_complex(z: Complex64) -> String {
    let clean = |x: f64| if x.abs() < 1e-12 { 0.0 } else { x };
    let (re, im) = (clean(z.re), clean(z.im));
    if im == 0.0 {
        format!("{re:.6}")
    } else {
        format!("{re:.6}{im:+.6}i")
    }
}
